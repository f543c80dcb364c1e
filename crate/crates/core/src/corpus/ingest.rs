//! Ingestion of the supported input formats: COCO-style annotation JSON,
//! Visual-Genome-style augmentation, demographics CSV, caption TSV, and
//! system-output TSV.

use super::{
    BoundingBox, Corpus, CorpusKind, DemographicAnnotation, Gender, SkinTone, Stage, StageBundle,
};
use crate::error::{Error, Result};
use crate::scenegraph::{parse_caption, union_graphs, ResolvedWord, SceneGraph, SceneTuple};
use crate::wordnet::{normalize_lemma, Pos, Taxonomy};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

#[derive(Deserialize)]
struct CocoInstances {
    images: Vec<CocoImage>,
    #[serde(default)]
    annotations: Vec<CocoAnnotation>,
    #[serde(default)]
    categories: Vec<CocoCategory>,
}

#[derive(Deserialize)]
struct CocoImage {
    id: u64,
    width: u32,
    height: u32,
}

#[derive(Deserialize)]
struct CocoAnnotation {
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
}

#[derive(Deserialize)]
struct CocoCategory {
    id: u64,
    name: String,
}

#[derive(Deserialize)]
struct CocoCaptions {
    annotations: Vec<CocoCaptionRow>,
}

#[derive(Deserialize)]
struct CocoCaptionRow {
    id: u64,
    image_id: u64,
    caption: String,
}

/// Visual-Genome-style augmentation: per-image attribute and relationship
/// annotations carrying synset names (`lemma.pos.N`) or bare words.
#[derive(Deserialize)]
pub struct VgAugment {
    pub image_id: u64,
    #[serde(default)]
    pub attributes: Vec<VgAttribute>,
    #[serde(default)]
    pub relationships: Vec<VgRelationship>,
}

#[derive(Deserialize)]
pub struct VgAttribute {
    pub object: String,
    pub attribute: String,
}

#[derive(Deserialize)]
pub struct VgRelationship {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
}

fn resolve_word(key: &str, role: Pos, taxonomy: &Taxonomy) -> ResolvedWord {
    // Either a sense key like "cabinet.n.1" or a bare word.
    if let Ok(id) = taxonomy.resolve_sense_key(key, role) {
        let lemma = key
            .split('.')
            .next()
            .map(normalize_lemma)
            .filter(|l| !l.is_empty())
            .unwrap_or_else(|| normalize_lemma(key));
        // Bare words fall back to most-common-synset resolution semantics.
        return ResolvedWord {
            lemma,
            synset: Some(id),
            source_pos: id.pos,
        };
    }
    let lemma = normalize_lemma(key.split('.').next().unwrap_or(key));
    ResolvedWord {
        lemma,
        synset: None,
        source_pos: role,
    }
}

/// Ingests a COCO-style corpus: instance annotations plus captions, with
/// optional attribute/relationship augmentation and demographic
/// annotations. Stage-3 graphs are the union over each image's captions.
pub fn ingest_coco(
    instances_path: &Path,
    captions_path: &Path,
    vg_path: Option<&Path>,
    demographics_path: Option<&Path>,
    taxonomy: &Taxonomy,
) -> Result<Corpus> {
    let instances: CocoInstances = read_json(instances_path)?;
    let captions: CocoCaptions = read_json(captions_path)?;

    let mut category_names: BTreeMap<u64, String> = BTreeMap::new();
    for c in &instances.categories {
        category_names.insert(c.id, normalize_lemma(&c.name));
    }

    let mut dims: BTreeMap<u64, (u32, u32)> = BTreeMap::new();
    let mut bundles: BTreeMap<String, StageBundle> = BTreeMap::new();
    for img in &instances.images {
        if img.width == 0 || img.height == 0 {
            return Err(Error::Integrity(format!(
                "image {} has zero dimensions",
                img.id
            )));
        }
        dims.insert(img.id, (img.width, img.height));
        bundles.insert(
            img.id.to_string(),
            StageBundle {
                image_id: img.id.to_string(),
                width: Some(img.width),
                height: Some(img.height),
                stage1_boxes: Some(Vec::new()),
                ..StageBundle::default()
            },
        );
    }

    for ann in &instances.annotations {
        let Some((w, h)) = dims.get(&ann.image_id).copied() else {
            return Err(Error::Integrity(format!(
                "annotation references unknown image {}",
                ann.image_id
            )));
        };
        let label = category_names.get(&ann.category_id).cloned().ok_or_else(|| {
            Error::Integrity(format!("annotation references unknown category {}", ann.category_id))
        })?;
        let synset = taxonomy.most_common_synset(&label, Pos::Noun).ok();
        let b = BoundingBox {
            x: ann.bbox[0] / w as f64,
            y: ann.bbox[1] / h as f64,
            width: ann.bbox[2] / w as f64,
            height: ann.bbox[3] / h as f64,
            label,
            synset,
        };
        b.validate()?;
        bundles
            .get_mut(&ann.image_id.to_string())
            .expect("image known")
            .stage1_boxes
            .as_mut()
            .expect("initialized above")
            .push(b);
    }

    // Captions grouped per image, then unioned.
    let mut unknown = Vec::new();
    for row in &captions.annotations {
        let key = row.image_id.to_string();
        let Some(bundle) = bundles.get_mut(&key) else {
            unknown.push(row.image_id.to_string());
            continue;
        };
        bundle
            .stage3_captions
            .push((row.id.to_string(), row.caption.clone()));
    }
    if !unknown.is_empty() {
        unknown.sort();
        unknown.dedup();
        return Err(Error::Integrity(format!(
            "captions reference unknown images: {}",
            unknown.join(", ")
        )));
    }

    let mut warnings = Vec::new();
    for bundle in bundles.values_mut() {
        if bundle.stage3_captions.is_empty() {
            warnings.push(format!("image {} has no captions; stage 3 absent", bundle.image_id));
            continue;
        }
        bundle.stage3_captions.sort();
        let mut graphs = Vec::new();
        for (cid, text) in &bundle.stage3_captions {
            let parsed = parse_caption(text, taxonomy, cid);
            bundle.confidences.insert(cid.clone(), parsed.confidence);
            graphs.push(parsed.graph);
        }
        bundle.stage3_graph = Some(union_graphs(graphs.iter()));
    }

    if let Some(path) = vg_path {
        let rows: Vec<VgAugment> = read_json(path)?;
        for row in rows {
            let key = row.image_id.to_string();
            let bundle = bundles.get_mut(&key).ok_or_else(|| {
                Error::Integrity(format!("augmentation references unknown image {}", row.image_id))
            })?;
            let mut graph = SceneGraph::new();
            for a in &row.attributes {
                let subject = resolve_word(&a.object, Pos::Noun, taxonomy);
                let attribute = resolve_word(&a.attribute, Pos::Adj, taxonomy);
                graph.tuples.insert(SceneTuple::Object {
                    subject: subject.clone(),
                });
                graph.tuples.insert(SceneTuple::Attribute { subject, attribute });
            }
            for r in &row.relationships {
                let subject = resolve_word(&r.subject, Pos::Noun, taxonomy);
                let object = resolve_word(&r.object, Pos::Noun, taxonomy);
                let relation = resolve_word(&r.predicate, Pos::Verb, taxonomy);
                graph.tuples.insert(SceneTuple::Object {
                    subject: subject.clone(),
                });
                graph.tuples.insert(SceneTuple::Object {
                    subject: object.clone(),
                });
                graph.tuples.insert(SceneTuple::Relation {
                    subject,
                    relation,
                    object,
                });
            }
            bundle.stage1_tuples = Some(graph);
        }
    }

    if let Some(path) = demographics_path {
        ingest_demographics(path, &mut bundles)?;
    }

    Ok(Corpus {
        kind: CorpusKind::Coco,
        bundles,
        warnings,
    })
}

fn ingest_demographics(path: &Path, bundles: &mut BTreeMap<String, StageBundle>) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if lineno == 1 || line.trim().is_empty() {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 7 columns, got {}", fields.len()),
            ));
        }
        let bundle = bundles.get_mut(fields[0]).ok_or_else(|| {
            Error::Integrity(format!("demographics row for unknown image {}", fields[0]))
        })?;
        if bundle.demographics.is_some() {
            return Err(Error::Integrity(format!(
                "duplicate demographics for image {}",
                fields[0]
            )));
        }
        let gender = match fields[1] {
            "male" => Gender::Male,
            "female" => Gender::Female,
            "" | "unlabeled" => Gender::Unlabeled,
            other => {
                return Err(Error::parse(path, lineno, format!("bad gender {other:?}")));
            }
        };
        let skin_tone = match fields[2] {
            "darker" => SkinTone::Darker,
            "lighter" => SkinTone::Lighter,
            "" | "unlabeled" => SkinTone::Unlabeled,
            other => {
                return Err(Error::parse(path, lineno, format!("bad skin tone {other:?}")));
            }
        };
        let nums: Vec<f64> = fields[3..7]
            .iter()
            .map(|f| f.parse().map_err(|_| Error::parse(path, lineno, format!("bad number {f:?}"))))
            .collect::<Result<_>>()?;
        let (w, h) = (
            bundle.width.unwrap_or(1).max(1) as f64,
            bundle.height.unwrap_or(1).max(1) as f64,
        );
        let person_box = BoundingBox {
            x: nums[0] / w,
            y: nums[1] / h,
            width: nums[2] / w,
            height: nums[3] / h,
            label: "person".to_string(),
            synset: None,
        };
        person_box.validate()?;
        bundle.demographics = Some(DemographicAnnotation {
            gender,
            skin_tone,
            person_box,
        });
    }
    Ok(())
}

/// Ingests a CC-style corpus: one tab-separated (image id, caption) row per
/// line. Bundles carry stage 3 only; there are no human labels.
pub fn ingest_cc(pairs_path: &Path, taxonomy: &Taxonomy) -> Result<Corpus> {
    let text = fs::read_to_string(pairs_path).map_err(|e| Error::io(pairs_path, e))?;
    let mut bundles: BTreeMap<String, StageBundle> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (id, caption) = line.split_once('\t').ok_or_else(|| {
            Error::parse(pairs_path, lineno, "missing caption column".to_string())
        })?;
        let id = id.trim();
        if caption.trim().is_empty() {
            return Err(Error::parse(pairs_path, lineno, "missing caption column".to_string()));
        }
        if bundles.contains_key(id) {
            return Err(Error::Integrity(format!("duplicate image id {id:?}")));
        }
        let cid = format!("{id}#h");
        let parsed = parse_caption(caption.trim(), taxonomy, &cid);
        let mut bundle = StageBundle {
            image_id: id.to_string(),
            stage3_captions: vec![(cid.clone(), caption.trim().to_string())],
            stage3_graph: Some(parsed.graph),
            ..StageBundle::default()
        };
        bundle.confidences.insert(cid, parsed.confidence);
        bundles.insert(id.to_string(), bundle);
    }
    Ok(Corpus {
        kind: CorpusKind::Cc,
        bundles,
        warnings: Vec::new(),
    })
}

/// Attaches system outputs (stage 2 label lists or stage 4 captions) from a
/// `image_id<TAB>payload` file. Replaces any previously attached stage of
/// the same kind.
pub fn attach_system_outputs(
    corpus: &mut Corpus,
    stage: Stage,
    outputs_path: &Path,
    taxonomy: &Taxonomy,
) -> Result<()> {
    if !matches!(stage, Stage::S2 | Stage::S4) {
        return Err(Error::Config(format!(
            "system outputs attach to s2 or s4, not {stage}"
        )));
    }
    let text = fs::read_to_string(outputs_path).map_err(|e| Error::io(outputs_path, e))?;
    let mut staged: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (id, payload) = line.split_once('\t').ok_or_else(|| {
            Error::parse(outputs_path, lineno, "expected image_id<TAB>payload".to_string())
        })?;
        let id = id.trim();
        if !corpus.bundles.contains_key(id) {
            return Err(Error::Integrity(format!(
                "system output references unknown image {id:?}"
            )));
        }
        staged.push((id.to_string(), payload.trim().to_string()));
    }
    // All rows validated; apply as one replacement.
    for (id, payload) in staged {
        let bundle = corpus.bundles.get_mut(&id).expect("validated");
        match stage {
            Stage::S2 => {
                let labels: Vec<ResolvedWord> = payload
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|label| {
                        let lemma = normalize_lemma(label);
                        let synset = taxonomy.most_common_synset(&lemma, Pos::Noun).ok();
                        ResolvedWord {
                            lemma,
                            synset,
                            source_pos: Pos::Noun,
                        }
                    })
                    .collect();
                bundle.stage2_labels = Some(labels);
            }
            Stage::S4 => {
                let cid = format!("{id}#s");
                let parsed = parse_caption(&payload, taxonomy, &cid);
                bundle.confidences.insert(cid, parsed.confidence);
                bundle.stage4_graph = Some(parsed.graph);
                bundle.stage4_caption = Some(payload);
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}
