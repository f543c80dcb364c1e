//! Line-oriented bundle store: one UTF-8 file per image plus a manifest
//! with counts and content hashes. Round-trips byte-identically.

use super::{
    BoundingBox, Corpus, CorpusKind, DemographicAnnotation, Gender, SkinTone, StageBundle,
};
use crate::error::{Error, Result};
use crate::scenegraph::{ResolvedWord, SceneGraph};
use crate::wordnet::{hex_digest_of, Pos};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Manifest {
    schema: u32,
    kind: CorpusKind,
    images: usize,
    stages: BTreeMap<String, usize>,
    files: BTreeMap<String, String>,
    warnings: Vec<String>,
}

fn file_name_for(image_id: &str) -> Result<String> {
    let ok = !image_id.is_empty()
        && image_id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if !ok {
        return Err(Error::Config(format!(
            "image id {image_id:?} cannot name a bundle file"
        )));
    }
    Ok(format!("{image_id}.bundle"))
}

pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = BTreeMap::new();
    for (id, bundle) in &corpus.bundles {
        let name = file_name_for(id)?;
        let text = write_bundle(bundle);
        files.insert(name.clone(), hex_digest_of(text.as_bytes()));
        fs::write(dir.join(&name), text).map_err(|e| Error::io(dir.join(&name), e))?;
    }
    let mut stages = BTreeMap::new();
    for stage in [super::Stage::S1, super::Stage::S2, super::Stage::S3, super::Stage::S4] {
        stages.insert(stage.to_string(), corpus.stage_count(stage));
    }
    stages.insert(
        "demographics".to_string(),
        corpus
            .bundles
            .values()
            .filter(|b| b.demographics.is_some())
            .count(),
    );
    let manifest = Manifest {
        schema: SCHEMA_VERSION,
        kind: corpus.kind,
        images: corpus.bundles.len(),
        stages,
        files,
        warnings: corpus.warnings.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.json"), json + "\n")
        .map_err(|e| Error::io(dir.join("manifest.json"), e))?;
    Ok(())
}

pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::parse(&manifest_path, e.line(), e.to_string()))?;
    if manifest.schema != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "bundle store schema {} unsupported (expected {SCHEMA_VERSION})",
            manifest.schema
        )));
    }
    let mut bundles = BTreeMap::new();
    for (name, expect_hash) in &manifest.files {
        let path = dir.join(name);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let got = hex_digest_of(text.as_bytes());
        if got != *expect_hash {
            return Err(Error::Integrity(format!(
                "bundle {name} content hash mismatch (manifest {expect_hash}, file {got})"
            )));
        }
        let bundle = read_bundle(&text, &path)?;
        bundles.insert(bundle.image_id.clone(), bundle);
    }
    if bundles.len() != manifest.images {
        return Err(Error::Integrity(format!(
            "manifest lists {} images, store holds {}",
            manifest.images,
            bundles.len()
        )));
    }
    Ok(Corpus {
        kind: manifest.kind,
        bundles,
        warnings: manifest.warnings,
    })
}

fn fmt_synset(s: Option<crate::wordnet::SynsetId>) -> String {
    s.map_or_else(|| "-".to_string(), |id| id.to_string())
}

fn write_bundle(b: &StageBundle) -> String {
    let mut out = String::new();
    out.push_str(&format!("image {}\n", b.image_id));
    if let (Some(w), Some(h)) = (b.width, b.height) {
        out.push_str(&format!("size {w} {h}\n"));
    }
    if let Some(d) = &b.demographics {
        let g = match d.gender {
            Gender::Male => "male",
            Gender::Female => "female",
            Gender::Unlabeled => "unlabeled",
        };
        let s = match d.skin_tone {
            SkinTone::Darker => "darker",
            SkinTone::Lighter => "lighter",
            SkinTone::Unlabeled => "unlabeled",
        };
        out.push_str(&format!(
            "demo {g} {s} {} {} {} {}\n",
            d.person_box.x, d.person_box.y, d.person_box.width, d.person_box.height
        ));
    }
    if let Some(boxes) = &b.stage1_boxes {
        out.push_str("section s1\n");
        for bx in boxes {
            out.push_str(&format!(
                "box {} {} {} {} {} {}\n",
                bx.label,
                fmt_synset(bx.synset),
                bx.x,
                bx.y,
                bx.width,
                bx.height
            ));
        }
    }
    if let Some(graph) = &b.stage1_tuples {
        out.push_str("section s1t\n");
        for line in graph.to_text().lines() {
            out.push_str(&format!("g {line}\n"));
        }
    }
    if let Some(labels) = &b.stage2_labels {
        out.push_str("section s2\n");
        for w in labels {
            out.push_str(&format!("w {} {}\n", w.lemma, fmt_synset(w.synset)));
        }
    }
    if b.stage3_graph.is_some() || !b.stage3_captions.is_empty() {
        out.push_str("section s3\n");
        for (cid, text) in &b.stage3_captions {
            out.push_str(&format!("cap {cid} {text}\n"));
        }
        if let Some(graph) = &b.stage3_graph {
            for line in graph.to_text().lines() {
                out.push_str(&format!("g {line}\n"));
            }
        }
    }
    if let Some(graph) = &b.stage4_graph {
        out.push_str("section s4\n");
        if let Some(text) = &b.stage4_caption {
            out.push_str(&format!("cap - {text}\n"));
        }
        for line in graph.to_text().lines() {
            out.push_str(&format!("g {line}\n"));
        }
    }
    if !b.confidences.is_empty() {
        out.push_str("section conf\n");
        for (cid, v) in &b.confidences {
            out.push_str(&format!("c {cid} {v}\n"));
        }
    }
    out
}

fn read_bundle(text: &str, path: &Path) -> Result<StageBundle> {
    let mut bundle = StageBundle::default();
    let mut section = String::new();
    let mut graph_lines: BTreeMap<String, String> = BTreeMap::new();
    let err = |lineno: usize, msg: String| Error::parse(path, lineno, msg);

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        match tag {
            "image" => bundle.image_id = rest.to_string(),
            "size" => {
                let parts: Vec<&str> = rest.split(' ').collect();
                if parts.len() != 2 {
                    return Err(err(lineno, "size needs width and height".into()));
                }
                bundle.width = Some(parts[0].parse().map_err(|_| err(lineno, "bad width".into()))?);
                bundle.height = Some(parts[1].parse().map_err(|_| err(lineno, "bad height".into()))?);
            }
            "demo" => {
                let parts: Vec<&str> = rest.split(' ').collect();
                if parts.len() != 6 {
                    return Err(err(lineno, "demo needs 6 fields".into()));
                }
                let gender = match parts[0] {
                    "male" => Gender::Male,
                    "female" => Gender::Female,
                    _ => Gender::Unlabeled,
                };
                let skin_tone = match parts[1] {
                    "darker" => SkinTone::Darker,
                    "lighter" => SkinTone::Lighter,
                    _ => SkinTone::Unlabeled,
                };
                let nums: Vec<f64> = parts[2..6]
                    .iter()
                    .map(|p| p.parse().map_err(|_| err(lineno, format!("bad number {p:?}"))))
                    .collect::<Result<_>>()?;
                bundle.demographics = Some(DemographicAnnotation {
                    gender,
                    skin_tone,
                    person_box: BoundingBox {
                        x: nums[0],
                        y: nums[1],
                        width: nums[2],
                        height: nums[3],
                        label: "person".to_string(),
                        synset: None,
                    },
                });
            }
            "section" => {
                section = rest.to_string();
                match rest {
                    "s1" => bundle.stage1_boxes = Some(Vec::new()),
                    "s1t" | "s2" | "s3" | "s4" | "conf" => {}
                    other => return Err(err(lineno, format!("unknown section {other:?}"))),
                }
                if rest == "s2" {
                    bundle.stage2_labels = Some(Vec::new());
                }
            }
            "box" => {
                let parts: Vec<&str> = rest.split(' ').collect();
                if parts.len() != 6 {
                    return Err(err(lineno, "box needs 6 fields".into()));
                }
                let synset = if parts[1] == "-" {
                    None
                } else {
                    Some(parts[1].parse()?)
                };
                let nums: Vec<f64> = parts[2..6]
                    .iter()
                    .map(|p| p.parse().map_err(|_| err(lineno, format!("bad number {p:?}"))))
                    .collect::<Result<_>>()?;
                bundle
                    .stage1_boxes
                    .get_or_insert_with(Vec::new)
                    .push(BoundingBox {
                        label: parts[0].to_string(),
                        synset,
                        x: nums[0],
                        y: nums[1],
                        width: nums[2],
                        height: nums[3],
                    });
            }
            "w" => {
                let parts: Vec<&str> = rest.split(' ').collect();
                if parts.len() != 2 {
                    return Err(err(lineno, "label needs lemma and synset".into()));
                }
                let synset = if parts[1] == "-" {
                    None
                } else {
                    Some(parts[1].parse()?)
                };
                bundle
                    .stage2_labels
                    .get_or_insert_with(Vec::new)
                    .push(ResolvedWord {
                        lemma: parts[0].to_string(),
                        synset,
                        source_pos: Pos::Noun,
                    });
            }
            "cap" => {
                let (cid, text) = rest
                    .split_once(' ')
                    .ok_or_else(|| err(lineno, "caption needs id and text".into()))?;
                match section.as_str() {
                    "s3" => bundle.stage3_captions.push((cid.to_string(), text.to_string())),
                    "s4" => bundle.stage4_caption = Some(text.to_string()),
                    other => return Err(err(lineno, format!("caption in section {other:?}"))),
                }
            }
            "g" => {
                graph_lines.entry(section.clone()).or_default().push_str(rest);
                graph_lines.get_mut(&section).expect("just inserted").push('\n');
            }
            "c" => {
                let (cid, v) = rest
                    .split_once(' ')
                    .ok_or_else(|| err(lineno, "confidence needs id and value".into()))?;
                let v: f64 = v.parse().map_err(|_| err(lineno, format!("bad number {v:?}")))?;
                bundle.confidences.insert(cid.to_string(), v);
            }
            other => return Err(err(lineno, format!("unknown record {other:?}"))),
        }
    }
    if bundle.image_id.is_empty() {
        return Err(Error::parse(path, 1, "bundle without image id".to_string()));
    }
    if let Some(text) = graph_lines.get("s1t") {
        bundle.stage1_tuples = Some(SceneGraph::from_text(text)?);
    }
    if let Some(text) = graph_lines.get("s3") {
        bundle.stage3_graph = Some(SceneGraph::from_text(text)?);
    }
    if let Some(text) = graph_lines.get("s4") {
        bundle.stage4_graph = Some(SceneGraph::from_text(text)?);
    }
    Ok(bundle)
}
