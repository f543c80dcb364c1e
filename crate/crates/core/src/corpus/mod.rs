//! Corpus ingestion and storage: pairs the four stages of labels and
//! captions per image, with demographic annotations, and exposes
//! ground-truth selection between stages.

mod bundle;
mod ingest;

pub use bundle::{load_corpus, save_corpus};
pub use ingest::{attach_system_outputs, ingest_cc, ingest_coco, VgAugment};

use crate::error::{Error, Result};
use crate::scenegraph::{union_graphs, ResolvedWord, SceneGraph, SceneTuple};
use crate::wordnet::SynsetId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    S1,
    S2,
    S3,
    S4,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::S1 => "s1",
            Stage::S2 => "s2",
            Stage::S3 => "s3",
            Stage::S4 => "s4",
        })
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        match s {
            "s1" | "1" => Ok(Stage::S1),
            "s2" | "2" => Ok(Stage::S2),
            "s3" | "3" => Ok(Stage::S3),
            "s4" | "4" => Ok(Stage::S4),
            other => Err(Error::Config(format!("unknown stage {other:?}"))),
        }
    }
}

/// A (ground truth, measured) stage pairing. Only the five comparisons of
/// the framework are constructible: 1→2, 1→3, 3→4, 2→4, 1→4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagePair {
    truth: Stage,
    measured: Stage,
}

impl StagePair {
    pub const ARROWS: [(Stage, Stage); 5] = [
        (Stage::S1, Stage::S2),
        (Stage::S1, Stage::S3),
        (Stage::S3, Stage::S4),
        (Stage::S2, Stage::S4),
        (Stage::S1, Stage::S4),
    ];

    pub fn new(truth: Stage, measured: Stage) -> Result<StagePair> {
        if Self::ARROWS.contains(&(truth, measured)) {
            Ok(StagePair { truth, measured })
        } else {
            Err(Error::Config(format!(
                "stage pair {truth}:{measured} is not a valid comparison"
            )))
        }
    }

    pub fn truth(&self) -> Stage {
        self.truth
    }

    pub fn measured(&self) -> Stage {
        self.measured
    }
}

impl fmt::Display for StagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.truth, self.measured)
    }
}

impl FromStr for StagePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<StagePair> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("stage pair must look like s1:s4, got {s:?}")))?;
        StagePair::new(a.parse()?, b.parse()?)
    }
}

/// A labeled box with coordinates normalized to [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub label: String,
    pub synset: Option<SynsetId>,
}

impl BoundingBox {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.width / 2.0, self.y + self.height / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.x >= 0.0
            && self.y >= 0.0
            && self.width > 0.0
            && self.height > 0.0
            && self.x + self.width <= 1.0 + 1e-9
            && self.y + self.height <= 1.0 + 1e-9;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "box out of bounds: x={} y={} w={} h={} ({})",
                self.x, self.y, self.width, self.height, self.label
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    Unlabeled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkinTone {
    Darker,
    Lighter,
    Unlabeled,
}

/// Which demographic axis a measurement conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupAxis {
    Gender,
    SkinTone,
}

impl GroupAxis {
    /// Ordered group names; differences are reported first minus second.
    pub fn group_names(&self) -> (&'static str, &'static str) {
        match self {
            GroupAxis::Gender => ("female", "male"),
            GroupAxis::SkinTone => ("darker", "lighter"),
        }
    }
}

impl fmt::Display for GroupAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupAxis::Gender => "gender",
            GroupAxis::SkinTone => "skin_tone",
        })
    }
}

impl FromStr for GroupAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<GroupAxis> {
        match s {
            "gender" => Ok(GroupAxis::Gender),
            "skin_tone" | "skin-tone" | "skin" => Ok(GroupAxis::SkinTone),
            other => Err(Error::Config(format!("unknown axis {other:?}"))),
        }
    }
}

/// Annotation of the largest person depicted in an image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemographicAnnotation {
    pub gender: Gender,
    pub skin_tone: SkinTone,
    pub person_box: BoundingBox,
}

impl DemographicAnnotation {
    /// The annotated group name on an axis, if labeled.
    pub fn group(&self, axis: GroupAxis) -> Option<&'static str> {
        match axis {
            GroupAxis::Gender => match self.gender {
                Gender::Female => Some("female"),
                Gender::Male => Some("male"),
                Gender::Unlabeled => None,
            },
            GroupAxis::SkinTone => match self.skin_tone {
                SkinTone::Darker => Some("darker"),
                SkinTone::Lighter => Some("lighter"),
                SkinTone::Unlabeled => None,
            },
        }
    }
}

/// Everything known about one image across the four stages.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageBundle {
    pub image_id: String,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub stage1_boxes: Option<Vec<BoundingBox>>,
    /// Attribute/relation annotations over stage-1 labels, stored as scene
    /// tuples so all stages compare under one representation.
    pub stage1_tuples: Option<SceneGraph>,
    pub stage2_labels: Option<Vec<ResolvedWord>>,
    pub stage3_graph: Option<SceneGraph>,
    /// Raw human captions: (caption id, text).
    pub stage3_captions: Vec<(String, String)>,
    pub stage4_graph: Option<SceneGraph>,
    pub stage4_caption: Option<String>,
    /// Parse confidence per caption id.
    pub confidences: BTreeMap<String, f64>,
    pub demographics: Option<DemographicAnnotation>,
}

impl StageBundle {
    pub fn has_stage(&self, stage: Stage) -> bool {
        match stage {
            Stage::S1 => self.stage1_boxes.is_some(),
            Stage::S2 => self.stage2_labels.is_some(),
            Stage::S3 => self.stage3_graph.is_some(),
            Stage::S4 => self.stage4_graph.is_some(),
        }
    }

    /// A uniform scene-graph view of a stage: boxes and label lists are
    /// normalized into object tuples.
    pub fn stage_view(&self, stage: Stage) -> Option<SceneGraph> {
        match stage {
            Stage::S1 => {
                let boxes = self.stage1_boxes.as_ref()?;
                let mut graph = SceneGraph::new();
                for b in boxes {
                    graph.tuples.insert(SceneTuple::Object {
                        subject: ResolvedWord {
                            lemma: b.label.clone(),
                            synset: b.synset,
                            source_pos: crate::wordnet::Pos::Noun,
                        },
                    });
                }
                if let Some(tuples) = &self.stage1_tuples {
                    graph = union_graphs([&graph, tuples]);
                }
                Some(graph)
            }
            Stage::S2 => {
                let labels = self.stage2_labels.as_ref()?;
                let mut graph = SceneGraph::new();
                for w in labels {
                    graph.tuples.insert(SceneTuple::Object { subject: w.clone() });
                }
                Some(graph)
            }
            Stage::S3 => self.stage3_graph.clone(),
            Stage::S4 => self.stage4_graph.clone(),
        }
    }

    /// Raw caption texts backing a stage view, for review sheets.
    pub fn captions_at(&self, stage: Stage) -> Vec<String> {
        match stage {
            Stage::S3 => self.stage3_captions.iter().map(|(_, c)| c.clone()).collect(),
            Stage::S4 => self.stage4_caption.clone().into_iter().collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Coco,
    Cc,
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusKind::Coco => "coco",
            CorpusKind::Cc => "cc",
        })
    }
}

/// A sealed, immutable corpus of stage bundles keyed by image id.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub kind: CorpusKind,
    pub bundles: BTreeMap<String, StageBundle>,
    /// Non-fatal ingestion notes (images without captions, skipped rows).
    pub warnings: Vec<String>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bundles.is_empty()
    }

    pub fn has_demographics(&self, axis: GroupAxis) -> bool {
        self.bundles
            .values()
            .any(|b| b.demographics.as_ref().and_then(|d| d.group(axis)).is_some())
    }

    pub fn stage_count(&self, stage: Stage) -> usize {
        self.bundles.values().filter(|b| b.has_stage(stage)).count()
    }
}

/// One image with both views of a stage pair materialized.
#[derive(Debug, Clone)]
pub struct PairItem {
    pub image_id: String,
    pub truth: SceneGraph,
    pub measured: SceneGraph,
}

/// The result of pairing two stages across a corpus. An empty selection is
/// an explicit status, not a silent empty list.
#[derive(Debug, Clone)]
pub struct PairSelection {
    pub pair: StagePair,
    pub items: Vec<PairItem>,
    pub empty: bool,
}

/// Yields every image where both stages of the pair exist, as uniform
/// scene-graph views.
pub fn select_pair(corpus: &Corpus, pair: StagePair) -> PairSelection {
    let mut items = Vec::new();
    for (id, bundle) in &corpus.bundles {
        let (Some(truth), Some(measured)) =
            (bundle.stage_view(pair.truth()), bundle.stage_view(pair.measured()))
        else {
            continue;
        };
        items.push(PairItem {
            image_id: id.clone(),
            truth,
            measured,
        });
    }
    PairSelection {
        pair,
        empty: items.is_empty(),
        items,
    }
}
