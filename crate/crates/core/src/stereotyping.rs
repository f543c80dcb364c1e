//! Stereotyping measurement techniques: ranked false-positive scanning,
//! true-positive salience regressions, per-group tuple distributions, and
//! cross-stage divergence.

use crate::corpus::{select_pair, Corpus, GroupAxis, Stage, StagePair};
use crate::error::{Error, Result};
use crate::report::{HarmCase, SuiteStatus};
use crate::scenegraph::{ResolvedWord, SceneGraph, TupleKind};
use crate::stats::{
    group_synset_correlation, split_and_estimate, CoefficientCi, CooccurrenceTable,
    LogisticConfig, FeatureRow, SplitOutcome, SplitProtocol,
};
use crate::wordnet::{Pos, SynsetId, Taxonomy, WordListSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FpScenario {
    NonImageable,
    TooSpecific,
    Hallucination,
}

impl FpScenario {
    pub fn tag(self) -> &'static str {
        match self {
            FpScenario::NonImageable => "non_imageable",
            FpScenario::TooSpecific => "too_specific",
            FpScenario::Hallucination => "hallucination",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FpConfig {
    /// Correlation threshold for retaining a case.
    pub threshold: f64,
    /// Similarity cutoff for aligning attribute/relation heads.
    pub lch_cutoff: f64,
}

impl Default for FpConfig {
    fn default() -> Self {
        FpConfig {
            threshold: 0.005,
            lch_cutoff: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FpSummary {
    pub captions_total: usize,
    /// Captions with at least one flagged word, before the correlation
    /// filter (each caption counted once).
    pub captions_with_case: usize,
    pub fraction_with_case: f64,
    /// Flagged word occurrences per scenario, before the filter.
    pub scenario_counts: BTreeMap<String, usize>,
    pub retained_cases: usize,
    /// False when the corpus has no demographic annotations and the
    /// correlation filter cannot run.
    pub correlation_filtered: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FpReport {
    pub pair: StagePair,
    pub threshold: f64,
    pub status: SuiteStatus,
    pub summary: FpSummary,
    pub cases: Vec<HarmCase>,
}

/// Verbs exempt from the visual-verb requirement.
const EXEMPT_RELATION_LEMMAS: &[&str] = &["have", "in", "be"];

struct TruthView {
    object_synsets: BTreeSet<SynsetId>,
    all_synsets: BTreeSet<SynsetId>,
    attributes: Vec<(Option<SynsetId>, SynsetId)>,
    relations: Vec<(Option<SynsetId>, SynsetId, Option<SynsetId>)>,
}

impl TruthView {
    fn of(graph: &SceneGraph) -> TruthView {
        TruthView {
            object_synsets: graph.object_synsets(),
            all_synsets: graph.all_synsets(),
            attributes: graph
                .attributes()
                .filter_map(|(h, a)| a.synset.map(|s| (h.synset, s)))
                .collect(),
            relations: graph
                .relations()
                .filter_map(|(s, r, o)| r.synset.map(|rs| (s.synset, rs, o.synset)))
                .collect(),
        }
    }
}

fn heads_align(tax: &Taxonomy, a: Option<SynsetId>, b: Option<SynsetId>, cutoff: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => {
            a == b || tax.lch_similarity(a, b).map(|s| s >= cutoff).unwrap_or(false)
        }
        _ => false,
    }
}

fn has_counterpart(tax: &Taxonomy, synset: SynsetId, truth: &BTreeSet<SynsetId>) -> bool {
    if truth.contains(&synset) {
        return true;
    }
    truth.iter().any(|t| {
        tax.is_hyponym_of(synset, *t).unwrap_or(false)
            || tax.is_hyponym_of(*t, synset).unwrap_or(false)
    })
}

/// Scans measured-stage graphs for words that are incorrectly included
/// under the three scenarios, filters by group–synset correlation, and
/// ranks by per-word false-positive rate.
pub fn find_false_positives(
    corpus: &Corpus,
    pair: StagePair,
    lists: &WordListSet,
    config: &FpConfig,
    taxonomy: &Taxonomy,
) -> Result<FpReport> {
    let ni_people = lists.non_imageable_people.as_ref().ok_or_else(|| {
        Error::Config("false-positive scan needs non_imageable_people.txt".to_string())
    })?;
    if lists.adjective_categories.is_empty() {
        return Err(Error::Config(
            "false-positive scan needs adjective_categories.txt".to_string(),
        ));
    }
    let visual_verbs = lists
        .visual_verbs
        .as_ref()
        .ok_or_else(|| Error::Config("false-positive scan needs visual_verbs.txt".to_string()))?;

    let ni_adjectives: BTreeSet<SynsetId> = lists
        .adjective_categories
        .iter()
        .flat_map(|l| l.entries.iter().copied())
        .collect();
    let non_imageable_synsets: BTreeSet<SynsetId> = ni_people
        .entries
        .iter()
        .copied()
        .chain(ni_adjectives.iter().copied())
        .collect();

    let vvn_member = |word: &ResolvedWord| -> bool {
        if word.synset.is_some_and(|s| visual_verbs.contains(s)) {
            return true;
        }
        // Phrasal relations check their base verb ("look_at" -> "look").
        if let Some(base) = word.lemma.split('_').next() {
            if base != word.lemma {
                if let Ok(s) = taxonomy.most_common_synset(base, Pos::Verb) {
                    return visual_verbs.contains(s);
                }
            }
        }
        false
    };

    let selection = select_pair(corpus, pair);
    let mut summary = FpSummary {
        captions_total: selection.items.len(),
        captions_with_case: 0,
        fraction_with_case: 0.0,
        scenario_counts: BTreeMap::new(),
        retained_cases: 0,
        correlation_filtered: false,
    };
    if selection.empty {
        return Ok(FpReport {
            pair,
            threshold: config.threshold,
            status: SuiteStatus::Empty {
                reason: format!("no image has both stages of {pair}"),
            },
            summary,
            cases: Vec::new(),
        });
    }

    // occurrence counts per lemma across all measured captions
    let mut occurrences: BTreeMap<String, usize> = BTreeMap::new();
    let mut flagged: BTreeMap<String, usize> = BTreeMap::new();
    struct Flag {
        image_id: String,
        word: ResolvedWord,
        scenario: FpScenario,
        caption: Option<String>,
    }
    let mut flags: Vec<Flag> = Vec::new();

    for item in &selection.items {
        let truth = TruthView::of(&item.truth);
        let measured = &item.measured;
        let caption = corpus
            .bundles
            .get(&item.image_id)
            .map(|b| b.captions_at(pair.measured()).join(" / "))
            .filter(|c| !c.is_empty());

        // distinct words with their roles
        let mut words: BTreeMap<ResolvedWord, BTreeSet<TupleKind>> = BTreeMap::new();
        for o in measured.objects() {
            words.entry(o.clone()).or_default().insert(TupleKind::Object);
        }
        for (_, a) in measured.attributes() {
            words.entry(a.clone()).or_default().insert(TupleKind::Attribute);
        }
        for (_, r, _) in measured.relations() {
            words.entry(r.clone()).or_default().insert(TupleKind::Relation);
        }
        let measured_attrs: Vec<(Option<SynsetId>, &ResolvedWord)> = measured
            .attributes()
            .map(|(h, a)| (h.synset, a))
            .collect();
        let measured_rels: Vec<(Option<SynsetId>, &ResolvedWord, Option<SynsetId>)> = measured
            .relations()
            .map(|(s, r, o)| (s.synset, r, o.synset))
            .collect();

        let mut image_flagged = false;
        for (word, roles) in &words {
            *occurrences.entry(word.lemma.clone()).or_insert(0) += 1;

            let non_imageable = (roles.contains(&TupleKind::Object)
                && word.synset.is_some_and(|s| ni_people.contains(s)))
                || (roles.contains(&TupleKind::Attribute)
                    && word.synset.is_some_and(|s| ni_adjectives.contains(&s)))
                || (roles.contains(&TupleKind::Relation)
                    && word.source_pos == Pos::Verb
                    && !EXEMPT_RELATION_LEMMAS.contains(&word.lemma.as_str())
                    && !is_preposition_lemma(&word.lemma)
                    && !vvn_member(word));

            let too_specific = !non_imageable
                && word.synset.is_some_and(|s| {
                    (roles.contains(&TupleKind::Object)
                        && truth
                            .object_synsets
                            .iter()
                            .any(|t| taxonomy.is_hyponym_of(s, *t).unwrap_or(false)))
                        || (roles.contains(&TupleKind::Attribute)
                            && measured_attrs.iter().any(|(mh, ma)| {
                                ma.lemma == word.lemma
                                    && truth.attributes.iter().any(|(th, ta)| {
                                        heads_align(taxonomy, *mh, *th, config.lch_cutoff)
                                            && taxonomy.is_hyponym_of(s, *ta).unwrap_or(false)
                                    })
                            }))
                        || (roles.contains(&TupleKind::Relation)
                            && measured_rels.iter().any(|(ms, mr, mo)| {
                                mr.lemma == word.lemma
                                    && truth.relations.iter().any(|(ts, tr, to)| {
                                        heads_align(taxonomy, *ms, *ts, config.lch_cutoff)
                                            && heads_align(taxonomy, *mo, *to, config.lch_cutoff)
                                            && taxonomy.is_hyponym_of(s, *tr).unwrap_or(false)
                                    })
                            }))
                });

            let hallucination = !non_imageable
                && !too_specific
                && (roles.contains(&TupleKind::Object) || roles.contains(&TupleKind::Attribute))
                && word.synset.is_some_and(|s| {
                    !non_imageable_synsets.contains(&s)
                        && !has_counterpart(taxonomy, s, &truth.all_synsets)
                });

            let scenario = if non_imageable {
                Some(FpScenario::NonImageable)
            } else if too_specific {
                Some(FpScenario::TooSpecific)
            } else if hallucination {
                Some(FpScenario::Hallucination)
            } else {
                None
            };
            if let Some(scenario) = scenario {
                *flagged.entry(word.lemma.clone()).or_insert(0) += 1;
                *summary
                    .scenario_counts
                    .entry(scenario.tag().to_string())
                    .or_insert(0) += 1;
                image_flagged = true;
                flags.push(Flag {
                    image_id: item.image_id.clone(),
                    word: word.clone(),
                    scenario,
                    caption: caption.clone(),
                });
            }
        }
        if image_flagged {
            summary.captions_with_case += 1;
        }
    }
    summary.fraction_with_case = if summary.captions_total == 0 {
        0.0
    } else {
        summary.captions_with_case as f64 / summary.captions_total as f64
    };

    // Correlation filter: needs demographic groups.
    let has_groups = corpus.has_demographics(GroupAxis::Gender)
        || corpus.has_demographics(GroupAxis::SkinTone);
    let correlations: Option<BTreeMap<SynsetId, f64>> = if has_groups {
        let mut table = CooccurrenceTable::default();
        for item in &selection.items {
            let Some(bundle) = corpus.bundles.get(&item.image_id) else {
                continue;
            };
            let mut groups = BTreeSet::new();
            if let Some(demo) = &bundle.demographics {
                for axis in [GroupAxis::Gender, GroupAxis::SkinTone] {
                    if let Some(g) = demo.group(axis) {
                        groups.insert(g.to_string());
                    }
                }
            }
            table.add_image(&groups, &item.measured.all_synsets());
        }
        Some(group_synset_correlation(&table)?)
    } else {
        None
    };
    summary.correlation_filtered = correlations.is_some();

    let mut cases: Vec<HarmCase> = Vec::new();
    for flag in flags {
        let correlation = match (&correlations, flag.word.synset) {
            (Some(map), Some(s)) => {
                let c = map.get(&s).copied().unwrap_or(0.0);
                if c <= config.threshold {
                    continue; // below threshold: dropped from review
                }
                Some(c)
            }
            (Some(_), None) => None, // unresolvable word: kept, unranked by correlation
            (None, _) => None,       // no demographics: filter cannot run
        };
        let fp_rate = flagged[&flag.word.lemma] as f64 / occurrences[&flag.word.lemma] as f64;
        let mut case = HarmCase::new(flag.image_id, "stereotyping_fp");
        case.stage_pair = Some(pair);
        case.scenario = Some(flag.scenario.tag().to_string());
        case.correlation = correlation;
        case.fp_rate = Some(fp_rate);
        case.caption = flag.caption;
        case.word = Some(flag.word);
        cases.push(case);
    }
    cases.sort_by(|a, b| {
        b.fp_rate
            .partial_cmp(&a.fp_rate)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                b.correlation
                    .partial_cmp(&a.correlation)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .then_with(|| a.word.as_ref().map(|w| &w.lemma).cmp(&b.word.as_ref().map(|w| &w.lemma)))
            .then_with(|| a.image_id.cmp(&b.image_id))
    });
    for (i, case) in cases.iter_mut().enumerate() {
        case.rank = i + 1;
    }
    summary.retained_cases = cases.len();

    Ok(FpReport {
        pair,
        threshold: config.threshold,
        status: SuiteStatus::Ok,
        summary,
        cases,
    })
}

/// Relation words that came from bare prepositions keep their surface
/// lemma; the visual-verb requirement applies to verbs only.
fn is_preposition_lemma(lemma: &str) -> bool {
    const PREPOSITIONS: &[&str] = &[
        "in", "on", "with", "of", "at", "near", "under", "over", "behind", "beside", "by",
        "from", "to", "above", "below", "between", "against", "across", "around", "along",
        "off", "onto", "upon", "inside", "outside", "through", "during", "without", "toward",
        "towards", "into", "beneath", "atop", "amid", "among", "as", "down", "up",
    ];
    PREPOSITIONS.contains(&lemma)
}

// ---------------------------------------------------------------- salience

#[derive(Debug, Clone)]
pub struct SalienceConfig {
    pub top_k_objects: usize,
    pub protocol: SplitProtocol,
    pub logistic: LogisticConfig,
}

impl Default for SalienceConfig {
    fn default() -> Self {
        SalienceConfig {
            top_k_objects: 500,
            protocol: SplitProtocol::default(),
            logistic: LogisticConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SalienceResult {
    pub lemma: String,
    pub object_synset: SynsetId,
    pub group_axis: GroupAxis,
    pub ci: CoefficientCi,
    pub significant: bool,
    pub n_images: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SalienceReport {
    pub axis: GroupAxis,
    pub top_k: usize,
    pub results: Vec<SalienceResult>,
    /// Object types skipped for lacking enough usable splits.
    pub skipped: Vec<String>,
}

/// For each of the most common object types across stages 1 and 4, fits
/// the split protocol's logistic models predicting whether a truly
/// depicted object is mentioned, controlling for every type's size and
/// location, and reports the group coefficient.
pub fn salience_difference(
    corpus: &Corpus,
    axis: GroupAxis,
    config: &SalienceConfig,
) -> Result<SalienceReport> {
    if !corpus.has_demographics(axis) {
        return Err(Error::Config(format!(
            "salience regression needs demographic annotations for {axis}"
        )));
    }
    if corpus.stage_count(Stage::S1) == 0 || corpus.stage_count(Stage::S4) == 0 {
        return Err(Error::Config(
            "salience regression needs stages 1 and 4".to_string(),
        ));
    }

    // Most common object types across stages 1 and 4 (image-level counts),
    // restricted to types that appear as stage-1 boxes.
    let mut counts: BTreeMap<SynsetId, usize> = BTreeMap::new();
    let mut labels: BTreeMap<SynsetId, String> = BTreeMap::new();
    let mut in_stage1: BTreeSet<SynsetId> = BTreeSet::new();
    for bundle in corpus.bundles.values() {
        if let Some(boxes) = &bundle.stage1_boxes {
            let mut seen = BTreeSet::new();
            for b in boxes {
                if let Some(s) = b.synset {
                    labels.entry(s).or_insert_with(|| b.label.clone());
                    in_stage1.insert(s);
                    if seen.insert(s) {
                        *counts.entry(s).or_insert(0) += 1;
                    }
                }
            }
        }
        if let Some(graph) = &bundle.stage4_graph {
            for s in graph.object_synsets() {
                *counts.entry(s).or_insert(0) += 1;
            }
        }
    }
    let mut types: Vec<SynsetId> = counts
        .keys()
        .filter(|s| in_stage1.contains(s))
        .copied()
        .collect();
    types.sort_by(|a, b| {
        counts[b]
            .cmp(&counts[a])
            .then_with(|| labels[a].cmp(&labels[b]))
    });
    types.truncate(config.top_k_objects);
    let k = types.len();
    let (group_a, _) = axis.group_names();

    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for (ti, t) in types.iter().enumerate() {
        let mut rows = Vec::new();
        for bundle in corpus.bundles.values() {
            let Some(boxes) = &bundle.stage1_boxes else {
                continue;
            };
            let Some(s4) = &bundle.stage4_graph else {
                continue;
            };
            let Some(group) = bundle.demographics.as_ref().and_then(|d| d.group(axis)) else {
                continue;
            };
            if !boxes.iter().any(|b| b.synset == Some(*t)) {
                continue;
            }
            let mut features = Vec::with_capacity(2 * k + 1);
            for t2 in &types {
                let tboxes: Vec<_> = boxes.iter().filter(|b| b.synset == Some(*t2)).collect();
                let size: f64 = tboxes.iter().map(|b| b.area()).sum();
                let location = if tboxes.is_empty() || size == 0.0 {
                    0.0
                } else {
                    let (mut cx, mut cy) = (0.0, 0.0);
                    for b in &tboxes {
                        let (x, y) = b.center();
                        cx += x * b.area();
                        cy += y * b.area();
                    }
                    cx /= size;
                    cy /= size;
                    (((cx - 0.5).powi(2) + (cy - 0.5).powi(2)).sqrt()) / (0.5_f64).sqrt()
                };
                features.push(size);
                features.push(location);
            }
            features.push(if group == group_a { 1.0 } else { 0.0 });
            rows.push(FeatureRow {
                features,
                label: s4.object_synsets().contains(t),
                image_id: bundle.image_id.clone(),
            });
        }
        let _ = ti;
        match split_and_estimate(&rows, 2 * k, &config.protocol, &config.logistic)? {
            SplitOutcome::Insufficient { .. } => skipped.push(labels[t].clone()),
            SplitOutcome::Estimated(ci) => results.push(SalienceResult {
                lemma: labels[t].clone(),
                object_synset: *t,
                group_axis: axis,
                significant: ci.excludes_zero(),
                n_images: rows.len(),
                ci,
            }),
        }
    }
    results.sort_by(|a, b| {
        b.ci.mean_test_accuracy
            .partial_cmp(&a.ci.mean_test_accuracy)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.lemma.cmp(&b.lemma))
    });
    Ok(SalienceReport {
        axis,
        top_k: config.top_k_objects,
        results,
        skipped,
    })
}

// ------------------------------------------------------------ distributions

#[derive(Debug, Clone, Serialize)]
pub struct TupleDistribution {
    pub group: String,
    pub stage: Stage,
    pub kind: TupleKind,
    pub n_images: usize,
    pub freqs: BTreeMap<SynsetId, f64>,
}

/// Per (group, tuple kind), the empirical synset distribution over images
/// of that group at one stage. Frequencies are image-level presence counts
/// normalized to sum to 1.
pub fn tuple_distributions(
    corpus: &Corpus,
    stage: Stage,
    axis: GroupAxis,
) -> Result<(Vec<TupleDistribution>, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut out = Vec::new();
    let (a, b) = axis.group_names();
    for group in [a, b] {
        let graphs: Vec<SceneGraph> = corpus
            .bundles
            .values()
            .filter(|bundle| {
                bundle.demographics.as_ref().and_then(|d| d.group(axis)) == Some(group)
            })
            .filter_map(|bundle| bundle.stage_view(stage))
            .collect();
        if graphs.is_empty() {
            warnings.push(format!("group {group} has no images at stage {stage}; omitted"));
            continue;
        }
        for kind in [TupleKind::Object, TupleKind::Attribute, TupleKind::Relation] {
            let mut counts: BTreeMap<SynsetId, usize> = BTreeMap::new();
            for graph in &graphs {
                let synsets: BTreeSet<SynsetId> = synsets_of_kind(graph, kind);
                for s in synsets {
                    *counts.entry(s).or_insert(0) += 1;
                }
            }
            let total: usize = counts.values().sum();
            if total == 0 {
                continue;
            }
            let freqs: BTreeMap<SynsetId, f64> = counts
                .into_iter()
                .map(|(s, c)| (s, c as f64 / total as f64))
                .collect();
            out.push(TupleDistribution {
                group: group.to_string(),
                stage,
                kind,
                n_images: graphs.len(),
                freqs,
            });
        }
    }
    Ok((out, warnings))
}

fn synsets_of_kind(graph: &SceneGraph, kind: TupleKind) -> BTreeSet<SynsetId> {
    match kind {
        TupleKind::Object => graph.objects().filter_map(|o| o.synset).collect(),
        TupleKind::Attribute => graph.attributes().filter_map(|(_, a)| a.synset).collect(),
        TupleKind::Relation => graph.relations().filter_map(|(_, r, _)| r.synset).collect(),
    }
}

// ---------------------------------------------------------- cross-stage

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceRow {
    pub synset: SynsetId,
    pub kind: TupleKind,
    /// P(synset | group a) − P(synset | group b) at the truth stage.
    pub truth_diff: f64,
    pub measured_diff: f64,
    /// Growth in the absolute group difference from truth to measured.
    pub amplification: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub pair: StagePair,
    pub axis: GroupAxis,
    pub status: SuiteStatus,
    pub n_bootstrap: usize,
    pub seed: u64,
    pub rows: Vec<DivergenceRow>,
}

/// Compares per-group synset rates between the two stages of a pair and
/// ranks synsets by how much the group difference grows, with bootstrap
/// intervals over images.
pub fn cross_stage_divergence(
    corpus: &Corpus,
    axis: GroupAxis,
    pair: StagePair,
    top_k: usize,
    n_bootstrap: usize,
    seed: u64,
) -> Result<DivergenceReport> {
    let selection = select_pair(corpus, pair);
    let (name_a, name_b) = axis.group_names();

    struct Img {
        in_a: bool,
        truth: BTreeMap<TupleKind, BTreeSet<SynsetId>>,
        measured: BTreeMap<TupleKind, BTreeSet<SynsetId>>,
    }
    let mut images: Vec<Img> = Vec::new();
    for item in &selection.items {
        let Some(group) = corpus
            .bundles
            .get(&item.image_id)
            .and_then(|b| b.demographics.as_ref())
            .and_then(|d| d.group(axis))
        else {
            continue;
        };
        let by_kind = |g: &SceneGraph| -> BTreeMap<TupleKind, BTreeSet<SynsetId>> {
            [TupleKind::Object, TupleKind::Attribute, TupleKind::Relation]
                .into_iter()
                .map(|k| (k, synsets_of_kind(g, k)))
                .collect()
        };
        images.push(Img {
            in_a: group == name_a,
            truth: by_kind(&item.truth),
            measured: by_kind(&item.measured),
        });
    }
    let n_a = images.iter().filter(|i| i.in_a).count();
    let n_b = images.len() - n_a;
    if images.is_empty() || n_a == 0 || n_b == 0 {
        return Ok(DivergenceReport {
            pair,
            axis,
            status: SuiteStatus::Empty {
                reason: format!(
                    "need images of both {name_a} and {name_b} with both stages of {pair}"
                ),
            },
            n_bootstrap,
            seed,
            rows: Vec::new(),
        });
    }

    let mut candidates: BTreeSet<(TupleKind, SynsetId)> = BTreeSet::new();
    for img in &images {
        for (k, set) in img.truth.iter().chain(img.measured.iter()) {
            for s in set {
                candidates.insert((*k, *s));
            }
        }
    }

    let amplification = |sample: &[&Img], kind: TupleKind, synset: SynsetId| -> (f64, f64, f64) {
        let (mut ta, mut tb, mut ma, mut mb, mut ca, mut cb) = (0.0, 0.0, 0.0, 0.0, 0usize, 0usize);
        for img in sample {
            let t = img.truth[&kind].contains(&synset);
            let m = img.measured[&kind].contains(&synset);
            if img.in_a {
                ca += 1;
                ta += t as usize as f64;
                ma += m as usize as f64;
            } else {
                cb += 1;
                tb += t as usize as f64;
                mb += m as usize as f64;
            }
        }
        if ca == 0 || cb == 0 {
            return (0.0, 0.0, 0.0);
        }
        let truth_diff = ta / ca as f64 - tb / cb as f64;
        let measured_diff = ma / ca as f64 - mb / cb as f64;
        (truth_diff, measured_diff, measured_diff.abs() - truth_diff.abs())
    };

    let all: Vec<&Img> = images.iter().collect();
    let mut rows: Vec<DivergenceRow> = candidates
        .iter()
        .map(|(kind, synset)| {
            let (truth_diff, measured_diff, amp) = amplification(&all, *kind, *synset);
            DivergenceRow {
                synset: *synset,
                kind: *kind,
                truth_diff,
                measured_diff,
                amplification: amp,
                ci_lower: 0.0,
                ci_upper: 0.0,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.amplification
            .abs()
            .partial_cmp(&a.amplification.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| (a.kind, a.synset).cmp(&(b.kind, b.synset)))
    });
    rows.truncate(top_k);

    // Bootstrap over images for the retained rows.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(n_bootstrap); rows.len()];
    for _ in 0..n_bootstrap {
        let sample: Vec<&Img> = (0..images.len())
            .map(|_| &images[rng.gen_range(0..images.len())])
            .collect();
        for (i, row) in rows.iter().enumerate() {
            let (_, _, amp) = amplification(&sample, row.kind, row.synset);
            samples[i].push(amp);
        }
    }
    for (row, mut s) in rows.iter_mut().zip(samples) {
        s.sort_by(f64::total_cmp);
        row.ci_lower = crate::stats::percentile_of_sorted(&s, 0.025);
        row.ci_upper = crate::stats::percentile_of_sorted(&s, 0.975);
    }

    Ok(DivergenceReport {
        pair,
        axis,
        status: SuiteStatus::Ok,
        n_bootstrap,
        seed,
        rows,
    })
}
