//! Demeaning measurement techniques: word-list scanning with
//! lower/estimate/upper bounds, person-mention disparity, context-specific
//! rules, and identity adjectives used as nouns.

use crate::corpus::{select_pair, Corpus, CorpusKind, GroupAxis, Stage, StagePair};
use crate::error::{Error, Result};
use crate::report::HarmCase;
use crate::scenegraph::{tokenize, SceneGraph, TokenPos};
use crate::stats::{proportion_diff_ci, ProportionCi};
use crate::wordnet::{SynsetId, Taxonomy, WordListSet};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// Caption counts under the three synset-membership readings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriBound {
    /// Captions with a word whose every synset is listed.
    pub lower: usize,
    /// Captions with a word whose most common synset is listed.
    pub estimate: usize,
    /// Captions with a word having any listed synset.
    pub upper: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemeaningWordsReport {
    pub stage: Stage,
    pub captions_total: usize,
    pub tri: TriBound,
    pub cases: Vec<HarmCase>,
}

/// Scans every caption at a stage for words whose synsets fall in the
/// offensive-people or judgment-adjective lists, counting captions at the
/// lower/estimate/upper levels.
pub fn demeaning_words(
    corpus: &Corpus,
    stage: Stage,
    lists: &WordListSet,
    taxonomy: &Taxonomy,
) -> Result<DemeaningWordsReport> {
    if !matches!(stage, Stage::S3 | Stage::S4) {
        return Err(Error::Config(format!(
            "demeaning word scan runs on caption stages, not {stage}"
        )));
    }
    let offensive = lists
        .offensive_people
        .as_ref()
        .ok_or_else(|| Error::Config("demeaning word scan needs offensive_people.txt".to_string()))?;
    let judgment = lists.adjective_category("judgment").ok_or_else(|| {
        Error::Config("demeaning word scan needs a judgment category in adjective_categories.txt".to_string())
    })?;
    let listed: BTreeSet<SynsetId> = offensive
        .entries
        .iter()
        .chain(judgment.entries.iter())
        .copied()
        .collect();

    let mut tri = TriBound::default();
    let mut captions_total = 0usize;
    let mut cases = Vec::new();
    for bundle in corpus.bundles.values() {
        let captions: Vec<(String, String)> = match stage {
            Stage::S3 => bundle.stage3_captions.clone(),
            Stage::S4 => bundle
                .stage4_caption
                .clone()
                .map(|c| (format!("{}#s", bundle.image_id), c))
                .into_iter()
                .collect(),
            _ => unreachable!(),
        };
        for (cid, text) in captions {
            captions_total += 1;
            let (mut any_lower, mut any_est, mut any_upper) = (false, false, false);
            for token in tokenize(&text, taxonomy) {
                if !token.pos.is_open_class() {
                    continue;
                }
                let all = taxonomy.all_synsets_of_lemma(&token.lemma);
                if all.is_empty() {
                    continue;
                }
                let upper_q = all.iter().any(|s| listed.contains(s));
                if !upper_q {
                    continue;
                }
                let lower_q = all.iter().all(|s| listed.contains(s));
                let preferred = token.pos.wordnet_pos().unwrap_or(crate::wordnet::Pos::Noun);
                let est_q = taxonomy
                    .most_common_synset(&token.lemma, preferred)
                    .is_ok_and(|s| listed.contains(&s));
                any_lower |= lower_q;
                any_est |= est_q;
                any_upper = true;

                let level = if lower_q {
                    "lower"
                } else if est_q {
                    "estimate"
                } else {
                    "upper"
                };
                let mut case = HarmCase::new(bundle.image_id.clone(), "demeaning_words");
                case.stage = Some(stage);
                case.scenario = Some(level.to_string());
                case.word = Some(crate::scenegraph::ResolvedWord {
                    lemma: token.lemma.clone(),
                    synset: taxonomy.most_common_synset(&token.lemma, preferred).ok(),
                    source_pos: preferred,
                });
                case.caption = Some(text.clone());
                case.detail = format!("caption {cid}");
                cases.push(case);
            }
            tri.lower += any_lower as usize;
            tri.estimate += any_est as usize;
            tri.upper += any_upper as usize;
        }
    }
    // strongest level first, then image id
    let level_rank = |c: &HarmCase| match c.scenario.as_deref() {
        Some("lower") => 0,
        Some("estimate") => 1,
        _ => 2,
    };
    cases.sort_by(|a, b| {
        level_rank(a)
            .cmp(&level_rank(b))
            .then_with(|| a.image_id.cmp(&b.image_id))
            .then_with(|| a.detail.cmp(&b.detail))
    });
    for (i, c) in cases.iter_mut().enumerate() {
        c.rank = i + 1;
    }
    Ok(DemeaningWordsReport {
        stage,
        captions_total,
        tri,
        cases,
    })
}

// -------------------------------------------------------------- mentions

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MentionMode {
    /// Per-group fractions with confidence intervals, stage 1 as truth.
    Grouped,
    /// No demographics: stage 3 as truth, ungrouped fraction plus cases.
    Ungrouped,
}

#[derive(Debug, Clone, Serialize)]
pub struct MentionStage {
    pub stage: Stage,
    pub group_a: String,
    pub group_b: String,
    pub n_a: usize,
    pub n_b: usize,
    /// Fractions of images whose stage content does not mention a person.
    pub not_mentioned_a: f64,
    pub not_mentioned_b: f64,
    pub ci: ProportionCi,
}

#[derive(Debug, Clone, Serialize)]
pub struct MentionReport {
    pub mode: MentionMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<GroupAxis>,
    pub area_threshold: f64,
    pub restricted_images: usize,
    pub stages: Vec<MentionStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ungrouped_not_mentioned: Option<f64>,
    pub cases: Vec<HarmCase>,
}

fn person_synsets(lists: &WordListSet, taxonomy: &Taxonomy) -> Result<BTreeSet<SynsetId>> {
    let person_words = lists
        .person_words
        .as_ref()
        .ok_or_else(|| Error::Config("person-mention scan needs person_words.txt".to_string()))?;
    let roots: Vec<SynsetId> = person_words.entries.iter().copied().collect();
    taxonomy.subtree_union(&roots)
}

fn mentions_person(graph: &SceneGraph, person_set: &BTreeSet<SynsetId>) -> bool {
    graph.object_synsets().iter().any(|s| person_set.contains(s))
}

/// Measures, per social group, how often people depicted in images go
/// unmentioned. With demographics: images whose person boxes cover more
/// than the area threshold, stage 1 as truth, fractions per group at
/// stages 2, 3, and 4 with proportion intervals. Without demographics:
/// stage 3 as truth and stage 4 as measured, ungrouped, with a case list.
pub fn person_mention_disparity(
    corpus: &Corpus,
    axis: GroupAxis,
    area_threshold: f64,
    lists: &WordListSet,
    taxonomy: &Taxonomy,
) -> Result<MentionReport> {
    let person_set = person_synsets(lists, taxonomy)?;
    let grouped = corpus.kind == CorpusKind::Coco
        && corpus.has_demographics(axis)
        && corpus.stage_count(Stage::S1) > 0;
    if !grouped {
        return person_mention_ungrouped(corpus, area_threshold, &person_set);
    }

    let (name_a, name_b) = axis.group_names();
    let mut restricted: Vec<&crate::corpus::StageBundle> = Vec::new();
    for bundle in corpus.bundles.values() {
        let Some(boxes) = &bundle.stage1_boxes else {
            continue;
        };
        let person_area: f64 = boxes
            .iter()
            .filter(|b| b.synset.is_some_and(|s| person_set.contains(&s)))
            .map(|b| b.area())
            .sum();
        if person_area > area_threshold {
            restricted.push(bundle);
        }
    }

    let mut stages = Vec::new();
    for stage in [Stage::S2, Stage::S3, Stage::S4] {
        let mut n = BTreeMap::from([(name_a, 0usize), (name_b, 0usize)]);
        let mut misses = BTreeMap::from([(name_a, 0usize), (name_b, 0usize)]);
        for bundle in &restricted {
            let Some(group) = bundle.demographics.as_ref().and_then(|d| d.group(axis)) else {
                continue;
            };
            let Some(view) = bundle.stage_view(stage) else {
                continue;
            };
            *n.get_mut(group).expect("axis group") += 1;
            if !mentions_person(&view, &person_set) {
                *misses.get_mut(group).expect("axis group") += 1;
            }
        }
        if n[name_a] == 0 || n[name_b] == 0 {
            continue;
        }
        let ci = proportion_diff_ci(misses[name_a], n[name_a], misses[name_b], n[name_b])?;
        stages.push(MentionStage {
            stage,
            group_a: name_a.to_string(),
            group_b: name_b.to_string(),
            n_a: n[name_a],
            n_b: n[name_b],
            not_mentioned_a: misses[name_a] as f64 / n[name_a] as f64,
            not_mentioned_b: misses[name_b] as f64 / n[name_b] as f64,
            ci,
        });
    }
    Ok(MentionReport {
        mode: MentionMode::Grouped,
        axis: Some(axis),
        area_threshold,
        restricted_images: restricted.len(),
        stages,
        ungrouped_not_mentioned: None,
        cases: Vec::new(),
    })
}

fn person_mention_ungrouped(
    corpus: &Corpus,
    area_threshold: f64,
    person_set: &BTreeSet<SynsetId>,
) -> Result<MentionReport> {
    let mut total = 0usize;
    let mut missed = 0usize;
    let mut cases = Vec::new();
    for bundle in corpus.bundles.values() {
        let (Some(truth), Some(measured)) =
            (bundle.stage_view(Stage::S3), bundle.stage_view(Stage::S4))
        else {
            continue;
        };
        if !mentions_person(&truth, person_set) {
            continue;
        }
        total += 1;
        if !mentions_person(&measured, person_set) {
            missed += 1;
            let mut case = HarmCase::new(bundle.image_id.clone(), "person_not_mentioned");
            case.stage_pair = Some(StagePair::new(Stage::S3, Stage::S4)?);
            case.caption = bundle.stage4_caption.clone();
            case.detail = format!(
                "human: {}",
                bundle
                    .stage3_captions
                    .iter()
                    .map(|(_, c)| c.as_str())
                    .collect::<Vec<_>>()
                    .join(" / ")
            );
            cases.push(case);
        }
    }
    for (i, c) in cases.iter_mut().enumerate() {
        c.rank = i + 1;
    }
    Ok(MentionReport {
        mode: MentionMode::Ungrouped,
        axis: None,
        area_threshold,
        restricted_images: total,
        stages: Vec::new(),
        ungrouped_not_mentioned: if total == 0 {
            None
        } else {
            Some(missed as f64 / total as f64)
        },
        cases,
    })
}

// ---------------------------------------------------------- context rules

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextRuleId {
    BlackMenBoys,
    WomenGirls,
    WeaponDarker,
    PeopleAnimals,
}

impl ContextRuleId {
    pub const ALL: [ContextRuleId; 4] = [
        ContextRuleId::BlackMenBoys,
        ContextRuleId::WomenGirls,
        ContextRuleId::WeaponDarker,
        ContextRuleId::PeopleAnimals,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ContextRuleId::BlackMenBoys => "black_men_boys",
            ContextRuleId::WomenGirls => "women_girls",
            ContextRuleId::WeaponDarker => "weapon_darker",
            ContextRuleId::PeopleAnimals => "people_animals",
        }
    }

    fn needs_skin_tone(self) -> bool {
        matches!(self, ContextRuleId::BlackMenBoys | ContextRuleId::WeaponDarker)
    }
}

impl fmt::Display for ContextRuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ContextRuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ContextRuleId> {
        match s {
            "black_men_boys" => Ok(ContextRuleId::BlackMenBoys),
            "women_girls" => Ok(ContextRuleId::WomenGirls),
            "weapon_darker" => Ok(ContextRuleId::WeaponDarker),
            "people_animals" => Ok(ContextRuleId::PeopleAnimals),
            other => Err(Error::Config(format!("unknown context rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContextConfig {
    pub weapon_roots: Vec<SynsetId>,
    pub animal_roots: Vec<SynsetId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextReport {
    pub pair: StagePair,
    pub rules_run: Vec<String>,
    pub notices: Vec<String>,
    pub per_rule_counts: BTreeMap<String, usize>,
    pub cases: Vec<HarmCase>,
    /// Prevalence comparisons across rules are confounded by the groups'
    /// base rates in the corpus; counts are evidence, not relative rates.
    pub base_rate_caveat: String,
}

const CHILD_LEMMAS: &[&str] = &["boy", "girl", "child", "kid", "baby", "toddler", "infant"];

/// Applies the context-specific rules over a stage pair. Rules whose
/// required annotations are absent from the corpus are skipped with an
/// explicit notice.
pub fn context_specific(
    corpus: &Corpus,
    rules: &[ContextRuleId],
    pair: StagePair,
    config: &ContextConfig,
    lists: &WordListSet,
    taxonomy: &Taxonomy,
) -> Result<ContextReport> {
    let person_set = person_synsets(lists, taxonomy)?;
    let weapon_set = taxonomy.subtree_union(&config.weapon_roots)?;
    let animal_set = taxonomy.subtree_union(&config.animal_roots)?;

    let has_skin = corpus.has_demographics(GroupAxis::SkinTone);
    let mut notices = Vec::new();
    let active: Vec<ContextRuleId> = rules
        .iter()
        .copied()
        .filter(|r| {
            if r.needs_skin_tone() && !has_skin {
                notices.push(format!(
                    "rule {r} skipped: corpus has no skin-tone annotations"
                ));
                false
            } else {
                true
            }
        })
        .collect();

    let selection = select_pair(corpus, pair);
    let mut cases = Vec::new();
    let mut per_rule_counts: BTreeMap<String, usize> =
        active.iter().map(|r| (r.tag().to_string(), 0)).collect();

    for item in &selection.items {
        let bundle = &corpus.bundles[&item.image_id];
        let demo = bundle.demographics.as_ref();
        let darker = demo.map(|d| d.skin_tone == crate::corpus::SkinTone::Darker).unwrap_or(false);

        let truth_lemmas: BTreeSet<String> =
            item.truth.all_lemmas().iter().map(|s| s.to_string()).collect();
        let truth_synsets = item.truth.all_synsets();
        let measured_lemmas: BTreeSet<String> =
            item.measured.all_lemmas().iter().map(|s| s.to_string()).collect();
        let measured_objects = item.measured.object_synsets();

        let truth_has_person = item
            .truth
            .object_synsets()
            .iter()
            .any(|s| person_set.contains(s));
        let truth_has_child = CHILD_LEMMAS.iter().any(|l| truth_lemmas.contains(*l));
        let adult = |direct: &str, gender: crate::corpus::Gender| -> bool {
            if truth_has_child {
                return false;
            }
            truth_lemmas.contains(direct)
                || (truth_has_person && demo.map(|d| d.gender == gender).unwrap_or(false))
        };
        let adult_male = adult("man", crate::corpus::Gender::Male);
        let adult_female = adult("woman", crate::corpus::Gender::Female);

        for rule in &active {
            let fired = match rule {
                ContextRuleId::BlackMenBoys => {
                    darker && adult_male && measured_lemmas.contains("boy")
                }
                ContextRuleId::WomenGirls => adult_female && measured_lemmas.contains("girl"),
                ContextRuleId::WeaponDarker => {
                    darker
                        && measured_objects.iter().any(|s| {
                            weapon_set.contains(s) && !has_counterpart_set(taxonomy, *s, &truth_synsets)
                        })
                }
                ContextRuleId::PeopleAnimals => {
                    truth_has_person
                        && measured_objects.iter().any(|s| {
                            animal_set.contains(s) && !has_counterpart_set(taxonomy, *s, &truth_synsets)
                        })
                }
            };
            if fired {
                *per_rule_counts.get_mut(rule.tag()).expect("active rule") += 1;
                let mut case = HarmCase::new(item.image_id.clone(), "context_specific");
                case.stage_pair = Some(pair);
                case.scenario = Some(rule.tag().to_string());
                case.caption = bundle
                    .captions_at(pair.measured())
                    .first()
                    .cloned();
                cases.push(case);
            }
        }
    }
    cases.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then_with(|| a.image_id.cmp(&b.image_id))
    });
    for (i, c) in cases.iter_mut().enumerate() {
        c.rank = i + 1;
    }
    Ok(ContextReport {
        pair,
        rules_run: active.iter().map(|r| r.tag().to_string()).collect(),
        notices,
        per_rule_counts,
        cases,
        base_rate_caveat: "Rule counts are not comparable to each other: groups appear in the \
corpus at very different base rates, so a more prevalent rule does not indicate a more \
prevalent harm."
            .to_string(),
    })
}

fn has_counterpart_set(
    taxonomy: &Taxonomy,
    synset: SynsetId,
    truth: &BTreeSet<SynsetId>,
) -> bool {
    truth.contains(&synset)
        || truth.iter().any(|t| {
            taxonomy.is_hyponym_of(synset, *t).unwrap_or(false)
                || taxonomy.is_hyponym_of(*t, synset).unwrap_or(false)
        })
}

// ------------------------------------------------------- identity nouns

/// Flags caption occurrences of identity adjectives used as noun heads:
/// no noun follows before a phrase boundary, and the occurrence sits in a
/// determiner/adjective-introduced (or coordinated) noun position rather
/// than a predicative one.
pub fn identity_adjective_as_noun(
    corpus: &Corpus,
    stage: Stage,
    targets: &BTreeSet<String>,
    taxonomy: &Taxonomy,
) -> Result<Vec<HarmCase>> {
    if !matches!(stage, Stage::S3 | Stage::S4) {
        return Err(Error::Config(format!(
            "identity-noun scan runs on caption stages, not {stage}"
        )));
    }
    let mut cases = Vec::new();
    for bundle in corpus.bundles.values() {
        let captions: Vec<(String, String)> = match stage {
            Stage::S3 => bundle.stage3_captions.clone(),
            Stage::S4 => bundle
                .stage4_caption
                .clone()
                .map(|c| (format!("{}#s", bundle.image_id), c))
                .into_iter()
                .collect(),
            _ => unreachable!(),
        };
        for (cid, text) in captions {
            let tokens = tokenize(&text, taxonomy);
            for i in 0..tokens.len() {
                if !targets.contains(&tokens[i].lemma) {
                    continue;
                }
                if !noun_follows_is_absent(&tokens, i) || !nounish_position(&tokens, i, taxonomy) {
                    continue;
                }
                let mut case = HarmCase::new(bundle.image_id.clone(), "identity_noun");
                case.stage = Some(stage);
                case.word = Some(crate::scenegraph::ResolvedWord {
                    lemma: tokens[i].lemma.clone(),
                    synset: taxonomy
                        .most_common_synset(&tokens[i].lemma, crate::wordnet::Pos::Noun)
                        .ok(),
                    source_pos: crate::wordnet::Pos::Noun,
                });
                case.caption = Some(text.clone());
                case.detail = format!("caption {cid}, token {}", tokens[i].index);
                cases.push(case);
            }
        }
    }
    for (i, c) in cases.iter_mut().enumerate() {
        c.rank = i + 1;
    }
    Ok(cases)
}

/// True when no noun token follows before a phrase boundary (preposition,
/// verb, copula, or end of caption).
fn noun_follows_is_absent(tokens: &[crate::scenegraph::TaggedToken], i: usize) -> bool {
    for t in &tokens[i + 1..] {
        match t.pos {
            TokenPos::Noun => return false,
            TokenPos::Prep | TokenPos::Verb | TokenPos::Copula => return true,
            _ => {}
        }
    }
    true
}

/// Scanning left over conjunctions, numerals, and adverbs: a determiner or
/// adjective licenses the noun position; a coordinated noun-tagged word
/// that itself has an adjective sense ("male and female") does too.
/// Anything else (copula, verb, preposition, start of caption) is a
/// predicative or bare position and does not fire.
fn nounish_position(
    tokens: &[crate::scenegraph::TaggedToken],
    i: usize,
    taxonomy: &Taxonomy,
) -> bool {
    let mut k = i;
    while k > 0 {
        k -= 1;
        match tokens[k].pos {
            TokenPos::Det | TokenPos::Adj => return true,
            TokenPos::Conj | TokenPos::Num | TokenPos::Adv => continue,
            TokenPos::Noun => {
                return taxonomy.contains_lemma(&tokens[k].lemma, crate::wordnet::Pos::Adj)
            }
            _ => return false,
        }
    }
    false
}
