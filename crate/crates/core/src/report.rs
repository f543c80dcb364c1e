//! Report types shared by the measurement suites: harm cases destined for
//! human review, suite status, the assumption ledger, and markdown review
//! sheets.

use crate::corpus::{Stage, StagePair};
use crate::scenegraph::ResolvedWord;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Banner required on review sheets derived from false-positive scans.
pub const FP_UPPER_BOUND_BANNER: &str = "These results are an overinclusive, upper bound. \
Each case is ranked evidence for human review, not a verdict.";

/// One evidence item for human review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmCase {
    pub image_id: String,
    /// Which technique produced the case.
    pub technique: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_pair: Option<StagePair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<ResolvedWord>,
    /// Scenario or rule tag within the technique.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fp_rate: Option<f64>,
    /// 1-based position in the technique's ranking.
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caption: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl HarmCase {
    pub fn new(image_id: impl Into<String>, technique: impl Into<String>) -> HarmCase {
        HarmCase {
            image_id: image_id.into(),
            technique: technique.into(),
            stage_pair: None,
            stage: None,
            word: None,
            scenario: None,
            correlation: None,
            fp_rate: None,
            rank: 0,
            caption: None,
            detail: String::new(),
        }
    }
}

/// Whether a suite ran over data or hit an explicitly empty selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuiteStatus {
    Ok,
    Empty { reason: String },
}

/// A standing assumption of the measurement approach, flagged per run with
/// whether the executed techniques relied on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumption {
    pub id: String,
    pub text: String,
    pub exercised: bool,
}

const ASSUMPTIONS: &[(&str, &str)] = &[
    (
        "word-lists",
        "Supplied word lists are exclusive, exhaustive, and up to date.",
    ),
    (
        "taxonomy",
        "The lexical taxonomy's sense assignments and hierarchy links are correct and current.",
    ),
    (
        "most-common-synset",
        "A word's most common synset is the right sense in caption context.",
    ),
    (
        "labels-ground-truth",
        "Human-generated labels are high quality and usable as ground truth.",
    ),
    (
        "captions-ground-truth",
        "Human-generated captions are high quality and usable as ground truth.",
    ),
    (
        "demographics",
        "Demographic annotations reflect the people depicted.",
    ),
    (
        "single-correct-caption",
        "There is a correct way to caption an image.",
    ),
    (
        "parser",
        "The built-in tagger and tuple extractor are reliable.",
    ),
];

/// The full assumption ledger with the given ids marked exercised.
pub fn assumption_ledger(exercised: &[&str]) -> Vec<Assumption> {
    ASSUMPTIONS
        .iter()
        .map(|(id, text)| Assumption {
            id: id.to_string(),
            text: text.to_string(),
            exercised: exercised.contains(id),
        })
        .collect()
}

/// Envelope written at the top of every report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    pub schema_version: u32,
    pub suite: String,
    /// Echo of the effective configuration, for audit reproducibility.
    pub config: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wordlist_hashes: BTreeMap<String, String>,
    pub assumptions: Vec<Assumption>,
}

impl ReportMeta {
    pub fn new(suite: impl Into<String>) -> ReportMeta {
        ReportMeta {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: 1,
            suite: suite.into(),
            config: BTreeMap::new(),
            seed: None,
            wordlist_hashes: BTreeMap::new(),
            assumptions: Vec::new(),
        }
    }
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Renders the top `limit` cases as a markdown review sheet. The banner is
/// mandatory for sheets derived from false-positive scans.
pub fn render_review_sheet(
    title: &str,
    banner: Option<&str>,
    cases: &[HarmCase],
    limit: usize,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {title}\n\n"));
    if let Some(b) = banner {
        out.push_str(&format!("> {b}\n\n"));
    }
    out.push_str("| rank | image | word | scenario | correlation | fp rate | caption |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for case in cases.iter().take(limit) {
        let word = case
            .word
            .as_ref()
            .map(|w| w.lemma.clone())
            .unwrap_or_default();
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            case.rank,
            md_escape(&case.image_id),
            md_escape(&word),
            md_escape(case.scenario.as_deref().unwrap_or("-")),
            fmt_opt(case.correlation),
            fmt_opt(case.fp_rate),
            md_escape(case.caption.as_deref().unwrap_or("-")),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sheet_keeps_banner_and_table_header() {
        let sheet = render_review_sheet("fp cases", Some(FP_UPPER_BOUND_BANNER), &[], 10);
        assert!(sheet.contains("an overinclusive, upper bound"));
        assert!(sheet.contains("| rank |"));
        assert_eq!(sheet.lines().filter(|l| l.starts_with("| ")).count(), 1);
    }

    #[test]
    fn limit_caps_rows_in_rank_order() {
        let cases: Vec<HarmCase> = (1..=10)
            .map(|i| {
                let mut c = HarmCase::new(format!("img{i}"), "t");
                c.rank = i;
                c
            })
            .collect();
        let sheet = render_review_sheet("cases", None, &cases, 5);
        let rows: Vec<&str> = sheet
            .lines()
            .filter(|l| l.starts_with("| ") && !l.starts_with("| rank"))
            .collect();
        assert_eq!(rows.len(), 5);
        assert!(rows[0].contains("| 1 |"));
        assert!(rows[4].contains("| 5 |"));
    }

    #[test]
    fn ledger_flags_exercised_assumptions() {
        let ledger = assumption_ledger(&["taxonomy", "parser"]);
        assert_eq!(ledger.len(), 8);
        assert!(ledger.iter().any(|a| a.id == "taxonomy" && a.exercised));
        assert!(ledger.iter().any(|a| a.id == "word-lists" && !a.exercised));
    }
}
