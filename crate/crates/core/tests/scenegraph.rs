//! Caption parser tests: tagger behavior, tuple extraction against the
//! hand-annotated gold fixture, union laws, and determinism.

use capaudit::scenegraph::{parse_caption, tokenize, union_graphs, SceneGraph, TokenPos};
use capaudit::wordnet::{Pos, Taxonomy};
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn tax() -> Taxonomy {
    Taxonomy::load(&fixture("wordnet-extract")).unwrap()
}

#[test]
fn tokenizer_tags_caption_grammar() {
    let tax = tax();
    let toks = tokenize("a woman in a bikini riding a wave", &tax);
    let find = |lemma: &str| toks.iter().find(|t| t.lemma == lemma).unwrap();
    assert_eq!(find("woman").pos, TokenPos::Noun);
    assert_eq!(find("bikini").pos, TokenPos::Noun);
    assert_eq!(find("ride").pos, TokenPos::Verb);
    assert_eq!(find("wave").pos, TokenPos::Noun);

    assert!(tokenize("", &tax).is_empty());

    let toks = tokenize("wooden cabinets", &tax);
    assert_eq!(toks[0].pos, TokenPos::Adj);
    assert_eq!(toks[1].lemma, "cabinet");
    assert_eq!(toks[1].pos, TokenPos::Noun);
}

/// Lemma-level tuple signature for gold comparison.
fn signature(graph: &SceneGraph) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for o in graph.objects() {
        out.insert(format!("O {}", o.lemma));
    }
    for (h, a) in graph.attributes() {
        out.insert(format!("A {} {}", h.lemma, a.lemma));
    }
    for (s, r, o) in graph.relations() {
        out.insert(format!("R {} {} {}", s.lemma, r.lemma, o.lemma));
    }
    out
}

fn load_gold() -> Vec<(String, BTreeSet<String>)> {
    let text = std::fs::read_to_string(fixture("captions-gold.txt")).unwrap();
    let mut out = Vec::new();
    let mut caption: Option<String> = None;
    let mut tuples = BTreeSet::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(c) = line.strip_prefix("caption:") {
            if let Some(prev) = caption.take() {
                out.push((prev, std::mem::take(&mut tuples)));
            }
            caption = Some(c.trim().to_string());
        } else {
            tuples.insert(line.to_string());
        }
    }
    if let Some(prev) = caption {
        out.push((prev, tuples));
    }
    out
}

#[test]
fn gold_fixture_f1_is_at_least_085() {
    let tax = tax();
    let gold = load_gold();
    assert_eq!(gold.len(), 25);
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (caption, want) in &gold {
        let parsed = parse_caption(caption, &tax, "g");
        let got = signature(&parsed.graph);
        let hit = got.intersection(want).count();
        tp += hit;
        fp += got.len() - hit;
        fn_ += want.len() - hit;
        if got != *want {
            eprintln!("caption: {caption}\n  got : {got:?}\n  want: {want:?}");
        }
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    let f1 = 2.0 * precision * recall / (precision + recall);
    eprintln!("tuple F1 = {f1:.4} (p={precision:.4}, r={recall:.4})");
    assert!(f1 >= 0.85, "tuple F1 {f1:.4} below 0.85");
}

#[test]
fn fig_style_kitchen_caption_is_exact() {
    let tax = tax();
    let parsed = parse_caption("a kitchen with wooden cabinets and black appliances", &tax, "c0");
    let got = signature(&parsed.graph);
    let want: BTreeSet<String> = [
        "O kitchen",
        "O cabinet",
        "O appliance",
        "A cabinet wooden",
        "A appliance black",
        "R kitchen with cabinet",
        "R kitchen with appliance",
    ]
    .into_iter()
    .map(str::to_string)
    .collect();
    assert_eq!(got, want);
}

#[test]
fn single_noun_phrase_yields_one_object() {
    let tax = tax();
    let parsed = parse_caption("a dog", &tax, "c0");
    assert_eq!(signature(&parsed.graph), BTreeSet::from(["O dog".to_string()]));
    assert!((parsed.confidence - 1.0).abs() < 1e-12);
}

#[test]
fn resolution_matches_most_common_synset_oracle() {
    let tax = tax();
    for (caption, _) in load_gold() {
        let parsed = parse_caption(&caption, &tax, "g");
        for o in parsed.graph.objects() {
            assert_eq!(o.source_pos, Pos::Noun);
            assert_eq!(o.synset, tax.most_common_synset(&o.lemma, Pos::Noun).ok());
        }
        for (_, a) in parsed.graph.attributes() {
            let expect = tax.most_common_synset(&a.lemma, a.source_pos).ok();
            assert_eq!(a.synset, expect, "attribute {}", a.lemma);
        }
        for (_, r, _) in parsed.graph.relations() {
            assert_eq!(r.source_pos, Pos::Verb);
            assert_eq!(r.synset, tax.most_common_synset(&r.lemma, Pos::Verb).ok());
        }
    }
}

#[test]
fn structural_invariants_hold_on_gold_parses() {
    let tax = tax();
    for (caption, _) in load_gold() {
        let parsed = parse_caption(&caption, &tax, "g");
        parsed.graph.check_invariants().unwrap();
    }
}

#[test]
fn reparsing_is_deterministic() {
    let tax = tax();
    for (caption, _) in load_gold() {
        let a = parse_caption(&caption, &tax, "g").graph.to_text();
        let b = parse_caption(&caption, &tax, "g").graph.to_text();
        assert_eq!(a, b);
    }
}

#[test]
fn serialization_round_trips() {
    let tax = tax();
    for (caption, _) in load_gold() {
        let graph = parse_caption(&caption, &tax, "g").graph;
        let text = graph.to_text();
        let back = SceneGraph::from_text(&text).unwrap();
        assert_eq!(graph, back, "round trip for {caption:?}");
        assert_eq!(text, back.to_text());
    }
}

fn arb_caption() -> impl Strategy<Value = String> {
    let nouns = prop::sample::select(vec![
        "man", "woman", "dog", "cat", "table", "kitchen", "horse", "ball", "car", "tree",
    ]);
    let adjs = prop::sample::select(vec!["big", "red", "old", "wooden", "happy", "small"]);
    let verbs = prop::sample::select(vec!["holding", "riding", "eating", "watching"]);
    let preps = prop::sample::select(vec!["in", "on", "with", "near"]);
    (nouns.clone(), adjs, verbs, preps, nouns).prop_map(|(n1, a, v, p, n2)| {
        format!("a {a} {n1} {v} a {n2} {p} the {n1}")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn union_is_an_idempotent_commutative_monoid(c1 in arb_caption(), c2 in arb_caption(), c3 in arb_caption()) {
        let tax = tax();
        let g1 = parse_caption(&c1, &tax, "a").graph;
        let g2 = parse_caption(&c2, &tax, "b").graph;
        let g3 = parse_caption(&c3, &tax, "c").graph;
        let empty = SceneGraph::new();

        // identity
        prop_assert_eq!(union_graphs([&g1, &empty]), g1.clone());
        // idempotence
        prop_assert_eq!(union_graphs([&g1, &g1]), g1.clone());
        // commutativity
        prop_assert_eq!(union_graphs([&g1, &g2]), union_graphs([&g2, &g1]));
        // associativity
        let left = union_graphs([&union_graphs([&g1, &g2]), &g3]);
        let right = union_graphs([&g1, &union_graphs([&g2, &g3])]);
        prop_assert_eq!(left, right);
        // set-union bound
        let u = union_graphs([&g1, &g2, &g3]);
        prop_assert!(u.tuples.len() <= g1.tuples.len() + g2.tuples.len() + g3.tuples.len());
    }

    #[test]
    fn random_captions_keep_structural_invariants(c in arb_caption()) {
        let tax = tax();
        let parsed = parse_caption(&c, &tax, "p");
        parsed.graph.check_invariants().unwrap();
        prop_assert!(parsed.confidence >= 0.0 && parsed.confidence <= 1.0);
    }
}
