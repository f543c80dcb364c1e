//! Taxonomy engine tests against the hand-built mini fixture and the
//! real-data extract, with independent oracles for counts, reachability,
//! and path-based similarity.

use capaudit::wordnet::{load_word_lists, Pos, SynsetId, Taxonomy, WordListPurpose};
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn mini() -> Taxonomy {
    Taxonomy::load(&fixture("wordnet-mini")).expect("mini fixture loads")
}

fn extract() -> Taxonomy {
    Taxonomy::load(&fixture("wordnet-extract")).expect("extract fixture loads")
}

/// Counts data lines the dumb way, independent of the parser: every
/// non-empty line that does not start with a space is one synset.
fn count_data_lines(dir: &Path) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for suffix in ["noun", "verb", "adj", "adv"] {
        let path = dir.join(format!("data.{suffix}"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            let n = text
                .lines()
                .filter(|l| !l.is_empty() && !l.starts_with(' '))
                .count();
            out.insert(suffix.to_string(), n);
        }
    }
    out
}

#[test]
fn mini_fixture_counts_match_line_oracle() {
    let tax = mini();
    let oracle = count_data_lines(&fixture("wordnet-mini"));
    assert_eq!(tax.counts().len(), 4, "four pos sections");
    assert_eq!(tax.len(), 40);
    for (pos, suffix) in [
        (Pos::Noun, "noun"),
        (Pos::Verb, "verb"),
        (Pos::Adj, "adj"),
        (Pos::Adv, "adv"),
    ] {
        assert_eq!(tax.counts()[&pos], oracle[suffix], "{suffix} count");
    }
}

#[test]
fn empty_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = Taxonomy::load(dir.path()).unwrap_err();
    assert!(err.to_string().contains("missing index.noun"), "{err}");
}

#[test]
fn most_common_synset_prefers_sense_rank_and_relaxes_pos() {
    let tax = mini();
    // "widget" is listed under gadget first, toy second.
    let widget = tax.most_common_synset("widget", Pos::Noun).unwrap();
    assert!(tax.synset(widget).unwrap().lemmas.contains(&"gadget".into()));
    // "rock" has both a noun and a verb sense; the preferred pos wins.
    let rock_v = tax.most_common_synset("rock", Pos::Verb).unwrap();
    assert_eq!(rock_v.pos, Pos::Verb);
    // "stone" has no verb sense: the constraint is relaxed, noun first.
    let stone_v = tax.most_common_synset("stone", Pos::Verb).unwrap();
    assert_eq!(stone_v.pos, Pos::Noun);
    // "fast" only exists as an adverb here: relaxation scans down to it.
    let fast = tax.most_common_synset("fast", Pos::Noun).unwrap();
    assert_eq!(fast.pos, Pos::Adv);
    // Absent lemma.
    assert!(tax.most_common_synset("zzxq", Pos::Noun).is_err());
}

#[test]
fn extract_resolves_paper_style_examples() {
    let tax = extract();
    let big = tax.most_common_synset("big", Pos::Adj).unwrap();
    let lemmas = &tax.synset(big).unwrap().lemmas;
    assert!(lemmas.contains(&"large".to_string()), "{lemmas:?}");
    let controller = tax.most_common_synset("controller", Pos::Noun).unwrap();
    let lemmas = &tax.synset(controller).unwrap().lemmas;
    assert!(lemmas.contains(&"accountant".to_string()), "{lemmas:?}");
}

#[test]
fn hyponymy_is_strict_reachability() {
    let tax = mini();
    let rock = tax.most_common_synset("rock", Pos::Noun).unwrap();
    let object = tax.most_common_synset("object", Pos::Noun).unwrap();
    let entity = tax.most_common_synset("entity", Pos::Noun).unwrap();
    let robot = tax.most_common_synset("robot", Pos::Noun).unwrap();
    let living = tax.most_common_synset("living_thing", Pos::Noun).unwrap();
    assert!(tax.is_hyponym_of(rock, object).unwrap());
    assert!(!tax.is_hyponym_of(object, rock).unwrap());
    assert!(tax.is_hyponym_of(rock, entity).unwrap());
    assert!(!tax.is_hyponym_of(rock, rock).unwrap(), "irreflexive");
    // robot inherits from both parents
    assert!(tax.is_hyponym_of(robot, object).unwrap());
    assert!(tax.is_hyponym_of(robot, living).unwrap());
    let unknown = SynsetId::new(Pos::Noun, 99_999_999);
    assert!(tax.is_hyponym_of(unknown, entity).is_err());
}

#[test]
fn extract_hyponymy_matches_real_data() {
    let tax = extract();
    let couple = tax.most_common_synset("couple", Pos::Noun).unwrap();
    let group = tax.most_common_synset("group", Pos::Noun).unwrap();
    assert!(tax.is_hyponym_of(couple, group).unwrap());
    let fork = tax.most_common_synset("fork", Pos::Noun).unwrap();
    let eating_utensil = tax.most_common_synset("eating_utensil", Pos::Noun).unwrap();
    let tableware = tax.most_common_synset("tableware", Pos::Noun).unwrap();
    assert!(tax.is_hyponym_of(fork, eating_utensil).unwrap());
    assert!(tax.is_hyponym_of(fork, tableware).unwrap());
    assert!(!tax.is_hyponym_of(tableware, fork).unwrap());
}

/// Independent similarity oracle: recursive longest-chain depth and
/// min-over-common-ancestors shortest path, written against the record
/// structure only.
struct Oracle {
    depth_by_pos: BTreeMap<Pos, u32>,
}

impl Oracle {
    fn new(tax: &Taxonomy, ids: &[SynsetId]) -> Oracle {
        fn chain(tax: &Taxonomy, id: SynsetId, memo: &mut HashMap<SynsetId, u32>) -> u32 {
            if let Some(d) = memo.get(&id) {
                return *d;
            }
            let rec = tax.synset(id).unwrap();
            let d = rec
                .hypernyms
                .iter()
                .map(|h| chain(tax, *h, memo))
                .max()
                .map_or(1, |m| m + 1);
            memo.insert(id, d);
            d
        }
        let mut memo = HashMap::new();
        let mut depth_by_pos = BTreeMap::new();
        for id in ids {
            let d = chain(tax, *id, &mut memo);
            let e = depth_by_pos.entry(id.pos).or_insert(0);
            *e = (*e).max(d);
        }
        Oracle { depth_by_pos }
    }

    fn up_distances(tax: &Taxonomy, id: SynsetId) -> HashMap<SynsetId, u32> {
        let mut dist: HashMap<SynsetId, u32> = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        dist.insert(id, 0);
        queue.push_back(id);
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            for h in &tax.synset(cur).unwrap().hypernyms {
                if !dist.contains_key(h) || dist[h] > d + 1 {
                    dist.insert(*h, d + 1);
                    queue.push_back(*h);
                }
            }
        }
        dist
    }

    fn lch(&self, tax: &Taxonomy, a: SynsetId, b: SynsetId) -> Option<f64> {
        if a.pos != b.pos {
            return None;
        }
        let da = Self::up_distances(tax, a);
        let db = Self::up_distances(tax, b);
        let path = da
            .iter()
            .filter_map(|(k, v)| db.get(k).map(|w| v + w))
            .min()?
            + 1;
        let depth = *self.depth_by_pos.get(&a.pos)?;
        Some(-((path as f64) / (2.0 * depth as f64)).ln())
    }
}

fn all_ids(tax: &Taxonomy, pos: Pos, lemmas: &[&str]) -> Vec<SynsetId> {
    let mut out = BTreeSet::new();
    for l in lemmas {
        out.extend(tax.synsets_for(l, pos).iter().copied());
    }
    out.into_iter().collect()
}

#[test]
fn lch_matches_bfs_oracle_on_all_mini_pairs() {
    let tax = mini();
    let nouns = all_ids(
        &tax,
        Pos::Noun,
        &[
            "entity",
            "object",
            "living_thing",
            "rock",
            "tool",
            "toy",
            "gadget",
            "robot",
            "plant",
            "animal",
            "fungus",
            "germ",
        ],
    );
    assert_eq!(nouns.len(), 12);
    let verbs = all_ids(
        &tax,
        Pos::Verb,
        &["act", "move", "consume", "run", "walk", "jump", "swim", "shake", "eat", "drink"],
    );
    assert_eq!(verbs.len(), 10);
    let mut ids = nouns.clone();
    ids.extend(&verbs);
    let oracle = Oracle::new(&tax, &ids);
    assert_eq!(oracle.depth_by_pos[&Pos::Noun], 3);
    assert_eq!(tax.max_depth(Pos::Noun), 3);

    for set in [&nouns, &verbs] {
        for &a in set.iter() {
            for &b in set.iter() {
                let got = tax.lch_similarity(a, b).unwrap();
                let want = oracle.lch(&tax, a, b).unwrap();
                assert!(
                    (got - want).abs() < 1e-9,
                    "lch({a},{b}) = {got}, oracle {want}"
                );
            }
        }
    }

    // Hand-computed anchors with D=3: identity and siblings.
    let rock = tax.most_common_synset("rock", Pos::Noun).unwrap();
    let tool = tax.most_common_synset("tool", Pos::Noun).unwrap();
    assert!((tax.lch_similarity(rock, rock).unwrap() - (6.0_f64).ln()).abs() < 1e-9);
    assert!((tax.lch_similarity(rock, tool).unwrap() - (2.0_f64).ln()).abs() < 1e-9);
}

#[test]
fn lch_rejects_cross_pos_and_disconnected() {
    let tax = mini();
    let rock = tax.most_common_synset("rock", Pos::Noun).unwrap();
    let run = tax.most_common_synset("run", Pos::Verb).unwrap();
    assert!(tax.lch_similarity(rock, run).is_err());
    let big = tax.most_common_synset("big", Pos::Adj).unwrap();
    let red = tax.most_common_synset("red", Pos::Adj).unwrap();
    assert!(tax.lch_similarity(big, red).is_err(), "no adjective hierarchy");
}

#[test]
fn subtree_equals_fixed_point_expansion() {
    let tax = mini();
    let entity = tax.most_common_synset("entity", Pos::Noun).unwrap();
    let got = tax.subtree(entity).unwrap();
    assert_eq!(got.len(), 12, "all mini nouns");

    // Oracle: repeated one-step hyponym expansion until stable.
    let mut oracle = BTreeSet::from([entity]);
    loop {
        let mut next = oracle.clone();
        for id in &oracle {
            next.extend(tax.synset(*id).unwrap().hyponyms.iter().copied());
        }
        if next == oracle {
            break;
        }
        oracle = next;
    }
    assert_eq!(got, oracle);

    let germ = tax.most_common_synset("germ", Pos::Noun).unwrap();
    assert_eq!(tax.subtree(germ).unwrap().len(), 1, "leaf is a singleton");
}

#[test]
fn round_trip_every_lemma_maps_back() {
    // Load-time validation already enforces the invariant globally; this
    // re-checks it from the outside over everything reachable from the
    // fixtures' roots.
    for tax in [mini(), extract()] {
        let mut checked = 0usize;
        for pos in Pos::ALL {
            for id in probe_ids(&tax, pos) {
                let rec = tax.synset(id).unwrap();
                for lemma in &rec.lemmas {
                    assert!(
                        tax.synsets_for(lemma, pos).contains(&id),
                        "{lemma} of {id} misses the sense index"
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }
}

fn probe_ids(tax: &Taxonomy, pos: Pos) -> Vec<SynsetId> {
    let mut out = BTreeSet::new();
    let probes: &[&str] = match pos {
        Pos::Noun => &["entity", "physical_entity", "abstraction"],
        Pos::Verb => &["act", "move", "travel", "be", "have"],
        Pos::Adj => &["big", "small", "red", "wooden"],
        Pos::Adv => &["very", "slowly", "fast", "well"],
    };
    for p in probes {
        for id in tax.synsets_for(p, pos) {
            out.extend(tax.subtree(*id).unwrap());
        }
    }
    out.into_iter().collect()
}

#[test]
fn malformed_and_inconsistent_databases_fail_loudly() {
    let dir = tempfile::tempdir().unwrap();
    // hypernym with no inverse hyponym
    std::fs::write(
        dir.path().join("data.noun"),
        "00001000 03 n 01 alpha 0 000 | top\n00002000 03 n 01 beta 0 001 @ 00001000 n 0000 | child\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("index.noun"),
        "alpha n 1 0 1 0 00001000\nbeta n 1 0 1 0 00002000\n",
    )
    .unwrap();
    let err = Taxonomy::load(dir.path()).unwrap_err();
    assert!(err.to_string().contains("hyponym"), "{err}");

    // dangling pointer
    std::fs::write(
        dir.path().join("data.noun"),
        "00001000 03 n 01 alpha 0 001 @ 00999999 n 0000 | top\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("index.noun"), "alpha n 1 0 1 0 00001000\n").unwrap();
    let err = Taxonomy::load(dir.path()).unwrap_err();
    assert!(err.to_string().contains("dangling"), "{err}");

    // malformed line reports file and line number
    std::fs::write(dir.path().join("data.noun"), "garbage line here\n").unwrap();
    let err = Taxonomy::load(dir.path()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("data.noun:1"), "{msg}");
}

#[test]
fn word_lists_resolve_report_and_split_by_category() {
    let tax = extract();
    let dir = tempfile::tempdir().unwrap();

    let utensil = tax.most_common_synset("utensil", Pos::Noun).unwrap();
    let single = dir.path().join("one.txt");
    std::fs::write(&single, format!("utensil.n {}\n", utensil.offset)).unwrap();
    let file = load_word_lists(&single, WordListPurpose::Weapons, &tax).unwrap();
    assert_eq!(file.lists.len(), 1);
    assert_eq!(file.lists[0].entries.len(), 1);
    assert!(file.warnings.is_empty());

    let dangling = dir.path().join("dangling.txt");
    std::fs::write(
        &dangling,
        format!("utensil.n {}\nutensil.n 99999999\n", utensil.offset),
    )
    .unwrap();
    let file = load_word_lists(&dangling, WordListPurpose::Weapons, &tax).unwrap();
    assert_eq!(file.warnings.len(), 1);
    assert!(file.warnings[0].contains("dangling.txt:2"), "{:?}", file.warnings);

    let happy = tax.most_common_synset("happy", Pos::Adj).unwrap();
    let pretty = tax.most_common_synset("beautiful", Pos::Adj).unwrap();
    let cats = dir.path().join("adjectives.txt");
    std::fs::write(
        &cats,
        format!(
            "# people descriptor categories\ncategory: mood\nhappy.a {}\n\ncategory: attractiveness\nbeautiful.a {}\n",
            happy.offset, pretty.offset
        ),
    )
    .unwrap();
    let file = load_word_lists(&cats, WordListPurpose::AdjectiveCategory, &tax).unwrap();
    assert_eq!(file.lists.len(), 2);
    assert_eq!(file.lists[0].name, "adjectives:mood");
    assert_eq!(file.lists[1].name, "adjectives:attractiveness");

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "# nothing\n").unwrap();
    assert!(load_word_lists(&empty, WordListPurpose::Weapons, &tax).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hyponymy_transitive_and_irreflexive(a in 0usize..12, b in 0usize..12, c in 0usize..12) {
        let tax = mini();
        let nouns = all_ids(&tax, Pos::Noun, &[
            "entity", "object", "living_thing", "rock", "tool", "toy",
            "gadget", "robot", "plant", "animal", "fungus", "germ",
        ]);
        let (a, b, c) = (nouns[a], nouns[b], nouns[c]);
        prop_assert!(!tax.is_hyponym_of(a, a).unwrap());
        if tax.is_hyponym_of(a, b).unwrap() && tax.is_hyponym_of(b, c).unwrap() {
            prop_assert!(tax.is_hyponym_of(a, c).unwrap());
        }
        // antisymmetry
        if tax.is_hyponym_of(a, b).unwrap() {
            prop_assert!(!tax.is_hyponym_of(b, a).unwrap());
        }
    }

    #[test]
    fn lch_symmetric_and_maximal_on_identity(a in 0usize..12, b in 0usize..12) {
        let tax = mini();
        let nouns = all_ids(&tax, Pos::Noun, &[
            "entity", "object", "living_thing", "rock", "tool", "toy",
            "gadget", "robot", "plant", "animal", "fungus", "germ",
        ]);
        let (a, b) = (nouns[a], nouns[b]);
        let ab = tax.lch_similarity(a, b).unwrap();
        let ba = tax.lch_similarity(b, a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        let aa = tax.lch_similarity(a, a).unwrap();
        if a != b {
            prop_assert!(ab < aa);
        }
    }
}
