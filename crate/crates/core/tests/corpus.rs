//! Corpus ingestion, stage pairing, and bundle-store round-trip tests.

use capaudit::corpus::{
    attach_system_outputs, ingest_cc, ingest_coco, load_corpus, save_corpus, select_pair, Stage,
    StagePair,
};
use capaudit::wordnet::{Pos, Taxonomy};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn tax() -> Taxonomy {
    Taxonomy::load(&fixture("wordnet-extract")).unwrap()
}

fn coco(tax: &Taxonomy) -> capaudit::corpus::Corpus {
    ingest_coco(
        &fixture("corpus-coco/instances.json"),
        &fixture("corpus-coco/captions.json"),
        Some(&fixture("corpus-coco/vg.json")),
        Some(&fixture("corpus-coco/demographics.csv")),
        tax,
    )
    .unwrap()
}

#[test]
fn coco_fixture_ingests_with_unions_and_warnings() {
    let tax = tax();
    let corpus = coco(&tax);
    assert_eq!(corpus.len(), 12);
    // image 11 has no captions: warning, stage 3 absent
    assert!(corpus.warnings.iter().any(|w| w.contains("image 11")));
    assert!(!corpus.bundles["11"].has_stage(Stage::S3));

    // every captioned bundle unions its five captions
    let b1 = &corpus.bundles["1"];
    assert_eq!(b1.stage3_captions.len(), 5);
    let graph = b1.stage3_graph.as_ref().unwrap();
    assert_eq!(graph.caption_ids.len(), 5);
    let per_caption: usize = b1
        .stage3_captions
        .iter()
        .map(|(cid, text)| {
            capaudit::scenegraph::parse_caption(text, &tax, cid)
                .graph
                .tuples
                .len()
        })
        .sum();
    assert!(graph.tuples.len() <= per_caption, "set-union bound");

    // stage-1 boxes are normalized with synsets resolved
    for b in b1.stage1_boxes.as_ref().unwrap() {
        b.validate().unwrap();
        assert!(b.synset.is_some(), "{} unresolved", b.label);
    }
    // augmentation became stage-1 tuples
    assert!(b1.stage1_tuples.as_ref().unwrap().tuples.len() >= 4);
    // demographics attached where provided
    assert!(corpus.bundles["2"].demographics.is_some());
    assert!(corpus.bundles["1"].demographics.is_none());
}

#[test]
fn coco_referential_integrity_failures_are_loud() {
    let tax = tax();
    let dir = tempfile::tempdir().unwrap();
    let bad_caps = dir.path().join("captions.json");
    std::fs::write(
        &bad_caps,
        r#"{"annotations": [{"id": 1, "image_id": 999, "caption": "a dog"}]}"#,
    )
    .unwrap();
    let err = ingest_coco(
        &fixture("corpus-coco/instances.json"),
        &bad_caps,
        None,
        None,
        &tax,
    )
    .unwrap_err();
    assert!(err.to_string().contains("999"), "{err}");

    let bad_demo = dir.path().join("demo.csv");
    std::fs::write(&bad_demo, "image_id,gender,skin_tone,x,y,w,h\n999,male,darker,1,1,5,5\n").unwrap();
    let err = ingest_coco(
        &fixture("corpus-coco/instances.json"),
        &fixture("corpus-coco/captions.json"),
        None,
        Some(&bad_demo),
        &tax,
    )
    .unwrap_err();
    assert!(err.to_string().contains("unknown image 999"), "{err}");
}

#[test]
fn cc_fixture_ingests_single_caption_graphs() {
    let tax = tax();
    let corpus = ingest_cc(&fixture("corpus-cc.tsv"), &tax).unwrap();
    assert_eq!(corpus.len(), 5);
    for bundle in corpus.bundles.values() {
        assert!(bundle.has_stage(Stage::S3));
        assert!(!bundle.has_stage(Stage::S1), "no human labels for cc");
        assert_eq!(bundle.stage3_captions.len(), 1);
    }

    let dir = tempfile::tempdir().unwrap();
    let dup = dir.path().join("dup.tsv");
    std::fs::write(&dup, "a\tx y z\na\tother caption\n").unwrap();
    let err = ingest_cc(&dup, &tax).unwrap_err();
    assert!(err.to_string().contains("duplicate image id"), "{err}");

    let missing = dir.path().join("missing.tsv");
    std::fs::write(&missing, "a\tfine caption\nb\n").unwrap();
    let err = ingest_cc(&missing, &tax).unwrap_err();
    assert!(err.to_string().contains("missing.tsv:2"), "{err}");
}

#[test]
fn attach_outputs_sets_and_replaces_stages() {
    let tax = tax();
    let mut corpus = coco(&tax);
    attach_system_outputs(&mut corpus, Stage::S2, &fixture("corpus-coco/s2.tsv"), &tax).unwrap();
    attach_system_outputs(&mut corpus, Stage::S4, &fixture("corpus-coco/s4.tsv"), &tax).unwrap();
    assert_eq!(corpus.stage_count(Stage::S2), 12);
    assert_eq!(corpus.stage_count(Stage::S4), 12);

    let labels = corpus.bundles["1"].stage2_labels.as_ref().unwrap();
    assert!(labels.iter().all(|w| w.source_pos == Pos::Noun));
    assert!(labels.iter().all(|w| w.synset.is_some()));

    // second attach wins, bundle count unchanged
    let before = corpus.len();
    let dir = tempfile::tempdir().unwrap();
    let second = dir.path().join("s4b.tsv");
    std::fs::write(&second, "1\ta dog\n").unwrap();
    attach_system_outputs(&mut corpus, Stage::S4, &second, &tax).unwrap();
    assert_eq!(corpus.len(), before);
    assert_eq!(corpus.bundles["1"].stage4_caption.as_deref(), Some("a dog"));

    // unknown image id fails before any mutation
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "zzz\ta dog\n").unwrap();
    let err = attach_system_outputs(&mut corpus, Stage::S4, &bad, &tax).unwrap_err();
    assert!(err.to_string().contains("zzz"), "{err}");
}

#[test]
fn stage_pairs_enforce_framework_arrows() {
    assert!(StagePair::new(Stage::S1, Stage::S4).is_ok());
    assert!(StagePair::new(Stage::S2, Stage::S3).is_err());
    assert!(StagePair::new(Stage::S4, Stage::S1).is_err());
    assert!("s1:s4".parse::<StagePair>().is_ok());
    assert!("s4:s1".parse::<StagePair>().is_err());
}

#[test]
fn select_pair_yields_intersection_with_explicit_empty_status() {
    let tax = tax();
    let cc = ingest_cc(&fixture("corpus-cc.tsv"), &tax).unwrap();

    // CC has no stage 1: empty result is a status, not an error
    let sel = select_pair(&cc, StagePair::new(Stage::S1, Stage::S4).unwrap());
    assert!(sel.empty);
    assert!(sel.items.is_empty());

    let mut cc = cc;
    attach_system_outputs(&mut cc, Stage::S4, &fixture("cc-s4.tsv"), &tax).unwrap();
    let sel = select_pair(&cc, StagePair::new(Stage::S3, Stage::S4).unwrap());
    assert_eq!(sel.items.len(), 5);

    let coco = coco(&tax);
    let sel = select_pair(&coco, StagePair::new(Stage::S1, Stage::S3).unwrap());
    assert_eq!(sel.items.len(), 11, "image 11 lacks stage 3");
    let min = coco.stage_count(Stage::S1).min(coco.stage_count(Stage::S3));
    assert!(sel.items.len() <= min);
    // stage-1 views contain box synsets as objects
    let item = sel.items.iter().find(|i| i.image_id == "1").unwrap();
    assert!(item.truth.objects().any(|o| o.lemma == "kitchen"));
}

#[test]
fn bundle_store_round_trips_byte_identically() {
    let tax = tax();
    let mut corpus = coco(&tax);
    attach_system_outputs(&mut corpus, Stage::S2, &fixture("corpus-coco/s2.tsv"), &tax).unwrap();
    attach_system_outputs(&mut corpus, Stage::S4, &fixture("corpus-coco/s4.tsv"), &tax).unwrap();

    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    save_corpus(&corpus, dir1.path()).unwrap();
    let loaded = load_corpus(dir1.path()).unwrap();
    assert_eq!(corpus, loaded);
    save_corpus(&loaded, dir2.path()).unwrap();

    let bytes = |dir: &Path| -> BTreeMap<String, Vec<u8>> {
        let mut out = BTreeMap::new();
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            out.insert(
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            );
        }
        out
    };
    assert_eq!(bytes(dir1.path()), bytes(dir2.path()));

    // corrupting a bundle is caught by the manifest hash
    let victim = dir1.path().join("1.bundle");
    let mut text = std::fs::read_to_string(&victim).unwrap();
    text.push_str("w tampered -\n");
    std::fs::write(&victim, text).unwrap();
    let err = load_corpus(dir1.path()).unwrap_err();
    assert!(err.to_string().contains("hash mismatch"), "{err}");
}
