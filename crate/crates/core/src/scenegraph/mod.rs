//! Caption parsing: tokenizer, tagger, and rule-based tuple extraction into
//! synset-resolved scene graphs.

mod extract;
mod tokenize;

pub use extract::{extract_tuples, parse_caption, ParsedCaption};
pub use tokenize::{tokenize, TaggedToken, TokenPos};

use crate::error::{Error, Result};
use crate::wordnet::{Pos, SynsetId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A word with its taxonomy resolution. The synset, when present, is the
/// most common sense of the lemma for the word's tuple-role part of speech.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResolvedWord {
    pub lemma: String,
    pub synset: Option<SynsetId>,
    pub source_pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleKind {
    Object,
    Attribute,
    Relation,
}

impl fmt::Display for TupleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TupleKind::Object => "object",
            TupleKind::Attribute => "attribute",
            TupleKind::Relation => "relation",
        })
    }
}

/// One extracted tuple: (object), (object, attribute), or
/// (subject, relation, object).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SceneTuple {
    Object {
        subject: ResolvedWord,
    },
    Attribute {
        subject: ResolvedWord,
        attribute: ResolvedWord,
    },
    Relation {
        subject: ResolvedWord,
        relation: ResolvedWord,
        object: ResolvedWord,
    },
}

impl SceneTuple {
    pub fn kind(&self) -> TupleKind {
        match self {
            SceneTuple::Object { .. } => TupleKind::Object,
            SceneTuple::Attribute { .. } => TupleKind::Attribute,
            SceneTuple::Relation { .. } => TupleKind::Relation,
        }
    }

    pub fn subject(&self) -> &ResolvedWord {
        match self {
            SceneTuple::Object { subject }
            | SceneTuple::Attribute { subject, .. }
            | SceneTuple::Relation { subject, .. } => subject,
        }
    }
}

/// A duplicate-free set of tuples extracted from one or more captions.
///
/// Structural invariants: the subject of every attribute tuple and both
/// ends of every relation tuple also appear as object tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub tuples: BTreeSet<SceneTuple>,
    pub caption_ids: BTreeSet<String>,
}

impl SceneGraph {
    pub fn new() -> SceneGraph {
        SceneGraph::default()
    }

    pub fn objects(&self) -> impl Iterator<Item = &ResolvedWord> {
        self.tuples.iter().filter_map(|t| match t {
            SceneTuple::Object { subject } => Some(subject),
            _ => None,
        })
    }

    pub fn attributes(&self) -> impl Iterator<Item = (&ResolvedWord, &ResolvedWord)> {
        self.tuples.iter().filter_map(|t| match t {
            SceneTuple::Attribute { subject, attribute } => Some((subject, attribute)),
            _ => None,
        })
    }

    pub fn relations(&self) -> impl Iterator<Item = (&ResolvedWord, &ResolvedWord, &ResolvedWord)> {
        self.tuples.iter().filter_map(|t| match t {
            SceneTuple::Relation {
                subject,
                relation,
                object,
            } => Some((subject, relation, object)),
            _ => None,
        })
    }

    /// Every synset mentioned anywhere in the graph.
    pub fn all_synsets(&self) -> BTreeSet<SynsetId> {
        let mut out = BTreeSet::new();
        for t in &self.tuples {
            match t {
                SceneTuple::Object { subject } => out.extend(subject.synset),
                SceneTuple::Attribute { subject, attribute } => {
                    out.extend(subject.synset);
                    out.extend(attribute.synset);
                }
                SceneTuple::Relation {
                    subject,
                    relation,
                    object,
                } => {
                    out.extend(subject.synset);
                    out.extend(relation.synset);
                    out.extend(object.synset);
                }
            }
        }
        out
    }

    pub fn object_synsets(&self) -> BTreeSet<SynsetId> {
        self.objects().filter_map(|w| w.synset).collect()
    }

    /// Every distinct lemma in the graph, any role.
    pub fn all_lemmas(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for t in &self.tuples {
            match t {
                SceneTuple::Object { subject } => {
                    out.insert(subject.lemma.as_str());
                }
                SceneTuple::Attribute { subject, attribute } => {
                    out.insert(subject.lemma.as_str());
                    out.insert(attribute.lemma.as_str());
                }
                SceneTuple::Relation {
                    subject,
                    relation,
                    object,
                } => {
                    out.insert(subject.lemma.as_str());
                    out.insert(relation.lemma.as_str());
                    out.insert(object.lemma.as_str());
                }
            }
        }
        out
    }

    pub fn check_invariants(&self) -> Result<()> {
        let objects: BTreeSet<&ResolvedWord> = self.objects().collect();
        for t in &self.tuples {
            match t {
                SceneTuple::Object { .. } => {}
                SceneTuple::Attribute { subject, .. } => {
                    if !objects.contains(subject) {
                        return Err(Error::Integrity(format!(
                            "attribute head {:?} has no object tuple",
                            subject.lemma
                        )));
                    }
                }
                SceneTuple::Relation {
                    subject, object, ..
                } => {
                    if !objects.contains(subject) || !objects.contains(object) {
                        return Err(Error::Integrity(format!(
                            "relation endpoints {:?}/{:?} missing object tuples",
                            subject.lemma, object.lemma
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Line-oriented serialization with a stable sort order, suitable for
    /// byte-exact diffing. `C` lines carry caption ids; `O`/`A`/`R` lines
    /// carry tuples. Attribute and relation lines carry the synset of their
    /// attribute/relation component; head synsets live on the `O` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for id in &self.caption_ids {
            out.push_str("C ");
            out.push_str(id);
            out.push('\n');
        }
        for t in &self.tuples {
            match t {
                SceneTuple::Object { subject } => {
                    out.push_str(&format!(
                        "O {} {} {}\n",
                        subject.lemma,
                        fmt_synset(subject.synset),
                        subject.source_pos
                    ));
                }
                SceneTuple::Attribute { subject, attribute } => {
                    out.push_str(&format!(
                        "A {} {} {} {}\n",
                        subject.lemma,
                        attribute.lemma,
                        fmt_synset(attribute.synset),
                        attribute.source_pos
                    ));
                }
                SceneTuple::Relation {
                    subject,
                    relation,
                    object,
                } => {
                    out.push_str(&format!(
                        "R {} {} {} {} {}\n",
                        subject.lemma,
                        relation.lemma,
                        object.lemma,
                        fmt_synset(relation.synset),
                        relation.source_pos
                    ));
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<SceneGraph> {
        let mut graph = SceneGraph::new();
        let mut pending: Vec<(usize, Vec<String>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let toks: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            if toks.is_empty() {
                continue;
            }
            match toks[0].as_str() {
                "C" if toks.len() == 2 => {
                    graph.caption_ids.insert(toks[1].clone());
                }
                "O" if toks.len() == 4 => {
                    let subject = word_from_parts(&toks[1], &toks[2], &toks[3], lineno)?;
                    graph.tuples.insert(SceneTuple::Object { subject });
                }
                "A" | "R" => pending.push((lineno, toks)),
                _ => {
                    return Err(Error::parse(
                        "scene graph",
                        lineno,
                        format!("unrecognized line {line:?}"),
                    ))
                }
            }
        }
        // Second pass: heads resolve through their object tuples.
        let heads: std::collections::BTreeMap<String, ResolvedWord> = graph
            .objects()
            .map(|w| (w.lemma.clone(), w.clone()))
            .collect();
        let lookup = |lemma: &str, lineno: usize| -> Result<ResolvedWord> {
            heads.get(lemma).cloned().ok_or_else(|| {
                Error::parse(
                    "scene graph",
                    lineno,
                    format!("head {lemma:?} has no object line"),
                )
            })
        };
        for (lineno, toks) in pending {
            match toks[0].as_str() {
                "A" if toks.len() == 5 => {
                    let subject = lookup(&toks[1], lineno)?;
                    let attribute = word_from_parts(&toks[2], &toks[3], &toks[4], lineno)?;
                    graph.tuples.insert(SceneTuple::Attribute { subject, attribute });
                }
                "R" if toks.len() == 6 => {
                    let subject = lookup(&toks[1], lineno)?;
                    let object = lookup(&toks[3], lineno)?;
                    let relation = word_from_parts(&toks[2], &toks[4], &toks[5], lineno)?;
                    graph.tuples.insert(SceneTuple::Relation {
                        subject,
                        relation,
                        object,
                    });
                }
                _ => {
                    return Err(Error::parse(
                        "scene graph",
                        lineno,
                        "malformed tuple line".to_string(),
                    ))
                }
            }
        }
        Ok(graph)
    }
}

fn fmt_synset(s: Option<SynsetId>) -> String {
    match s {
        Some(id) => id.to_string(),
        None => "-".to_string(),
    }
}

fn word_from_parts(lemma: &str, synset: &str, pos: &str, lineno: usize) -> Result<ResolvedWord> {
    let synset = if synset == "-" {
        None
    } else {
        Some(synset.parse()?)
    };
    let source_pos = pos
        .chars()
        .next()
        .filter(|_| pos.len() == 1)
        .and_then(Pos::from_tag)
        .ok_or_else(|| Error::parse("scene graph", lineno, format!("bad pos {pos:?}")))?;
    Ok(ResolvedWord {
        lemma: lemma.to_string(),
        synset,
        source_pos,
    })
}

/// Set union of tuples with caption ids merged. Idempotent, commutative,
/// associative, with the empty graph as identity.
pub fn union_graphs<'a>(graphs: impl IntoIterator<Item = &'a SceneGraph>) -> SceneGraph {
    let mut out = SceneGraph::new();
    for g in graphs {
        out.tuples.extend(g.tuples.iter().cloned());
        out.caption_ids.extend(g.caption_ids.iter().cloned());
    }
    out
}
