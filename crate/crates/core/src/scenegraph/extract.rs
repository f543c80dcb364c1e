//! Rule-based tuple extraction over the restricted grammar of captions:
//! noun-phrase chains linked by verbs and prepositions.

use super::tokenize::{tokenize, TaggedToken, TokenPos};
use super::{ResolvedWord, SceneGraph, SceneTuple};
use crate::wordnet::{Pos, Taxonomy};

/// Heads that introduce meta phrases carrying no scene semantics
/// ("a picture of ...").
const META_HEADS: &[&str] = &["picture", "image", "photo", "photograph"];

#[derive(Debug, Clone)]
struct Np {
    head: usize,
    modifiers: Vec<usize>,
}

#[derive(Debug, Clone)]
enum Seg {
    Group(Vec<Np>),
    Verb { verb: usize, prep: Option<usize> },
    Prep(usize),
    CopulaAdj(usize),
}

#[derive(Debug, Clone)]
pub struct ParsedCaption {
    pub graph: SceneGraph,
    pub tokens: Vec<TaggedToken>,
    /// Fraction of open-class tokens incorporated into tuples.
    pub confidence: f64,
}

/// Parses one caption into a synset-resolved scene graph.
pub fn parse_caption(caption: &str, taxonomy: &Taxonomy, caption_id: &str) -> ParsedCaption {
    let tokens = tokenize(caption, taxonomy);
    let mut graph = extract_tuples(&tokens, taxonomy);
    graph.caption_ids.insert(caption_id.to_string());

    let open_total = tokens.iter().filter(|t| t.pos.is_open_class()).count();
    let incorporated: std::collections::BTreeSet<&str> = graph.all_lemmas();
    let open_used = tokens
        .iter()
        .filter(|t| t.pos.is_open_class())
        .filter(|t| {
            incorporated.contains(t.lemma.as_str())
                || incorporated
                    .iter()
                    .any(|l| l.starts_with(t.lemma.as_str()) && l.contains('_'))
        })
        .count();
    let confidence = if open_total == 0 {
        1.0
    } else {
        open_used as f64 / open_total as f64
    };

    ParsedCaption {
        graph,
        tokens,
        confidence,
    }
}

/// Extracts (object), (object, attribute), and (subject, relation, object)
/// tuples from a tagged token sequence. Objects resolve as nouns,
/// attributes as adjectives, relations as verbs, each falling back per the
/// relaxed part-of-speech rule. Determiners, numerals, and meta phrases are
/// dropped. An intransitive trailing verb becomes an attribute of its
/// subject.
pub fn extract_tuples(tokens: &[TaggedToken], taxonomy: &Taxonomy) -> SceneGraph {
    let segs = segment(tokens);
    let segs = drop_meta_prefix(segs, tokens);

    let resolve = |idx: usize, role: Pos| -> ResolvedWord {
        let lemma = tokens[idx].lemma.clone();
        let synset = taxonomy.most_common_synset(&lemma, role).ok();
        ResolvedWord {
            lemma,
            synset,
            source_pos: role,
        }
    };
    let resolve_relation = |verb: usize, prep: Option<usize>| -> ResolvedWord {
        match prep {
            None => resolve(verb, Pos::Verb),
            Some(p) => {
                let lemma = format!("{}_{}", tokens[verb].lemma, tokens[p].lemma);
                let synset = taxonomy.most_common_synset(&lemma, Pos::Verb).ok();
                ResolvedWord {
                    lemma,
                    synset,
                    source_pos: Pos::Verb,
                }
            }
        }
    };
    let resolve_prep = |idx: usize| -> ResolvedWord {
        let lemma = tokens[idx].lemma.clone();
        let synset = taxonomy.most_common_synset(&lemma, Pos::Verb).ok();
        ResolvedWord {
            lemma,
            synset,
            source_pos: Pos::Verb,
        }
    };

    let mut graph = SceneGraph::new();
    let emit_group = |graph: &mut SceneGraph, group: &[Np]| -> Vec<ResolvedWord> {
        let mut heads = Vec::new();
        for np in group {
            let head = resolve(np.head, Pos::Noun);
            graph.tuples.insert(SceneTuple::Object {
                subject: head.clone(),
            });
            for m in &np.modifiers {
                graph.tuples.insert(SceneTuple::Attribute {
                    subject: head.clone(),
                    attribute: resolve(*m, Pos::Adj),
                });
            }
            heads.push(head);
        }
        heads
    };

    let mut topic: Vec<ResolvedWord> = Vec::new();
    let mut current: Vec<ResolvedWord> = Vec::new();
    let mut pending: Option<(Vec<ResolvedWord>, ResolvedWord, bool)> = None;

    for seg in &segs {
        match seg {
            Seg::Group(nps) => {
                let heads = emit_group(&mut graph, nps);
                if let Some((subjects, relation, _)) = pending.take() {
                    for s in &subjects {
                        for o in &heads {
                            graph.tuples.insert(SceneTuple::Relation {
                                subject: s.clone(),
                                relation: relation.clone(),
                                object: o.clone(),
                            });
                        }
                    }
                }
                if topic.is_empty() {
                    topic = heads.clone();
                }
                current = heads;
            }
            Seg::Verb { verb, prep } => {
                // Verbs predicate the caption topic; prepositions attach to
                // the nearest phrase.
                let subjects = if topic.is_empty() {
                    current.clone()
                } else {
                    topic.clone()
                };
                if !subjects.is_empty() {
                    pending = Some((subjects, resolve_relation(*verb, *prep), true));
                }
            }
            Seg::Prep(p) => {
                if !current.is_empty() {
                    pending = Some((current.clone(), resolve_prep(*p), false));
                }
            }
            Seg::CopulaAdj(adj) => {
                for s in &current {
                    graph.tuples.insert(SceneTuple::Attribute {
                        subject: s.clone(),
                        attribute: resolve(*adj, Pos::Adj),
                    });
                }
            }
        }
    }

    // Trailing verb with no object: attribute of its subject.
    if let Some((subjects, relation, is_verb)) = pending {
        if is_verb && !relation.lemma.contains('_') {
            for s in &subjects {
                graph.tuples.insert(SceneTuple::Attribute {
                    subject: s.clone(),
                    attribute: relation.clone(),
                });
            }
        }
    }

    graph
}

fn segment(tokens: &[TaggedToken]) -> Vec<Seg> {
    let mut segs: Vec<Seg> = Vec::new();
    let mut nps: Vec<Np> = Vec::new();
    let mut mods: Vec<usize> = Vec::new();
    let mut in_group = false;

    let flush_np = |nps: &mut Vec<Np>, mods: &mut Vec<usize>, head: usize| {
        nps.push(Np {
            head,
            modifiers: std::mem::take(mods),
        });
    };
    let flush_group = |segs: &mut Vec<Seg>, nps: &mut Vec<Np>, mods: &mut Vec<usize>| {
        mods.clear();
        if !nps.is_empty() {
            segs.push(Seg::Group(std::mem::take(nps)));
        }
    };

    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        match t.pos {
            TokenPos::Noun => {
                // A noun directly followed by another noun is a modifier of
                // the later head ("tennis player").
                let next_noun = tokens
                    .get(i + 1)
                    .map(|n| n.pos == TokenPos::Noun)
                    .unwrap_or(false);
                if next_noun {
                    mods.push(t.index);
                } else {
                    flush_np(&mut nps, &mut mods, t.index);
                }
                in_group = true;
            }
            TokenPos::Adj => {
                let next_nounish = tokens
                    .get(i + 1)
                    .map(|n| matches!(n.pos, TokenPos::Noun | TokenPos::Adj))
                    .unwrap_or(false);
                if next_nounish {
                    mods.push(t.index);
                    in_group = true;
                } else if in_group || !segs.is_empty() {
                    // Phrase-final adjective after a copula: attribute.
                    let after_copula = i > 0 && tokens[i - 1].pos == TokenPos::Copula;
                    if after_copula {
                        flush_group(&mut segs, &mut nps, &mut mods);
                        segs.push(Seg::CopulaAdj(t.index));
                    } else {
                        mods.push(t.index);
                    }
                } else {
                    mods.push(t.index);
                }
            }
            TokenPos::Conj => {
                // Coordination keeps building the same group.
            }
            TokenPos::Verb => {
                flush_group(&mut segs, &mut nps, &mut mods);
                in_group = false;
                let prep = tokens
                    .get(i + 1)
                    .filter(|n| n.pos == TokenPos::Prep)
                    .map(|n| n.index);
                segs.push(Seg::Verb {
                    verb: t.index,
                    prep,
                });
                if prep.is_some() {
                    i += 1;
                }
            }
            TokenPos::Prep => {
                flush_group(&mut segs, &mut nps, &mut mods);
                in_group = false;
                segs.push(Seg::Prep(t.index));
            }
            TokenPos::Copula => {
                // Absorbed: "is looking at" reduces to the verb; "is wooden"
                // is handled at the adjective.
                let next_adj = tokens.get(i + 1).map(|n| n.pos) == Some(TokenPos::Adj)
                    && tokens
                        .get(i + 2)
                        .map(|n| !matches!(n.pos, TokenPos::Noun | TokenPos::Adj))
                        .unwrap_or(true);
                if !next_adj {
                    let links_nouns = tokens
                        .get(i + 1)
                        .map(|n| matches!(n.pos, TokenPos::Det | TokenPos::Noun | TokenPos::Num))
                        .unwrap_or(false);
                    if links_nouns {
                        flush_group(&mut segs, &mut nps, &mut mods);
                        in_group = false;
                        segs.push(Seg::Verb {
                            verb: t.index,
                            prep: None,
                        });
                    }
                }
            }
            TokenPos::Det | TokenPos::Num | TokenPos::Adv | TokenPos::Pron | TokenPos::Other => {}
        }
        i += 1;
    }
    flush_group(&mut segs, &mut nps, &mut mods);
    segs
}

/// Drops a leading "picture of"/"image of" phrase.
fn drop_meta_prefix(segs: Vec<Seg>, tokens: &[TaggedToken]) -> Vec<Seg> {
    if segs.len() >= 2 {
        if let (Seg::Group(nps), Seg::Prep(p)) = (&segs[0], &segs[1]) {
            let all_meta = !nps.is_empty()
                && nps
                    .iter()
                    .all(|np| META_HEADS.contains(&tokens[np.head].lemma.as_str()));
            if all_meta && tokens[*p].lemma == "of" {
                return segs.into_iter().skip(2).collect();
            }
        }
    }
    segs
}
