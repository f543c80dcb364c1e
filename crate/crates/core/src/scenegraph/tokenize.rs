//! Whitespace tokenizer, suffix-rule lemmatizer, and a three-layer
//! part-of-speech tagger tuned to the restricted grammar of image captions:
//! closed-class lexicon, then taxonomy lookup vote, then positional
//! heuristics.

use crate::wordnet::{normalize_lemma, Pos, Taxonomy};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenPos {
    Noun,
    Verb,
    Adj,
    Adv,
    Det,
    Prep,
    Conj,
    Pron,
    Num,
    Copula,
    Other,
}

impl TokenPos {
    pub fn wordnet_pos(self) -> Option<Pos> {
        match self {
            TokenPos::Noun => Some(Pos::Noun),
            TokenPos::Verb => Some(Pos::Verb),
            TokenPos::Adj => Some(Pos::Adj),
            TokenPos::Adv => Some(Pos::Adv),
            _ => None,
        }
    }

    pub fn is_open_class(self) -> bool {
        matches!(
            self,
            TokenPos::Noun | TokenPos::Verb | TokenPos::Adj | TokenPos::Adv
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub lemma: String,
    pub pos: TokenPos,
    pub index: usize,
}

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "each", "every", "no",
    "his", "her", "its", "their", "my", "your", "our", "several", "both", "another", "other",
    "many", "few",
];

const PREPOSITIONS: &[&str] = &[
    "in", "on", "with", "of", "at", "near", "under", "over", "behind", "beside", "by", "from",
    "to", "above", "below", "between", "against", "across", "around", "along", "off", "onto",
    "upon", "inside", "outside", "through", "during", "without", "toward", "towards", "into",
    "beneath", "atop", "amid", "among", "as", "down", "up",
];

const CONJUNCTIONS: &[&str] = &["and", "or", "but", "while"];

const PRONOUNS: &[&str] = &[
    "he", "she", "it", "they", "him", "them", "who", "which", "himself", "herself", "itself",
    "themselves", "someone", "something",
];

const COPULAS: &[&str] = &["is", "are", "was", "were", "be", "been", "being", "am"];

const NUMBER_WORDS: &[&str] = &[
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve",
];

/// Irregular inflections the suffix rules cannot recover.
const NOUN_EXCEPTIONS: &[(&str, &str)] = &[
    ("men", "man"),
    ("women", "woman"),
    ("children", "child"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("mice", "mouse"),
    ("geese", "goose"),
    ("wives", "wife"),
    ("knives", "knife"),
    ("leaves", "leaf"),
    ("lives", "life"),
    ("loaves", "loaf"),
    ("shelves", "shelf"),
    ("wolves", "wolf"),
    ("oxen", "ox"),
    ("scarves", "scarf"),
];

const VERB_EXCEPTIONS: &[(&str, &str)] = &[
    ("ran", "run"),
    ("ate", "eat"),
    ("sat", "sit"),
    ("stood", "stand"),
    ("held", "hold"),
    ("rode", "ride"),
    ("wore", "wear"),
    ("swam", "swim"),
    ("threw", "throw"),
    ("caught", "catch"),
    ("drove", "drive"),
    ("drank", "drink"),
    ("slept", "sleep"),
    ("flew", "fly"),
    ("took", "take"),
    ("made", "make"),
    ("went", "go"),
    ("came", "come"),
    ("got", "get"),
    ("gave", "give"),
    ("lay", "lie"),
    ("said", "say"),
    ("saw", "see"),
    ("left", "leave"),
    ("fed", "feed"),
    ("lying", "lie"),
    ("sitting", "sit"),
    ("running", "run"),
    ("swimming", "swim"),
    ("getting", "get"),
    ("cutting", "cut"),
    ("putting", "put"),
];

/// Morphy-style lemmatization: exception table first, then suffix
/// candidates validated against the taxonomy index for the requested part
/// of speech.
pub fn lemmatize(word: &str, pos: Pos, taxonomy: &Taxonomy) -> Option<String> {
    let word = normalize_lemma(word);
    if taxonomy.contains_lemma(&word, pos) {
        return Some(word);
    }
    let exceptions = match pos {
        Pos::Noun => NOUN_EXCEPTIONS,
        Pos::Verb => VERB_EXCEPTIONS,
        _ => &[],
    };
    for (inflected, base) in exceptions {
        if word == *inflected && taxonomy.contains_lemma(base, pos) {
            return Some(base.to_string());
        }
    }
    let rules: &[(&str, &str)] = match pos {
        Pos::Noun => &[
            ("ses", "s"),
            ("xes", "x"),
            ("zes", "z"),
            ("ches", "ch"),
            ("shes", "sh"),
            ("ies", "y"),
            ("s", ""),
        ],
        Pos::Verb => &[
            ("ies", "y"),
            ("ing", "e"),
            ("ing", ""),
            ("ed", "e"),
            ("ed", ""),
            ("es", "e"),
            ("es", ""),
            ("s", ""),
        ],
        Pos::Adj => &[("est", ""), ("est", "e"), ("er", ""), ("er", "e")],
        Pos::Adv => &[],
    };
    for (suffix, replacement) in rules {
        if let Some(stem) = word.strip_suffix(suffix) {
            if stem.is_empty() {
                continue;
            }
            let candidate = format!("{stem}{replacement}");
            if taxonomy.contains_lemma(&candidate, pos) {
                return Some(candidate);
            }
            // doubled final consonant: "sitting" -> "sitt" -> "sit"
            if pos == Pos::Verb && replacement.is_empty() {
                let bytes = stem.as_bytes();
                if bytes.len() >= 2 && bytes[bytes.len() - 1] == bytes[bytes.len() - 2] {
                    let undoubled = &stem[..stem.len() - 1];
                    if taxonomy.contains_lemma(undoubled, pos) {
                        return Some(undoubled.to_string());
                    }
                }
            }
        }
    }
    None
}

fn strip_token(raw: &str) -> String {
    let t = raw.trim_matches(|c: char| !c.is_alphanumeric() && c != '-' && c != '_');
    let t = t.strip_suffix("'s").unwrap_or(t);
    t.to_lowercase()
}

/// Tokenizes, lemmatizes, and tags a caption. Multi-word nouns are greedily
/// matched against the taxonomy's lemma inventory (longest match first).
pub fn tokenize(caption: &str, taxonomy: &Taxonomy) -> Vec<TaggedToken> {
    let words: Vec<String> = caption
        .split_whitespace()
        .map(strip_token)
        .filter(|w| !w.is_empty())
        .collect();

    // Multi-word merge: try 3-token then 2-token joins, as underscore-joined
    // or concatenated lemmas ("cell phone" -> cell_phone or cellphone).
    let mut merged: Vec<String> = Vec::with_capacity(words.len());
    let mut i = 0;
    while i < words.len() {
        let mut advanced = false;
        for span in (2..=3).rev() {
            if i + span > words.len() {
                continue;
            }
            let slice = &words[i..i + span];
            if slice.iter().any(|w| is_closed_class(w)) {
                continue;
            }
            let joined = slice.join("_");
            let fused = slice.concat();
            if taxonomy.contains_lemma(&joined, Pos::Noun) {
                merged.push(joined);
                i += span;
                advanced = true;
                break;
            }
            if taxonomy.contains_lemma(&fused, Pos::Noun) {
                merged.push(fused);
                i += span;
                advanced = true;
                break;
            }
        }
        if !advanced {
            merged.push(words[i].clone());
            i += 1;
        }
    }

    // Layer 1: closed-class lexicon. Layer 2: taxonomy vote.
    #[derive(Clone)]
    struct Work {
        surface: String,
        fixed: Option<TokenPos>,
        candidates: Vec<TokenPos>,
    }
    let work: Vec<Work> = merged
        .into_iter()
        .map(|surface| {
            let fixed = closed_class(&surface);
            let mut candidates = Vec::new();
            if fixed.is_none() {
                for (pos, tag) in [
                    (Pos::Noun, TokenPos::Noun),
                    (Pos::Verb, TokenPos::Verb),
                    (Pos::Adj, TokenPos::Adj),
                    (Pos::Adv, TokenPos::Adv),
                ] {
                    if lemmatize(&surface, pos, taxonomy).is_some() {
                        candidates.push(tag);
                    }
                }
            }
            Work {
                surface,
                fixed,
                candidates,
            }
        })
        .collect();

    // Layer 3: positional heuristics for caption grammar.
    let n = work.len();
    let mut tags: Vec<TokenPos> = vec![TokenPos::Other; n];
    for i in 0..n {
        if let Some(fixed) = work[i].fixed {
            tags[i] = fixed;
            continue;
        }
        let cands = work[i].candidates.clone();
        let surface = work[i].surface.clone();
        let next_nounish = work.get(i + 1).map(|w| {
            w.fixed.is_none()
                && (w.candidates.contains(&TokenPos::Noun) || w.candidates.is_empty())
        });
        let prev_nounish = i > 0
            && (tags[i - 1] == TokenPos::Noun
                || work[i - 1].fixed == Some(TokenPos::Pron));

        let tag = if cands.is_empty() {
            if surface.ends_with("ly") {
                TokenPos::Adv
            } else if (surface.ends_with("ing") || surface.ends_with("ed")) && prev_nounish {
                TokenPos::Verb
            } else {
                TokenPos::Noun
            }
        } else if cands.len() == 1 {
            cands[0]
        } else if cands.contains(&TokenPos::Verb)
            && (surface.ends_with("ing") || surface.ends_with("ed"))
            && prev_nounish
        {
            // "-ing"/"-ed" after a noun phrase acts as a relation verb.
            TokenPos::Verb
        } else if cands.contains(&TokenPos::Adj) && next_nounish == Some(true) {
            // modifier position before a noun
            TokenPos::Adj
        } else if cands.contains(&TokenPos::Noun) {
            TokenPos::Noun
        } else if cands.contains(&TokenPos::Verb) {
            TokenPos::Verb
        } else if cands.contains(&TokenPos::Adj) {
            TokenPos::Adj
        } else {
            TokenPos::Adv
        };
        tags[i] = tag;
    }

    work.iter()
        .enumerate()
        .map(|(i, w)| {
            let pos = tags[i];
            let lemma = if pos == TokenPos::Copula {
                "be".to_string()
            } else {
                pos.wordnet_pos()
                    .and_then(|p| lemmatize(&w.surface, p, taxonomy))
                    .unwrap_or_else(|| w.surface.clone())
            };
            TaggedToken {
                surface: w.surface.clone(),
                lemma,
                pos,
                index: i,
            }
        })
        .collect()
}

fn is_closed_class(word: &str) -> bool {
    closed_class(word).is_some()
}

fn closed_class(word: &str) -> Option<TokenPos> {
    if word.chars().all(|c| c.is_ascii_digit()) {
        return Some(TokenPos::Num);
    }
    if DETERMINERS.contains(&word) {
        Some(TokenPos::Det)
    } else if PREPOSITIONS.contains(&word) {
        Some(TokenPos::Prep)
    } else if CONJUNCTIONS.contains(&word) {
        Some(TokenPos::Conj)
    } else if PRONOUNS.contains(&word) {
        Some(TokenPos::Pron)
    } else if COPULAS.contains(&word) {
        Some(TokenPos::Copula)
    } else if NUMBER_WORDS.contains(&word) {
        Some(TokenPos::Num)
    } else {
        None
    }
}
