//! Lexical taxonomy: parses a WordNet-format plain-text database directory
//! and answers synset, hierarchy, and similarity queries.

mod parse;
mod wordlist;

pub use wordlist::{
    hex_digest_of, load_word_lists, WordList, WordListFile, WordListPurpose, WordListSet,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Part of speech of a synset. The order of the variants is the scan order
/// used when a part-of-speech constraint has to be relaxed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn tag(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::Adv => 'r',
        }
    }

    /// Maps a database tag to a part of speech; adjective satellites (`s`)
    /// count as adjectives.
    pub fn from_tag(tag: char) -> Option<Pos> {
        match tag {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            'a' | 's' => Some(Pos::Adj),
            'r' => Some(Pos::Adv),
            _ => None,
        }
    }

    pub fn file_suffix(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// Identifies a synset by part of speech and byte-offset id, e.g. `n03388794`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    pub pos: Pos,
    pub offset: u32,
}

impl SynsetId {
    pub fn new(pos: Pos, offset: u32) -> Self {
        SynsetId { pos, offset }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:08}", self.pos.tag(), self.offset)
    }
}

impl FromStr for SynsetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<SynsetId> {
        let mut chars = s.chars();
        let tag = chars
            .next()
            .ok_or_else(|| Error::Domain("empty synset id".into()))?;
        let pos = Pos::from_tag(tag)
            .ok_or_else(|| Error::Domain(format!("bad pos tag in synset id {s:?}")))?;
        let offset: u32 = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Domain(format!("bad offset in synset id {s:?}")))?;
        Ok(SynsetId { pos, offset })
    }
}

impl Serialize for SynsetId {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SynsetId {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One concept node: lemmas, hierarchy links, and gloss.
#[derive(Debug, Clone)]
pub struct SynsetRecord {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub hypernyms: Vec<SynsetId>,
    pub hyponyms: Vec<SynsetId>,
    pub gloss: String,
}

/// Immutable in-memory taxonomy. Safe to share across threads after load.
#[derive(Debug)]
pub struct Taxonomy {
    synsets: BTreeMap<SynsetId, SynsetRecord>,
    /// (lemma, pos) -> synsets ordered by sense rank, most common first.
    sense_index: HashMap<(String, Pos), Vec<SynsetId>>,
    /// Maximum depth per part of speech, counted in nodes (a root alone is 1).
    max_depth: BTreeMap<Pos, u32>,
    counts: BTreeMap<Pos, usize>,
}

impl Taxonomy {
    /// Loads the `index.*`/`data.*` files from a database directory.
    /// At least the noun part of speech must be present.
    pub fn load(dir: &Path) -> Result<Taxonomy> {
        parse::load(dir)
    }

    pub(crate) fn from_parts(
        synsets: BTreeMap<SynsetId, SynsetRecord>,
        sense_index: HashMap<(String, Pos), Vec<SynsetId>>,
    ) -> Result<Taxonomy> {
        let mut counts = BTreeMap::new();
        for id in synsets.keys() {
            *counts.entry(id.pos).or_insert(0) += 1;
        }
        let mut tax = Taxonomy {
            synsets,
            sense_index,
            max_depth: BTreeMap::new(),
            counts,
        };
        tax.validate()?;
        tax.max_depth = tax.compute_depths()?;
        Ok(tax)
    }

    /// Link symmetry, referential integrity of the sense index, and
    /// acyclicity per part of speech.
    fn validate(&self) -> Result<()> {
        for (id, rec) in &self.synsets {
            for h in &rec.hypernyms {
                let parent = self.synset(*h)?;
                if !parent.hyponyms.contains(id) {
                    return Err(Error::Integrity(format!(
                        "{id} lists hypernym {h} but is not among its hyponyms"
                    )));
                }
            }
            for h in &rec.hyponyms {
                let child = self.synset(*h)?;
                if !child.hypernyms.contains(id) {
                    return Err(Error::Integrity(format!(
                        "{id} lists hyponym {h} but is not among its hypernyms"
                    )));
                }
            }
            for lemma in &rec.lemmas {
                let senses = self.sense_index.get(&(lemma.clone(), id.pos));
                if !senses.is_some_and(|s| s.contains(id)) {
                    return Err(Error::Integrity(format!(
                        "lemma {lemma:?} of {id} is missing from the sense index"
                    )));
                }
            }
        }
        for (lemma_pos, senses) in &self.sense_index {
            for s in senses {
                if !self.synsets.contains_key(s) {
                    return Err(Error::Integrity(format!(
                        "sense index entry {:?} references missing synset {s}",
                        lemma_pos.0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Longest hypernym chain per part of speech, in nodes. Errors on cycles.
    fn compute_depths(&self) -> Result<BTreeMap<Pos, u32>> {
        let mut depth: HashMap<SynsetId, u32> = HashMap::new();
        let mut remaining: BTreeMap<SynsetId, usize> = self
            .synsets
            .iter()
            .map(|(id, rec)| (*id, rec.hypernyms.len()))
            .collect();
        let mut queue: Vec<SynsetId> = remaining
            .iter()
            .filter(|(_, n)| **n == 0)
            .map(|(id, _)| *id)
            .collect();
        let mut seen = 0usize;
        while let Some(id) = queue.pop() {
            seen += 1;
            let d = self.synsets[&id]
                .hypernyms
                .iter()
                .map(|h| depth[h])
                .max()
                .map_or(1, |m| m + 1);
            depth.insert(id, d);
            for child in &self.synsets[&id].hyponyms {
                let n = remaining.get_mut(child).expect("validated link");
                *n -= 1;
                if *n == 0 {
                    queue.push(*child);
                }
            }
        }
        if seen != self.synsets.len() {
            return Err(Error::Integrity(
                "hypernym graph contains a cycle".to_string(),
            ));
        }
        let mut out = BTreeMap::new();
        for (id, d) in depth {
            let entry = out.entry(id.pos).or_insert(0);
            *entry = (*entry).max(d);
        }
        Ok(out)
    }

    pub fn synset(&self, id: SynsetId) -> Result<&SynsetRecord> {
        self.synsets
            .get(&id)
            .ok_or_else(|| Error::Integrity(format!("unknown synset {id}")))
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.synsets.contains_key(&id)
    }

    pub fn counts(&self) -> &BTreeMap<Pos, usize> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn max_depth(&self, pos: Pos) -> u32 {
        self.max_depth.get(&pos).copied().unwrap_or(0)
    }

    /// Synsets of a lemma for one part of speech, most common sense first.
    pub fn synsets_for(&self, lemma: &str, pos: Pos) -> &[SynsetId] {
        self.sense_index
            .get(&(lemma.to_string(), pos))
            .map_or(&[], |v| v.as_slice())
    }

    pub fn contains_lemma(&self, lemma: &str, pos: Pos) -> bool {
        !self.synsets_for(lemma, pos).is_empty()
    }

    /// Every synset of a lemma across all parts of speech, in scan order
    /// then sense order.
    pub fn all_synsets_of_lemma(&self, lemma: &str) -> Vec<SynsetId> {
        Pos::ALL
            .iter()
            .flat_map(|pos| self.synsets_for(lemma, *pos).iter().copied())
            .collect()
    }

    /// The most common synset of a lemma with the preferred part of speech.
    /// When no sense with that part of speech exists, the constraint is
    /// relaxed and the scan falls back to noun, verb, adjective, adverb
    /// order (then sense rank).
    pub fn most_common_synset(&self, lemma: &str, preferred: Pos) -> Result<SynsetId> {
        if let Some(&first) = self.synsets_for(lemma, preferred).first() {
            return Ok(first);
        }
        for pos in Pos::ALL {
            if let Some(&first) = self.synsets_for(lemma, pos).first() {
                return Ok(first);
            }
        }
        Err(Error::NotFound(format!("lemma {lemma:?}")))
    }

    /// True iff `b` is reachable from `a` via one or more hypernym links.
    /// Strict: a synset is not a hyponym of itself.
    pub fn is_hyponym_of(&self, a: SynsetId, b: SynsetId) -> Result<bool> {
        self.synset(a)?;
        self.synset(b)?;
        if a.pos != b.pos || a == b {
            return Ok(false);
        }
        Ok(self.ancestors(a).contains_key(&b))
    }

    /// Upward BFS distances (in edges) to every ancestor, including `from`
    /// itself at distance 0.
    fn ancestors(&self, from: SynsetId) -> HashMap<SynsetId, u32> {
        let mut dist = HashMap::new();
        dist.insert(from, 0u32);
        let mut frontier = vec![from];
        while let Some(id) = frontier.pop() {
            let d = dist[&id];
            for h in &self.synsets[&id].hypernyms {
                let entry = dist.entry(*h).or_insert(u32::MAX);
                if d + 1 < *entry {
                    *entry = d + 1;
                    frontier.push(*h);
                }
            }
        }
        dist.remove(&from);
        dist.insert(from, 0);
        dist
    }

    /// Shortest path between two synsets through a common ancestor,
    /// counted in nodes (identical synsets give 1). All hypernym edges are
    /// used, not a single-parent tree.
    pub fn shortest_path_nodes(&self, a: SynsetId, b: SynsetId) -> Result<Option<u32>> {
        self.synset(a)?;
        self.synset(b)?;
        if a.pos != b.pos {
            return Ok(None);
        }
        let da = self.ancestors(a);
        let db = self.ancestors(b);
        let best = da
            .iter()
            .filter_map(|(anc, d1)| db.get(anc).map(|d2| d1 + d2))
            .min();
        Ok(best.map(|edges| edges + 1))
    }

    /// Leacock–Chodorow similarity: −ln(path_nodes / (2·D)) with D the
    /// maximum taxonomy depth for the part of speech.
    pub fn lch_similarity(&self, a: SynsetId, b: SynsetId) -> Result<f64> {
        self.synset(a)?;
        self.synset(b)?;
        if a.pos != b.pos {
            return Err(Error::Domain(format!(
                "lch similarity across parts of speech: {a} vs {b}"
            )));
        }
        let path = self
            .shortest_path_nodes(a, b)?
            .ok_or_else(|| Error::Domain(format!("{a} and {b} share no ancestor")))?;
        let depth = self.max_depth(a.pos);
        if depth == 0 {
            return Err(Error::Domain(format!(
                "part of speech {} has no hierarchy",
                a.pos
            )));
        }
        Ok(-((path as f64) / (2.0 * depth as f64)).ln())
    }

    /// The root plus all transitive hyponyms.
    pub fn subtree(&self, root: SynsetId) -> Result<BTreeSet<SynsetId>> {
        self.synset(root)?;
        let mut out = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if out.insert(id) {
                stack.extend(self.synsets[&id].hyponyms.iter().copied());
            }
        }
        Ok(out)
    }

    /// Union of the subtrees of several roots.
    pub fn subtree_union(&self, roots: &[SynsetId]) -> Result<BTreeSet<SynsetId>> {
        let mut out = BTreeSet::new();
        for r in roots {
            out.append(&mut self.subtree(*r)?);
        }
        Ok(out)
    }

    /// Resolves a sense key like `fork.n.1` (1-based sense number,
    /// defaulting to the most common sense) or a bare lemma.
    pub fn resolve_sense_key(&self, key: &str, fallback_pos: Pos) -> Result<SynsetId> {
        let parts: Vec<&str> = key.split('.').collect();
        if parts.len() >= 2 {
            if let Some(pos) = parts[parts.len() - 2]
                .chars()
                .next()
                .filter(|_| parts[parts.len() - 2].len() == 1)
                .and_then(Pos::from_tag)
            {
                let (lemma_parts, sense) = if parts.len() >= 3 {
                    match parts[parts.len() - 1].parse::<usize>() {
                        Ok(n) if n >= 1 => (&parts[..parts.len() - 2], n),
                        _ => (&parts[..parts.len() - 1], 1),
                    }
                } else {
                    (&parts[..parts.len() - 1], 1)
                };
                let lemma = lemma_parts.join(".");
                let senses = self.synsets_for(&lemma, pos);
                return senses.get(sense - 1).copied().ok_or_else(|| {
                    Error::NotFound(format!("sense {key:?} ({lemma}.{} #{sense})", pos.tag()))
                });
            }
        }
        self.most_common_synset(key, fallback_pos)
    }
}

/// Lowercases and replaces internal spaces with underscores, matching the
/// database's lemma conventions.
pub fn normalize_lemma(word: &str) -> String {
    word.trim().to_lowercase().replace(' ', "_")
}
