//! Word lists: named sets of synsets used to recognize word categories
//! (non-imageable concepts, offensive terms, visual verbs, person words).

use super::{Pos, SynsetId, Taxonomy};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordListPurpose {
    NonImageablePeople,
    OffensivePeople,
    AdjectiveCategory,
    VisualVerbs,
    Weapons,
    Animals,
    PersonWords,
}

#[derive(Debug, Clone, Serialize)]
pub struct WordList {
    pub name: String,
    pub purpose: WordListPurpose,
    pub entries: BTreeSet<SynsetId>,
}

impl WordList {
    pub fn contains(&self, id: SynsetId) -> bool {
        self.entries.contains(&id)
    }
}

/// One parsed word-list file: one list, or one list per `category:` header.
#[derive(Debug, Clone)]
pub struct WordListFile {
    pub lists: Vec<WordList>,
    /// Unresolvable lines, reported rather than silently dropped.
    pub warnings: Vec<String>,
    /// Content hash of the source file, echoed in reports.
    pub sha256: String,
}

impl WordListFile {
    pub fn single(&self) -> Result<&WordList> {
        match self.lists.as_slice() {
            [one] => Ok(one),
            many => Err(Error::Config(format!(
                "expected a single word list, file defines {}",
                many.len()
            ))),
        }
    }
}

/// Parses a word-list file: one `lemma.pos offset` entry per line, `#`
/// comments and blank lines ignored, optional `category:` headers starting
/// a new named list.
pub fn load_word_lists(
    path: &Path,
    purpose: WordListPurpose,
    taxonomy: &Taxonomy,
) -> Result<WordListFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sha256 = hex_digest_of(text.as_bytes());
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "wordlist".to_string());

    let mut lists: Vec<WordList> = Vec::new();
    let mut warnings = Vec::new();
    let mut current: Option<usize> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix("category:") {
            lists.push(WordList {
                name: format!("{stem}:{}", name.trim()),
                purpose,
                entries: BTreeSet::new(),
            });
            current = Some(lists.len() - 1);
            continue;
        }
        if current.is_none() {
            lists.push(WordList {
                name: stem.clone(),
                purpose,
                entries: BTreeSet::new(),
            });
            current = Some(0);
        }
        match parse_entry(line, taxonomy) {
            Ok(id) => {
                lists[current.unwrap()].entries.insert(id);
            }
            Err(msg) => warnings.push(format!("{}:{lineno}: {msg}", path.display())),
        }
    }

    if lists.iter().all(|l| l.entries.is_empty()) {
        return Err(Error::Config(format!(
            "word list {} resolves to no entries",
            path.display()
        )));
    }
    Ok(WordListFile {
        lists,
        warnings,
        sha256,
    })
}

fn parse_entry(line: &str, taxonomy: &Taxonomy) -> std::result::Result<SynsetId, String> {
    let (word, offset) = line
        .split_once(char::is_whitespace)
        .ok_or_else(|| format!("expected `lemma.pos offset`, got {line:?}"))?;
    let (lemma, pos_tag) = word
        .rsplit_once('.')
        .ok_or_else(|| format!("missing .pos suffix in {word:?}"))?;
    let pos = pos_tag
        .chars()
        .next()
        .filter(|_| pos_tag.len() == 1)
        .and_then(Pos::from_tag)
        .ok_or_else(|| format!("bad pos tag {pos_tag:?}"))?;
    let offset: u32 = offset
        .trim()
        .parse()
        .map_err(|_| format!("bad offset {offset:?}"))?;
    let id = SynsetId::new(pos, offset);
    let record = taxonomy
        .synset(id)
        .map_err(|_| format!("dangling offset {id} for {lemma:?}"))?;
    if !record.lemmas.iter().any(|l| l == lemma) {
        return Err(format!("synset {id} does not contain lemma {lemma:?}"));
    }
    Ok(id)
}

/// Hex-encoded sha256, used for content hashes in manifests and reports.
pub fn hex_digest_of(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// The word lists the suites consume, loaded from a directory with
/// conventional file names. Absent files leave their slot empty; each
/// suite validates its own requirements.
#[derive(Debug, Clone, Default)]
pub struct WordListSet {
    pub non_imageable_people: Option<WordList>,
    /// One list per people-descriptor adjective category.
    pub adjective_categories: Vec<WordList>,
    pub offensive_people: Option<WordList>,
    pub visual_verbs: Option<WordList>,
    pub person_words: Option<WordList>,
    pub warnings: Vec<String>,
    /// file name -> content hash, echoed into reports.
    pub hashes: std::collections::BTreeMap<String, String>,
}

impl WordListSet {
    pub fn load_dir(dir: &Path, taxonomy: &Taxonomy) -> Result<WordListSet> {
        let mut set = WordListSet::default();
        let load = |file: &str,
                        purpose: WordListPurpose,
                        set: &mut WordListSet|
         -> Result<Option<WordListFile>> {
            let path = dir.join(file);
            if !path.exists() {
                return Ok(None);
            }
            let parsed = load_word_lists(&path, purpose, taxonomy)?;
            set.warnings.extend(parsed.warnings.iter().cloned());
            set.hashes.insert(file.to_string(), parsed.sha256.clone());
            Ok(Some(parsed))
        };

        if let Some(f) = load(
            "non_imageable_people.txt",
            WordListPurpose::NonImageablePeople,
            &mut set,
        )? {
            set.non_imageable_people = Some(f.single()?.clone());
        }
        if let Some(f) = load(
            "adjective_categories.txt",
            WordListPurpose::AdjectiveCategory,
            &mut set,
        )? {
            set.adjective_categories = f.lists;
        }
        if let Some(f) = load(
            "offensive_people.txt",
            WordListPurpose::OffensivePeople,
            &mut set,
        )? {
            set.offensive_people = Some(f.single()?.clone());
        }
        if let Some(f) = load("visual_verbs.txt", WordListPurpose::VisualVerbs, &mut set)? {
            set.visual_verbs = Some(f.single()?.clone());
        }
        if let Some(f) = load("person_words.txt", WordListPurpose::PersonWords, &mut set)? {
            set.person_words = Some(f.single()?.clone());
        }
        Ok(set)
    }

    /// The adjective category list named `<file stem>:<category>`, matched
    /// by its category suffix.
    pub fn adjective_category(&self, category: &str) -> Option<&WordList> {
        self.adjective_categories
            .iter()
            .find(|l| l.name.ends_with(&format!(":{category}")))
    }
}
