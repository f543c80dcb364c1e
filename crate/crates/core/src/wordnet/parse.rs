//! Parser for the WordNet plain-text database format (`index.*`/`data.*`).

use super::{Pos, SynsetId, SynsetRecord, Taxonomy};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

pub(super) fn load(dir: &Path) -> Result<Taxonomy> {
    let noun_index = dir.join("index.noun");
    if !noun_index.exists() {
        return Err(Error::NotFound(format!(
            "missing index.noun in {}",
            dir.display()
        )));
    }

    let mut raw: BTreeMap<SynsetId, RawSynset> = BTreeMap::new();
    let mut sense_index: HashMap<(String, Pos), Vec<SynsetId>> = HashMap::new();

    for pos in Pos::ALL {
        let data_path = dir.join(format!("data.{}", pos.file_suffix()));
        let index_path = dir.join(format!("index.{}", pos.file_suffix()));
        if !data_path.exists() && !index_path.exists() {
            continue;
        }
        if !data_path.exists() || !index_path.exists() {
            return Err(Error::NotFound(format!(
                "incomplete database: need both index.{suffix} and data.{suffix}",
                suffix = pos.file_suffix()
            )));
        }
        parse_data_file(&data_path, pos, &mut raw)?;
        parse_index_file(&index_path, pos, &mut sense_index)?;
    }

    // Dangling cross-references are integrity errors, reported with the
    // missing target.
    for (id, syn) in &raw {
        for (tgt, sym) in &syn.pointers {
            if !raw.contains_key(tgt) {
                return Err(Error::Integrity(format!(
                    "synset {id} has a dangling {sym:?} pointer to missing offset {tgt}"
                )));
            }
        }
    }
    for ((lemma, _), senses) in &sense_index {
        for s in senses {
            if !raw.contains_key(s) {
                return Err(Error::Integrity(format!(
                    "index entry {lemma:?} references missing offset {s}"
                )));
            }
        }
    }

    let synsets: BTreeMap<SynsetId, SynsetRecord> = raw
        .into_iter()
        .map(|(id, r)| {
            let mut hypernyms = Vec::new();
            let mut hyponyms = Vec::new();
            for (tgt, sym) in r.pointers {
                match sym.as_str() {
                    "@" | "@i" => hypernyms.push(tgt),
                    "~" | "~i" => hyponyms.push(tgt),
                    _ => {}
                }
            }
            (
                id,
                SynsetRecord {
                    id,
                    lemmas: r.lemmas,
                    hypernyms,
                    hyponyms,
                    gloss: r.gloss,
                },
            )
        })
        .collect();

    Taxonomy::from_parts(synsets, sense_index)
}

struct RawSynset {
    lemmas: Vec<String>,
    /// All semantic pointers, kept for integrity checking; only hierarchy
    /// pointers become links.
    pointers: Vec<(SynsetId, String)>,
    gloss: String,
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn parse_data_file(
    path: &Path,
    file_pos: Pos,
    out: &mut BTreeMap<SynsetId, RawSynset>,
) -> Result<()> {
    for (lineno, line) in read_lines(path)?.iter().enumerate() {
        let lineno = lineno + 1;
        if line.starts_with(' ') || line.is_empty() {
            continue; // license header
        }
        let err = |msg: String| Error::parse(path, lineno, msg);

        let (head, gloss) = match line.split_once(" | ") {
            Some((h, g)) => (h, g.trim().to_string()),
            None => (line.as_str(), String::new()),
        };
        let toks: Vec<&str> = head.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(err(format!("short data line ({} fields)", toks.len())));
        }
        let offset: u32 = toks[0]
            .parse()
            .map_err(|_| err(format!("bad synset offset {:?}", toks[0])))?;
        let ss_type = toks[2];
        let pos = ss_type
            .chars()
            .next()
            .and_then(Pos::from_tag)
            .filter(|p| *p == file_pos && ss_type.len() == 1)
            .ok_or_else(|| err(format!("bad ss_type {ss_type:?} for data.{}", file_pos.file_suffix())))?;
        let w_cnt = usize::from_str_radix(toks[3], 16)
            .map_err(|_| err(format!("bad word count {:?}", toks[3])))?;
        if w_cnt == 0 {
            return Err(err("synset with zero words".into()));
        }
        let mut idx = 4;
        let mut lemmas = Vec::with_capacity(w_cnt);
        for _ in 0..w_cnt {
            let word = toks
                .get(idx)
                .ok_or_else(|| err("truncated word list".into()))?;
            // Adjective position markers like "attributive(a)" are not part
            // of the lemma.
            let word = word.split('(').next().unwrap_or(word);
            lemmas.push(word.to_lowercase());
            idx += 2; // word + lex_id
        }
        let p_cnt: usize = toks
            .get(idx)
            .ok_or_else(|| err("missing pointer count".into()))?
            .parse()
            .map_err(|_| err(format!("bad pointer count {:?}", toks[idx])))?;
        idx += 1;
        let mut pointers = Vec::with_capacity(p_cnt);
        for _ in 0..p_cnt {
            if idx + 3 > toks.len() {
                return Err(err("truncated pointer list".into()));
            }
            let sym = toks[idx].to_string();
            let tgt_offset: u32 = toks[idx + 1]
                .parse()
                .map_err(|_| err(format!("bad pointer offset {:?}", toks[idx + 1])))?;
            let tgt_pos = toks[idx + 2]
                .chars()
                .next()
                .and_then(Pos::from_tag)
                .ok_or_else(|| err(format!("bad pointer pos {:?}", toks[idx + 2])))?;
            pointers.push((SynsetId::new(tgt_pos, tgt_offset), sym));
            idx += 4; // symbol, offset, pos, source/target
        }

        let id = SynsetId::new(pos, offset);
        if out
            .insert(
                id,
                RawSynset {
                    lemmas,
                    pointers,
                    gloss,
                },
            )
            .is_some()
        {
            return Err(err(format!("duplicate synset offset {offset}")));
        }
    }
    Ok(())
}

fn parse_index_file(
    path: &Path,
    file_pos: Pos,
    out: &mut HashMap<(String, Pos), Vec<SynsetId>>,
) -> Result<()> {
    for (lineno, line) in read_lines(path)?.iter().enumerate() {
        let lineno = lineno + 1;
        if line.starts_with(' ') || line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::parse(path, lineno, msg);

        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 6 {
            return Err(err(format!("short index line ({} fields)", toks.len())));
        }
        let lemma = toks[0].to_lowercase();
        let synset_cnt: usize = toks[2]
            .parse()
            .map_err(|_| err(format!("bad synset count {:?}", toks[2])))?;
        let p_cnt: usize = toks[3]
            .parse()
            .map_err(|_| err(format!("bad pointer count {:?}", toks[3])))?;
        let offsets_start = 4 + p_cnt + 2; // skip pointer symbols, sense_cnt, tagsense_cnt
        if toks.len() < offsets_start + synset_cnt {
            return Err(err("truncated offset list".into()));
        }
        let mut senses = Vec::with_capacity(synset_cnt);
        for t in &toks[offsets_start..offsets_start + synset_cnt] {
            let offset: u32 = t
                .parse()
                .map_err(|_| err(format!("bad synset offset {t:?}")))?;
            senses.push(SynsetId::new(file_pos, offset));
        }
        if out.insert((lemma.clone(), file_pos), senses).is_some() {
            return Err(err(format!("duplicate index entry for {lemma:?}")));
        }
    }
    Ok(())
}
