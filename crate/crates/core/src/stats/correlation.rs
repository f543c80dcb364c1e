//! Group–synset correlation heuristic: max over groups of
//! P(group, synset) − P(group)·P(synset), with probabilities as empirical
//! image-level frequencies.

use crate::error::{Error, Result};
use crate::wordnet::SynsetId;
use std::collections::{BTreeMap, BTreeSet};

/// Image-level joint occurrence counts. An image counts once per group and
/// once per synset, regardless of multiplicity.
#[derive(Debug, Clone, Default)]
pub struct CooccurrenceTable {
    pub n_images: usize,
    pub group_counts: BTreeMap<String, usize>,
    pub synset_counts: BTreeMap<SynsetId, usize>,
    pub joint: BTreeMap<(String, SynsetId), usize>,
}

impl CooccurrenceTable {
    pub fn add_image(&mut self, groups: &BTreeSet<String>, synsets: &BTreeSet<SynsetId>) {
        self.n_images += 1;
        for g in groups {
            *self.group_counts.entry(g.clone()).or_insert(0) += 1;
        }
        for s in synsets {
            *self.synset_counts.entry(*s).or_insert(0) += 1;
        }
        for g in groups {
            for s in synsets {
                *self.joint.entry((g.clone(), *s)).or_insert(0) += 1;
            }
        }
    }
}

/// The correlation value per synset. Values lie in [−0.25, 0.25].
pub fn group_synset_correlation(table: &CooccurrenceTable) -> Result<BTreeMap<SynsetId, f64>> {
    if table.n_images == 0 {
        return Err(Error::Domain("empty co-occurrence table".to_string()));
    }
    let n = table.n_images as f64;
    let mut out = BTreeMap::new();
    for (synset, s_count) in &table.synset_counts {
        let p_s = *s_count as f64 / n;
        let mut best = f64::NEG_INFINITY;
        for (group, g_count) in &table.group_counts {
            let p_g = *g_count as f64 / n;
            let joint = table
                .joint
                .get(&(group.clone(), *synset))
                .copied()
                .unwrap_or(0) as f64
                / n;
            best = best.max(joint - p_g * p_s);
        }
        if best.is_finite() {
            out.insert(*synset, best);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::Pos;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sid(n: u32) -> SynsetId {
        SynsetId::new(Pos::Noun, n)
    }

    /// Brute-force oracle recomputing the definition from raw image rows.
    fn oracle(
        images: &[(BTreeSet<String>, BTreeSet<SynsetId>)],
    ) -> BTreeMap<SynsetId, f64> {
        let n = images.len() as f64;
        let mut groups = BTreeSet::new();
        let mut synsets = BTreeSet::new();
        for (gs, ss) in images {
            groups.extend(gs.iter().cloned());
            synsets.extend(ss.iter().copied());
        }
        let mut out = BTreeMap::new();
        for s in &synsets {
            let p_s = images.iter().filter(|(_, ss)| ss.contains(s)).count() as f64 / n;
            let mut best = f64::NEG_INFINITY;
            for g in &groups {
                let p_g = images.iter().filter(|(gs, _)| gs.contains(g)).count() as f64 / n;
                let p_gs = images
                    .iter()
                    .filter(|(gs, ss)| gs.contains(g) && ss.contains(s))
                    .count() as f64
                    / n;
                best = best.max(p_gs - p_g * p_s);
            }
            out.insert(*s, best);
        }
        out
    }

    fn table_of(images: &[(BTreeSet<String>, BTreeSet<SynsetId>)]) -> CooccurrenceTable {
        let mut t = CooccurrenceTable::default();
        for (gs, ss) in images {
            t.add_image(gs, ss);
        }
        t
    }

    #[test]
    fn matches_brute_force_oracle_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..100 {
            let n_images = rng.gen_range(1..40);
            let images: Vec<(BTreeSet<String>, BTreeSet<SynsetId>)> = (0..n_images)
                .map(|_| {
                    let groups: BTreeSet<String> = ["a", "b", "c"]
                        .iter()
                        .filter(|_| rng.gen_bool(0.5))
                        .map(|s| s.to_string())
                        .collect();
                    let synsets: BTreeSet<SynsetId> =
                        (0..5).filter(|_| rng.gen_bool(0.4)).map(sid).collect();
                    (groups, synsets)
                })
                .collect();
            let got = group_synset_correlation(&table_of(&images)).unwrap();
            let want = oracle(&images);
            assert_eq!(got.len(), want.len());
            for (s, v) in &got {
                assert!(
                    (v - want[s]).abs() < 1e-12,
                    "synset {s}: got {v}, oracle {}",
                    want[s]
                );
                assert!((-0.25..=0.25).contains(v), "out of bound: {v}");
            }
        }
    }

    #[test]
    fn hand_computed_case() {
        // N=100, |g|=50, synset in 10 images, all in g: 0.10 - 0.50*0.10
        let mut images = Vec::new();
        for i in 0..100 {
            let groups: BTreeSet<String> = if i < 50 {
                BTreeSet::from(["g".to_string()])
            } else {
                BTreeSet::from(["h".to_string()])
            };
            let synsets = if i < 10 {
                BTreeSet::from([sid(1)])
            } else {
                BTreeSet::new()
            };
            images.push((groups, synsets));
        }
        let got = group_synset_correlation(&table_of(&images)).unwrap();
        assert!((got[&sid(1)] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn independence_and_ubiquity_vanish() {
        // synset in 20% of each group's images, N = 10,000
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut images = Vec::new();
        for i in 0..10_000 {
            let g = if i % 2 == 0 { "g" } else { "h" };
            let synsets = if rng.gen_bool(0.2) {
                BTreeSet::from([sid(1)])
            } else {
                BTreeSet::new()
            };
            images.push((BTreeSet::from([g.to_string()]), synsets));
        }
        let got = group_synset_correlation(&table_of(&images)).unwrap();
        assert!(got[&sid(1)].abs() < 0.01, "independence: {}", got[&sid(1)]);

        // synset in every image: P(g,s) = P(g), P(s) = 1
        let images: Vec<_> = (0..100)
            .map(|i| {
                let g = if i % 2 == 0 { "g" } else { "h" };
                (
                    BTreeSet::from([g.to_string()]),
                    BTreeSet::from([sid(7)]),
                )
            })
            .collect();
        let got = group_synset_correlation(&table_of(&images)).unwrap();
        assert!(got[&sid(7)].abs() < 1e-12);
    }

    #[test]
    fn empty_table_is_a_domain_error() {
        assert!(group_synset_correlation(&CooccurrenceTable::default()).is_err());
    }
}
