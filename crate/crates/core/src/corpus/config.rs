use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Corpus, Partition};
use crate::error::{Error, Result};
use crate::sample::Category;

/// Augmentation sizes offered by the command line.
pub const SWEEP_PRESETS: [usize; 6] = [0, 50, 100, 150, 200, 253];

/// A training set: the base train partition plus `k` generated negations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetConfig {
    pub id: String,
    pub k: usize,
    /// Generated samples added on top of the base set, in selection order.
    pub included_ids: Vec<String>,
    /// Train-partition samples other than generated negations, in id order.
    pub base_ids: Vec<String>,
}

impl DatasetConfig {
    /// Config id for a given augmentation size (`k0`, `k50`, ...).
    pub fn id_for(k: usize) -> String {
        format!("k{k}")
    }

    /// Inverse of [`DatasetConfig::id_for`].
    pub fn k_from_id(id: &str) -> Option<usize> {
        id.strip_prefix('k')?.parse().ok()
    }

    pub fn training_ids(&self) -> impl Iterator<Item = &str> {
        self.base_ids.iter().chain(&self.included_ids).map(String::as_str)
    }
}

fn generated_ids(corpus: &Corpus) -> Vec<String> {
    corpus
        .samples()
        .filter(|s| s.category() == Category::NegAdeG)
        .map(|s| s.id().to_string())
        .collect()
}

fn assemble(corpus: &Corpus, id: String, k: usize, ordered: Vec<String>) -> Result<DatasetConfig> {
    if k > ordered.len() {
        return Err(Error::KOutOfRange {
            k,
            available: ordered.len(),
        });
    }
    let base_ids = corpus
        .in_partition(Partition::Train)
        .filter(|s| s.category() != Category::NegAdeG)
        .map(|s| s.id().to_string())
        .collect();
    Ok(DatasetConfig {
        id,
        k,
        included_ids: ordered.into_iter().take(k).collect(),
        base_ids,
    })
}

/// Takes the first `k` generated samples in lexicographic id order, so
/// smaller configs are always prefixes of larger ones.
pub fn build_config(corpus: &Corpus, k: usize) -> Result<DatasetConfig> {
    assemble(corpus, DatasetConfig::id_for(k), k, generated_ids(corpus))
}

/// Like [`build_config`] but draws the generated samples in a seeded random
/// order. The prefix property holds for a fixed seed.
pub fn build_config_shuffled(corpus: &Corpus, k: usize, seed: u64) -> Result<DatasetConfig> {
    let mut ids = generated_ids(corpus);
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    assemble(corpus, format!("k{k}-s{seed}"), k, ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sample;

    fn corpus(generated: usize) -> Corpus {
        let mut c = Corpus::new();
        c.insert(Sample::ade("a1", "pain", vec![]).unwrap(), Some(Partition::Train)).unwrap();
        c.insert(Sample::new("n1", "ok", Category::NoAde, vec![], None).unwrap(), Some(Partition::Test))
            .unwrap();
        for i in 0..generated {
            let s = Sample::new(format!("g{i:03}"), "no pain", Category::NegAdeG, vec![], Some("a1".into())).unwrap();
            c.insert(s, Some(Partition::Train)).unwrap();
        }
        c
    }

    #[test]
    fn k_zero_is_base() {
        let cfg = build_config(&corpus(5), 0).unwrap();
        assert!(cfg.included_ids.is_empty());
        assert_eq!(cfg.training_ids().collect::<Vec<_>>(), ["a1"]);
        assert_eq!(cfg.id, "k0");
    }

    #[test]
    fn full_and_out_of_range() {
        let c = corpus(253);
        assert_eq!(build_config(&c, 253).unwrap().included_ids.len(), 253);
        assert_eq!(build_config(&c, 254), Err(Error::KOutOfRange { k: 254, available: 253 }));
    }

    #[test]
    fn deterministic_prefixes() {
        let c = corpus(253);
        assert_eq!(build_config(&c, 50).unwrap(), build_config(&c, 50).unwrap());
        for (i, &k1) in SWEEP_PRESETS.iter().enumerate() {
            for &k2 in &SWEEP_PRESETS[i + 1..] {
                let small = build_config(&c, k1).unwrap().included_ids;
                let large = build_config(&c, k2).unwrap().included_ids;
                assert_eq!(&large[..k1], &small[..]);
                let small = build_config_shuffled(&c, k1, 7).unwrap().included_ids;
                let large = build_config_shuffled(&c, k2, 7).unwrap().included_ids;
                assert_eq!(&large[..k1], &small[..]);
            }
        }
        let a = build_config_shuffled(&c, 50, 1).unwrap().included_ids;
        let b = build_config_shuffled(&c, 50, 2).unwrap().included_ids;
        assert_ne!(a, b);
    }

    #[test]
    fn id_parsing() {
        assert_eq!(DatasetConfig::k_from_id("k150"), Some(150));
        assert_eq!(DatasetConfig::k_from_id("base"), None);
    }
}
