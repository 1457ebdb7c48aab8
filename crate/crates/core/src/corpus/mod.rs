//! Corpus ingestion, partition bookkeeping and dataset construction helpers.
//!
//! A corpus file holds one JSON object per line:
//!
//! ```text
//! {"id":"t1","text":"fluoxetine, got me going crazy.","category":"ADE","gold":[[19,30]],"split":"train"}
//! {"id":"t1_G","text":"fluoxetine, didn't get me going crazy.","category":"negADE_G","origin_id":"t1","split":"train"}
//! ```
//!
//! `gold`, `origin_id` and `split` are optional. Offsets count characters.

mod config;
mod predictions;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use config::{build_config, build_config_shuffled, DatasetConfig, SWEEP_PRESETS};
pub use predictions::{load_predictions, save_predictions, OverlapPolicy, PredictionSet};

use crate::error::{Error, Result};
use crate::negex::{find_cues, CueCategory, CueLexicon, CueMatch};
use crate::sample::{Category, CategoryGroup, Sample};
use crate::span::Span;
use crate::token::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Test,
}

impl Partition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Test => "test",
        }
    }

    /// Real negated samples are test-only; generated ones are train-only.
    pub fn admits(&self, category: Category) -> bool {
        !matches!(
            (self, category),
            (Partition::Train, Category::NegAdeR) | (Partition::Test, Category::NegAdeG)
        )
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Partition::Train),
            "test" => Ok(Partition::Test),
            other => Err(Error::Malformed {
                line: 0,
                message: format!("unknown partition `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    text: String,
    category: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    gold: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<Partition>,
}

/// Id-keyed samples plus their train/test assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    samples: BTreeMap<String, Sample>,
    partition: BTreeMap<String, Partition>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a sample, enforcing unique ids and the partition rules.
    pub fn insert(&mut self, sample: Sample, partition: Option<Partition>) -> Result<()> {
        if self.samples.contains_key(sample.id()) {
            return Err(Error::DuplicateId(sample.id().to_string()));
        }
        if let Some(p) = partition {
            check_partition(&sample, p)?;
            self.partition.insert(sample.id().to_string(), p);
        }
        self.samples.insert(sample.id().to_string(), sample);
        Ok(())
    }

    pub fn assign(&mut self, id: &str, partition: Partition) -> Result<()> {
        let sample = self.samples.get(id).ok_or_else(|| Error::UnknownSample(id.to_string()))?;
        check_partition(sample, partition)?;
        self.partition.insert(id.to_string(), partition);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Sample> {
        self.samples.get(id)
    }

    pub fn partition_of(&self, id: &str) -> Option<Partition> {
        self.partition.get(id).copied()
    }

    pub fn has_partitions(&self) -> bool {
        !self.partition.is_empty()
    }

    /// Samples in id order.
    pub fn samples(&self) -> impl Iterator<Item = &Sample> {
        self.samples.values()
    }

    pub fn in_partition(&self, partition: Partition) -> impl Iterator<Item = &Sample> {
        self.samples
            .values()
            .filter(move |s| self.partition.get(s.id()) == Some(&partition))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn check_partition(sample: &Sample, partition: Partition) -> Result<()> {
    if partition.admits(sample.category()) {
        Ok(())
    } else {
        Err(Error::PartitionViolation {
            id: sample.id().to_string(),
            category: sample.category().to_string(),
            partition: partition.to_string(),
        })
    }
}

/// Parses a newline-delimited corpus document.
pub fn load_corpus(source: &str) -> Result<Corpus> {
    let mut corpus = Corpus::new();
    for (idx, line) in source.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(line).map_err(|e| Error::Malformed {
            line: idx + 1,
            message: e.to_string(),
        })?;
        let category: Category = record.category.parse()?;
        let gold = record
            .gold
            .into_iter()
            .map(|(s, e)| Span::new(s, e))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidSample {
                id: record.id.clone(),
                message: e.to_string(),
            })?;
        let sample = Sample::new(record.id, record.text, category, gold, record.origin_id)?;
        corpus.insert(sample, record.split)?;
    }
    Ok(corpus)
}

/// Renders a single sample as one corpus line (no trailing newline).
pub fn sample_record(sample: &Sample, partition: Option<Partition>) -> String {
    let record = Record {
        id: sample.id().to_string(),
        text: sample.text().to_string(),
        category: sample.category().to_string(),
        gold: sample.gold().iter().map(|s| (*s).into()).collect(),
        origin_id: sample.origin_id().map(str::to_string),
        split: partition,
    };
    serde_json::to_string(&record).expect("records always serialize")
}

/// Canonical rendering: one record per line in id order.
pub fn save_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for sample in corpus.samples() {
        out.push_str(&sample_record(sample, corpus.partition_of(sample.id())));
        out.push('\n');
    }
    out
}

/// PRE/POST cue matches in `text`; PSEUDO and TERMINATION hits are ignored.
pub fn negation_cues(text: &str, lexicon: &CueLexicon) -> Vec<CueMatch> {
    find_cues(&tokenize(text), lexicon)
        .into_iter()
        .filter(|c| matches!(c.category, CueCategory::Pre | CueCategory::Post))
        .collect()
}

/// Keeps the samples that contain at least one PRE or POST cue, in order.
pub fn cue_filter(samples: &[Sample], lexicon: &CueLexicon) -> Vec<Sample> {
    samples
        .iter()
        .filter(|s| !negation_cues(s.text(), lexicon).is_empty())
        .cloned()
        .collect()
}

/// Sample counts per partition and category group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartitionSummary {
    pub counts: BTreeMap<Partition, BTreeMap<CategoryGroup, usize>>,
}

impl PartitionSummary {
    pub fn count(&self, partition: Partition, group: CategoryGroup) -> usize {
        self.counts
            .get(&partition)
            .and_then(|row| row.get(&group))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, partition: Partition) -> usize {
        self.counts.get(&partition).map(|row| row.values().sum()).unwrap_or(0)
    }

    /// Percentage of negated samples among test samples; 0 for an empty test set.
    pub fn test_negade_share(&self) -> f64 {
        let total = self.total(Partition::Test);
        if total == 0 {
            0.0
        } else {
            100.0 * self.count(Partition::Test, CategoryGroup::NegAde) as f64 / total as f64
        }
    }
}

pub fn partition_summary(corpus: &Corpus) -> PartitionSummary {
    let mut summary = PartitionSummary::default();
    for partition in [Partition::Train, Partition::Test] {
        let row = summary.counts.entry(partition).or_default();
        for group in CategoryGroup::ALL {
            row.insert(group, 0);
        }
        for sample in corpus.in_partition(partition) {
            *row.entry(sample.category().group()).or_default() += 1;
        }
    }
    summary
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentationStatus {
    Proposed,
    Approved,
    Discarded,
}

/// Provenance of one manually negated sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationRecord {
    pub original_id: String,
    pub generated_id: String,
    pub edit_note: String,
    pub status: AugmentationStatus,
}
