//! Loading prediction runs and turning them into aggregated reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use negspan_core::corpus::{load_predictions, Corpus, OverlapPolicy, Partition, PredictionSet};
use negspan_core::metrics::{aggregate_runs, evaluate, EvalReport, MatchMode};
use negspan_core::negex::NegexDetector;
use negspan_core::pipeline::{apply_pipeline, ScopeFile, ScopeSource};
use negspan_core::sample::Sample;

use crate::error::{read_file, Context, HarnessError, Result};

/// How a report row treats negation.
#[derive(Debug, Clone)]
pub enum Detector {
    None,
    Negex(NegexDetector),
    File { path: PathBuf, scopes: ScopeFile },
}

impl Detector {
    /// Parses `none`, `negex` or `file:PATH`.
    pub fn parse(spec: &str, negex: &NegexDetector) -> Result<Self> {
        match spec {
            "none" => Ok(Detector::None),
            "negex" => Ok(Detector::Negex(negex.clone())),
            other => {
                let path = other.strip_prefix("file:").ok_or_else(|| {
                    HarnessError::Validation(format!("unknown detector `{other}` (expected none, negex or file:PATH)"))
                })?;
                let scopes = load_predictions(&read_file(path)?, OverlapPolicy::Merge)
                    .context(|| format!("scope file {path}"))?;
                Ok(Detector::File {
                    path: PathBuf::from(path),
                    scopes: ScopeFile::new(scopes),
                })
            }
        }
    }

    fn source(&self) -> Option<&dyn ScopeSource> {
        match self {
            Detector::None => None,
            Detector::Negex(d) => Some(d),
            Detector::File { scopes, .. } => Some(scopes),
        }
    }
}

/// Expands paths, directories and glob patterns into a sorted file list.
pub fn expand_inputs(patterns: &[String]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for pattern in patterns {
        let path = Path::new(pattern);
        if path.is_dir() {
            let entries = std::fs::read_dir(path).map_err(|e| HarnessError::io(path, e))?;
            let mut inner: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            inner.sort();
            files.extend(inner);
        } else if path.exists() {
            files.push(path.to_path_buf());
        } else {
            let matches = glob::glob(pattern)
                .map_err(|e| HarnessError::Validation(format!("bad pattern `{pattern}`: {e}")))?
                .filter_map(std::result::Result::ok)
                .collect::<Vec<_>>();
            if matches.is_empty() {
                return Err(HarnessError::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ));
            }
            files.extend(matches);
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

pub fn load_prediction_files(paths: &[PathBuf]) -> Result<Vec<PredictionSet>> {
    paths
        .iter()
        .map(|path| {
            load_predictions(&read_file(path)?, OverlapPolicy::Reject).context(|| path.display().to_string())
        })
        .collect()
}

/// Key of one report row before a detector is applied.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupKey {
    pub model_id: String,
    pub detector_id: Option<String>,
    pub config_id: String,
}

/// Groups runs by (model, detector, config); each run id may appear once.
pub fn group_runs(sets: Vec<PredictionSet>) -> Result<BTreeMap<GroupKey, Vec<PredictionSet>>> {
    let mut groups: BTreeMap<GroupKey, Vec<PredictionSet>> = BTreeMap::new();
    for set in sets {
        let key = GroupKey {
            model_id: set.model_id.clone(),
            detector_id: set.detector_id.clone(),
            config_id: set.config_id.clone(),
        };
        let runs = groups.entry(key).or_default();
        if runs.iter().any(|r| r.run_id == set.run_id) {
            return Err(HarnessError::Validation(format!(
                "run `{}` of {} @ {} is declared by more than one file",
                set.run_id,
                set.label(),
                set.config_id
            )));
        }
        runs.push(set);
    }
    Ok(groups)
}

/// Samples scored by the harness: the test partition when the corpus has
/// partitions, otherwise everything.
pub fn evaluation_samples(corpus: &Corpus) -> Vec<&Sample> {
    if corpus.has_partitions() {
        corpus.in_partition(Partition::Test).collect()
    } else {
        corpus.samples().collect()
    }
}

/// Orders configs `k0 < k50 < k100` numerically, anything else after them.
fn config_order(id: &str) -> (usize, String) {
    match negspan_core::corpus::DatasetConfig::k_from_id(id) {
        Some(k) => (k, String::new()),
        None => (usize::MAX, id.to_string()),
    }
}

/// Sorts rows by model, then variant in the order given, then config.
pub fn sort_reports(reports: &mut [EvalReport], variant_order: &[String]) {
    let variant_rank = |r: &EvalReport| {
        let v = r.detector_id.clone().unwrap_or_default();
        variant_order.iter().position(|x| *x == v).unwrap_or(usize::MAX)
    };
    reports.sort_by(|a, b| {
        (a.model_id.as_str(), variant_rank(a), config_order(&a.config_id), a.detector_id.as_deref()).cmp(&(
            b.model_id.as_str(),
            variant_rank(b),
            config_order(&b.config_id),
            b.detector_id.as_deref(),
        ))
    });
}

/// Scores every group under every detector and averages over runs.
pub fn evaluate_groups(
    corpus: &Corpus,
    groups: &BTreeMap<GroupKey, Vec<PredictionSet>>,
    detectors: &[Detector],
    mode: MatchMode,
) -> Result<Vec<EvalReport>> {
    let samples = evaluation_samples(corpus);
    let mut reports = Vec::new();
    let mut variant_order = Vec::new();
    for detector in detectors {
        let variant = detector.source().map(|s| s.id()).unwrap_or_default();
        if !variant_order.contains(&variant) {
            variant_order.push(variant);
        }
    }
    for (key, runs) in groups {
        for detector in detectors {
            let mut per_run = Vec::with_capacity(runs.len());
            for run in runs {
                let set = match detector.source() {
                    None => run.clone(),
                    Some(source) => {
                        if let Some(existing) = &key.detector_id {
                            return Err(HarnessError::Validation(format!(
                                "{} run {} already carries detector `{existing}`; refusing to apply `{}` on top (mixed-mode predictions)",
                                key.model_id,
                                run.run_id,
                                source.id()
                            )));
                        }
                        let out = apply_pipeline(run, samples.iter().copied(), source);
                        if let Some(err) = out.errors.first() {
                            return Err(HarnessError::Validation(format!(
                                "{} run {}: {err}",
                                run.label(),
                                run.run_id
                            )));
                        }
                        out.predictions
                    }
                };
                let report = evaluate(&set, samples.iter().copied(), mode)
                    .context(|| format!("{} @ {} run {}", set.label(), set.config_id, set.run_id))?;
                per_run.push(report);
            }
            reports.push(aggregate_runs(&per_run).context(|| format!("{} @ {}", key.model_id, key.config_id))?);
        }
    }
    sort_reports(&mut reports, &variant_order);
    Ok(reports)
}

/// Aggregates per-run report records loaded from files.
pub fn aggregate_records(records: Vec<EvalReport>) -> Result<Vec<EvalReport>> {
    let mut groups: BTreeMap<(String, Option<String>, String, String), Vec<EvalReport>> = BTreeMap::new();
    let mut variant_order = Vec::new();
    for r in records {
        let variant = r.detector_id.clone().unwrap_or_default();
        if !variant_order.contains(&variant) {
            variant_order.push(variant);
        }
        groups
            .entry((
                r.model_id.clone(),
                r.detector_id.clone(),
                r.config_id.clone(),
                r.match_mode.to_string(),
            ))
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for runs in groups.values() {
        if runs.len() == 1 {
            out.push(runs[0].clone());
        } else {
            out.push(aggregate_runs(runs).context(|| "report records".to_string())?);
        }
    }
    sort_reports(&mut out, &variant_order);
    Ok(out)
}
