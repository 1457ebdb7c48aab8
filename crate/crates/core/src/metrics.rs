//! Relaxed span metrics and false-positive accounting.
//!
//! In relaxed mode a prediction is correct when it shares at least one
//! character with some gold span, and a gold span is found when at least one
//! prediction touches it. Predictions and gold spans are counted
//! independently, so one long prediction can cover several gold spans.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::PredictionSet;
use crate::error::{Error, Result};
use crate::sample::{CategoryGroup, Sample};
use crate::span::{sorted_disjoint, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Any character overlap counts.
    #[default]
    Relaxed,
    /// Only identical boundaries count.
    Strict,
}

impl MatchMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatchMode::Relaxed => "relaxed",
            MatchMode::Strict => "strict",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxed" => Ok(MatchMode::Relaxed),
            "strict" => Ok(MatchMode::Strict),
            other => Err(Error::Malformed {
                line: 0,
                message: format!("unknown match mode `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct MatchResult {
    /// Predictions matching at least one gold span.
    pub tp_pred: usize,
    /// Predictions matching no gold span.
    pub fp: usize,
    /// Gold spans matched by at least one prediction.
    pub tp_gold: usize,
    /// Gold spans matched by none.
    pub fn_: usize,
}

impl MatchResult {
    pub fn new(tp_pred: usize, fp: usize, tp_gold: usize, fn_: usize) -> Self {
        Self {
            tp_pred,
            fp,
            tp_gold,
            fn_,
        }
    }
}

impl AddAssign for MatchResult {
    fn add_assign(&mut self, rhs: Self) {
        self.tp_pred += rhs.tp_pred;
        self.fp += rhs.fp;
        self.tp_gold += rhs.tp_gold;
        self.fn_ += rhs.fn_;
    }
}

/// Flags for which spans of two sorted, disjoint lists touch each other.
fn overlap_flags(gold: &[Span], pred: &[Span]) -> (Vec<bool>, Vec<bool>) {
    let mut gold_hit = vec![false; gold.len()];
    let mut pred_hit = vec![false; pred.len()];
    let (mut i, mut j) = (0, 0);
    while i < gold.len() && j < pred.len() {
        if gold[i].overlaps(&pred[j]) {
            gold_hit[i] = true;
            pred_hit[j] = true;
        }
        if gold[i].end() <= pred[j].end() {
            i += 1;
        } else {
            j += 1;
        }
    }
    (gold_hit, pred_hit)
}

pub fn match_spans(gold: &[Span], pred: &[Span], mode: MatchMode) -> Result<MatchResult> {
    let gold = sorted_disjoint(gold.to_vec())?;
    let pred = sorted_disjoint(pred.to_vec())?;
    let (gold_hit, pred_hit) = match mode {
        MatchMode::Relaxed => overlap_flags(&gold, &pred),
        MatchMode::Strict => (
            gold.iter().map(|g| pred.binary_search(g).is_ok()).collect(),
            pred.iter().map(|p| gold.binary_search(p).is_ok()).collect(),
        ),
    };
    let tp_gold = gold_hit.iter().filter(|&&h| h).count();
    let tp_pred = pred_hit.iter().filter(|&&h| h).count();
    Ok(MatchResult {
        tp_pred,
        fp: pred.len() - tp_pred,
        tp_gold,
        fn_: gold.len() - tp_gold,
    })
}

/// Any-overlap matching; both lists must be internally non-overlapping.
pub fn match_relaxed(gold: &[Span], pred: &[Span]) -> Result<MatchResult> {
    match_spans(gold, pred, MatchMode::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Precision, recall and F1 as ratios; every zero denominator yields 0.
pub fn score(m: &MatchResult) -> Scores {
    let precision = ratio(m.tp_pred, m.tp_pred + m.fp);
    let recall = ratio(m.tp_gold, m.tp_gold + m.fn_);
    Scores {
        precision,
        recall,
        f1: f1(precision, recall),
    }
}

fn index<'a>(samples: impl IntoIterator<Item = &'a Sample>) -> HashMap<&'a str, &'a Sample> {
    samples.into_iter().map(|s| (s.id(), s)).collect()
}

fn zero_groups<T: Default>() -> BTreeMap<CategoryGroup, T> {
    CategoryGroup::ALL.into_iter().map(|g| (g, T::default())).collect()
}

fn fp_counts(
    predictions: &PredictionSet,
    by_id: &HashMap<&str, &Sample>,
    mode: MatchMode,
) -> Result<BTreeMap<CategoryGroup, usize>> {
    let mut counts = zero_groups();
    for (id, spans) in predictions.iter() {
        let sample = by_id.get(id).ok_or_else(|| Error::UnknownSample(id.to_string()))?;
        let m = match_spans(sample.gold(), spans, mode)?;
        *counts.entry(sample.category().group()).or_default() += m.fp;
    }
    Ok(counts)
}

/// False positives grouped by the category of the sample they occur in.
/// Both negated sources report under `negADE`.
pub fn fp_by_category<'a>(
    predictions: &PredictionSet,
    samples: impl IntoIterator<Item = &'a Sample>,
) -> Result<BTreeMap<CategoryGroup, usize>> {
    fp_counts(predictions, &index(samples), MatchMode::Relaxed)
}

/// Percentage drop from `base_fp` to `new_fp`.
pub fn reduction(base_fp: f64, new_fp: f64) -> Result<f64> {
    if base_fp.is_nan() || base_fp <= 0.0 {
        return Err(Error::NonPositiveBaseline(base_fp));
    }
    Ok(100.0 * (base_fp - new_fp) / base_fp)
}

/// `33.99…` → `34%`.
pub fn format_percent(value: f64) -> String {
    format!("{value:.0}%")
}

/// Ratio rendered as a percentage with two decimals (`0.5015` → `50.15`).
pub fn format_score(ratio: f64) -> String {
    format!("{:.2}", ratio * 100.0)
}

/// False-positive count with one decimal.
pub fn format_fp(value: f64) -> String {
    format!("{value:.1}")
}

/// Metrics for one (model, detector, config) group, either a single run or
/// the mean over `runs` runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub model_id: String,
    pub detector_id: Option<String>,
    pub config_id: String,
    pub match_mode: MatchMode,
    pub runs: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub fp_total: f64,
    pub fp_by_category: BTreeMap<CategoryGroup, f64>,
}

impl EvalReport {
    pub fn label(&self) -> String {
        match &self.detector_id {
            Some(d) => format!("{}+{}", self.model_id, d),
            None => self.model_id.clone(),
        }
    }

    pub fn fp(&self, group: CategoryGroup) -> f64 {
        self.fp_by_category.get(&group).copied().unwrap_or(0.0)
    }

    fn group_key(&self) -> String {
        format!("{} @ {} ({})", self.label(), self.config_id, self.match_mode)
    }

    /// `key=value` lines, fixed key order, floats in shortest round-trip form.
    pub fn to_record(&self) -> String {
        let mut out = format!("model={}\n", self.model_id);
        if let Some(d) = &self.detector_id {
            out.push_str(&format!("detector={d}\n"));
        }
        out.push_str(&format!("config={}\n", self.config_id));
        out.push_str(&format!("match_mode={}\n", self.match_mode));
        out.push_str(&format!("runs={}\n", self.runs));
        out.push_str(&format!("precision={}\n", self.precision));
        out.push_str(&format!("recall={}\n", self.recall));
        out.push_str(&format!("f1={}\n", self.f1));
        out.push_str(&format!("fp_total={}\n", self.fp_total));
        for group in CategoryGroup::ALL {
            out.push_str(&format!("fp_{group}={}\n", self.fp(group)));
        }
        out
    }

    /// Parses one record written by [`EvalReport::to_record`].
    pub fn from_record(record: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for (idx, line) in record.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Malformed {
                line: idx + 1,
                message: "expected key=value".into(),
            })?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let missing = |key: &str| Error::Malformed {
            line: 0,
            message: format!("report record lacks `{key}`"),
        };
        let text = |key: &str| fields.get(key).cloned().ok_or_else(|| missing(key));
        let number = |key: &str| -> Result<f64> {
            let raw = text(key)?;
            raw.parse().map_err(|_| Error::Malformed {
                line: 0,
                message: format!("`{key}` is not a number: {raw}"),
            })
        };
        let mut fp_by_category = BTreeMap::new();
        for group in CategoryGroup::ALL {
            fp_by_category.insert(group, number(&format!("fp_{group}"))?);
        }
        Ok(Self {
            model_id: text("model")?,
            detector_id: fields.get("detector").cloned(),
            config_id: text("config")?,
            match_mode: fields.get("match_mode").map(|m| m.parse()).transpose()?.unwrap_or_default(),
            runs: number("runs")? as usize,
            precision: number("precision")?,
            recall: number("recall")?,
            f1: number("f1")?,
            fp_total: number("fp_total")?,
            fp_by_category,
        })
    }
}

/// Parses blank-line separated report records; `#` lines are comments.
pub fn parse_records(source: &str) -> Result<Vec<EvalReport>> {
    let mut reports = Vec::new();
    let mut block = String::new();
    for line in source.lines().chain(std::iter::once("")) {
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !block.trim().is_empty() {
                reports.push(EvalReport::from_record(&block)?);
            }
            block.clear();
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    Ok(reports)
}

/// Scores one prediction run against `samples`.
///
/// Every sample counts (a sample without predictions contributes its gold
/// spans as misses). Predictions for ids outside `samples` are an error.
pub fn evaluate<'a>(
    predictions: &PredictionSet,
    samples: impl IntoIterator<Item = &'a Sample>,
    mode: MatchMode,
) -> Result<EvalReport> {
    let by_id = index(samples);
    let fp_groups = fp_counts(predictions, &by_id, mode)?;
    let mut ids: Vec<&&str> = by_id.keys().collect();
    ids.sort();
    let mut total = MatchResult::default();
    for id in ids {
        total += match_spans(by_id[*id].gold(), predictions.spans_for(id), mode)?;
    }
    let scores = score(&total);
    Ok(EvalReport {
        model_id: predictions.model_id.clone(),
        detector_id: predictions.detector_id.clone(),
        config_id: predictions.config_id.clone(),
        match_mode: mode,
        runs: 1,
        precision: scores.precision,
        recall: scores.recall,
        f1: scores.f1,
        fp_total: total.fp as f64,
        fp_by_category: fp_groups.into_iter().map(|(g, n)| (g, n as f64)).collect(),
    })
}

/// Field-wise arithmetic mean of reports sharing one group.
///
/// F1 is averaged like every other field, not recomputed from the mean P
/// and R.
pub fn aggregate_runs(reports: &[EvalReport]) -> Result<EvalReport> {
    let first = reports.first().ok_or(Error::NoReports)?;
    for r in &reports[1..] {
        if r.group_key() != first.group_key() {
            return Err(Error::MixedReports(first.group_key(), r.group_key()));
        }
    }
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let mut fp_by_category = zero_groups();
    for group in CategoryGroup::ALL {
        fp_by_category.insert(group, mean(&|r| r.fp(group)));
    }
    Ok(EvalReport {
        model_id: first.model_id.clone(),
        detector_id: first.detector_id.clone(),
        config_id: first.config_id.clone(),
        match_mode: first.match_mode,
        runs: reports.len(),
        precision: mean(&|r| r.precision),
        recall: mean(&|r| r.recall),
        f1: mean(&|r| r.f1),
        fp_total: mean(&|r| r.fp_total),
        fp_by_category,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::OverlapPolicy;
    use crate::sample::Category;

    fn sp(a: usize, b: usize) -> Span {
        Span::new(a, b).unwrap()
    }

    #[test]
    fn relaxed_examples() {
        assert_eq!(match_relaxed(&[sp(10, 20)], &[sp(15, 25)]).unwrap(), MatchResult::new(1, 0, 1, 0));
        assert_eq!(match_relaxed(&[sp(10, 20)], &[sp(30, 35)]).unwrap(), MatchResult::new(0, 1, 0, 1));
        assert_eq!(
            match_relaxed(&[sp(0, 5), sp(10, 15)], &[sp(3, 12)]).unwrap(),
            MatchResult::new(1, 0, 2, 0)
        );
        assert!(matches!(
            match_relaxed(&[sp(0, 5), sp(3, 8)], &[]),
            Err(Error::OverlappingSpans(..))
        ));
    }

    #[test]
    fn strict_mode_needs_exact_boundaries() {
        let m = match_spans(&[sp(10, 20)], &[sp(15, 25), sp(10, 20)], MatchMode::Strict);
        assert!(m.is_err(), "overlapping predictions are rejected in every mode");
        let m = match_spans(&[sp(10, 20), sp(30, 40)], &[sp(10, 20), sp(30, 35)], MatchMode::Strict).unwrap();
        assert_eq!(m, MatchResult::new(1, 1, 1, 1));
    }

    #[test]
    fn score_examples() {
        let s = score(&MatchResult::new(1, 0, 1, 0));
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = score(&MatchResult::new(0, 1, 0, 1));
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        let s = score(&MatchResult::new(1, 1, 2, 0));
        assert_eq!((s.precision, s.recall), (0.5, 1.0));
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(format_score(s.f1), "66.67");
        assert_eq!(score(&MatchResult::default()), Scores::default());
    }

    fn set(entries: &[(&str, &[Span])]) -> PredictionSet {
        let mut p = PredictionSet::new("m", "k0", "1");
        for (id, spans) in entries {
            p.set(*id, spans.to_vec(), OverlapPolicy::Reject).unwrap();
        }
        p
    }

    #[test]
    fn fp_category_rules() {
        let noade = Sample::new("n", "nothing to see here", Category::NoAde, vec![], None).unwrap();
        let ade = Sample::ade("a", "headache and rash", vec![sp(0, 4)]).unwrap();
        let neg = Sample::new("r", "no headache at all", Category::NegAdeR, vec![], None).unwrap();

        let fp = fp_by_category(&set(&[("n", &[sp(0, 3), sp(5, 8)])]), [&noade]).unwrap();
        assert_eq!(fp[&CategoryGroup::NoAde], 2);

        let fp = fp_by_category(&set(&[("a", &[sp(2, 6)])]), [&ade]).unwrap();
        assert_eq!(fp[&CategoryGroup::Ade], 0);

        let fp = fp_by_category(&set(&[("r", &[sp(3, 11)]), ("a", &[sp(13, 17)])]), [&ade, &neg]).unwrap();
        assert_eq!(fp[&CategoryGroup::NegAde], 1);
        assert_eq!(fp[&CategoryGroup::Ade], 1);

        assert_eq!(
            fp_by_category(&set(&[("zz", &[sp(0, 1)])]), [&ade]),
            Err(Error::UnknownSample("zz".into()))
        );
    }

    #[test]
    fn reductions() {
        let r = reduction(161.2, 106.4).unwrap();
        assert!((r - 33.995).abs() < 1e-2);
        assert_eq!(format_percent(r), "34%");
        assert_eq!(format_percent(reduction(161.2, 120.2).unwrap()), "25%");
        assert_eq!(reduction(7.0, 7.0).unwrap(), 0.0);
        assert!(reduction(0.0, 1.0).is_err());
        assert!(reduction(-3.0, 1.0).is_err());
    }

    fn report(fp: f64, precision: f64) -> EvalReport {
        EvalReport {
            model_id: "BERT".into(),
            detector_id: None,
            config_id: "k0".into(),
            match_mode: MatchMode::Relaxed,
            runs: 1,
            precision,
            recall: 0.5,
            f1: 0.5,
            fp_total: fp,
            fp_by_category: [(CategoryGroup::Ade, fp), (CategoryGroup::NoAde, 0.0), (CategoryGroup::NegAde, 0.0)]
                .into_iter()
                .collect(),
        }
    }

    #[test]
    fn aggregation() {
        let runs: Vec<_> = [160.0, 161.0, 162.0, 160.0, 163.0].iter().map(|&f| report(f, 0.5)).collect();
        let agg = aggregate_runs(&runs).unwrap();
        assert_eq!(agg.runs, 5);
        assert_eq!(format_fp(agg.fp_total), "161.2");
        assert!((agg.fp_total - 161.2).abs() < 1e-9);

        let single = aggregate_runs(&runs[..1]).unwrap();
        assert_eq!(single, runs[0]);

        let agg = aggregate_runs(&[report(1.0, 0.5), report(1.0, 0.6)]).unwrap();
        assert!((agg.precision - 0.55).abs() < 1e-12);

        assert_eq!(aggregate_runs(&[]), Err(Error::NoReports));
        let mut other = report(1.0, 0.5);
        other.config_id = "k50".into();
        assert!(matches!(aggregate_runs(&[report(1.0, 0.5), other]), Err(Error::MixedReports(..))));
    }

    #[test]
    fn record_round_trip() {
        let mut r = report(161.2, 0.5015);
        r.detector_id = Some("NegEx".into());
        let text = format!("{}\n{}", r.to_record(), report(3.0, 0.1).to_record());
        let parsed = parse_records(&text).unwrap();
        assert_eq!(parsed, vec![r, report(3.0, 0.1)]);
        assert!(EvalReport::from_record("model=x\n").is_err());
    }

    #[test]
    fn evaluate_counts_missed_gold() {
        let ade = Sample::ade("a", "headache and rash", vec![sp(0, 8), sp(13, 17)]).unwrap();
        let noade = Sample::new("n", "fine", Category::NoAde, vec![], None).unwrap();
        let preds = set(&[("a", &[sp(0, 4)]), ("n", &[sp(0, 4)])]);
        let r = evaluate(&preds, [&ade, &noade], MatchMode::Relaxed).unwrap();
        assert_eq!(r.precision, 0.5);
        assert_eq!(r.recall, 0.5);
        assert_eq!(r.fp_total, 1.0);
        assert_eq!(r.fp(CategoryGroup::NoAde), 1.0);
    }
}
