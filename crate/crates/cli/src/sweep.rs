//! False positives as a function of the number of generated negations in
//! the training set.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use negspan_core::corpus::DatasetConfig;
use negspan_core::metrics::{format_fp, EvalReport};
use negspan_core::sample::CategoryGroup;

use crate::chart::{line_chart, Series};

/// FP values of one report at one k.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub fp_total: f64,
    pub fp_by_category: BTreeMap<CategoryGroup, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub label: String,
    pub points: BTreeMap<usize, SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sweep {
    pub ks: Vec<usize>,
    pub series: Vec<SweepSeries>,
    /// (series label, k) pairs with no report.
    pub gaps: Vec<(String, usize)>,
}

/// Collects one series per model/variant label from reports whose config id
/// encodes a k (`k50`). Reports for other configs or other ks are skipped.
pub fn build_sweep(reports: &[EvalReport], ks: &[usize]) -> Sweep {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut series: Vec<SweepSeries> = Vec::new();
    for report in reports {
        let Some(k) = DatasetConfig::k_from_id(&report.config_id) else {
            log::warn!("report {} @ {} has no k; skipped", report.label(), report.config_id);
            continue;
        };
        if !ks.contains(&k) {
            continue;
        }
        let label = report.label();
        let idx = match series.iter().position(|s| s.label == label) {
            Some(i) => i,
            None => {
                series.push(SweepSeries {
                    label,
                    points: BTreeMap::new(),
                });
                series.len() - 1
            }
        };
        series[idx].points.insert(
            k,
            SweepPoint {
                fp_total: report.fp_total,
                fp_by_category: report.fp_by_category.clone(),
            },
        );
    }
    let gaps = series
        .iter()
        .flat_map(|s| {
            ks.iter()
                .filter(|k| !s.points.contains_key(k))
                .map(|k| (s.label.clone(), *k))
        })
        .collect();
    Sweep { ks, series, gaps }
}

/// Which FP column a chart or table plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Total,
    Category(CategoryGroup),
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Total,
        Measure::Category(CategoryGroup::Ade),
        Measure::Category(CategoryGroup::NoAde),
        Measure::Category(CategoryGroup::NegAde),
    ];

    pub fn name(&self) -> String {
        match self {
            Measure::Total => "fp_total".into(),
            Measure::Category(g) => format!("fp_{g}"),
        }
    }

    fn value(&self, point: &SweepPoint) -> f64 {
        match self {
            Measure::Total => point.fp_total,
            Measure::Category(g) => point.fp_by_category.get(g).copied().unwrap_or(0.0),
        }
    }
}

impl Sweep {
    pub fn chart_series(&self, measure: Measure) -> Vec<Series> {
        self.series
            .iter()
            .map(|s| Series {
                label: s.label.clone(),
                points: s.points.iter().map(|(k, p)| (*k, measure.value(p))).collect(),
            })
            .collect()
    }

    /// Tab-separated curve data, one line per (series, k); gaps listed as
    /// trailing comments.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("series\tk");
        for m in Measure::ALL {
            out.push('\t');
            out.push_str(&m.name());
        }
        out.push('\n');
        for s in &self.series {
            for (k, point) in &s.points {
                let _ = write!(out, "{}\t{k}", s.label);
                for m in Measure::ALL {
                    let _ = write!(out, "\t{}", format_fp(m.value(point)));
                }
                out.push('\n');
            }
        }
        for (label, k) in &self.gaps {
            let _ = writeln!(out, "# gap\t{label}\t{k}");
        }
        out
    }

    pub fn chart(&self, measure: Measure) -> String {
        let title = match measure {
            Measure::Total => "Total false positives".to_string(),
            Measure::Category(g) => format!("False positives on {g} samples"),
        };
        line_chart(
            &title,
            "generated negated samples in training (k)",
            "false positives",
            &self.ks,
            &self.chart_series(measure),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use negspan_core::metrics::MatchMode;

    fn report(label: &str, k: usize, fp: [f64; 3]) -> EvalReport {
        EvalReport {
            model_id: label.into(),
            detector_id: None,
            config_id: format!("k{k}"),
            match_mode: MatchMode::Relaxed,
            runs: 5,
            precision: 0.5,
            recall: 0.5,
            f1: 0.5,
            fp_total: fp.iter().sum(),
            fp_by_category: CategoryGroup::ALL.into_iter().zip(fp).collect(),
        }
    }

    #[test]
    fn gaps_are_reported() {
        let reports = vec![report("A", 0, [1.0, 2.0, 3.0]), report("A", 100, [1.0, 1.0, 1.0])];
        let sweep = build_sweep(&reports, &[0, 50, 100]);
        assert_eq!(sweep.gaps, vec![("A".to_string(), 50)]);
        assert_eq!(sweep.series[0].points.len(), 2);
        assert!(sweep.to_tsv().contains("# gap\tA\t50\n"));
    }

    #[test]
    fn categories_sum_to_total() {
        let reports: Vec<_> = [0, 50, 100]
            .iter()
            .map(|&k| report("A", k, [k as f64, 2.0, 3.5]))
            .collect();
        let sweep = build_sweep(&reports, &[0, 50, 100]);
        let total = &sweep.chart_series(Measure::Total)[0].points;
        let parts: Vec<_> = CategoryGroup::ALL
            .iter()
            .map(|&g| sweep.chart_series(Measure::Category(g))[0].points.clone())
            .collect();
        for (i, (k, t)) in total.iter().enumerate() {
            let sum: f64 = parts.iter().map(|p| p[i].1).sum();
            assert_eq!(parts[0][i].0, *k);
            assert!((sum - t).abs() < 1e-9);
        }
    }

    #[test]
    fn single_k() {
        let sweep = build_sweep(&[report("A", 50, [1.0, 0.0, 0.0])], &[50]);
        assert_eq!(sweep.chart_series(Measure::Total)[0].points, vec![(50, 1.0)]);
        assert!(sweep.chart(Measure::Total).contains("data-points=\"50,1.0\""));
    }
}
