//! Report tables. Every cell is an [`EvalReport`] field passed through the
//! display rounding in `negspan_core::metrics`.

use std::fmt::Write as _;
use std::str::FromStr;

use negspan_core::corpus::{Partition, PartitionSummary};
use negspan_core::metrics::{format_fp, format_percent, format_score, reduction, EvalReport};
use negspan_core::sample::CategoryGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Markdown,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(format!("unknown format `{other}` (expected tsv or markdown)")),
        }
    }
}

fn table(header: &[&str], rows: &[Vec<String>], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Tsv => {
            out.push_str(&header.join("\t"));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        Format::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let rule: Vec<&str> = header.iter().map(|_| "---").collect();
            let _ = writeln!(out, "|{}|", rule.join("|"));
            for row in rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
    }
    out
}

pub const REPORT_HEADER: [&str; 12] = [
    "model", "config", "runs", "match", "fp", "fp_ADE", "fp_noADE", "fp_negADE", "fp_reduction", "P", "R", "F1",
];

/// FP reduction of a pipeline row against the detector-free row of the same
/// model and config.
fn reduction_cell(report: &EvalReport, all: &[EvalReport]) -> String {
    if report.detector_id.is_none() {
        return "-".into();
    }
    all.iter()
        .find(|b| {
            b.detector_id.is_none()
                && b.model_id == report.model_id
                && b.config_id == report.config_id
                && b.match_mode == report.match_mode
        })
        .and_then(|base| reduction(base.fp_total, report.fp_total).ok())
        .map(format_percent)
        .unwrap_or_else(|| "-".into())
}

pub fn report_row(report: &EvalReport, all: &[EvalReport]) -> Vec<String> {
    let mut row = vec![
        report.label(),
        report.config_id.clone(),
        report.runs.to_string(),
        report.match_mode.to_string(),
        format_fp(report.fp_total),
    ];
    row.extend(CategoryGroup::ALL.iter().map(|g| format_fp(report.fp(*g))));
    row.push(reduction_cell(report, all));
    row.push(format_score(report.precision));
    row.push(format_score(report.recall));
    row.push(format_score(report.f1));
    row
}

/// FP breakdown and P/R/F1, one row per report.
pub fn render_reports(reports: &[EvalReport], format: Format) -> String {
    let rows: Vec<Vec<String>> = reports.iter().map(|r| report_row(r, reports)).collect();
    table(&REPORT_HEADER, &rows, format)
}

/// Blank-line separated `key=value` records.
pub fn render_records(reports: &[EvalReport]) -> String {
    reports.iter().map(EvalReport::to_record).collect::<Vec<_>>().join("\n")
}

pub fn render_summary(summary: &PartitionSummary, format: Format) -> String {
    let mut header = vec!["partition"];
    header.extend(CategoryGroup::ALL.iter().map(CategoryGroup::as_str));
    header.push("total");
    let rows: Vec<Vec<String>> = [Partition::Train, Partition::Test]
        .iter()
        .map(|&p| {
            let mut row = vec![p.to_string()];
            row.extend(CategoryGroup::ALL.iter().map(|&g| summary.count(p, g).to_string()));
            row.push(summary.total(p).to_string());
            row
        })
        .collect();
    let mut out = table(&header, &rows, format);
    let share = format!("test negADE share: {:.1}%\n", summary.test_negade_share());
    match format {
        Format::Tsv => out.push_str(&format!("# {share}")),
        Format::Markdown => {
            out.push('\n');
            out.push_str(&share);
        }
    }
    out
}
