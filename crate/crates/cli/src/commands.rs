use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use negspan_core::corpus::{cue_filter, load_corpus, negation_cues, partition_summary, Corpus, SWEEP_PRESETS};
use negspan_core::metrics::{parse_records, EvalReport, MatchMode};
use negspan_core::negex::{load_lexicon, CueCategory, CueLexicon, NegexConfig, NegexDetector};
use negspan_core::Sample;

use crate::error::{read_file, write_file, Context, HarnessError, Result};
use crate::experiment::{aggregate_records, evaluate_groups, expand_inputs, group_runs, load_prediction_files, Detector};
use crate::render::{render_records, render_reports, render_summary, Format};
use crate::sweep::{build_sweep, Measure, Sweep};

pub const LEXICON_ENV: &str = "NEGSPAN_LEXICON";

#[derive(Debug, Parser)]
#[command(name = "negspan", version, about = "Negation-aware ADE extraction harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score prediction runs, optionally through negation pipelines.
    Eval(EvalArgs),
    /// FP curves over augmentation sizes.
    Sweep(SweepArgs),
    /// Print negation scopes found in text.
    Detect(DetectArgs),
    /// Keep corpus samples containing a negation cue, cues highlighted.
    Recover(RecoverArgs),
    /// Sample counts per partition and category.
    Summary(SummaryArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LexiconArgs {
    /// Cue lexicon file; the bundled lexicon when unset.
    #[arg(long, env = LEXICON_ENV)]
    pub lexicon: Option<PathBuf>,
    /// Maximum scope length in tokens.
    #[arg(long, default_value_t = 5)]
    pub window: usize,
}

impl LexiconArgs {
    pub fn detector(&self) -> Result<NegexDetector> {
        let lexicon = match &self.lexicon {
            Some(path) => load_lexicon(&read_file(path)?).context(|| path.display().to_string())?,
            None => CueLexicon::builtin(),
        };
        let config = NegexConfig::with_window(self.window).context(|| "--window".to_string())?;
        Ok(NegexDetector::new(lexicon, config))
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Prediction files, directories or glob patterns.
    #[arg(long, num_args = 1..)]
    pub predictions: Vec<String>,
    /// Precomputed report records to render instead of scoring predictions.
    #[arg(long, num_args = 1..)]
    pub reports: Vec<PathBuf>,
    /// `none`, `negex` or `file:PATH`; repeat for several variants.
    #[arg(long, num_args = 1.., default_value = "none")]
    pub detector: Vec<String>,
    #[command(flatten)]
    pub negex: LexiconArgs,
    #[arg(long, default_value = "relaxed", value_parser = parse_mode)]
    pub match_mode: MatchMode,
    #[arg(long, default_value = "tsv")]
    pub format: Format,
    /// Directory for report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> std::result::Result<MatchMode, String> {
    s.parse().map_err(|e: negspan_core::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Augmentation sizes to plot.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub k: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Text to analyse; otherwise each line of INPUT (or stdin) is analysed.
    #[arg(long, conflicts_with = "input")]
    pub text: Option<String>,
    /// File to analyse line by line; `-` for stdin.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub negex: LexiconArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub negex: LexiconArgs,
    /// Candidate file; stdout when unset.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SummaryArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = "tsv")]
    pub format: Format,
}

/// Everything `eval` and `sweep` produce.
#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub reports: Vec<EvalReport>,
    pub table_tsv: String,
    pub table_markdown: String,
    pub records: String,
    pub sweep: Option<Sweep>,
}

impl ReportBundle {
    pub fn from_reports(reports: Vec<EvalReport>) -> Self {
        Self {
            table_tsv: render_reports(&reports, Format::Tsv),
            table_markdown: render_reports(&reports, Format::Markdown),
            records: render_records(&reports),
            reports,
            sweep: None,
        }
    }

    pub fn table(&self, format: Format) -> &str {
        match format {
            Format::Tsv => &self.table_tsv,
            Format::Markdown => &self.table_markdown,
        }
    }

    /// (file name, contents) pairs written by `--out`.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut files = vec![
            ("report.tsv".to_string(), self.table_tsv.clone()),
            ("report.md".to_string(), self.table_markdown.clone()),
            ("reports.txt".to_string(), self.records.clone()),
        ];
        if let Some(sweep) = &self.sweep {
            files.push(("curve.tsv".into(), sweep.to_tsv()));
            for m in Measure::ALL {
                files.push((format!("{}.svg", m.name()), sweep.chart(m)));
            }
        }
        files
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for (name, contents) in self.files() {
            write_file(dir.join(name), &contents)?;
        }
        Ok(())
    }
}

fn load_corpus_file(path: &Path) -> Result<Corpus> {
    load_corpus(&read_file(path)?).context(|| path.display().to_string())
}

/// Reports for `eval`/`sweep`, from records or by scoring predictions.
pub fn collect_reports(args: &EvalArgs) -> Result<Vec<EvalReport>> {
    let mut reports = Vec::new();
    if !args.reports.is_empty() {
        let mut records = Vec::new();
        for path in &args.reports {
            records.extend(parse_records(&read_file(path)?).context(|| path.display().to_string())?);
        }
        reports.extend(aggregate_records(records)?);
    }
    if !args.predictions.is_empty() {
        let corpus_path = args
            .corpus
            .as_ref()
            .ok_or_else(|| HarnessError::Validation("--predictions needs --corpus".into()))?;
        let corpus = load_corpus_file(corpus_path)?;
        let files = expand_inputs(&args.predictions)?;
        let groups = group_runs(load_prediction_files(&files)?)?;
        let negex = if args.detector.iter().any(|d| d == "negex") {
            args.negex.detector()?
        } else {
            NegexDetector::default()
        };
        let detectors = args
            .detector
            .iter()
            .map(|d| Detector::parse(d, &negex))
            .collect::<Result<Vec<_>>>()?;
        reports.extend(evaluate_groups(&corpus, &groups, &detectors, args.match_mode)?);
    }
    if args.reports.is_empty() && args.predictions.is_empty() {
        return Err(HarnessError::Validation("nothing to evaluate: pass --predictions or --reports".into()));
    }
    Ok(reports)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<ReportBundle> {
    let bundle = ReportBundle::from_reports(collect_reports(args)?);
    if let Some(dir) = &args.out {
        bundle.write_to(dir)?;
    }
    Ok(bundle)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<ReportBundle> {
    let ks = if args.k.is_empty() { SWEEP_PRESETS.to_vec() } else { args.k.clone() };
    let mut bundle = ReportBundle::from_reports(collect_reports(&args.eval)?);
    let sweep = build_sweep(&bundle.reports, &ks);
    for (label, k) in &sweep.gaps {
        log::warn!("no report for {label} at k={k}");
    }
    bundle.sweep = Some(sweep);
    if let Some(dir) = &args.eval.out {
        bundle.write_to(dir)?;
    }
    Ok(bundle)
}

/// One output line per scope:
/// `line  category  cue_start  cue_end  cue  scope_start  scope_end  scope`.
pub fn cmd_detect(args: &DetectArgs, stdin: &mut dyn Read) -> Result<String> {
    let detector = args.negex.detector()?;
    let input = match (&args.text, &args.input) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) if path.as_os_str() != "-" => read_file(path)?,
        _ => {
            let mut buf = String::new();
            stdin
                .read_to_string(&mut buf)
                .map_err(|e| HarnessError::io("<stdin>", e))?;
            buf
        }
    };
    let lines: Vec<&str> = if args.text.is_some() {
        vec![input.as_str()]
    } else {
        input.lines().collect()
    };
    let mut out = String::new();
    for (i, text) in lines.iter().enumerate() {
        for scope in detector.detect(text) {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                i + 1,
                scope.cue.category,
                scope.cue.span.start(),
                scope.cue.span.end(),
                scope.cue.span.slice(text).unwrap_or_default(),
                scope.span.start(),
                scope.span.end(),
                scope.span.slice(text).unwrap_or_default(),
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct CandidateCue<'a> {
    start: usize,
    end: usize,
    category: CueCategory,
    text: &'a str,
}

#[derive(Debug, Serialize)]
struct Candidate<'a> {
    id: &'a str,
    text: &'a str,
    category: &'a str,
    highlighted: String,
    cues: Vec<CandidateCue<'a>>,
}

/// Wraps each cue in `**…**`.
fn highlight(text: &str, cues: &[(usize, usize)]) -> String {
    let mut out = String::new();
    let mut cue_iter = cues.iter().peekable();
    for (i, c) in text.chars().enumerate() {
        if cue_iter.peek().is_some_and(|(s, _)| *s == i) {
            out.push_str("**");
        }
        out.push(c);
        if cue_iter.peek().is_some_and(|(_, e)| *e == i + 1) {
            out.push_str("**");
            cue_iter.next();
        }
    }
    out
}

/// JSON line per sample that survives the cue filter.
pub fn recover_candidates(corpus: &Corpus, lexicon: &CueLexicon) -> String {
    let samples: Vec<Sample> = corpus.samples().cloned().collect();
    let mut out = String::new();
    for sample in cue_filter(&samples, lexicon) {
        let cues = negation_cues(sample.text(), lexicon);
        let bounds: Vec<(usize, usize)> = cues.iter().map(|c| (c.span.start(), c.span.end())).collect();
        let candidate = Candidate {
            id: sample.id(),
            text: sample.text(),
            category: sample.category().as_str(),
            highlighted: highlight(sample.text(), &bounds),
            cues: cues
                .iter()
                .map(|c| CandidateCue {
                    start: c.span.start(),
                    end: c.span.end(),
                    category: c.category,
                    text: c.span.slice(sample.text()).unwrap_or_default(),
                })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&candidate).expect("candidates serialize"));
        out.push('\n');
    }
    out
}

pub fn cmd_recover(args: &RecoverArgs) -> Result<String> {
    let corpus = load_corpus_file(&args.corpus)?;
    let detector = args.negex.detector()?;
    let out = recover_candidates(&corpus, &detector.lexicon);
    if let Some(path) = &args.out {
        write_file(path, &out)?;
    }
    Ok(out)
}

pub fn cmd_summary(args: &SummaryArgs) -> Result<String> {
    let corpus = load_corpus_file(&args.corpus)?;
    Ok(render_summary(&partition_summary(&corpus), args.format))
}

/// Runs a parsed command line, writing the primary output to `stdout`.
pub fn run(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<()> {
    let text = match &cli.command {
        Command::Eval(args) => cmd_eval(args)?.table(args.format).to_string(),
        Command::Sweep(args) => {
            let bundle = cmd_sweep(args)?;
            bundle.sweep.as_ref().map(Sweep::to_tsv).unwrap_or_default()
        }
        Command::Detect(args) => cmd_detect(args, stdin)?,
        Command::Recover(args) => {
            let out = cmd_recover(args)?;
            if args.out.is_some() {
                String::new()
            } else {
                out
            }
        }
        Command::Summary(args) => cmd_summary(args)?,
    };
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| HarnessError::io("<stdout>", e))
}
