//! Event-sourced review state: a task list plus an append-only decision log.
//! Everything observable (statuses, agreement, exports) is a function of the
//! two, so replaying the log from scratch rebuilds the same state.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use negspan_core::corpus::{save_corpus, Corpus, Partition};
use negspan_core::{Category, Sample, Span};
use serde::Deserialize;

use crate::error::ReviewError;
use crate::model::{AgreementReport, AgreementState, Flow, ReviewDecision, ReviewTask, TaskStatus, Verdict};

pub type Result<T> = std::result::Result<T, ReviewError>;

struct Sink {
    tasks_path: PathBuf,
    log_path: PathBuf,
    log: File,
}

/// A proposed negated rewrite submitted for peer review.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Proposal {
    pub origin_id: String,
    pub original_text: String,
    pub text: String,
    pub author: String,
    #[serde(default)]
    pub cues: Vec<Span>,
    /// Defaults to `{origin_id}-neg{task_id}`.
    #[serde(default)]
    pub sample_id: Option<String>,
}

pub struct ReviewStore {
    annotators: Vec<String>,
    tasks: BTreeMap<u64, ReviewTask>,
    latest: BTreeMap<u64, BTreeMap<String, Verdict>>,
    log: Vec<ReviewDecision>,
    served: Vec<(String, u64)>,
    sink: Option<Sink>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReviewError + '_ {
    move |source| ReviewError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_optional(path: &Path) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
        Err(e) => Err(io_err(path)(e)),
    }
}

/// Parses a JSON-lines document, skipping blank lines.
pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(source: &str, path: &Path) -> Result<Vec<T>> {
    source
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ReviewError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn append_line(file: &mut File, path: &Path, line: &str) -> Result<()> {
    let mut buf = line.to_string();
    buf.push('\n');
    file.write_all(buf.as_bytes()).map_err(io_err(path))?;
    file.flush().map_err(io_err(path))
}

impl ReviewStore {
    /// In-memory store; statuses in `tasks` are ignored and start open.
    pub fn new(annotators: Vec<String>, tasks: Vec<ReviewTask>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for a in &annotators {
            if a.is_empty() || !seen.insert(a.as_str()) {
                return Err(ReviewError::Invalid(format!("bad or duplicate annotator id `{a}`")));
            }
        }
        let mut store = Self {
            annotators,
            tasks: BTreeMap::new(),
            latest: BTreeMap::new(),
            log: Vec::new(),
            served: Vec::new(),
            sink: None,
        };
        for task in tasks {
            store.insert_task(task)?;
        }
        Ok(store)
    }

    /// Rebuilds state by applying `decisions` in order.
    pub fn replay(annotators: Vec<String>, tasks: Vec<ReviewTask>, decisions: Vec<ReviewDecision>) -> Result<Self> {
        let mut store = Self::new(annotators, tasks)?;
        for (i, d) in decisions.into_iter().enumerate() {
            store.check(&d).map_err(|e| ReviewError::Invalid(format!("log entry {}: {e}", i + 1)))?;
            store.apply(d);
        }
        Ok(store)
    }

    /// Loads the task file and decision log (either may be missing), replays
    /// the log, and appends future changes to both files.
    pub fn open(annotators: Vec<String>, tasks_path: &Path, log_path: &Path) -> Result<Self> {
        let tasks = parse_jsonl(&read_optional(tasks_path)?, tasks_path)?;
        let decisions: Vec<ReviewDecision> = parse_jsonl(&read_optional(log_path)?, log_path)?;
        let mut store = Self::replay(annotators, tasks, decisions)?;
        if let Some(parent) = log_path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(log_path)
            .map_err(io_err(log_path))?;
        store.sink = Some(Sink {
            tasks_path: tasks_path.to_path_buf(),
            log_path: log_path.to_path_buf(),
            log,
        });
        Ok(store)
    }

    fn insert_task(&mut self, mut task: ReviewTask) -> Result<()> {
        task.validate()?;
        if self.tasks.contains_key(&task.task_id) {
            return Err(ReviewError::DuplicateTask(task.task_id));
        }
        if let Some(a) = task.assigned.iter().find(|a| !self.annotators.contains(a)) {
            return Err(ReviewError::UnknownAnnotator(a.clone()));
        }
        task.status = TaskStatus::Open;
        self.tasks.insert(task.task_id, task);
        Ok(())
    }

    pub fn annotators(&self) -> &[String] {
        &self.annotators
    }

    pub fn tasks(&self) -> impl Iterator<Item = &ReviewTask> {
        self.tasks.values()
    }

    pub fn task(&self, task_id: u64) -> Option<&ReviewTask> {
        self.tasks.get(&task_id)
    }

    /// Every decision accepted so far, in submission order.
    pub fn decisions(&self) -> &[ReviewDecision] {
        &self.log
    }

    /// (annotator, task id) for every task handed out by [`Self::next_task`].
    pub fn served(&self) -> &[(String, u64)] {
        &self.served
    }

    /// Annotators whose verdicts decide `task`: the task's own list or all
    /// registered annotators, never including the author.
    pub fn assigned(&self, task: &ReviewTask) -> Vec<String> {
        let pool = if task.assigned.is_empty() {
            &self.annotators
        } else {
            &task.assigned
        };
        pool.iter()
            .filter(|a| task.author.as_deref() != Some(a.as_str()))
            .cloned()
            .collect()
    }

    fn require_annotator(&self, annotator: &str) -> Result<()> {
        if self.annotators.iter().any(|a| a == annotator) {
            Ok(())
        } else {
            Err(ReviewError::UnknownAnnotator(annotator.to_string()))
        }
    }

    /// Lowest-id open task of `flow` that `annotator` is assigned to and has
    /// not decided yet.
    pub fn next_task(&mut self, annotator: &str, flow: Flow) -> Result<Option<ReviewTask>> {
        self.require_annotator(annotator)?;
        let found = self
            .tasks
            .values()
            .filter(|t| t.flow == flow && t.status == TaskStatus::Open)
            .filter(|t| !self.latest.get(&t.task_id).is_some_and(|v| v.contains_key(annotator)))
            .find(|t| self.assigned(t).iter().any(|a| a == annotator))
            .cloned();
        if let Some(task) = &found {
            self.served.push((annotator.to_string(), task.task_id));
        }
        Ok(found)
    }

    fn check(&self, d: &ReviewDecision) -> Result<()> {
        let task = self.tasks.get(&d.task_id).ok_or(ReviewError::UnknownTask(d.task_id))?;
        self.require_annotator(&d.annotator_id)?;
        if task.status != TaskStatus::Open {
            return Err(ReviewError::TaskClosed(d.task_id));
        }
        if d.verdict.flow() != task.flow {
            return Err(ReviewError::VerdictMismatch {
                flow: task.flow.to_string(),
                verdict: serde_json::to_string(&d.verdict).unwrap_or_default(),
            });
        }
        if !self.assigned(task).contains(&d.annotator_id) {
            return Err(ReviewError::NotAssigned {
                annotator: d.annotator_id.clone(),
                task_id: d.task_id,
            });
        }
        Ok(())
    }

    fn apply(&mut self, d: ReviewDecision) {
        self.latest
            .entry(d.task_id)
            .or_default()
            .insert(d.annotator_id.clone(), d.verdict);
        let status = self.agreement(d.task_id).map(|s| s.resolution.status());
        if let (Ok(status), Some(task)) = (status, self.tasks.get_mut(&d.task_id)) {
            task.status = status;
        }
        self.log.push(d);
    }

    /// Validates, persists, then applies a decision. A later decision by the
    /// same annotator on a still-open task replaces the earlier one.
    pub fn submit_decision(&mut self, mut d: ReviewDecision) -> Result<AgreementState> {
        self.check(&d)?;
        if d.timestamp.is_empty() {
            d.timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
        }
        if let Some(sink) = &mut self.sink {
            let line = serde_json::to_string(&d).expect("decisions serialize");
            append_line(&mut sink.log, &sink.log_path, &line)?;
        }
        let task_id = d.task_id;
        self.apply(d);
        self.agreement(task_id)
    }

    /// Registers a generation task for a proposed rewrite.
    pub fn propose(&mut self, proposal: Proposal) -> Result<ReviewTask> {
        let task_id = self.tasks.keys().next_back().map_or(1, |id| id + 1);
        let task = ReviewTask {
            task_id,
            flow: Flow::Generation,
            sample_id: proposal
                .sample_id
                .unwrap_or_else(|| format!("{}-neg{task_id}", proposal.origin_id)),
            text: proposal.text,
            cues: proposal.cues,
            original_text: Some(proposal.original_text),
            origin_id: Some(proposal.origin_id),
            author: Some(proposal.author),
            assigned: Vec::new(),
            status: TaskStatus::Open,
        };
        self.add_task(task)
    }

    /// Adds a task and appends it to the task file.
    pub fn add_task(&mut self, task: ReviewTask) -> Result<ReviewTask> {
        self.insert_task(task.clone())?;
        if let Some(sink) = &self.sink {
            let path = sink.tasks_path.clone();
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(io_err(&path))?;
            let mut stored = task.clone();
            stored.status = TaskStatus::Open;
            if let Err(e) = append_line(&mut file, &path, &serde_json::to_string(&stored).expect("tasks serialize")) {
                self.tasks.remove(&task.task_id);
                return Err(e);
            }
        }
        Ok(self.tasks[&task.task_id].clone())
    }

    pub fn agreement(&self, task_id: u64) -> Result<AgreementState> {
        let task = self.tasks.get(&task_id).ok_or(ReviewError::UnknownTask(task_id))?;
        Ok(AgreementState::compute(
            task_id,
            self.assigned(task),
            self.latest.get(&task_id).cloned().unwrap_or_default(),
        ))
    }

    pub fn agreement_report(&self) -> AgreementReport {
        let mut report = AgreementReport::default();
        for flow in Flow::ALL {
            report.flows.insert(flow, Default::default());
        }
        for a in &self.annotators {
            report.annotators.insert(a.clone(), 0);
        }
        for task in self.tasks.values() {
            let counts = report.flows.entry(task.flow).or_default();
            match task.status {
                TaskStatus::Open => counts.pending += 1,
                TaskStatus::Accepted => counts.accepted += 1,
                TaskStatus::Rejected => counts.rejected += 1,
                TaskStatus::Discarded => counts.discarded += 1,
            }
        }
        for verdicts in self.latest.values() {
            for a in verdicts.keys() {
                *report.annotators.entry(a.clone()).or_default() += 1;
            }
        }
        report
    }

    /// Accepted tasks of `flow` as a corpus document: recovered posts become
    /// `negADE_R` test samples, rewrites become `negADE_G` training samples.
    pub fn export_accepted(&self, flow: Flow) -> Result<String> {
        let mut corpus = Corpus::new();
        for task in self
            .tasks
            .values()
            .filter(|t| t.flow == flow && t.status == TaskStatus::Accepted)
        {
            let (category, partition, origin) = match flow {
                Flow::Recovery => (Category::NegAdeR, Partition::Test, None),
                Flow::Generation => (Category::NegAdeG, Partition::Train, task.origin_id.clone()),
            };
            let sample = Sample::new(task.sample_id.clone(), task.text.clone(), category, Vec::new(), origin)
                .map_err(|e| ReviewError::Invalid(format!("task {}: {e}", task.task_id)))?;
            corpus
                .insert(sample, Some(partition))
                .map_err(|e| ReviewError::Invalid(format!("task {}: {e}", task.task_id)))?;
        }
        Ok(save_corpus(&corpus))
    }
}

#[derive(Deserialize)]
struct CandidateCue {
    start: usize,
    end: usize,
}

#[derive(Deserialize)]
struct Candidate {
    id: String,
    text: String,
    #[serde(default)]
    cues: Vec<CandidateCue>,
}

/// Turns `negspan recover` output into recovery tasks numbered from `first_id`.
pub fn tasks_from_candidates(source: &str, first_id: u64) -> Result<Vec<ReviewTask>> {
    let candidates: Vec<Candidate> = parse_jsonl(source, Path::new("<candidates>"))?;
    candidates
        .into_iter()
        .zip(first_id..)
        .map(|(c, task_id)| {
            let cues = c
                .cues
                .iter()
                .map(|q| Span::new(q.start, q.end))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| ReviewError::Invalid(format!("candidate {}: {e}", c.id)))?;
            let task = ReviewTask {
                task_id,
                flow: Flow::Recovery,
                sample_id: c.id,
                text: c.text,
                cues,
                original_text: None,
                origin_id: None,
                author: None,
                assigned: Vec::new(),
                status: TaskStatus::Open,
            };
            task.validate()?;
            Ok(task)
        })
        .collect()
}
