use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("unknown annotator `{0}`")]
    UnknownAnnotator(String),
    #[error("unknown task {0}")]
    UnknownTask(u64),
    #[error("task {0} is already resolved")]
    TaskClosed(u64),
    #[error("verdict {verdict} is not valid for a {flow} task")]
    VerdictMismatch { flow: String, verdict: String },
    #[error("annotator `{annotator}` is not assigned to task {task_id}")]
    NotAssigned { annotator: String, task_id: u64 },
    #[error("duplicate task id {0}")]
    DuplicateTask(u64),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}
