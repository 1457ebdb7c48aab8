//! Review service for the two curation flows: judging recovered posts that
//! contain a negation cue, and peer-reviewing negated rewrites of ADE posts.
//! A task is kept only when every assigned annotator accepts it.

pub mod error;
pub mod http;
pub mod model;
pub mod store;

pub use error::ReviewError;
pub use model::{AgreementReport, AgreementState, Flow, Resolution, ReviewDecision, ReviewTask, TaskStatus, Verdict};
pub use store::{tasks_from_candidates, Proposal, ReviewStore};
