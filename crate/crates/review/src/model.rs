use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use negspan_core::Span;
use serde::{Deserialize, Serialize};

use crate::error::ReviewError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    /// Judge a real post that contains a negation cue.
    Recovery,
    /// Judge a proposed negated rewrite of an ADE post.
    Generation,
}

impl Flow {
    pub const ALL: [Flow; 2] = [Flow::Recovery, Flow::Generation];

    pub fn as_str(&self) -> &'static str {
        match self {
            Flow::Recovery => "recovery",
            Flow::Generation => "generation",
        }
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Flow {
    type Err = ReviewError;

    fn from_str(s: &str) -> Result<Self, ReviewError> {
        match s {
            "recovery" => Ok(Flow::Recovery),
            "generation" => Ok(Flow::Generation),
            other => Err(ReviewError::Invalid(format!("unknown flow `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NegatesAde,
    NegationNotAde,
    Invalid,
    Approve,
    RequestChanges,
    Discard,
}

impl Verdict {
    pub fn flow(&self) -> Flow {
        match self {
            Verdict::NegatesAde | Verdict::NegationNotAde | Verdict::Invalid => Flow::Recovery,
            Verdict::Approve | Verdict::RequestChanges | Verdict::Discard => Flow::Generation,
        }
    }

    /// The single verdict per flow that votes to keep the sample.
    pub fn accepts(&self) -> bool {
        matches!(self, Verdict::NegatesAde | Verdict::Approve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    #[default]
    Open,
    Accepted,
    Rejected,
    Discarded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    Pending,
    UnanimousAccept,
    UnanimousReject,
    NoAgreementDiscard,
}

impl Resolution {
    pub fn status(&self) -> TaskStatus {
        match self {
            Resolution::Pending => TaskStatus::Open,
            Resolution::UnanimousAccept => TaskStatus::Accepted,
            Resolution::UnanimousReject => TaskStatus::Rejected,
            Resolution::NoAgreementDiscard => TaskStatus::Discarded,
        }
    }
}

/// A unit of review. Recovery tasks show one text; generation tasks show the
/// original post next to the proposed rewrite in `text`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewTask {
    pub task_id: u64,
    pub flow: Flow,
    /// Id the sample gets when exported.
    pub sample_id: String,
    pub text: String,
    /// Highlighted cue offsets into `text` (characters).
    #[serde(default)]
    pub cues: Vec<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    /// Overrides the deployment-wide annotator set for this task.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assigned: Vec<String>,
    #[serde(default)]
    pub status: TaskStatus,
}

impl ReviewTask {
    pub fn validate(&self) -> Result<(), ReviewError> {
        let invalid = |m: &str| Err(ReviewError::Invalid(format!("task {}: {m}", self.task_id)));
        if self.sample_id.is_empty() {
            return invalid("empty sample_id");
        }
        let len = self.text.chars().count();
        if self.cues.iter().any(|c| c.check_bounds(len).is_err()) {
            return invalid("cue span outside text");
        }
        match self.flow {
            Flow::Recovery => {
                if self.original_text.is_some() || self.origin_id.is_some() {
                    return invalid("recovery tasks carry a single text");
                }
            }
            Flow::Generation => {
                if self.original_text.is_none() {
                    return invalid("generation tasks need original_text");
                }
                if self.origin_id.as_deref().is_none_or(str::is_empty) {
                    return invalid("generation tasks need origin_id");
                }
            }
        }
        Ok(())
    }
}

/// One submitted verdict. The log stores these verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub task_id: u64,
    pub annotator_id: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    /// RFC 3339; filled in by the service when absent.
    #[serde(default)]
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementState {
    pub task_id: u64,
    pub assigned: Vec<String>,
    /// Latest verdict per annotator.
    pub verdicts: BTreeMap<String, Verdict>,
    pub tally: BTreeMap<Verdict, usize>,
    pub resolution: Resolution,
}

impl AgreementState {
    /// Resolves once every assigned annotator has a verdict: all accepting,
    /// all non-accepting, or a mix (discard).
    pub fn compute(task_id: u64, assigned: Vec<String>, verdicts: BTreeMap<String, Verdict>) -> Self {
        let mut tally = BTreeMap::new();
        for v in verdicts.values() {
            *tally.entry(*v).or_insert(0) += 1;
        }
        let complete = !assigned.is_empty() && assigned.iter().all(|a| verdicts.contains_key(a));
        let resolution = if !complete {
            Resolution::Pending
        } else {
            let accepting = assigned.iter().filter(|a| verdicts[*a].accepts()).count();
            if accepting == assigned.len() {
                Resolution::UnanimousAccept
            } else if accepting == 0 {
                Resolution::UnanimousReject
            } else {
                Resolution::NoAgreementDiscard
            }
        };
        Self {
            task_id,
            assigned,
            verdicts,
            tally,
            resolution,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlowCounts {
    pub accepted: usize,
    pub rejected: usize,
    pub discarded: usize,
    pub pending: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AgreementReport {
    pub flows: BTreeMap<Flow, FlowCounts>,
    /// Effective (latest) decisions per annotator.
    pub annotators: BTreeMap<String, usize>,
}
