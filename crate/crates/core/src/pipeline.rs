//! Pipeline model: an extractor's entities minus those touching a negation
//! scope.
//!
//! An entity survives only if it shares no character with any scope. The
//! scope source is pluggable: the built-in [`NegexDetector`] or scopes read
//! from a prediction file produced by any other detector.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{OverlapPolicy, PredictionSet};
use crate::error::Error;
use crate::negex::NegexDetector;
use crate::sample::Sample;
use crate::span::Span;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PipelineResult {
    pub kept: Vec<Span>,
    /// Each dropped entity with the lowest-start scope it overlaps.
    pub discarded: Vec<(Span, Span)>,
}

/// Splits `entities` into those overlapping no scope (kept, input order) and
/// the rest.
pub fn filter_entities(entities: &[Span], scopes: &[Span]) -> PipelineResult {
    let mut sorted_scopes = scopes.to_vec();
    sorted_scopes.sort();
    let mut result = PipelineResult::default();
    for entity in entities {
        match sorted_scopes.iter().find(|s| s.overlaps(entity)) {
            Some(scope) => result.discarded.push((*entity, *scope)),
            None => result.kept.push(*entity),
        }
    }
    result
}

/// Anything that can produce negation scopes for a sample.
pub trait ScopeSource {
    /// Name used in pipeline labels, e.g. `NegEx` in `BERT+NegEx`.
    fn id(&self) -> String;

    fn scopes(&self, sample: &Sample) -> Vec<Span>;
}

impl ScopeSource for NegexDetector {
    fn id(&self) -> String {
        "NegEx".to_string()
    }

    fn scopes(&self, sample: &Sample) -> Vec<Span> {
        self.detect(sample.text()).into_iter().map(|s| s.span).collect()
    }
}

/// Scopes precomputed by an external detector and stored as a prediction file.
#[derive(Debug, Clone)]
pub struct ScopeFile {
    pub scopes: PredictionSet,
}

impl ScopeFile {
    pub fn new(scopes: PredictionSet) -> Self {
        Self { scopes }
    }
}

impl ScopeSource for ScopeFile {
    fn id(&self) -> String {
        self.scopes.model_id.clone()
    }

    fn scopes(&self, sample: &Sample) -> Vec<Span> {
        self.scopes.spans_for(sample.id()).to_vec()
    }
}

/// Scopes of a detector over a set of samples, in scope-file form. Feeding
/// the result back through [`ScopeFile`] gives the same pipeline output as the
/// detector itself.
pub fn scope_predictions<'a>(
    detector: &dyn ScopeSource,
    samples: impl IntoIterator<Item = &'a Sample>,
) -> PredictionSet {
    let mut set = PredictionSet::new(detector.id(), "", "");
    for sample in samples {
        set.set(sample.id(), detector.scopes(sample), OverlapPolicy::Merge)
            .expect("merge policy cannot fail");
    }
    set
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOutput {
    pub predictions: PredictionSet,
    pub discarded: BTreeMap<String, Vec<(Span, Span)>>,
    /// Samples that could not be processed; they are absent from `predictions`.
    pub errors: Vec<Error>,
}

/// Runs [`filter_entities`] for every sample in `predictions`.
///
/// The output keeps the base ids and records the detector in `detector_id`,
/// so its label reads `BERT+NegEx`.
pub fn apply_pipeline<'a>(
    predictions: &PredictionSet,
    samples: impl IntoIterator<Item = &'a Sample>,
    detector: &dyn ScopeSource,
) -> PipelineOutput {
    let by_id: HashMap<&str, &Sample> = samples.into_iter().map(|s| (s.id(), s)).collect();
    let mut out = predictions.empty_like();
    let detector_id = detector.id();
    out.detector_id = Some(match &predictions.detector_id {
        Some(prev) => format!("{prev}+{detector_id}"),
        None => detector_id,
    });
    let mut discarded = BTreeMap::new();
    let mut errors = Vec::new();
    for (id, entities) in predictions.iter() {
        let Some(sample) = by_id.get(id) else {
            errors.push(Error::UnknownSample(id.to_string()));
            continue;
        };
        let result = filter_entities(entities, &detector.scopes(sample));
        out.set(id, result.kept, OverlapPolicy::Reject)
            .expect("subset of a disjoint list stays disjoint");
        if !result.discarded.is_empty() {
            discarded.insert(id.to_string(), result.discarded);
        }
    }
    PipelineOutput {
        predictions: out,
        discarded,
        errors,
    }
}
