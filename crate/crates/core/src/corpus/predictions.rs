//! Standoff prediction files.
//!
//! ```text
//! #model=BERT
//! #detector=NegEx
//! #config=k0
//! #run=1
//! t1	17	30
//! t7	0	4
//! ```
//!
//! The `#detector` header is optional. Any other line starting with `#` is a
//! comment. Data lines are `sample_id<TAB>start<TAB>end` in character offsets.

#![allow(clippy::tabs_in_doc_comments)]

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::span::{merge_overlapping, sorted_disjoint, Span};

/// What to do when one sample receives overlapping spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapPolicy {
    #[default]
    Reject,
    Merge,
}

/// Entity (or scope) spans emitted by one model run, keyed by sample id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionSet {
    pub model_id: String,
    pub detector_id: Option<String>,
    pub config_id: String,
    pub run_id: String,
    spans: BTreeMap<String, Vec<Span>>,
}

impl PredictionSet {
    pub fn new(model_id: impl Into<String>, config_id: impl Into<String>, run_id: impl Into<String>) -> Self {
        Self {
            model_id: model_id.into(),
            detector_id: None,
            config_id: config_id.into(),
            run_id: run_id.into(),
            spans: BTreeMap::new(),
        }
    }

    /// Same identifiers, no spans.
    pub fn empty_like(&self) -> Self {
        Self {
            spans: BTreeMap::new(),
            ..self.clone()
        }
    }

    /// `BERT` or `BERT+NegEx`.
    pub fn label(&self) -> String {
        match &self.detector_id {
            Some(d) => format!("{}+{}", self.model_id, d),
            None => self.model_id.clone(),
        }
    }

    /// Replaces the spans of `sample_id`. An empty list removes the entry.
    pub fn set(&mut self, sample_id: impl Into<String>, spans: Vec<Span>, policy: OverlapPolicy) -> Result<()> {
        let spans = match policy {
            OverlapPolicy::Reject => sorted_disjoint(spans)?,
            OverlapPolicy::Merge => merge_overlapping(spans),
        };
        let id = sample_id.into();
        if spans.is_empty() {
            self.spans.remove(&id);
        } else {
            self.spans.insert(id, spans);
        }
        Ok(())
    }

    pub fn spans_for(&self, sample_id: &str) -> &[Span] {
        self.spans.get(sample_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sample_ids(&self) -> impl Iterator<Item = &str> {
        self.spans.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Span])> {
        self.spans.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Total number of spans.
    pub fn len(&self) -> usize {
        self.spans.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

/// Parses a standoff prediction document.
pub fn load_predictions(source: &str, policy: OverlapPolicy) -> Result<PredictionSet> {
    let mut set = PredictionSet::default();
    let mut raw: BTreeMap<String, Vec<Span>> = BTreeMap::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            if let Some((key, value)) = header.split_once('=') {
                let value = value.trim().to_string();
                match key.trim() {
                    "model" => set.model_id = value,
                    "detector" => set.detector_id = Some(value).filter(|v| !v.is_empty()),
                    "config" => set.config_id = value,
                    "run" => set.run_id = value,
                    _ => {}
                }
            }
            continue;
        }
        let malformed = |message: String| Error::Malformed { line: line_no, message };
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, start, end] = fields[..] else {
            return Err(malformed(format!(
                "expected sample_id<TAB>start<TAB>end, got {} field(s)",
                fields.len()
            )));
        };
        if id.is_empty() {
            return Err(malformed("empty sample id".into()));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| malformed(format!("`{s}` is not a character offset")))
        };
        let span = Span::new(parse(start)?, parse(end)?).map_err(|e| malformed(e.to_string()))?;
        raw.entry(id.to_string()).or_default().push(span);
    }
    for (id, spans) in raw {
        set.set(id, spans, policy)?;
    }
    Ok(set)
}

/// Canonical rendering: headers in fixed order, then lines sorted by sample
/// id and offset.
pub fn save_predictions(set: &PredictionSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#model={}", set.model_id);
    if let Some(detector) = &set.detector_id {
        let _ = writeln!(out, "#detector={detector}");
    }
    let _ = writeln!(out, "#config={}", set.config_id);
    let _ = writeln!(out, "#run={}", set.run_id);
    for (id, spans) in set.iter() {
        for span in spans {
            let _ = writeln!(out, "{id}\t{}\t{}", span.start(), span.end());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_line() {
        let set = load_predictions("t1\t17\t30\n", OverlapPolicy::Reject).unwrap();
        assert_eq!(set.spans_for("t1"), [Span::new(17, 30).unwrap()]);
        assert!(set.spans_for("t2").is_empty());
    }

    #[test]
    fn headers_only() {
        let set = load_predictions("#model=BERT\n#config=k50\n#run=3\n# a comment\n", OverlapPolicy::Reject).unwrap();
        assert!(set.is_empty());
        assert_eq!((set.model_id.as_str(), set.config_id.as_str(), set.run_id.as_str()), ("BERT", "k50", "3"));
        assert_eq!(set.detector_id, None);
        assert_eq!(set.label(), "BERT");
    }

    #[test]
    fn overlap_policies() {
        let src = "t1\t0\t5\nt1\t3\t8\n";
        assert!(matches!(
            load_predictions(src, OverlapPolicy::Reject),
            Err(Error::OverlappingSpans(..))
        ));
        let merged = load_predictions(src, OverlapPolicy::Merge).unwrap();
        assert_eq!(merged.spans_for("t1"), [Span::new(0, 8).unwrap()]);
    }

    #[test]
    fn malformed_lines_carry_numbers() {
        let err = load_predictions("#model=x\nt1\t3\n", OverlapPolicy::Reject).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
        let err = load_predictions("t1\t3\tx\n", OverlapPolicy::Reject).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 1, .. }));
        let err = load_predictions("t1\t4\t4\n", OverlapPolicy::Reject).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 1, .. }));
    }

    #[test]
    fn detector_header_and_sorting() {
        let src = "#run=1\n#detector=NegEx\n#model=BERT\n#config=k0\nt2\t5\t9\nt1\t4\t6\nt1\t0\t2\n";
        let set = load_predictions(src, OverlapPolicy::Reject).unwrap();
        assert_eq!(set.label(), "BERT+NegEx");
        assert_eq!(
            save_predictions(&set),
            "#model=BERT\n#detector=NegEx\n#config=k0\n#run=1\nt1\t0\t2\nt1\t4\t6\nt2\t5\t9\n"
        );
    }

    proptest! {
        #[test]
        fn canonical_round_trip(entries in prop::collection::vec(("t[0-9]{1,2}", 0usize..50, 1usize..6), 0..20)) {
            let mut src = String::from("#model=m\n#config=c\n#run=r\n");
            for (id, start, len) in &entries {
                src.push_str(&format!("{id}\t{start}\t{}\n", start + len));
            }
            let set = load_predictions(&src, OverlapPolicy::Merge).unwrap();
            let saved = save_predictions(&set);
            let reloaded = load_predictions(&saved, OverlapPolicy::Reject).unwrap();
            prop_assert_eq!(&reloaded, &set);
            prop_assert_eq!(save_predictions(&reloaded), saved);
        }
    }
}
