//! Half-open character intervals.
//!
//! Offsets count Unicode scalar values (Rust `char`s), never bytes, so the
//! same offsets are valid for any consumer that indexes text by code point.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty half-open interval `[start, end)` of character offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    start: usize,
    end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start < end {
            Ok(Self { start, end })
        } else {
            Err(Error::EmptySpan { start, end })
        }
    }

    #[inline]
    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn end(&self) -> usize {
        self.end
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    /// Always false; spans cannot be empty. Present for clippy's sake.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// True iff the two intervals share at least one character.
    #[inline]
    pub fn overlaps(&self, other: &Span) -> bool {
        self.start.max(other.start) < self.end.min(other.end)
    }

    #[inline]
    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Smallest span covering both.
    pub fn cover(&self, other: &Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    /// Fails unless the span fits inside a text of `len` characters.
    pub fn check_bounds(&self, len: usize) -> Result<()> {
        if self.end <= len {
            Ok(())
        } else {
            Err(Error::SpanOutOfBounds { span: *self, len })
        }
    }

    /// The substring of `text` covered by this span, or `None` if out of bounds.
    pub fn slice<'t>(&self, text: &'t str) -> Option<&'t str> {
        let (from, to) = byte_range(text, self.start, self.end)?;
        Some(&text[from..to])
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

impl TryFrom<(usize, usize)> for Span {
    type Error = Error;

    fn try_from((start, end): (usize, usize)) -> Result<Self> {
        Span::new(start, end)
    }
}

impl From<Span> for (usize, usize) {
    fn from(span: Span) -> Self {
        (span.start, span.end)
    }
}

/// Free-function form of [`Span::overlaps`].
#[inline]
pub fn overlaps(a: &Span, b: &Span) -> bool {
    a.overlaps(b)
}

/// Length of `text` in characters.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Byte offsets for the character range `[start, end)` of `text`.
pub fn byte_range(text: &str, start: usize, end: usize) -> Option<(usize, usize)> {
    if start > end {
        return None;
    }
    let mut indices = text.char_indices().map(|(b, _)| b).chain(std::iter::once(text.len()));
    let from = indices.nth(start)?;
    let to = if end == start {
        from
    } else {
        indices.nth(end - start - 1)?
    };
    Some((from, to))
}

/// Sorts spans by start and fails on the first overlapping pair.
pub fn sorted_disjoint(mut spans: Vec<Span>) -> Result<Vec<Span>> {
    spans.sort();
    for pair in spans.windows(2) {
        if pair[0].overlaps(&pair[1]) {
            return Err(Error::OverlappingSpans(pair[0], pair[1]));
        }
    }
    Ok(spans)
}

/// Sorts spans and fuses overlapping ones.
pub fn merge_overlapping(mut spans: Vec<Span>) -> Vec<Span> {
    spans.sort();
    let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
    for span in spans {
        match merged.last_mut() {
            Some(last) if last.overlaps(&span) => *last = last.cover(&span),
            _ => merged.push(span),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp(a: usize, b: usize) -> Span {
        Span::new(a, b).unwrap()
    }

    #[test]
    fn overlap_examples() {
        assert!(overlaps(&sp(0, 5), &sp(3, 8)));
        assert!(!overlaps(&sp(0, 5), &sp(5, 9)));
        assert!(overlaps(&sp(2, 3), &sp(0, 10)));
    }

    #[test]
    fn empty_span_rejected() {
        assert_eq!(Span::new(3, 3), Err(Error::EmptySpan { start: 3, end: 3 }));
        assert!(Span::new(4, 2).is_err());
        assert!(serde_json::from_str::<Span>("[5,5]").is_err());
        assert_eq!(serde_json::from_str::<Span>("[1,5]").unwrap(), sp(1, 5));
    }

    #[test]
    fn slicing_counts_characters() {
        let text = "héllo wörld";
        assert_eq!(sp(6, 11).slice(text), Some("wörld"));
        assert_eq!(sp(0, 2).slice(text), Some("hé"));
        assert_eq!(sp(6, 12).slice(text), None);
        assert!(sp(6, 11).check_bounds(char_len(text)).is_ok());
        assert!(sp(6, 12).check_bounds(char_len(text)).is_err());
    }

    #[test]
    fn merging() {
        let merged = merge_overlapping(vec![sp(5, 9), sp(0, 3), sp(2, 6), sp(10, 12)]);
        assert_eq!(merged, vec![sp(0, 9), sp(10, 12)]);
        assert!(sorted_disjoint(vec![sp(5, 9), sp(0, 6)]).is_err());
        assert_eq!(sorted_disjoint(vec![sp(5, 9), sp(0, 5)]).unwrap(), vec![sp(0, 5), sp(5, 9)]);
    }

    fn span_strategy() -> impl Strategy<Value = Span> {
        (0usize..40, 1usize..12).prop_map(|(s, l)| sp(s, s + l))
    }

    proptest! {
        #[test]
        fn overlap_symmetric_and_matches_points(a in span_strategy(), b in span_strategy()) {
            prop_assert_eq!(a.overlaps(&b), b.overlaps(&a));
            let brute = (0..60).any(|p| a.start() <= p && p < a.end() && b.start() <= p && p < b.end());
            prop_assert_eq!(a.overlaps(&b), brute);
        }
    }
}
