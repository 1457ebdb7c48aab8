//! IOB token labels and conversion to and from character spans.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::span::{sorted_disjoint, Span};
use crate::token::{tokenize, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IobTag {
    B,
    I,
    O,
}

impl fmt::Display for IobTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IobTag::B => "B",
            IobTag::I => "I",
            IobTag::O => "O",
        })
    }
}

impl FromStr for IobTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "B-ADE" => Ok(IobTag::B),
            "I" | "I-ADE" => Ok(IobTag::I),
            "O" => Ok(IobTag::O),
            other => Err(Error::Malformed {
                line: 0,
                message: format!("unknown IOB tag `{other}`"),
            }),
        }
    }
}

/// A sequence is valid when no `I` opens it or directly follows an `O`.
pub fn is_valid_sequence(tags: &[IobTag]) -> bool {
    let mut prev = IobTag::O;
    for &tag in tags {
        if tag == IobTag::I && prev == IobTag::O {
            return false;
        }
        prev = tag;
    }
    true
}

/// Labels every token of `text` with respect to the entity `spans`.
///
/// Spans that cut through a token grow to cover it. Two entities that end up
/// claiming the same token are rejected, as are overlapping inputs.
pub fn spans_to_iob(text: &str, spans: &[Span]) -> Result<Vec<(Token, IobTag)>> {
    let spans = sorted_disjoint(spans.to_vec())?;
    let tokens = tokenize(text);
    let mut owner: Vec<Option<usize>> = vec![None; tokens.len()];
    for (entity, span) in spans.iter().enumerate() {
        for (slot, token) in owner.iter_mut().zip(&tokens) {
            if token.span.overlaps(span) {
                if let Some(prev) = *slot {
                    return Err(Error::SharedToken(spans[prev], *span));
                }
                *slot = Some(entity);
            }
        }
    }

    let mut prev_owner = None;
    let tagged = tokens
        .into_iter()
        .zip(owner)
        .map(|(token, slot)| {
            let tag = match slot {
                None => IobTag::O,
                Some(e) if prev_owner == Some(e) => IobTag::I,
                Some(_) => IobTag::B,
            };
            prev_owner = slot;
            (token, tag)
        })
        .collect();
    Ok(tagged)
}

/// Decodes tagged tokens into spans, one per `B I*` run.
///
/// An `I` that opens the sequence or follows an `O` is read as `B`.
pub fn iob_to_spans(tagged: &[(Token, IobTag)]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut current: Option<Span> = None;
    for (token, tag) in tagged {
        match (tag, current.as_mut()) {
            (IobTag::O, _) => spans.extend(current.take()),
            (IobTag::I, Some(open)) => *open = open.cover(&token.span),
            (IobTag::B, _) | (IobTag::I, None) => {
                spans.extend(current.take());
                current = Some(token.span);
            }
        }
    }
    spans.extend(current);
    spans
}
