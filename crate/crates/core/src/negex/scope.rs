use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::lexicon::{normalize_word, CueCategory, CueLexicon};
use crate::error::{Error, Result};
use crate::span::Span;
use crate::token::Token;

/// A lexicon phrase found in the token stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CueMatch {
    pub span: Span,
    pub tokens: Range<usize>,
    pub category: CueCategory,
}

/// Text governed by one negation cue.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NegationScope {
    pub span: Span,
    pub tokens: Range<usize>,
    pub cue: CueMatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegexConfig {
    window: usize,
    sentence_breakers: BTreeSet<char>,
}

impl Default for NegexConfig {
    fn default() -> Self {
        Self {
            window: 5,
            sentence_breakers: ['.', '!', '?', '\n'].into_iter().collect(),
        }
    }
}

impl NegexConfig {
    pub fn new(window: usize, sentence_breakers: impl IntoIterator<Item = char>) -> Result<Self> {
        if window == 0 {
            return Err(Error::Malformed {
                line: 0,
                message: "scope window must be at least 1 token".into(),
            });
        }
        Ok(Self {
            window,
            sentence_breakers: sentence_breakers.into_iter().collect(),
        })
    }

    pub fn with_window(window: usize) -> Result<Self> {
        Self::new(window, Self::default().sentence_breakers)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn sentence_breakers(&self) -> &BTreeSet<char> {
        &self.sentence_breakers
    }
}

/// Scans `tokens` left to right for lexicon phrases.
///
/// At every position the longest phrase wins; equal lengths are settled
/// PSEUDO first, then PRE, POST, TERMINATION. A match consumes its tokens, so
/// the result is sorted and non-overlapping.
pub fn find_cues(tokens: &[Token], lexicon: &CueLexicon) -> Vec<CueMatch> {
    let words: Vec<String> = tokens.iter().map(|t| normalize_word(&t.surface)).collect();
    let longest = lexicon.max_phrase_len();
    let mut matches = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let max_len = longest.min(words.len() - i);
        let hit = (1..=max_len)
            .rev()
            .find_map(|len| lexicon.lookup(&words[i..i + len]).map(|cat| (len, cat)));
        match hit {
            Some((len, category)) => {
                matches.push(CueMatch {
                    span: tokens[i].span.cover(&tokens[i + len - 1].span),
                    tokens: i..i + len,
                    category,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    matches
}

/// Turns PRE and POST cues into scopes.
///
/// A PRE scope takes the tokens after its cue, a POST scope the tokens before
/// it, stopping at whichever comes first: `window` tokens, another non-PSEUDO
/// cue, a sentence breaker (as a token or inside the whitespace between
/// tokens), or the edge of the text. `text` must be the string `tokens` came
/// from.
pub fn resolve_scopes(text: &str, tokens: &[Token], cues: &[CueMatch], config: &NegexConfig) -> Vec<NegationScope> {
    let n = tokens.len();
    let breakers = config.sentence_breakers();
    let chars: Vec<char> = text.chars().collect();

    let is_breaker: Vec<bool> = tokens
        .iter()
        .map(|t| {
            let mut cs = t.surface.chars();
            matches!((cs.next(), cs.next()), (Some(c), None) if breakers.contains(&c))
        })
        .collect();
    // gap_break[j]: the whitespace in front of token j holds a breaker
    let gap_break: Vec<bool> = (0..n)
        .map(|j| {
            let from = if j == 0 { 0 } else { tokens[j - 1].span.end() };
            let to = tokens[j].span.start();
            chars.get(from..to).is_some_and(|gap| gap.iter().any(|c| breakers.contains(c)))
        })
        .collect();
    let mut in_cue = vec![false; n];
    for cue in cues.iter().filter(|c| c.category != CueCategory::Pseudo) {
        for flag in &mut in_cue[cue.tokens.clone()] {
            *flag = true;
        }
    }
    let blocked = |j: usize| is_breaker[j] || in_cue[j];

    let mut scopes = Vec::new();
    for cue in cues {
        let range = match cue.category {
            CueCategory::Pre => {
                let first = cue.tokens.end;
                let mut end = first;
                while end < n && end - first < config.window() && !gap_break[end] && !blocked(end) {
                    end += 1;
                }
                first..end
            }
            CueCategory::Post => {
                let last = cue.tokens.start;
                let mut start = last;
                while start > 0 && last - start < config.window() && !gap_break[start] && !blocked(start - 1) {
                    start -= 1;
                }
                start..last
            }
            CueCategory::Pseudo | CueCategory::Termination => continue,
        };
        if range.is_empty() {
            continue;
        }
        scopes.push(NegationScope {
            span: tokens[range.start].span.cover(&tokens[range.end - 1].span),
            tokens: range,
            cue: cue.clone(),
        });
    }
    scopes.sort_by_key(|s| (s.span, s.cue.span));
    scopes
}
