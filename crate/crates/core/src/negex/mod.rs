//! NegEx-style negation scope detection.
//!
//! Cue phrases are matched on token sequences, not raw characters, so `not`
//! never fires inside `nothing`. Scopes are produced for every PRE/POST cue
//! whether or not they contain an entity; deciding what to drop is the
//! [`pipeline`](crate::pipeline) module's job.

mod lexicon;
mod scope;

pub use lexicon::{load_lexicon, CueCategory, CueEntry, CueLexicon};
pub use scope::{find_cues, resolve_scopes, CueMatch, NegationScope, NegexConfig};

use crate::token::tokenize;

/// Tokenizes `text`, finds cues and resolves their scopes.
pub fn detect(text: &str, lexicon: &CueLexicon, config: &NegexConfig) -> Vec<NegationScope> {
    let tokens = tokenize(text);
    let cues = find_cues(&tokens, lexicon);
    resolve_scopes(text, &tokens, &cues, config)
}

/// A lexicon and configuration bundled together.
#[derive(Debug, Clone)]
pub struct NegexDetector {
    pub lexicon: CueLexicon,
    pub config: NegexConfig,
}

impl Default for NegexDetector {
    fn default() -> Self {
        Self {
            lexicon: CueLexicon::builtin(),
            config: NegexConfig::default(),
        }
    }
}

impl NegexDetector {
    pub fn new(lexicon: CueLexicon, config: NegexConfig) -> Self {
        Self { lexicon, config }
    }

    pub fn detect(&self, text: &str) -> Vec<NegationScope> {
        detect(text, &self.lexicon, &self.config)
    }
}
