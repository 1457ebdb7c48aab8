//! Building blocks for negation-robust adverse drug event (ADE) span extraction.
//!
//! - [`span`], [`token`], [`iob`], [`sample`]: character spans, tweet-aware
//!   tokenization and IOB conversion shared by everything else.
//! - [`negex`]: a NegEx-style cue lexicon and scope resolver.
//! - [`pipeline`]: drops extracted entities that fall inside negation scopes.
//! - [`metrics`]: relaxed (any-overlap) P/R/F1, false positives per sample
//!   category, multi-run aggregation.
//! - [`corpus`]: corpus and standoff prediction formats, cue-based candidate
//!   recovery, augmentation sweep configurations.

pub mod corpus;
pub mod error;
pub mod iob;
pub mod metrics;
pub mod negex;
pub mod pipeline;
pub mod sample;
pub mod span;
pub mod token;

pub use error::{Error, Result};
pub use sample::{Category, Sample};
pub use span::Span;
pub use token::{tokenize, Token};
