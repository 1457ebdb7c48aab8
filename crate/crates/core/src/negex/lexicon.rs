use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::token::tokenize;

const DEFAULT_LEXICON: &str = include_str!("../../data/default_lexicon.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CueCategory {
    /// Negates what follows.
    #[serde(rename = "PRE")]
    Pre,
    /// Negates what precedes.
    #[serde(rename = "POST")]
    Post,
    /// Looks like a negation but is not one.
    #[serde(rename = "PSEUDO")]
    Pseudo,
    /// Closes any scope running into it.
    #[serde(rename = "TERMINATION")]
    Termination,
}

impl CueCategory {
    pub const ALL: [CueCategory; 4] = [
        CueCategory::Pre,
        CueCategory::Post,
        CueCategory::Pseudo,
        CueCategory::Termination,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CueCategory::Pre => "PRE",
            CueCategory::Post => "POST",
            CueCategory::Pseudo => "PSEUDO",
            CueCategory::Termination => "TERMINATION",
        }
    }

    /// Tie-break rank for same-length matches at one position; lower wins.
    pub(crate) fn priority(&self) -> u8 {
        match self {
            CueCategory::Pseudo => 0,
            CueCategory::Pre => 1,
            CueCategory::Post => 2,
            CueCategory::Termination => 3,
        }
    }
}

impl fmt::Display for CueCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CueCategory {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        CueCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// Lowercases and folds typographic apostrophes so `Didn’t` matches `didn't`.
pub(crate) fn normalize_word(word: &str) -> String {
    word.to_lowercase().replace('\u{2019}', "'")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueEntry {
    pub phrase: Vec<String>,
    pub category: CueCategory,
}

/// Categorized cue phrases, indexed by their normalized token sequence.
#[derive(Debug, Clone, Default)]
pub struct CueLexicon {
    entries: Vec<CueEntry>,
    index: HashMap<Vec<String>, Vec<CueCategory>>,
    max_phrase_len: usize,
}

impl CueLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// The bundled lexicon (`data/default_lexicon.tsv`).
    pub fn builtin() -> Self {
        load_lexicon(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn builtin_source() -> &'static str {
        DEFAULT_LEXICON
    }

    /// Adds `phrase` under `category`. The phrase is tokenized and normalized
    /// the same way as matched text.
    pub fn insert(&mut self, phrase: &str, category: CueCategory) -> Result<()> {
        self.insert_at(phrase, category, 0)
    }

    fn insert_at(&mut self, phrase: &str, category: CueCategory, line: usize) -> Result<()> {
        let words: Vec<String> = tokenize(phrase).iter().map(|t| normalize_word(&t.surface)).collect();
        if words.is_empty() {
            return Err(Error::EmptyPhrase { line });
        }
        let categories = self.index.entry(words.clone()).or_default();
        if categories.contains(&category) {
            return Err(Error::DuplicateCue {
                line,
                category: category.to_string(),
                phrase: words.join(" "),
            });
        }
        categories.push(category);
        categories.sort_by_key(CueCategory::priority);
        self.max_phrase_len = self.max_phrase_len.max(words.len());
        self.entries.push(CueEntry { phrase: words, category });
        Ok(())
    }

    pub fn with(mut self, phrase: &str, category: CueCategory) -> Result<Self> {
        self.insert(phrase, category)?;
        Ok(self)
    }

    pub fn entries(&self) -> &[CueEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, phrase: &str, category: CueCategory) -> bool {
        let words: Vec<String> = tokenize(phrase).iter().map(|t| normalize_word(&t.surface)).collect();
        self.index.get(&words).is_some_and(|cats| cats.contains(&category))
    }

    /// Highest-priority category registered for exactly this word sequence.
    pub(crate) fn lookup(&self, words: &[String]) -> Option<CueCategory> {
        self.index.get(words).and_then(|cats| cats.first().copied())
    }

    pub(crate) fn max_phrase_len(&self) -> usize {
        self.max_phrase_len
    }
}

/// Parses a lexicon document: one `CATEGORY<TAB>phrase` per line, `#`
/// comments and blank lines ignored.
pub fn load_lexicon(source: &str) -> Result<CueLexicon> {
    let mut lexicon = CueLexicon::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (name, phrase) = raw.split_once('\t').ok_or_else(|| Error::Malformed {
            line,
            message: "expected CATEGORY<TAB>phrase".into(),
        })?;
        let category = name
            .trim()
            .parse::<CueCategory>()
            .map_err(|name| Error::UnknownCueCategory { line, name })?;
        lexicon.insert_at(phrase, category, line)?;
    }
    if lexicon.is_empty() {
        log::warn!("cue lexicon has no entries; no negation will be detected");
    }
    Ok(lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiword_entry() {
        let lex = load_lexicon("PRE\tno longer\n").unwrap();
        assert_eq!(
            lex.entries(),
            [CueEntry {
                phrase: vec!["no".into(), "longer".into()],
                category: CueCategory::Pre
            }]
        );
    }

    #[test]
    fn empty_document_is_valid() {
        assert!(load_lexicon("").unwrap().is_empty());
        assert!(load_lexicon("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            load_lexicon("NEG\tno").unwrap_err(),
            Error::UnknownCueCategory {
                line: 1,
                name: "NEG".into()
            }
        );
        assert_eq!(load_lexicon("PRE\t  ").unwrap_err(), Error::EmptyPhrase { line: 1 });
        assert!(matches!(
            load_lexicon("PRE\tno\nPRE\tNo\n").unwrap_err(),
            Error::DuplicateCue { line: 2, .. }
        ));
        assert!(matches!(load_lexicon("PRE no").unwrap_err(), Error::Malformed { line: 1, .. }));
        // same phrase under two categories is allowed
        assert_eq!(load_lexicon("PRE\tno\nPSEUDO\tno\n").unwrap().len(), 2);
    }

    #[test]
    fn phrases_are_normalized() {
        let lex = load_lexicon("PRE\tDidn\u{2019}t\n").unwrap();
        assert!(lex.contains("didn't", CueCategory::Pre));
    }

    #[test]
    fn builtin_has_bioscope_cues() {
        let lex = CueLexicon::builtin();
        for cue in ["none", "missing", "no longer"] {
            assert!(lex.contains(cue, CueCategory::Pre), "{cue}");
        }
        assert!(lex.contains("no increase", CueCategory::Pseudo));
        assert!(lex.contains("but", CueCategory::Termination));
        assert!(lex.contains("was ruled out", CueCategory::Post));
        assert_eq!(lex.len(), 26);
    }
}
