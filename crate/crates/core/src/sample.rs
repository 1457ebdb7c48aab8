use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::span::{char_len, sorted_disjoint, Span};

/// Sample class.
///
/// Negated samples (real or generated) mention an ADE only to deny it, so
/// they carry no gold entity, exactly like `noADE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "ADE")]
    Ade,
    #[serde(rename = "noADE")]
    NoAde,
    #[serde(rename = "negADE_R")]
    NegAdeR,
    #[serde(rename = "negADE_G")]
    NegAdeG,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Ade, Category::NoAde, Category::NegAdeR, Category::NegAdeG];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Ade => "ADE",
            Category::NoAde => "noADE",
            Category::NegAdeR => "negADE_R",
            Category::NegAdeG => "negADE_G",
        }
    }

    /// Reporting group; both negated sources fold into `negADE`.
    pub fn group(&self) -> CategoryGroup {
        match self {
            Category::Ade => CategoryGroup::Ade,
            Category::NoAde => CategoryGroup::NoAde,
            Category::NegAdeR | Category::NegAdeG => CategoryGroup::NegAde,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

/// The three columns used in false-positive breakdowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CategoryGroup {
    #[serde(rename = "ADE")]
    Ade,
    #[serde(rename = "noADE")]
    NoAde,
    #[serde(rename = "negADE")]
    NegAde,
}

impl CategoryGroup {
    pub const ALL: [CategoryGroup; 3] = [CategoryGroup::Ade, CategoryGroup::NoAde, CategoryGroup::NegAde];

    pub fn as_str(&self) -> &'static str {
        match self {
            CategoryGroup::Ade => "ADE",
            CategoryGroup::NoAde => "noADE",
            CategoryGroup::NegAde => "negADE",
        }
    }
}

impl fmt::Display for CategoryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CategoryGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CategoryGroup::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

/// One social-media post with its label and gold ADE spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    id: String,
    text: String,
    category: Category,
    gold: Vec<Span>,
    origin_id: Option<String>,
}

impl Sample {
    /// Validates the category rules: only `ADE` samples carry gold spans, and
    /// exactly the generated negations point back to an origin.
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        category: Category,
        gold: Vec<Span>,
        origin_id: Option<String>,
    ) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        let invalid = |message: String| Error::InvalidSample { id: id.clone(), message };
        if id.is_empty() {
            return Err(invalid("empty id".into()));
        }
        if category != Category::Ade && !gold.is_empty() {
            return Err(invalid(format!("{category} samples cannot carry gold spans")));
        }
        match (category, &origin_id) {
            (Category::NegAdeG, None) => return Err(invalid("negADE_G samples need an origin_id".into())),
            (Category::NegAdeG, Some(origin)) if origin.is_empty() => {
                return Err(invalid("negADE_G samples need an origin_id".into()))
            }
            (Category::NegAdeG, _) | (_, None) => {}
            (_, Some(_)) => return Err(invalid(format!("{category} samples cannot carry an origin_id"))),
        }
        let len = char_len(&text);
        for span in &gold {
            span.check_bounds(len).map_err(|e| invalid(e.to_string()))?;
        }
        let gold = sorted_disjoint(gold).map_err(|e| invalid(e.to_string()))?;
        Ok(Self {
            id,
            text,
            category,
            gold,
            origin_id,
        })
    }

    pub fn ade(id: impl Into<String>, text: impl Into<String>, gold: Vec<Span>) -> Result<Self> {
        Self::new(id, text, Category::Ade, gold, None)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn gold(&self) -> &[Span] {
        &self.gold
    }

    pub fn origin_id(&self) -> Option<&str> {
        self.origin_id.as_deref()
    }
}
