//! Tweet-aware word/punctuation tokenizer.

use serde::{Deserialize, Serialize};

use crate::span::Span;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub span: Span,
}

impl Token {
    /// True for single-character non-word tokens.
    pub fn is_punctuation(&self) -> bool {
        let mut chars = self.surface.chars();
        matches!((chars.next(), chars.next()), (Some(c), None) if !is_word_char(c))
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}'
}

fn is_sigil(c: char) -> bool {
    c == '#' || c == '@'
}

/// Splits `text` into word and punctuation tokens.
///
/// Words are maximal runs of letters, digits and apostrophes. Every other
/// non-whitespace character is a token on its own, except that a `#` or `@`
/// directly followed by a word character opens that word (`#HUMIRA`,
/// `@user`).
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let sigil = is_sigil(c) && chars.get(i + 1).copied().is_some_and(is_word_char);
        if sigil || is_word_char(c) {
            i += 1;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
        } else {
            i += 1;
        }
        tokens.push(Token {
            surface: chars[start..i].iter().collect(),
            span: Span::new(start, i).expect("token spans are non-empty"),
        });
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn punctuation_is_split() {
        let tokens = tokenize("No pain!");
        assert_eq!(surfaces("No pain!"), ["No", "pain", "!"]);
        let spans: Vec<(usize, usize)> = tokens.iter().map(|t| t.span.into()).collect();
        assert_eq!(spans, [(0, 2), (3, 7), (7, 8)]);
        assert!(tokens[2].is_punctuation());
        assert!(!tokens[0].is_punctuation());
    }

    #[test]
    fn apostrophes_stay_inside_words() {
        assert_eq!(surfaces("didn't sleep"), ["didn't", "sleep"]);
        assert_eq!(surfaces("I\u{2019}m fine"), ["I\u{2019}m", "fine"]);
    }

    #[test]
    fn sigils_attach_to_following_word() {
        assert_eq!(surfaces("This #HUMIRA shot"), ["This", "#HUMIRA", "shot"]);
        assert_eq!(surfaces("@UKingsbrook That's"), ["@UKingsbrook", "That's"]);
        assert_eq!(surfaces("# alone @"), ["#", "alone", "@"]);
        assert_eq!(surfaces("##tag"), ["#", "#tag"]);
    }

    #[test]
    fn empty_and_blank() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \n\t ").is_empty());
    }

    #[test]
    fn offsets_are_characters() {
        let tokens = tokenize("né pas");
        assert_eq!(tokens[1].span, Span::new(3, 6).unwrap());
    }

    proptest! {
        #[test]
        fn tokens_partition_non_whitespace(text in "[a-zA-Z0-9'#@.,!? \n\u{e9}\u{1F600}-]{0,40}") {
            let tokens = tokenize(&text);
            let chars: Vec<char> = text.chars().collect();
            let mut covered = vec![0u32; chars.len()];
            for pair in tokens.windows(2) {
                prop_assert!(pair[0].span.end() <= pair[1].span.start());
            }
            for token in &tokens {
                prop_assert_eq!(token.span.slice(&text), Some(token.surface.as_str()));
                for i in token.span.start()..token.span.end() {
                    prop_assert!(!chars[i].is_whitespace());
                    covered[i] += 1;
                }
            }
            for (i, c) in chars.iter().enumerate() {
                prop_assert_eq!(covered[i], u32::from(!c.is_whitespace()));
            }
        }
    }
}
