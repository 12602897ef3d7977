use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use unicode_script::{Script, UnicodeScript};

use super::FilterPolicy;
use crate::error::{GdaError, Result};

/// Why a term was left out of the retained vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DropReason {
    Script { script: String },
    Stopword { class: super::StopwordClass },
    BelowThreshold { count: usize, min: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedToken {
    pub token: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
    pub dropped: Vec<DroppedToken>,
}

/// Scripts a token may be written in. An empty set allows every script.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptFilter {
    allowed: BTreeSet<String>,
}

impl ScriptFilter {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn roman_only() -> Self {
        Self::only(["Latin"])
    }

    /// Script names as reported by `unicode-script` (`Latin`, `Cyrillic`, ...).
    pub fn only<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            allowed: names.into_iter().map(str::to_string).collect(),
        }
    }

    fn rejects(&self, token: &str) -> Option<String> {
        if self.allowed.is_empty() {
            return None;
        }
        token
            .chars()
            .map(|c| c.script())
            .filter(|s| !matches!(s, Script::Common | Script::Inherited | Script::Unknown))
            .map(|s| s.full_name().to_string())
            .find(|name| !self.allowed.contains(name))
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_word_char(c: char, in_token: bool) -> bool {
    c.is_alphabetic() || (in_token && c.script() == Script::Inherited)
}

/// Maximal runs of letters, keeping apostrophes that sit between two letters.
fn split_words(text: &str) -> Vec<&str> {
    let mut words = Vec::new();
    let mut start: Option<usize> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match start {
            None if is_word_char(c, false) => start = Some(i),
            None => {}
            Some(s) => {
                if is_word_char(c, true) {
                    continue;
                }
                let next_is_letter = chars.peek().is_some_and(|&(_, n)| n.is_alphabetic());
                if is_apostrophe(c) && next_is_letter {
                    continue;
                }
                words.push(&text[s..i]);
                start = None;
            }
        }
    }
    if let Some(s) = start {
        words.push(&text[s..]);
    }
    words
}

/// Splits raw bytes into word tokens.
pub fn tokenize(raw: &[u8], policy: &FilterPolicy) -> Result<TokenStream> {
    let text = std::str::from_utf8(raw).map_err(|e| GdaError::Encoding {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize_str(text, policy))
}

pub fn tokenize_str(text: &str, policy: &FilterPolicy) -> TokenStream {
    let mut out = TokenStream::default();
    for w in split_words(text) {
        let token = if policy.lowercase {
            w.to_lowercase().replace('\u{2019}', "'")
        } else {
            w.replace('\u{2019}', "'")
        };
        match policy.scripts.rejects(&token) {
            Some(script) => out.dropped.push(DroppedToken {
                token,
                reason: DropReason::Script { script },
            }),
            None => out.tokens.push(token),
        }
    }
    out
}
