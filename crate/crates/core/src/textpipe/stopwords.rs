use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GdaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopwordClass {
    Prepositions,
    VerbParts,
    Abbreviations,
    /// Words supplied by the user.
    Custom,
}

impl StopwordClass {
    pub const SHIPPED: [StopwordClass; 3] = [
        StopwordClass::Prepositions,
        StopwordClass::VerbParts,
        StopwordClass::Abbreviations,
    ];
}

impl FromStr for StopwordClass {
    type Err = GdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prepositions" => Ok(Self::Prepositions),
            "verb-parts" => Ok(Self::VerbParts),
            "abbreviations" => Ok(Self::Abbreviations),
            "custom" => Ok(Self::Custom),
            other => Err(GdaError::InvalidArgument(format!(
                "unknown stopword class {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    English,
    French,
    Spanish,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::English, Language::French, Language::Spanish];
}

impl FromStr for Language {
    type Err = GdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" | "english" => Ok(Self::English),
            "fr" | "french" => Ok(Self::French),
            "es" | "spanish" => Ok(Self::Spanish),
            other => Err(GdaError::InvalidArgument(format!(
                "unknown stopword language {other:?}"
            ))),
        }
    }
}

fn shipped(lang: Language, class: StopwordClass) -> &'static str {
    use Language::*;
    use StopwordClass::*;
    match (lang, class) {
        (English, Prepositions) => include_str!("../../data/stopwords/en/prepositions.txt"),
        (English, VerbParts) => include_str!("../../data/stopwords/en/verb_parts.txt"),
        (English, Abbreviations) => include_str!("../../data/stopwords/en/abbreviations.txt"),
        (French, Prepositions) => include_str!("../../data/stopwords/fr/prepositions.txt"),
        (French, VerbParts) => include_str!("../../data/stopwords/fr/verb_parts.txt"),
        (French, Abbreviations) => include_str!("../../data/stopwords/fr/abbreviations.txt"),
        (Spanish, Prepositions) => include_str!("../../data/stopwords/es/prepositions.txt"),
        (Spanish, VerbParts) => include_str!("../../data/stopwords/es/verb_parts.txt"),
        (Spanish, Abbreviations) => include_str!("../../data/stopwords/es/abbreviations.txt"),
        (_, Custom) => "",
    }
}

/// Term -> the first class (in class order) that lists it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist {
    words: BTreeMap<String, StopwordClass>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn shipped(languages: &BTreeSet<Language>, classes: &BTreeSet<StopwordClass>) -> Self {
        let mut list = Self::default();
        for &class in classes {
            for &lang in languages {
                for w in shipped(lang, class)
                    .lines()
                    .map(str::trim)
                    .filter(|w| !w.is_empty())
                {
                    list.insert(w, class);
                }
            }
        }
        list
    }

    /// Adds a word unless a class earlier in class order already lists it.
    pub fn insert(&mut self, word: &str, class: StopwordClass) {
        let entry = self.words.entry(word.to_lowercase()).or_insert(class);
        if class < *entry {
            *entry = class;
        }
    }

    pub fn extend_custom<'a>(&mut self, words: impl IntoIterator<Item = &'a str>) {
        for w in words {
            let w = w.trim();
            if !w.is_empty() {
                self.insert(w, StopwordClass::Custom);
            }
        }
    }

    pub fn class_of(&self, term: &str) -> Option<StopwordClass> {
        self.words.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_lists_load() {
        let all_langs: BTreeSet<_> = Language::ALL.into_iter().collect();
        let all_classes: BTreeSet<_> = StopwordClass::SHIPPED.into_iter().collect();
        let list = Stoplist::shipped(&all_langs, &all_classes);
        assert_eq!(list.class_of("of"), Some(StopwordClass::Prepositions));
        assert_eq!(list.class_of("été"), Some(StopwordClass::VerbParts));
        assert_eq!(list.class_of("rt"), Some(StopwordClass::Abbreviations));
        // "a" is a Spanish preposition and a French verb form; the earlier class wins.
        assert_eq!(list.class_of("a"), Some(StopwordClass::Prepositions));
        assert_eq!(list.class_of("kiss"), None);
    }

    #[test]
    fn class_selection_limits_list() {
        let en: BTreeSet<_> = [Language::English].into_iter().collect();
        let preps: BTreeSet<_> = [StopwordClass::Prepositions].into_iter().collect();
        let list = Stoplist::shipped(&en, &preps);
        assert!(list.class_of("with").is_some());
        assert!(list.class_of("was").is_none());
    }
}
