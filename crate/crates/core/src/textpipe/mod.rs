//! From raw text to a segments x terms contingency table.
//!
//! `segment_by` cuts the input into ordered segments, `SegmentedCorpus::build`
//! tokenizes them, `apply_filter` removes stopwords and rare terms and
//! `crosstab` tabulates what is left.

mod segment;
mod stopwords;
mod tokenize;

pub use segment::{
    parse_timestamp, segment_by, RawCorpus, RawSegment, SegmentStrategy, TimedRecord,
};
pub use stopwords::{Language, Stoplist, StopwordClass};
pub use tokenize::{tokenize, tokenize_str, DropReason, DroppedToken, ScriptFilter, TokenStream};

use std::collections::{BTreeMap, BTreeSet, HashSet};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GdaError, Result};
use crate::table::ContingencyTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterPolicy {
    /// Terms used fewer times than this over the whole corpus are dropped.
    pub min_occurrences: usize,
    pub stoplist: Stoplist,
    pub scripts: ScriptFilter,
    pub lowercase: bool,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        Self {
            min_occurrences: 0,
            stoplist: Stoplist::empty(),
            scripts: ScriptFilter::any(),
            lowercase: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub id: String,
    pub counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRecord {
    pub term: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedCorpus {
    segments: Vec<Segment>,
    vocabulary: BTreeMap<String, usize>,
    retained: BTreeSet<String>,
    filter_log: Vec<FilterRecord>,
}

impl SegmentedCorpus {
    /// Tokenizes every segment. Tokens rejected by the script filter are
    /// logged once per distinct term and never enter the vocabulary.
    /// Segments are tokenized in parallel and merged in input order.
    pub fn build(segments: &[RawSegment], policy: &FilterPolicy) -> Result<Self> {
        let mut seen = HashSet::new();
        if let Some(dup) = segments.iter().find(|s| !seen.insert(s.id.as_str())) {
            return Err(GdaError::DuplicateLabel {
                axis: crate::error::Axis::Row,
                label: dup.id.clone(),
            });
        }
        let mut out = Vec::with_capacity(segments.len());
        let mut vocabulary: BTreeMap<String, usize> = BTreeMap::new();
        let mut script_drops: BTreeMap<String, DropReason> = BTreeMap::new();
        let streams: Vec<TokenStream> = segments
            .par_iter()
            .map(|seg| tokenize_str(&seg.text, policy))
            .collect();
        for (seg, stream) in segments.iter().zip(streams) {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for t in stream.tokens {
                *counts.entry(t).or_default() += 1;
            }
            for (t, &n) in &counts {
                *vocabulary.entry(t.clone()).or_default() += n;
            }
            for d in stream.dropped {
                script_drops.entry(d.token).or_insert(d.reason);
            }
            out.push(Segment {
                id: seg.id.clone(),
                counts,
            });
        }
        Ok(Self {
            segments: out,
            retained: vocabulary.keys().cloned().collect(),
            vocabulary,
            filter_log: script_drops
                .into_iter()
                .map(|(term, reason)| FilterRecord { term, reason })
                .collect(),
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Term frequencies before stopword and threshold filtering.
    pub fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub fn filter_log(&self) -> &[FilterRecord] {
        &self.filter_log
    }

    /// Retained terms by descending corpus frequency, then lexicographically.
    pub fn retained_terms(&self) -> Vec<String> {
        let mut terms: Vec<&String> = self.retained.iter().collect();
        terms.sort_by(|a, b| {
            self.vocabulary[*b]
                .cmp(&self.vocabulary[*a])
                .then_with(|| a.cmp(b))
        });
        terms.into_iter().cloned().collect()
    }

    pub fn retained_token_count(&self) -> usize {
        self.retained.iter().map(|t| self.vocabulary[t]).sum()
    }
}

/// Drops stopwords, then terms under the occurrence threshold. Each dropped
/// term is logged once with the first reason that applies.
pub fn apply_filter(corpus: &SegmentedCorpus, policy: &FilterPolicy) -> SegmentedCorpus {
    let mut retained = BTreeSet::new();
    let mut log = corpus.filter_log.clone();
    for term in &corpus.retained {
        let count = corpus.vocabulary[term];
        let reason = if let Some(class) = policy.stoplist.class_of(term) {
            Some(DropReason::Stopword { class })
        } else if count < policy.min_occurrences {
            Some(DropReason::BelowThreshold {
                count,
                min: policy.min_occurrences,
            })
        } else {
            None
        };
        match reason {
            Some(reason) => log.push(FilterRecord {
                term: term.clone(),
                reason,
            }),
            None => {
                retained.insert(term.clone());
            }
        }
    }
    log.sort_by(|a, b| a.term.cmp(&b.term));
    SegmentedCorpus {
        segments: corpus.segments.clone(),
        vocabulary: corpus.vocabulary.clone(),
        retained,
        filter_log: log,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellMode {
    Presence,
    #[default]
    Frequency,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CrosstabOptions {
    pub mode: CellMode,
    /// Keep segments with no retained tokens as all-zero rows.
    pub keep_empty_segments: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crosstab {
    pub table: ContingencyTable,
    /// Segments without retained tokens (dropped unless kept by option).
    pub empty_segments: Vec<String>,
}

pub fn crosstab(corpus: &SegmentedCorpus, opts: CrosstabOptions) -> Result<Crosstab> {
    let terms = corpus.retained_terms();
    if terms.is_empty() {
        return Err(GdaError::EmptyVocabulary);
    }
    let col: BTreeMap<&str, usize> = terms
        .iter()
        .enumerate()
        .map(|(j, t)| (t.as_str(), j))
        .collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut empty = Vec::new();
    for seg in &corpus.segments {
        let mut row = vec![0.0; terms.len()];
        for (t, &n) in &seg.counts {
            if let Some(&j) = col.get(t.as_str()) {
                row[j] = match opts.mode {
                    CellMode::Presence => 1.0,
                    CellMode::Frequency => n as f64,
                };
            }
        }
        let is_empty = row.iter().all(|&v| v == 0.0);
        if is_empty {
            empty.push(seg.id.clone());
            if !opts.keep_empty_segments {
                continue;
            }
        }
        labels.push(seg.id.clone());
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(GdaError::Empty("segments"));
    }
    let counts = DMatrix::from_fn(rows.len(), terms.len(), |i, j| rows[i][j]);
    Ok(Crosstab {
        table: ContingencyTable::new(labels, terms, counts)?,
        empty_segments: empty,
    })
}
