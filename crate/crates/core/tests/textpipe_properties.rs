use std::collections::BTreeSet;

use gda_core::textpipe::{
    apply_filter, crosstab, CellMode, CrosstabOptions, FilterPolicy, RawSegment, SegmentedCorpus,
    Stoplist, StopwordClass,
};
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "lamp", "sea", "of", "the", "harbor", "boat", "in", "wind", "stairs", "glass",
];

fn segments_strategy() -> impl Strategy<Value = Vec<RawSegment>> {
    proptest::collection::vec(proptest::collection::vec(0..WORDS.len(), 0..30), 1..8).prop_map(
        |docs| {
            docs.into_iter()
                .enumerate()
                .map(|(i, words)| RawSegment {
                    id: format!("d{i}"),
                    text: words
                        .iter()
                        .map(|&w| WORDS[w])
                        .collect::<Vec<_>>()
                        .join(" "),
                })
                .collect()
        },
    )
}

fn policy(min: usize) -> FilterPolicy {
    let mut stoplist = Stoplist::empty();
    stoplist.insert("of", StopwordClass::Prepositions);
    stoplist.insert("in", StopwordClass::Prepositions);
    stoplist.insert("the", StopwordClass::Custom);
    FilterPolicy {
        min_occurrences: min,
        stoplist,
        ..FilterPolicy::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn permuting_documents_changes_nothing_but_row_order(segs in segments_strategy(), min in 0usize..6) {
        let p = policy(min);
        let a = apply_filter(&SegmentedCorpus::build(&segs, &p).unwrap(), &p);
        let mut rev = segs.clone();
        rev.reverse();
        let b = apply_filter(&SegmentedCorpus::build(&rev, &p).unwrap(), &p);
        prop_assert_eq!(a.retained_terms(), b.retained_terms());
        prop_assert_eq!(a.filter_log(), b.filter_log());
        let opts = CrosstabOptions { keep_empty_segments: true, ..Default::default() };
        match (crosstab(&a, opts), crosstab(&b, opts)) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(x.table.col_labels(), y.table.col_labels());
                let n = x.table.nrows();
                for i in 0..n {
                    let j = y.table.row_index(&x.table.row_labels()[i]).unwrap();
                    prop_assert_eq!(x.table.counts().row(i), y.table.counts().row(j));
                }
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "only one ordering produced a table"),
        }
    }

    #[test]
    fn frequency_cells_sum_to_retained_tokens(segs in segments_strategy(), min in 0usize..6) {
        let p = policy(min);
        let c = apply_filter(&SegmentedCorpus::build(&segs, &p).unwrap(), &p);
        let opts = CrosstabOptions { keep_empty_segments: true, mode: CellMode::Frequency };
        if let Ok(x) = crosstab(&c, opts) {
            prop_assert_eq!(x.table.grand_total(), c.retained_token_count() as f64);
        }
    }

    #[test]
    fn presence_is_binary_and_below_frequency(segs in segments_strategy()) {
        let p = policy(0);
        let c = apply_filter(&SegmentedCorpus::build(&segs, &p).unwrap(), &p);
        let pres = crosstab(&c, CrosstabOptions { mode: CellMode::Presence, keep_empty_segments: true });
        let freq = crosstab(&c, CrosstabOptions { mode: CellMode::Frequency, keep_empty_segments: true });
        if let (Ok(pres), Ok(freq)) = (pres, freq) {
            for (a, b) in pres.table.counts().iter().zip(freq.table.counts().iter()) {
                prop_assert!(*a == 0.0 || *a == 1.0);
                prop_assert!(a <= b);
            }
        }
    }

    #[test]
    fn every_dropped_term_is_logged_once(segs in segments_strategy(), min in 0usize..6) {
        let p = policy(min);
        let built = SegmentedCorpus::build(&segs, &p).unwrap();
        let c = apply_filter(&built, &p);
        let retained: BTreeSet<String> = c.retained_terms().into_iter().collect();
        let logged: Vec<&str> = c.filter_log().iter().map(|r| r.term.as_str()).collect();
        let unique: BTreeSet<&str> = logged.iter().copied().collect();
        prop_assert_eq!(unique.len(), logged.len());
        for term in built.vocabulary().keys() {
            prop_assert!(retained.contains(term) != unique.contains(term.as_str()));
        }
    }

    #[test]
    fn stopwords_and_threshold_commute(segs in segments_strategy(), min in 0usize..6) {
        let both = policy(min);
        let only_stop = FilterPolicy { min_occurrences: 0, ..policy(0) };
        let only_min = FilterPolicy { stoplist: Stoplist::empty(), ..policy(min) };
        let built = SegmentedCorpus::build(&segs, &both).unwrap();
        let direct = apply_filter(&built, &both).retained_terms();
        let a = apply_filter(&apply_filter(&built, &only_stop), &only_min).retained_terms();
        let b = apply_filter(&apply_filter(&built, &only_min), &only_stop).retained_terms();
        prop_assert_eq!(&direct, &a);
        prop_assert_eq!(&direct, &b);
    }
}
