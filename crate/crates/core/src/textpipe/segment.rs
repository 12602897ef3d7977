use std::collections::BTreeMap;

use chrono::{DateTime, Days, NaiveDate, NaiveDateTime, Utc};

use crate::error::{GdaError, Result};

/// One ordered unit of text before tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSegment {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedRecord {
    pub timestamp: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawCorpus {
    /// (file name, contents)
    Files(Vec<(String, String)>),
    Text(String),
    Records(Vec<TimedRecord>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentStrategy {
    PerFile,
    /// Split before every line that starts with `marker`. With
    /// `include_preamble` the text before the first marker is a segment too.
    PerMarker {
        marker: String,
        include_preamble: bool,
    },
    /// One segment per UTC calendar day from the first to the last record.
    PerDay {
        keep_empty_days: bool,
    },
}

pub fn segment_by(raw: &RawCorpus, strategy: &SegmentStrategy) -> Result<Vec<RawSegment>> {
    match (raw, strategy) {
        (RawCorpus::Files(files), SegmentStrategy::PerFile) => {
            let mut files = files.clone();
            files.sort_by(|a, b| a.0.cmp(&b.0));
            Ok(files
                .into_iter()
                .map(|(id, text)| RawSegment { id, text })
                .collect())
        }
        (
            RawCorpus::Text(text),
            SegmentStrategy::PerMarker {
                marker,
                include_preamble,
            },
        ) => Ok(split_on_marker(text, marker, *include_preamble)),
        (
            RawCorpus::Files(files),
            SegmentStrategy::PerMarker {
                marker,
                include_preamble,
            },
        ) => {
            let mut files = files.clone();
            files.sort_by(|a, b| a.0.cmp(&b.0));
            let joined: String = files
                .into_iter()
                .map(|(_, t)| t)
                .collect::<Vec<_>>()
                .join("\n");
            Ok(split_on_marker(&joined, marker, *include_preamble))
        }
        (RawCorpus::Records(records), SegmentStrategy::PerDay { keep_empty_days }) => {
            per_day(records, *keep_empty_days)
        }
        _ => Err(GdaError::InvalidArgument(
            "segmentation strategy does not apply to this kind of input".into(),
        )),
    }
}

fn split_on_marker(text: &str, marker: &str, include_preamble: bool) -> Vec<RawSegment> {
    let mut starts = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.trim_start().starts_with(marker) {
            starts.push(offset);
        }
        offset += line.len();
    }
    let mut segments = Vec::new();
    let first = starts.first().copied().unwrap_or(text.len());
    if include_preamble {
        segments.push(RawSegment {
            id: "preamble".into(),
            text: text[..first].to_string(),
        });
    }
    let width = starts.len().to_string().len();
    for (k, &s) in starts.iter().enumerate() {
        let e = starts.get(k + 1).copied().unwrap_or(text.len());
        segments.push(RawSegment {
            id: format!("{marker}-{:0width$}", k + 1),
            text: text[s..e].to_string(),
        });
    }
    segments
}

/// Accepts RFC 3339 (`2015-05-11T08:00:00Z`), naive date-times taken as UTC,
/// and bare dates.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc())
}

fn per_day(records: &[TimedRecord], keep_empty_days: bool) -> Result<Vec<RawSegment>> {
    let mut days: BTreeMap<NaiveDate, Vec<&str>> = BTreeMap::new();
    for (index, r) in records.iter().enumerate() {
        let t = parse_timestamp(&r.timestamp).ok_or_else(|| GdaError::Timestamp {
            index,
            value: r.timestamp.clone(),
        })?;
        days.entry(t.date_naive()).or_default().push(&r.text);
    }
    let (Some(&first), Some(&last)) = (days.keys().next(), days.keys().next_back()) else {
        return Ok(Vec::new());
    };
    let mut segments = Vec::new();
    let mut day = first;
    while day <= last {
        match days.get(&day) {
            Some(texts) => segments.push(RawSegment {
                id: day.to_string(),
                text: texts.join("\n"),
            }),
            None if keep_empty_days => segments.push(RawSegment {
                id: day.to_string(),
                text: String::new(),
            }),
            None => {}
        }
        day = day + Days::new(1);
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_file_sorts_by_name() {
        let raw = RawCorpus::Files(vec![
            ("ch11.txt".into(), "c".into()),
            ("ch09.txt".into(), "a".into()),
            ("ch12.txt".into(), "d".into()),
            ("ch10.txt".into(), "b".into()),
        ]);
        let segs = segment_by(&raw, &SegmentStrategy::PerFile).unwrap();
        assert_eq!(
            segs.iter().map(|s| s.text.as_str()).collect::<String>(),
            "abcd"
        );
        assert_eq!(segs[0].id, "ch09.txt");
    }

    #[test]
    fn per_marker_counts_and_is_exhaustive() {
        let script = "FADE IN\nSCENE one\nrick talks\nSCENE two\nilsa\n  SCENE three\nend\n";
        // String-scan oracle: count lines starting with the marker.
        let markers = script
            .lines()
            .filter(|l| l.trim_start().starts_with("SCENE"))
            .count();
        for include in [true, false] {
            let segs = segment_by(
                &RawCorpus::Text(script.into()),
                &SegmentStrategy::PerMarker {
                    marker: "SCENE".into(),
                    include_preamble: include,
                },
            )
            .unwrap();
            assert_eq!(segs.len(), markers + usize::from(include));
            if include {
                assert_eq!(
                    segs.iter().map(|s| s.text.as_str()).collect::<String>(),
                    script
                );
            }
        }
    }

    #[test]
    fn per_day_spans_and_gaps() {
        let recs = vec![
            TimedRecord {
                timestamp: "2015-05-13T10:00:00Z".into(),
                text: "c".into(),
            },
            TimedRecord {
                timestamp: "2015-05-11T23:59:59Z".into(),
                text: "a".into(),
            },
            TimedRecord {
                timestamp: "2015-05-11T01:00:00+00:00".into(),
                text: "b".into(),
            },
        ];
        let keep = segment_by(
            &RawCorpus::Records(recs.clone()),
            &SegmentStrategy::PerDay {
                keep_empty_days: true,
            },
        )
        .unwrap();
        assert_eq!(
            keep.iter().map(|s| s.id.as_str()).collect::<Vec<_>>(),
            vec!["2015-05-11", "2015-05-12", "2015-05-13"]
        );
        assert_eq!(keep[0].text, "a\nb");
        let drop = segment_by(
            &RawCorpus::Records(recs),
            &SegmentStrategy::PerDay {
                keep_empty_days: false,
            },
        )
        .unwrap();
        assert_eq!(drop.len(), 2);
    }

    #[test]
    fn bad_timestamp_names_record() {
        let recs = vec![
            TimedRecord {
                timestamp: "2015-05-11".into(),
                text: "a".into(),
            },
            TimedRecord {
                timestamp: "yesterday".into(),
                text: "b".into(),
            },
        ];
        let err = segment_by(
            &RawCorpus::Records(recs),
            &SegmentStrategy::PerDay {
                keep_empty_days: true,
            },
        )
        .unwrap_err();
        assert!(matches!(err, GdaError::Timestamp { index: 1, .. }));
    }

    #[test]
    fn strategy_mismatch() {
        assert!(segment_by(
            &RawCorpus::Text("x".into()),
            &SegmentStrategy::PerDay {
                keep_empty_days: true
            }
        )
        .is_err());
    }
}
