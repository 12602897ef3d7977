//! Labelled-matrix, categorical and tweet CSV formats.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use crate::error::{GdaError, Result};
use crate::mca::{CategoricalDataset, Question, Role};
use crate::table::ContingencyTable;
use crate::textpipe::TimedRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    TableCsv,
    CategoricalCsv,
    TweetCsv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Table(ContingencyTable),
    Categorical(CategoricalDataset),
    Tweets(Vec<TimedRecord>),
}

pub fn load_table(path: &Path, format: InputFormat) -> Result<Loaded> {
    let name = path.display().to_string();
    let file = std::fs::File::open(path)?;
    match format {
        InputFormat::TableCsv => read_table_csv(file, &name).map(Loaded::Table),
        InputFormat::CategoricalCsv => read_categorical_csv(file, &name).map(Loaded::Categorical),
        InputFormat::TweetCsv => read_tweet_csv(file, &name).map(Loaded::Tweets),
    }
}

fn records<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader)
}

fn parse_err(name: &str, line: usize, message: impl Into<String>) -> GdaError {
    GdaError::Parse {
        path: name.to_string(),
        line,
        message: message.into(),
    }
}

/// Row labels, column labels and cell values.
pub type LabelledMatrix = (Vec<String>, Vec<String>, Vec<Vec<f64>>);

/// A labelled numeric matrix: the first row holds column labels after an
/// empty corner cell, every following row starts with its row label.
pub fn read_labelled_matrix<R: Read>(reader: R, name: &str) -> Result<LabelledMatrix> {
    let mut rdr = records(reader);
    let mut iter = rdr.records();
    let header = iter
        .next()
        .ok_or_else(|| parse_err(name, 1, "empty file"))??;
    let cols: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if cols.is_empty() {
        return Err(parse_err(name, 1, "header has no column labels"));
    }
    let mut row_labels = Vec::new();
    let mut rows = Vec::new();
    for (k, rec) in iter.enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != cols.len() + 1 {
            return Err(parse_err(
                name,
                line,
                format!(
                    "ragged row: {} fields, expected {}",
                    rec.len(),
                    cols.len() + 1
                ),
            ));
        }
        let label = rec[0].to_string();
        let mut row = Vec::with_capacity(cols.len());
        for (j, cell) in rec.iter().skip(1).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                parse_err(
                    name,
                    line,
                    format!("column {} ({}): not a number: {cell:?}", j + 2, cols[j]),
                )
            })?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(parse_err(
                    name,
                    line,
                    format!(
                        "row {label:?}, column {} ({}): negative or non-finite cell {v}",
                        j + 2,
                        cols[j]
                    ),
                ));
            }
            row.push(v);
        }
        row_labels.push(label);
        rows.push(row);
    }
    Ok((row_labels, cols, rows))
}

pub fn read_table_csv<R: Read>(reader: R, name: &str) -> Result<ContingencyTable> {
    let (rows, cols, cells) = read_labelled_matrix(reader, name)?;
    if rows.is_empty() {
        return Err(parse_err(name, 2, "no data rows"));
    }
    ContingencyTable::from_rows(rows, cols, &cells)
}

/// Header of question labels after an id column, an optional row of roles,
/// then one row per individual. Empty cells are missing responses.
/// Categories are the distinct non-empty answers, sorted.
pub fn read_categorical_csv<R: Read>(reader: R, name: &str) -> Result<CategoricalDataset> {
    let mut rdr = records(reader);
    let all: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
    let header = all
        .first()
        .ok_or_else(|| parse_err(name, 1, "empty file"))?;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if labels.is_empty() {
        return Err(parse_err(name, 1, "no question columns"));
    }
    let nq = labels.len();
    let mut body_start = 1;
    let mut roles = vec![Role::Principal; nq];
    if let Some(second) = all.get(1) {
        let cells: Vec<&str> = second.iter().skip(1).collect();
        if cells.len() == nq
            && cells
                .iter()
                .all(|c| matches!(c.trim(), "principal" | "supplementary"))
        {
            roles = cells
                .iter()
                .map(|c| {
                    if c.trim() == "principal" {
                        Role::Principal
                    } else {
                        Role::Supplementary
                    }
                })
                .collect();
            body_start = 2;
        }
    }
    let body = &all[body_start..];
    let mut ids = Vec::with_capacity(body.len());
    let mut raw: Vec<Vec<String>> = Vec::with_capacity(body.len());
    for (k, rec) in body.iter().enumerate() {
        if rec.len() != nq + 1 {
            return Err(parse_err(
                name,
                body_start + k + 1,
                format!("ragged row: {} fields, expected {}", rec.len(), nq + 1),
            ));
        }
        ids.push(rec[0].to_string());
        raw.push(rec.iter().skip(1).map(|c| c.trim().to_string()).collect());
    }
    let mut questions = Vec::with_capacity(nq);
    for q in 0..nq {
        let cats: BTreeSet<&str> = raw
            .iter()
            .map(|r| r[q].as_str())
            .filter(|c| !c.is_empty())
            .collect();
        questions.push(Question {
            label: labels[q].clone(),
            categories: cats.into_iter().map(str::to_string).collect(),
            role: roles[q],
        });
    }
    let responses = raw
        .iter()
        .map(|r| {
            (0..nq)
                .map(|q| {
                    if r[q].is_empty() {
                        None
                    } else {
                        questions[q].categories.iter().position(|c| *c == r[q])
                    }
                })
                .collect()
        })
        .collect();
    CategoricalDataset::new(ids, questions, responses)
}

/// `timestamp,text` with a header row.
pub fn read_tweet_csv<R: Read>(reader: R, name: &str) -> Result<Vec<TimedRecord>> {
    let mut rdr = records(reader);
    let mut iter = rdr.records();
    let header = iter
        .next()
        .ok_or_else(|| parse_err(name, 1, "empty file"))??;
    if header.len() != 2 || header[0].trim() != "timestamp" || header[1].trim() != "text" {
        return Err(parse_err(name, 1, "expected header `timestamp,text`"));
    }
    let mut out = Vec::new();
    for (k, rec) in iter.enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(parse_err(
                name,
                k + 2,
                format!("ragged row: {} fields, expected 2", rec.len()),
            ));
        }
        out.push(TimedRecord {
            timestamp: rec[0].to_string(),
            text: rec[1].to_string(),
        });
    }
    Ok(out)
}

/// Two-column CSV with the given header, such as `group,member`.
pub fn read_pairs_csv<R: Read>(
    reader: R,
    name: &str,
    header: [&str; 2],
) -> Result<Vec<(String, String)>> {
    let mut rdr = records(reader);
    let mut iter = rdr.records();
    let first = iter
        .next()
        .ok_or_else(|| parse_err(name, 1, "empty file"))??;
    if first.len() != 2 || first[0].trim() != header[0] || first[1].trim() != header[1] {
        return Err(parse_err(
            name,
            1,
            format!("expected header `{},{}`", header[0], header[1]),
        ));
    }
    let mut out = Vec::new();
    for (k, rec) in iter.enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(parse_err(
                name,
                k + 2,
                format!("ragged row: {} fields, expected 2", rec.len()),
            ));
        }
        out.push((rec[0].trim().to_string(), rec[1].trim().to_string()));
    }
    Ok(out)
}

/// Integral values print as integers, everything else with 17 significant
/// digits, so every value reads back exactly.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.16e}")
    }
}

/// Writes a labelled matrix in the table CSV layout.
pub fn write_labelled_matrix(
    corner: &str,
    cols: &[String],
    rows: &[(String, Vec<f64>)],
) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec![corner.to_string()];
    header.extend(cols.iter().cloned());
    w.write_record(&header)?;
    for (label, values) in rows {
        let mut rec = vec![label.clone()];
        rec.extend(values.iter().map(|&v| format_number(v)));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| GdaError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_table_csv(table: &ContingencyTable) -> Result<String> {
    let rows: Vec<(String, Vec<f64>)> = table
        .row_labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), table.counts().row(i).iter().copied().collect()))
        .collect();
    write_labelled_matrix("", table.col_labels(), &rows)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| GdaError::Io(e.error))?;
    Ok(())
}
