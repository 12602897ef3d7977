//! Labelled nonnegative count matrices.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::error::{Axis, GdaError, Result};

/// A rows x columns cross-tabulation with unique labels on both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    counts: DMatrix<f64>,
}

fn check_unique(labels: &[String], axis: Axis) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(GdaError::DuplicateLabel {
                axis,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

impl ContingencyTable {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: DMatrix<f64>,
    ) -> Result<Self> {
        if counts.nrows() != row_labels.len() || counts.ncols() != col_labels.len() {
            return Err(GdaError::Shape(format!(
                "{} row labels and {} column labels for a {}x{} matrix",
                row_labels.len(),
                col_labels.len(),
                counts.nrows(),
                counts.ncols()
            )));
        }
        check_unique(&row_labels, Axis::Row)?;
        check_unique(&col_labels, Axis::Column)?;
        for i in 0..counts.nrows() {
            for j in 0..counts.ncols() {
                let v = counts[(i, j)];
                if !(v.is_finite() && v >= 0.0) {
                    return Err(GdaError::InvalidCell {
                        row: i,
                        col: j,
                        row_label: row_labels[i].clone(),
                        col_label: col_labels[j].clone(),
                        value: v,
                    });
                }
            }
        }
        if counts.sum() <= 0.0 {
            return Err(GdaError::EmptyTable);
        }
        Ok(Self {
            row_labels,
            col_labels,
            counts,
        })
    }

    /// Builds a table from row-major nested vectors.
    pub fn from_rows(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let ncols = col_labels.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(GdaError::Shape(format!(
                "row {i} has {} cells, expected {ncols}",
                r.len()
            )));
        }
        let counts = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
        Self::new(row_labels, col_labels, counts)
    }

    /// Unlabelled convenience constructor: rows `r1..`, columns `c1..`.
    pub fn from_matrix(counts: DMatrix<f64>) -> Result<Self> {
        let rows = (1..=counts.nrows()).map(|i| format!("r{i}")).collect();
        let cols = (1..=counts.ncols()).map(|j| format!("c{j}")).collect();
        Self::new(rows, cols, counts)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn counts(&self) -> &DMatrix<f64> {
        &self.counts
    }

    pub fn nrows(&self) -> usize {
        self.counts.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.counts.ncols()
    }

    pub fn grand_total(&self) -> f64 {
        self.counts.sum()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.nrows())
            .filter(|&i| self.counts.row(i).iter().all(|&v| v == 0.0))
            .collect()
    }

    pub fn zero_cols(&self) -> Vec<usize> {
        (0..self.ncols())
            .filter(|&j| self.counts.column(j).iter().all(|&v| v == 0.0))
            .collect()
    }

    /// Copy of the table without the given rows and columns.
    pub fn without(&self, drop_rows: &[usize], drop_cols: &[usize]) -> Result<Self> {
        let keep_r: Vec<usize> = (0..self.nrows())
            .filter(|i| !drop_rows.contains(i))
            .collect();
        let keep_c: Vec<usize> = (0..self.ncols())
            .filter(|j| !drop_cols.contains(j))
            .collect();
        let counts = DMatrix::from_fn(keep_r.len(), keep_c.len(), |i, j| {
            self.counts[(keep_r[i], keep_c[j])]
        });
        Self::new(
            keep_r.iter().map(|&i| self.row_labels[i].clone()).collect(),
            keep_c.iter().map(|&j| self.col_labels[j].clone()).collect(),
            counts,
        )
    }

    pub fn transpose(&self) -> Self {
        Self {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            counts: self.counts.transpose(),
        }
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.row_labels.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.col_labels.iter().position(|l| l == label)
    }
}
