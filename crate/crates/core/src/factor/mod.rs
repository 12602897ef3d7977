//! Correspondence analysis of a contingency table.
//!
//! The table is turned into the correspondence matrix `P = N / n` with row
//! masses `r` and column masses `c`. The standardized residuals
//! `S = D_r^{-1/2} (P - r c^T) D_c^{-1/2}` are factorized as `S = U Sigma V^T`,
//! and the principal coordinates of rows and columns are
//! `F = D_r^{-1/2} U Sigma` and `G = D_c^{-1/2} V Sigma`.
//!
//! The singular triplets come from a one-sided Jacobi SVD.
//! `S` is always rank-deficient by at least one (the trivial dimension).
//! Euclidean distance between rows of `F` over all factors equals the
//! chi-squared distance between the corresponding row profiles.

mod report;
mod supplementary;
mod svd;

pub use report::{inertia_report, top_contributors, AxisInertia, Contributor};
pub use supplementary::{
    origin_distances, origin_proximity_threshold, project_supplementary, ProximityConfig,
    SupplementaryKind, SupplementaryProjection,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Axis, GdaError, Result};
use crate::table::ContingencyTable;

/// Principal inertias at or below this level are numerically zero. CA
/// inertias are bounded by the trivial one (1.0), so the cutoff is relative
/// to it as well as to the largest inertia.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Which point set of a fitted model is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointSet {
    Rows,
    Columns,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FitOptions {
    /// Drop all-zero rows and columns instead of failing.
    pub lenient: bool,
}

/// A row or column removed by a lenient fit because it was all zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedLine {
    pub set: PointSet,
    pub label: String,
}

/// Fitted correspondence analysis. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub(crate) row_labels: Vec<String>,
    pub(crate) col_labels: Vec<String>,
    pub(crate) grand_total: f64,
    pub(crate) correspondence: DMatrix<f64>,
    pub(crate) row_masses: DVector<f64>,
    pub(crate) col_masses: DVector<f64>,
    pub(crate) singular_values: Vec<f64>,
    pub(crate) row_coords: DMatrix<f64>,
    pub(crate) col_coords: DMatrix<f64>,
    pub(crate) row_contributions: DMatrix<f64>,
    pub(crate) col_contributions: DMatrix<f64>,
    pub(crate) row_sq_cosines: DMatrix<f64>,
    pub(crate) col_sq_cosines: DMatrix<f64>,
    pub(crate) dropped: Vec<DroppedLine>,
}

pub fn fit_ca(table: &ContingencyTable) -> Result<FactorModel> {
    fit_ca_with(table, FitOptions::default())
}

pub fn fit_ca_with(table: &ContingencyTable, opts: FitOptions) -> Result<FactorModel> {
    let zero_rows = table.zero_rows();
    let zero_cols = table.zero_cols();
    let mut dropped = Vec::new();
    let owned;
    let table = if zero_rows.is_empty() && zero_cols.is_empty() {
        table
    } else if opts.lenient {
        dropped.extend(zero_rows.iter().map(|&i| DroppedLine {
            set: PointSet::Rows,
            label: table.row_labels()[i].clone(),
        }));
        dropped.extend(zero_cols.iter().map(|&j| DroppedLine {
            set: PointSet::Columns,
            label: table.col_labels()[j].clone(),
        }));
        owned = table.without(&zero_rows, &zero_cols)?;
        &owned
    } else if !zero_rows.is_empty() {
        return Err(GdaError::ZeroLines {
            axis: Axis::Row,
            labels: zero_rows
                .iter()
                .map(|&i| table.row_labels()[i].clone())
                .collect(),
        });
    } else {
        return Err(GdaError::ZeroLines {
            axis: Axis::Column,
            labels: zero_cols
                .iter()
                .map(|&j| table.col_labels()[j].clone())
                .collect(),
        });
    };

    let (ni, nj) = (table.nrows(), table.ncols());
    if ni < 2 || nj < 2 {
        return Err(GdaError::TooSmall { rows: ni, cols: nj });
    }

    let n = table.grand_total();
    let p = table.counts() / n;
    let r = DVector::from_iterator(ni, p.row_iter().map(|row| row.sum()));
    let c = DVector::from_iterator(nj, p.column_iter().map(|col| col.sum()));

    let s = DMatrix::from_fn(ni, nj, |i, j| {
        (p[(i, j)] - r[i] * c[j]) / (r[i] * c[j]).sqrt()
    });
    let (singular_values, u, v) = svd::singular_triplets(&s);
    let k = singular_values.len();

    let mut row_coords =
        DMatrix::from_fn(ni, k, |i, a| u[(i, a)] * singular_values[a] / r[i].sqrt());
    let mut col_coords =
        DMatrix::from_fn(nj, k, |j, a| v[(j, a)] * singular_values[a] / c[j].sqrt());

    // Orient each factor so its largest-magnitude row point is positive.
    for a in 0..k {
        let mut best = 0;
        for i in 1..ni {
            if row_coords[(i, a)].abs() > row_coords[(best, a)].abs() {
                best = i;
            }
        }
        if row_coords[(best, a)] < 0.0 {
            row_coords.column_mut(a).neg_mut();
            col_coords.column_mut(a).neg_mut();
        }
    }

    let inertias: Vec<f64> = singular_values.iter().map(|s| s * s).collect();
    let row_contributions = contributions(&row_coords, &r, &inertias);
    let col_contributions = contributions(&col_coords, &c, &inertias);

    let row_d2: Vec<f64> = (0..ni)
        .map(|i| {
            (0..nj)
                .map(|j| (p[(i, j)] / r[i] - c[j]).powi(2) / c[j])
                .sum()
        })
        .collect();
    let col_d2: Vec<f64> = (0..nj)
        .map(|j| {
            (0..ni)
                .map(|i| (p[(i, j)] / c[j] - r[i]).powi(2) / r[i])
                .sum()
        })
        .collect();

    Ok(FactorModel {
        row_labels: table.row_labels().to_vec(),
        col_labels: table.col_labels().to_vec(),
        grand_total: n,
        row_sq_cosines: sq_cosines(&row_coords, &row_d2),
        col_sq_cosines: sq_cosines(&col_coords, &col_d2),
        correspondence: p,
        row_masses: r,
        col_masses: c,
        singular_values,
        row_coords,
        col_coords,
        row_contributions,
        col_contributions,
        dropped,
    })
}

fn contributions(coords: &DMatrix<f64>, masses: &DVector<f64>, inertias: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(coords.nrows(), coords.ncols(), |i, a| {
        masses[i] * coords[(i, a)].powi(2) / inertias[a]
    })
}

fn sq_cosines(coords: &DMatrix<f64>, sq_dist: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(coords.nrows(), coords.ncols(), |i, a| {
        if sq_dist[i] > 0.0 {
            coords[(i, a)].powi(2) / sq_dist[i]
        } else {
            0.0
        }
    })
}

impl FactorModel {
    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn labels(&self, set: PointSet) -> &[String] {
        match set {
            PointSet::Rows => &self.row_labels,
            PointSet::Columns => &self.col_labels,
        }
    }

    pub fn grand_total(&self) -> f64 {
        self.grand_total
    }

    /// `P = N / n`.
    pub fn correspondence(&self) -> &DMatrix<f64> {
        &self.correspondence
    }

    pub fn row_masses(&self) -> &DVector<f64> {
        &self.row_masses
    }

    pub fn col_masses(&self) -> &DVector<f64> {
        &self.col_masses
    }

    pub fn masses(&self, set: PointSet) -> &DVector<f64> {
        match set {
            PointSet::Rows => &self.row_masses,
            PointSet::Columns => &self.col_masses,
        }
    }

    /// Number of nontrivial factors.
    pub fn n_factors(&self) -> usize {
        self.singular_values.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn principal_inertias(&self) -> Vec<f64> {
        self.singular_values.iter().map(|s| s * s).collect()
    }

    pub fn total_inertia(&self) -> f64 {
        self.singular_values.iter().map(|s| s * s).sum()
    }

    /// Principal row coordinates `F` (rows x factors).
    pub fn row_coords(&self) -> &DMatrix<f64> {
        &self.row_coords
    }

    /// Principal column coordinates `G` (columns x factors).
    pub fn col_coords(&self) -> &DMatrix<f64> {
        &self.col_coords
    }

    pub fn coords(&self, set: PointSet) -> &DMatrix<f64> {
        match set {
            PointSet::Rows => &self.row_coords,
            PointSet::Columns => &self.col_coords,
        }
    }

    /// Standard coordinates: principal coordinates divided by the singular value.
    pub fn standard_coords(&self, set: PointSet) -> DMatrix<f64> {
        let pc = self.coords(set);
        DMatrix::from_fn(pc.nrows(), pc.ncols(), |i, a| {
            pc[(i, a)] / self.singular_values[a]
        })
    }

    pub fn contributions(&self, set: PointSet) -> &DMatrix<f64> {
        match set {
            PointSet::Rows => &self.row_contributions,
            PointSet::Columns => &self.col_contributions,
        }
    }

    pub fn sq_cosines(&self, set: PointSet) -> &DMatrix<f64> {
        match set {
            PointSet::Rows => &self.row_sq_cosines,
            PointSet::Columns => &self.col_sq_cosines,
        }
    }

    /// Lines removed by a lenient fit.
    pub fn dropped(&self) -> &[DroppedLine] {
        &self.dropped
    }

    pub fn index_of(&self, set: PointSet, label: &str) -> Result<usize> {
        self.labels(set)
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GdaError::UnknownLabel {
                kind: match set {
                    PointSet::Rows => "row",
                    PointSet::Columns => "column",
                },
                label: label.to_string(),
            })
    }

    /// Principal coordinates of one point as a vector.
    pub fn point(&self, set: PointSet, index: usize) -> Vec<f64> {
        self.coords(set).row(index).iter().copied().collect()
    }
}
