use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{FactorModel, PointSet};
use crate::error::{GdaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupplementaryKind {
    SupplementaryRow,
    SupplementaryColumn,
}

impl SupplementaryKind {
    /// The principal set the projected points live alongside.
    pub fn host_set(self) -> PointSet {
        match self {
            SupplementaryKind::SupplementaryRow => PointSet::Rows,
            SupplementaryKind::SupplementaryColumn => PointSet::Columns,
        }
    }
}

/// Points placed in a fitted factor space without contributing mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplementaryProjection {
    pub labels: Vec<String>,
    /// One row per point, one column per factor.
    pub coords: Vec<Vec<f64>>,
    pub kind: SupplementaryKind,
}

/// Projects extra rows or columns through the transition formula.
///
/// For supplementary rows each entry of `profiles` is a length-J vector of
/// counts over the model's columns; the coordinate on factor k is the
/// normalized profile dotted with the column standard coordinates. Columns
/// work symmetrically against the row standard coordinates.
pub fn project_supplementary(
    model: &FactorModel,
    labels: &[String],
    profiles: &[Vec<f64>],
    kind: SupplementaryKind,
) -> Result<SupplementaryProjection> {
    if labels.len() != profiles.len() {
        return Err(GdaError::Shape(format!(
            "{} labels for {} supplementary profiles",
            labels.len(),
            profiles.len()
        )));
    }
    let opposite = match kind {
        SupplementaryKind::SupplementaryRow => PointSet::Columns,
        SupplementaryKind::SupplementaryColumn => PointSet::Rows,
    };
    let std_coords = model.standard_coords(opposite);
    let width = std_coords.nrows();
    let k = model.n_factors();

    let mut coords = Vec::with_capacity(profiles.len());
    for (label, profile) in labels.iter().zip(profiles) {
        if profile.len() != width {
            return Err(GdaError::Shape(format!(
                "supplementary profile {label:?} has length {}, model expects {width}",
                profile.len()
            )));
        }
        if let Some(&bad) = profile.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(GdaError::InvalidArgument(format!(
                "supplementary profile {label:?} has invalid entry {bad}"
            )));
        }
        let total: f64 = profile.iter().sum();
        if total <= 0.0 {
            return Err(GdaError::ZeroProfile {
                label: label.clone(),
            });
        }
        let point: Vec<f64> = (0..k)
            .map(|a| {
                profile
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| (x / total) * std_coords[(j, a)])
                    .sum()
            })
            .collect();
        coords.push(point);
    }
    Ok(SupplementaryProjection {
        labels: labels.to_vec(),
        coords,
        kind,
    })
}

/// Threshold for calling a point "close to the origin".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityConfig {
    /// Fraction of the RMS principal-point distance from the origin.
    pub fraction: f64,
}

impl Default for ProximityConfig {
    fn default() -> Self {
        Self { fraction: 0.1 }
    }
}

/// Full-space Euclidean norms of each row of `coords`.
pub fn origin_distances(coords: &DMatrix<f64>) -> Vec<f64> {
    coords.row_iter().map(|r| r.norm()).collect()
}

/// `fraction` times the unweighted RMS distance of the set's principal points
/// from the origin.
pub fn origin_proximity_threshold(model: &FactorModel, set: PointSet, cfg: ProximityConfig) -> f64 {
    let d = origin_distances(model.coords(set));
    if d.is_empty() {
        return 0.0;
    }
    let ms = d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64;
    cfg.fraction * ms.sqrt()
}

impl SupplementaryProjection {
    pub fn distances_from_origin(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    /// Flags points whose distance from the origin is below the proximity threshold.
    pub fn near_origin(&self, model: &FactorModel, cfg: ProximityConfig) -> Vec<bool> {
        let threshold = origin_proximity_threshold(model, self.kind.host_set(), cfg);
        self.distances_from_origin()
            .into_iter()
            .map(|d| d < threshold)
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}
