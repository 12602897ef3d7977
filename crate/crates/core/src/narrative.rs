//! Distances in the full factor space between tracked terms and text
//! segments, and between campaign initiators and campaign centres of gravity.
//!
//! Row-to-column distances use the principal coordinates of both sets over
//! all factors. CA itself defines no canonical row/column distance; this is
//! a convention, and a lower value reads as "closer to that segment".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GdaError, Result};
use crate::factor::{
    origin_proximity_threshold, FactorModel, PointSet, ProximityConfig, SupplementaryKind,
    SupplementaryProjection,
};

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean distance restricted to the given 0-based factor indices.
pub fn euclidean_on(a: &[f64], b: &[f64], axes: &[usize]) -> f64 {
    axes.iter()
        .map(|&k| (a[k] - b[k]).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrajectoryOptions {
    /// Trailing moving-average window; `None` or 1 leaves distances as is.
    pub moving_average: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub term: String,
    pub segment_ids: Vec<String>,
    pub distances: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothed: Option<Vec<f64>>,
}

fn term_point(
    model: &FactorModel,
    term: &str,
    supplementary: Option<&SupplementaryProjection>,
) -> Result<Vec<f64>> {
    if let Ok(j) = model.index_of(PointSet::Columns, term) {
        return Ok(model.point(PointSet::Columns, j));
    }
    if let Some(s) = supplementary.filter(|s| s.kind == SupplementaryKind::SupplementaryColumn) {
        if let Some(i) = s.index_of(term) {
            return Ok(s.coords[i].clone());
        }
    }
    Err(GdaError::UnknownLabel {
        kind: "term",
        label: term.to_string(),
    })
}

/// Per-segment distance between a term and each segment. An empty
/// `segments` slice means every row of the model, in model order.
pub fn trajectory(model: &FactorModel, term: &str, segments: &[String]) -> Result<Trajectory> {
    trajectory_with(model, term, segments, None, TrajectoryOptions::default())
}

pub fn trajectory_with(
    model: &FactorModel,
    term: &str,
    segments: &[String],
    supplementary: Option<&SupplementaryProjection>,
    opts: TrajectoryOptions,
) -> Result<Trajectory> {
    let t = term_point(model, term, supplementary)?;
    let segment_ids: Vec<String> = if segments.is_empty() {
        model.row_labels().to_vec()
    } else {
        segments.to_vec()
    };
    let distances = segment_ids
        .iter()
        .map(|s| {
            let i = model.index_of(PointSet::Rows, s)?;
            Ok(euclidean(&t, &model.point(PointSet::Rows, i)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let smoothed = match opts.moving_average {
        Some(w) if w > 1 => Some(moving_average(&distances, w)),
        _ => None,
    };
    Ok(Trajectory {
        term: term.to_string(),
        segment_ids,
        distances,
        smoothed,
    })
}

/// Mean of the last `window` values up to each position.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    (0..xs.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            let slice = &xs[lo..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactRecord {
    pub group: String,
    pub initiator: String,
    /// False when the initiator is a row point outside the group.
    pub initiator_in_group: bool,
    pub members: usize,
    pub mass: f64,
    pub centroid: Vec<f64>,
    pub initiator_coords: Vec<f64>,
    pub distance: f64,
    /// Mass-weighted squared spread of the members about the centroid.
    pub inertia: f64,
}

/// Distance from each group's initiator to the group's centre of gravity.
pub fn impact(
    model: &FactorModel,
    groups: &BTreeMap<String, Vec<String>>,
    initiators: &BTreeMap<String, String>,
) -> Result<Vec<ImpactRecord>> {
    if let Some(g) = initiators.keys().find(|g| !groups.contains_key(*g)) {
        return Err(GdaError::UnknownLabel {
            kind: "group",
            label: g.clone(),
        });
    }
    let f = model.row_coords();
    let r = model.row_masses();
    let k = model.n_factors();
    let mut out = Vec::with_capacity(groups.len());
    for (group, members) in groups {
        if members.is_empty() {
            return Err(GdaError::Empty("group"));
        }
        let initiator = initiators.get(group).ok_or_else(|| {
            GdaError::InvalidArgument(format!("group {group:?} has no initiator"))
        })?;
        let idx = members
            .iter()
            .map(|m| model.index_of(PointSet::Rows, m))
            .collect::<Result<Vec<_>>>()?;
        let mass: f64 = idx.iter().map(|&i| r[i]).sum();
        let centroid: Vec<f64> = (0..k)
            .map(|a| idx.iter().map(|&i| r[i] * f[(i, a)]).sum::<f64>() / mass)
            .collect();
        let inertia = idx
            .iter()
            .map(|&i| {
                r[i] * (0..k)
                    .map(|a| (f[(i, a)] - centroid[a]).powi(2))
                    .sum::<f64>()
            })
            .sum();
        let ii = model.index_of(PointSet::Rows, initiator)?;
        let initiator_coords = model.point(PointSet::Rows, ii);
        out.push(ImpactRecord {
            group: group.clone(),
            initiator: initiator.clone(),
            initiator_in_group: members.contains(initiator),
            members: members.len(),
            mass,
            distance: euclidean(&initiator_coords, &centroid),
            centroid,
            initiator_coords,
            inertia,
        });
    }
    Ok(out)
}

/// Group ids from closest to farthest initiator/centroid pair.
pub fn rank_by_distance(records: &[ImpactRecord]) -> Vec<String> {
    let mut v: Vec<&ImpactRecord> = records.iter().collect();
    v.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| a.group.cmp(&b.group))
    });
    v.into_iter().map(|r| r.group.clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityRecord {
    pub label: String,
    pub set: PointSet,
    pub distance: f64,
    pub near_origin: bool,
}

/// Full-space distance from the origin for principal points, flagged against
/// the set's proximity threshold.
pub fn origin_proximity(
    model: &FactorModel,
    points: &[(PointSet, String)],
    cfg: ProximityConfig,
) -> Result<Vec<ProximityRecord>> {
    let rows_t = origin_proximity_threshold(model, PointSet::Rows, cfg);
    let cols_t = origin_proximity_threshold(model, PointSet::Columns, cfg);
    points
        .iter()
        .map(|(set, label)| {
            let i = model.index_of(*set, label)?;
            let distance = model
                .point(*set, i)
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            let threshold = match set {
                PointSet::Rows => rows_t,
                PointSet::Columns => cols_t,
            };
            Ok(ProximityRecord {
                label: label.clone(),
                set: *set,
                distance,
                near_origin: distance < threshold,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::fit_ca;
    use crate::table::ContingencyTable;
    use nalgebra::DMatrix;

    fn model(rows: &[Vec<f64>]) -> FactorModel {
        let t =
            ContingencyTable::from_matrix(DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| {
                rows[i][j]
            }))
            .unwrap();
        fit_ca(&t).unwrap()
    }

    #[test]
    fn concentrated_term_is_closest_to_its_segment() {
        // Column c1 occurs almost only in r1.
        let m = model(&[vec![9.0, 1.0], vec![1.0, 9.0]]);
        let tr = trajectory(&m, "c1", &[]).unwrap();
        // 2x2 oracle: r = c = (1/2, 1/2), sigma = 0.8, standard coords +-1,
        // so F = (0.8, -0.8) and G = (0.8, -0.8).
        assert!((m.row_coords()[(0, 0)].abs() - 0.8).abs() < 1e-12);
        assert!((tr.distances[0] - 0.0).abs() < 1e-12);
        assert!((tr.distances[1] - 1.6).abs() < 1e-12);
        assert!(trajectory(&m, "nope", &[]).is_err());
        assert!(trajectory(&m, "c1", &["r9".into()]).is_err());
    }

    #[test]
    fn moving_average_window() {
        assert_eq!(
            moving_average(&[1.0, 3.0, 5.0, 7.0], 2),
            vec![1.0, 2.0, 4.0, 6.0]
        );
    }

    #[test]
    fn singleton_and_pair_groups() {
        let m = model(&[
            vec![5.0, 1.0, 2.0],
            vec![1.0, 6.0, 1.0],
            vec![2.0, 2.0, 7.0],
            vec![4.0, 4.0, 4.0],
        ]);
        let groups = BTreeMap::from([
            ("g1".to_string(), vec!["r1".to_string()]),
            ("g2".to_string(), vec!["r4".to_string()]),
        ]);
        let inits = BTreeMap::from([
            ("g1".to_string(), "r1".to_string()),
            ("g2".to_string(), "r2".to_string()),
        ]);
        let rec = impact(&m, &groups, &inits).unwrap();
        assert!(rec[0].distance < 1e-15);
        assert!(rec[0].initiator_in_group);
        assert!(!rec[1].initiator_in_group);
        assert_eq!(rank_by_distance(&rec), vec!["g1", "g2"]);

        let empty = BTreeMap::from([("g".to_string(), vec![])]);
        let i = BTreeMap::from([("g".to_string(), "r1".to_string())]);
        assert!(matches!(impact(&m, &empty, &i), Err(GdaError::Empty(_))));
    }

    #[test]
    fn proximity_of_extreme_point() {
        let m = model(&[
            vec![20.0, 1.0, 1.0],
            vec![1.0, 8.0, 3.0],
            vec![2.0, 3.0, 9.0],
            vec![5.0, 5.0, 5.0],
        ]);
        let d = crate::factor::origin_distances(m.row_coords());
        let far = (0..4).max_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
        let res = origin_proximity(
            &m,
            &[(PointSet::Rows, m.row_labels()[far].clone())],
            ProximityConfig::default(),
        )
        .unwrap();
        assert!(!res[0].near_origin);
        assert!((res[0].distance - d[far]).abs() < 1e-15);
    }
}
