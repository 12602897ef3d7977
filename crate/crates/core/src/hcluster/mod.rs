//! Ward agglomerative clustering of points in factor space.
//!
//! Merge heights are the Ward criterion: the increase in within-cluster
//! inertia `m_a m_b / (m_a + m_b) * |c_a - c_b|^2` caused by a merge. Nodes
//! are numbered like SciPy linkage output: leaves `0..P`, merge `t` creates
//! node `P + t`.

mod constrained;
mod ward;

pub use constrained::{change_points, constrained_cluster, ChangePoint};
pub use ward::ward_cluster;

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GdaError, Result};
use crate::factor::{FactorModel, PointSet};

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    labels: Vec<String>,
    coords: Vec<Vec<f64>>,
    masses: Vec<f64>,
    order: Option<Vec<usize>>,
}

impl PointCloud {
    /// Cloud with uniform unit masses.
    pub fn new(labels: Vec<String>, coords: Vec<Vec<f64>>) -> Result<Self> {
        let masses = vec![1.0; labels.len()];
        Self::with_masses(labels, coords, masses)
    }

    pub fn with_masses(
        labels: Vec<String>,
        coords: Vec<Vec<f64>>,
        masses: Vec<f64>,
    ) -> Result<Self> {
        if labels.len() != coords.len() || labels.len() != masses.len() {
            return Err(GdaError::InvalidCloud(format!(
                "{} labels, {} coordinate rows, {} masses",
                labels.len(),
                coords.len(),
                masses.len()
            )));
        }
        let dim = coords.first().map_or(0, Vec::len);
        if coords.iter().any(|c| c.len() != dim) {
            return Err(GdaError::InvalidCloud("ragged coordinates".into()));
        }
        if coords.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GdaError::InvalidCloud("non-finite coordinate".into()));
        }
        if masses.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(GdaError::InvalidCloud("masses must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(GdaError::InvalidCloud(format!("duplicate label {dup:?}")));
        }
        Ok(Self {
            labels,
            coords,
            masses,
            order: None,
        })
    }

    /// Attaches a sequence order: `order[k]` is the point at position `k`.
    pub fn with_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() {
            return Err(GdaError::InvalidCloud(
                "order is not a permutation of the points".into(),
            ));
        }
        for &i in &order {
            if i >= seen.len() || seen[i] {
                return Err(GdaError::InvalidCloud(
                    "order is not a permutation of the points".into(),
                ));
            }
            seen[i] = true;
        }
        self.order = Some(order);
        Ok(self)
    }

    /// Sequence order equal to the point order.
    pub fn in_given_order(self) -> Result<Self> {
        let n = self.len();
        self.with_order((0..n).collect())
    }

    /// Principal coordinates of one point set, weighted by its masses.
    /// `n_axes` keeps only the leading factors.
    pub fn from_model(model: &FactorModel, set: PointSet, n_axes: Option<usize>) -> Result<Self> {
        let f = model.coords(set);
        let k = n_axes.map_or(f.ncols(), |a| a.min(f.ncols()));
        let coords = (0..f.nrows())
            .map(|i| (0..k).map(|a| f[(i, a)]).collect())
            .collect();
        Self::with_masses(
            model.labels(set).to_vec(),
            coords,
            model.masses(set).iter().copied().collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn order(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    pub(crate) fn check_clusterable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(GdaError::TooFewPoints {
                needed: 2,
                got: self.len(),
            });
        }
        if self.dim() == 0 {
            return Err(GdaError::InvalidCloud("points have no coordinates".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Raw Ward criterion value of this merge.
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    labels: Vec<String>,
    merges: Vec<Merge>,
    constrained: bool,
}

impl Dendrogram {
    /// Validates that `merges` forms a binary tree over the leaves.
    pub fn new(labels: Vec<String>, merges: Vec<Merge>, constrained: bool) -> Result<Self> {
        let p = labels.len();
        if p < 2 || merges.len() != p - 1 {
            return Err(GdaError::InvalidArgument(format!(
                "{} merges for {p} leaves",
                merges.len()
            )));
        }
        let mut used = vec![false; 2 * p - 1];
        let mut size = vec![1usize; 2 * p - 1];
        for (t, m) in merges.iter().enumerate() {
            let node = p + t;
            for child in [m.left, m.right] {
                if child >= node || used[child] {
                    return Err(GdaError::InvalidArgument(format!(
                        "merge {t} reuses or forward-references node {child}"
                    )));
                }
                used[child] = true;
            }
            size[node] = size[m.left] + size[m.right];
            if size[node] != m.size {
                return Err(GdaError::InvalidArgument(format!(
                    "merge {t} has size {}, expected {}",
                    m.size, size[node]
                )));
            }
            if !(m.height.is_finite() && m.height >= 0.0) {
                return Err(GdaError::InvalidArgument(format!(
                    "merge {t} has invalid height {}",
                    m.height
                )));
            }
        }
        Ok(Self {
            labels,
            merges,
            constrained,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    /// Produced by a sequence-constrained run.
    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    pub fn raw_heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Heights made non-decreasing by a running maximum in merge order.
    pub fn levels(&self) -> Vec<f64> {
        let mut top = 0.0f64;
        self.merges
            .iter()
            .map(|m| {
                top = top.max(m.height);
                top
            })
            .collect()
    }

    pub fn root(&self) -> usize {
        2 * self.n_leaves() - 2
    }

    /// Leaves in left-to-right drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let p = self.n_leaves();
        let mut out = Vec::with_capacity(p);
        let mut stack = vec![self.root()];
        while let Some(node) = stack.pop() {
            if node < p {
                out.push(node);
            } else {
                let m = &self.merges[node - p];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }

    /// Leaf members of every node, indexed by node id.
    pub(crate) fn members(&self) -> Vec<Vec<usize>> {
        let p = self.n_leaves();
        let mut members: Vec<Vec<usize>> = (0..p).map(|i| vec![i]).collect();
        for m in &self.merges {
            let mut both = members[m.left].clone();
            both.extend_from_slice(&members[m.right]);
            members.push(both);
        }
        members
    }

    pub fn leaf_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GdaError::UnknownLabel {
                kind: "leaf",
                label: label.to_string(),
            })
    }
}

/// Induced ultrametric: entry `(a, b)` is the level of the lowest merge that
/// joins leaves `a` and `b`.
pub fn ultrametric(dend: &Dendrogram) -> DMatrix<f64> {
    let p = dend.n_leaves();
    let levels = dend.levels();
    let members = dend.members();
    let mut u = DMatrix::zeros(p, p);
    for (t, m) in dend.merges.iter().enumerate() {
        for &a in &members[m.left] {
            for &b in &members[m.right] {
                u[(a, b)] = levels[t];
                u[(b, a)] = levels[t];
            }
        }
    }
    u
}

/// Ultrametric distance between two leaves named by label.
pub fn ultrametric_distance(dend: &Dendrogram, a: &str, b: &str) -> Result<f64> {
    let ia = dend.leaf_index(a)?;
    let ib = dend.leaf_index(b)?;
    if ia == ib {
        return Ok(0.0);
    }
    let p = dend.n_leaves();
    let levels = dend.levels();
    let mut parent = vec![usize::MAX; 2 * p - 1];
    for (t, m) in dend.merges.iter().enumerate() {
        parent[m.left] = p + t;
        parent[m.right] = p + t;
    }
    let mut ancestors = std::collections::HashSet::new();
    let mut n = ia;
    while n != usize::MAX {
        ancestors.insert(n);
        n = parent[n];
    }
    let mut n = ib;
    while !ancestors.contains(&n) {
        n = parent[n];
    }
    Ok(levels[n - p])
}

/// Ward criterion for merging two clusters.
pub(crate) fn ward_increase(ma: f64, ca: &[f64], mb: f64, cb: &[f64]) -> f64 {
    let d2: f64 = ca.iter().zip(cb).map(|(x, y)| (x - y) * (x - y)).sum();
    ma * mb / (ma + mb) * d2
}

/// Candidate ordering: smaller criterion first, then the lexicographically
/// smaller (key, key) pair, where a cluster's key is its smallest leaf label.
pub(crate) fn candidate_cmp(d1: f64, k1: (&str, &str), d2: f64, k2: (&str, &str)) -> Ordering {
    d1.total_cmp(&d2).then_with(|| k1.cmp(&k2))
}

pub(crate) fn ordered_pair<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
