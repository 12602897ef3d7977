use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{candidate_cmp, ordered_pair, ward_increase, Dendrogram, Merge, PointCloud};
use crate::error::{GdaError, Result};

struct Block {
    node: usize,
    mass: f64,
    centroid: Vec<f64>,
    key: String,
    size: usize,
}

/// Ward clustering where only blocks adjacent in the sequence order may merge.
///
/// The left child of every merge is the earlier block, so the dendrogram's
/// leaf order is the sequence order. Heights can invert; see
/// [`Dendrogram::levels`].
pub fn constrained_cluster(cloud: &PointCloud) -> Result<Dendrogram> {
    let order = cloud.order().ok_or(GdaError::MissingOrder)?.to_vec();
    cloud.check_clusterable()?;
    let p = cloud.len();
    let mut blocks: Vec<Block> = order
        .iter()
        .map(|&i| Block {
            node: i,
            mass: cloud.masses()[i],
            centroid: cloud.coords()[i].clone(),
            key: cloud.labels()[i].clone(),
            size: 1,
        })
        .collect();

    let mut merges = Vec::with_capacity(p - 1);
    for t in 0..p - 1 {
        let mut pick = 0;
        let mut best = f64::INFINITY;
        for k in 0..blocks.len() - 1 {
            let (x, y) = (&blocks[k], &blocks[k + 1]);
            let w = ward_increase(x.mass, &x.centroid, y.mass, &y.centroid);
            let cmp = if k == 0 {
                Ordering::Less
            } else {
                let (bx, by) = (&blocks[pick], &blocks[pick + 1]);
                candidate_cmp(
                    w,
                    ordered_pair(&x.key, &y.key),
                    best,
                    ordered_pair(&bx.key, &by.key),
                )
            };
            if cmp == Ordering::Less {
                pick = k;
                best = w;
            }
        }
        let right = blocks.remove(pick + 1);
        let left = &mut blocks[pick];
        merges.push(Merge {
            left: left.node,
            right: right.node,
            height: best,
            size: left.size + right.size,
        });
        let mass = left.mass + right.mass;
        for (c, r) in left.centroid.iter_mut().zip(&right.centroid) {
            *c = (left.mass * *c + right.mass * r) / mass;
        }
        left.mass = mass;
        left.size += right.size;
        left.node = p + t;
        if right.key < left.key {
            left.key = right.key;
        }
    }
    Dendrogram::new(cloud.labels().to_vec(), merges, true)
}

/// A boundary between two sequence-adjacent leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePoint {
    /// Number of leaves before the boundary: position 5 is the boundary 5|6.
    pub position: usize,
    pub left: String,
    pub right: String,
    /// Level at which the two sides of the boundary first merge.
    pub height: f64,
}

/// Boundaries ranked by the (monotonized) level at which their two sides
/// first merge, highest first; equal heights keep sequence order.
pub fn change_points(dend: &Dendrogram, top_m: usize) -> Result<Vec<ChangePoint>> {
    if top_m < 1 {
        return Err(GdaError::InvalidArgument("top_m must be at least 1".into()));
    }
    if !dend.is_constrained() {
        return Err(GdaError::InvalidArgument(
            "change points need a dendrogram from a sequence-constrained run".into(),
        ));
    }
    let p = dend.n_leaves();
    let leaf_order = dend.leaf_order();
    let mut pos = vec![0; p];
    for (k, &leaf) in leaf_order.iter().enumerate() {
        pos[leaf] = k;
    }
    // Every merge of adjacent blocks closes exactly one boundary: the one
    // after the last leaf of its left child.
    let mut last = pos.clone();
    let levels = dend.levels();
    let mut points = Vec::with_capacity(p - 1);
    for (t, m) in dend.merges().iter().enumerate() {
        let end = last[m.left];
        points.push(ChangePoint {
            position: end + 1,
            left: dend.labels()[leaf_order[end]].clone(),
            right: dend.labels()[leaf_order[end + 1]].clone(),
            height: levels[t],
        });
        last.push(last[m.right]);
    }
    points.sort_by(|a, b| {
        b.height
            .total_cmp(&a.height)
            .then_with(|| a.position.cmp(&b.position))
    });
    points.truncate(top_m);
    Ok(points)
}
