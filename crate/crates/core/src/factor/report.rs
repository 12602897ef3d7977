use serde::{Deserialize, Serialize};

use super::{FactorModel, PointSet};
use crate::error::{GdaError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisInertia {
    /// 1-based factor number.
    pub axis: usize,
    pub inertia: f64,
    pub percent: f64,
    pub cumulative_percent: f64,
}

/// Per-factor inertia with percentages of the total. Empty when the model
/// has no factors.
pub fn inertia_report(model: &FactorModel) -> Vec<AxisInertia> {
    let lambda = model.principal_inertias();
    let total: f64 = lambda.iter().sum();
    let mut cumulative = 0.0;
    lambda
        .iter()
        .enumerate()
        .map(|(a, &l)| {
            let percent = 100.0 * l / total;
            cumulative += percent;
            AxisInertia {
                axis: a + 1,
                inertia: l,
                percent,
                cumulative_percent: cumulative,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contributor {
    pub label: String,
    pub index: usize,
    pub contribution: f64,
}

/// Ranks points of one set by their contribution to a set of axes.
///
/// `axes` are 1-based. With more than one axis the contribution is the
/// inertia-weighted mean `sum_k lambda_k CTR_ik / sum_k lambda_k`, which is
/// the point's share of the inertia of the subspace. Ties are broken by label.
pub fn top_contributors(
    model: &FactorModel,
    set: PointSet,
    axes: &[usize],
    m: usize,
) -> Result<Vec<Contributor>> {
    if axes.is_empty() {
        return Err(GdaError::InvalidArgument("no axes given".into()));
    }
    let k = model.n_factors();
    for &a in axes {
        if a == 0 || a > k {
            return Err(GdaError::AxisOutOfRange {
                axis: a,
                available: k,
            });
        }
    }
    let lambda = model.principal_inertias();
    let weight: f64 = axes.iter().map(|&a| lambda[a - 1]).sum();
    let ctr = model.contributions(set);
    let labels = model.labels(set);

    let mut ranked: Vec<Contributor> = (0..labels.len())
        .map(|i| Contributor {
            label: labels[i].clone(),
            index: i,
            contribution: axes
                .iter()
                .map(|&a| lambda[a - 1] * ctr[(i, a - 1)])
                .sum::<f64>()
                / weight,
        })
        .collect();
    ranked.sort_by(|x, y| {
        y.contribution
            .total_cmp(&x.contribution)
            .then_with(|| x.label.cmp(&y.label))
    });
    ranked.truncate(m);
    Ok(ranked)
}
