//! One-sided Jacobi SVD. Both singular vector sets come out orthonormal to
//! working precision, including those of small singular values.

use nalgebra::DMatrix;

use super::RANK_TOLERANCE;

const MAX_SWEEPS: usize = 80;

/// Nonzero singular values (descending) with left and right singular vectors
/// as columns.
pub(super) fn singular_triplets(s: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    // Orthogonalize the columns of a tall matrix: A V = W, W^T W diagonal.
    let wide = s.nrows() < s.ncols();
    let mut w = if wide { s.transpose() } else { s.clone() };
    let n = w.ncols();
    let mut v = DMatrix::<f64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                rotate(&mut w, p, q, c, sn);
                rotate(&mut v, p, q, c, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|k| w.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let top = order.first().map_or(0.0, |&a| norms[a] * norms[a]);
    let cutoff = RANK_TOLERANCE * top.max(1.0);
    let kept: Vec<usize> = order
        .into_iter()
        .take_while(|&a| norms[a] * norms[a] > cutoff)
        .collect();

    let sigma: Vec<f64> = kept.iter().map(|&a| norms[a]).collect();
    let tall_vecs = DMatrix::from_fn(w.nrows(), kept.len(), |i, k| w[(i, kept[k])] / sigma[k]);
    let small_vecs = DMatrix::from_fn(n, kept.len(), |i, k| v[(i, kept[k])]);
    if wide {
        (sigma, small_vecs, tall_vecs)
    } else {
        (sigma, tall_vecs, small_vecs)
    }
}

fn rotate(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(s: &DMatrix<f64>) {
        let (sigma, u, v) = singular_triplets(s);
        let back = &u
            * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sigma.clone()))
            * v.transpose();
        assert!((back - s).amax() < 1e-13);
        let k = sigma.len();
        assert!((u.transpose() * &u - DMatrix::identity(k, k)).amax() < 1e-13);
        assert!((v.transpose() * &v - DMatrix::identity(k, k)).amax() < 1e-13);
        assert!(sigma.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn recomposes_wide_and_tall() {
        let s = DMatrix::from_row_slice(2, 3, &[3.0, 1.0, 0.5, -1.0, 2.0, 4.0]);
        check(&s);
        check(&s.transpose());
    }

    #[test]
    fn rank_deficient_keeps_true_rank() {
        let a = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, -1.0]);
        let b = DMatrix::from_row_slice(1, 4, &[0.5, -1.0, 2.0, 1.0]);
        let s = &a * &b;
        let (sigma, _, _) = singular_triplets(&s);
        assert_eq!(sigma.len(), 1);
        check(&s);
    }

    #[test]
    fn small_singular_value_keeps_orthonormal_vectors() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1e-4, 0.0, 0.0, 0.0, 0.3]);
        let (sigma, u, v) = singular_triplets(&s);
        assert_eq!(sigma.len(), 3);
        assert!((sigma[2] - 1e-4).abs() < 1e-18);
        assert!((u.column(2).norm() - 1.0).abs() < 1e-15);
        assert!((v.column(2).norm() - 1.0).abs() < 1e-15);
    }
}
