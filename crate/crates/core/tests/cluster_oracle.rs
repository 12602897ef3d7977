use std::collections::BTreeSet;

use gda_core::hcluster::{constrained_cluster, ultrametric, ward_cluster, Dendrogram, PointCloud};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Brute-force Ward: keep every pairwise criterion in a full matrix, update it
/// with the Lance-Williams recurrence after each merge and scan every pair at
/// every step. Returns (leaf sets merged, height) per step.
fn lance_williams(
    points: &[Vec<f64>],
    masses: &[f64],
    labels: &[String],
) -> Vec<(BTreeSet<usize>, BTreeSet<usize>, f64)> {
    let p = points.len();
    let mut members: Vec<BTreeSet<usize>> = (0..p).map(|i| BTreeSet::from([i])).collect();
    let mut mass = masses.to_vec();
    let mut alive = vec![true; p];
    let mut d = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            d[i][j] = masses[i] * masses[j] / (masses[i] + masses[j]) * d2;
        }
    }
    let key = |m: &BTreeSet<usize>| m.iter().map(|&i| labels[i].clone()).min().unwrap();
    let mut out = Vec::new();
    for _ in 1..p {
        let mut best: Option<(f64, (String, String), usize, usize)> = None;
        for i in 0..p {
            for j in i + 1..p {
                if !(alive[i] && alive[j]) {
                    continue;
                }
                let (ki, kj) = (key(&members[i]), key(&members[j]));
                let pair = if ki <= kj { (ki, kj) } else { (kj, ki) };
                let cand = (d[i][j], pair, i, j);
                let take = match &best {
                    None => true,
                    Some(b) => cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1),
                };
                if take {
                    best = Some(cand);
                }
            }
        }
        let (h, _, a, b) = best.unwrap();
        out.push((members[a].clone(), members[b].clone(), h));
        for c in 0..p {
            if alive[c] && c != a && c != b {
                let (ma, mb, mc) = (mass[a], mass[b], mass[c]);
                let v = ((ma + mc) * d[a][c] + (mb + mc) * d[b][c] - mc * d[a][b]) / (ma + mb + mc);
                d[a][c] = v;
                d[c][a] = v;
            }
        }
        let moved = members[b].clone();
        members[a].extend(moved);
        mass[a] += mass[b];
        alive[b] = false;
    }
    out
}

fn leaf_sets(d: &Dendrogram) -> Vec<(BTreeSet<usize>, BTreeSet<usize>, f64)> {
    let p = d.n_leaves();
    let mut members: Vec<BTreeSet<usize>> = (0..p).map(|i| BTreeSet::from([i])).collect();
    let mut out = Vec::new();
    for m in d.merges() {
        let (l, r) = (members[m.left].clone(), members[m.right].clone());
        out.push((l.clone(), r.clone(), m.height));
        members.push(l.union(&r).copied().collect());
    }
    out
}

fn same_merges(
    a: &[(BTreeSet<usize>, BTreeSet<usize>, f64)],
    b: &[(BTreeSet<usize>, BTreeSet<usize>, f64)],
) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            let sets = (&x.0, &x.1) == (&y.0, &y.1) || (&x.0, &x.1) == (&y.1, &y.0);
            sets && (x.2 - y.2).abs() <= 1e-12 * x.2.abs().max(1.0)
        })
}

fn random_cloud(rng: &mut ChaCha8Rng, p: usize, dim: usize, weighted: bool) -> PointCloud {
    let labels: Vec<String> = (0..p).map(|i| format!("p{i}")).collect();
    let coords = (0..p)
        .map(|_| (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let masses = (0..p)
        .map(|_| {
            if weighted {
                rng.random_range(0.1..3.0)
            } else {
                1.0
            }
        })
        .collect();
    PointCloud::with_masses(labels, coords, masses).unwrap()
}

#[test]
fn ward_matches_exhaustive_lance_williams_on_small_clouds() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..200 {
        let p = rng.random_range(2..=8);
        let dim = rng.random_range(1..=4);
        let cloud = random_cloud(&mut rng, p, dim, case % 2 == 1);
        let got = leaf_sets(&ward_cluster(&cloud).unwrap());
        let want = lance_williams(cloud.coords(), cloud.masses(), cloud.labels());
        assert!(same_merges(&got, &want), "case {case}: {got:?} vs {want:?}");
    }
}

#[test]
fn ward_matches_oracle_with_tied_distances() {
    // Integer grid points produce many exactly equal criteria.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let p = rng.random_range(3..=8);
        let labels: Vec<String> = (0..p).map(|i| format!("p{i}")).collect();
        let coords: Vec<Vec<f64>> = (0..p)
            .map(|_| vec![rng.random_range(0..3) as f64, rng.random_range(0..3) as f64])
            .collect();
        let cloud = PointCloud::new(labels, coords).unwrap();
        let got = leaf_sets(&ward_cluster(&cloud).unwrap());
        let want = lance_williams(cloud.coords(), cloud.masses(), cloud.labels());
        assert!(same_merges(&got, &want), "case {case}");
    }
}

fn assert_ultrametric(d: &Dendrogram) {
    let u = ultrametric(d);
    let p = u.nrows();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                assert!(u[(a, c)] <= u[(a, b)].max(u[(b, c)]) + 1e-12);
            }
        }
    }
}

#[test]
fn fifty_point_ultrametrics_satisfy_strong_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..5 {
        let cloud = random_cloud(&mut rng, 50, 3, case % 2 == 0);
        assert_ultrametric(&ward_cluster(&cloud).unwrap());
        assert_ultrametric(&constrained_cluster(&cloud.clone().in_given_order().unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_scales_heights_by_square(
        pts in proptest::collection::vec(proptest::collection::vec(-10.0f64..10.0, 2), 2..12),
        s in 0.1f64..10.0,
    ) {
        let labels: Vec<String> = (0..pts.len()).map(|i| format!("p{i:02}")).collect();
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x * s).collect()).collect();
        let a = ward_cluster(&PointCloud::new(labels.clone(), pts).unwrap()).unwrap();
        let b = ward_cluster(&PointCloud::new(labels, scaled).unwrap()).unwrap();
        for (x, y) in a.merges().iter().zip(b.merges()) {
            prop_assert_eq!((x.left, x.right), (y.left, y.right));
            prop_assert!((y.height - s * s * x.height).abs() <= 1e-9 * y.height.max(1.0));
        }
    }

    #[test]
    fn constrained_merges_only_adjacent_blocks(
        pts in proptest::collection::vec(proptest::collection::vec(-10.0f64..10.0, 2), 2..15),
    ) {
        let labels: Vec<String> = (0..pts.len()).map(|i| format!("s{i:02}")).collect();
        let d = constrained_cluster(&PointCloud::new(labels, pts).unwrap().in_given_order().unwrap()).unwrap();
        for (l, r, _) in leaf_sets(&d) {
            let lmax = *l.iter().max().unwrap();
            let rmin = *r.iter().min().unwrap();
            let lmin = *l.iter().min().unwrap();
            let rmax = *r.iter().max().unwrap();
            // Each side is a contiguous run and they touch.
            prop_assert_eq!(lmax - lmin + 1, l.len());
            prop_assert_eq!(rmax - rmin + 1, r.len());
            prop_assert_eq!(lmax + 1, rmin);
        }
        let levels = d.levels();
        prop_assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    }
}
