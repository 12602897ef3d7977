use std::cmp::Ordering;

use super::{candidate_cmp, ordered_pair, ward_increase, Dendrogram, Merge, PointCloud};
use crate::error::Result;

/// Unconstrained Ward clustering.
///
/// Works on the matrix of pairwise Ward criteria, updated after every merge
/// with the Lance-Williams recurrence
/// `D(a+b, c) = ((m_a+m_c) D(a,c) + (m_b+m_c) D(b,c) - m_c D(a,b)) / (m_a+m_b+m_c)`.
/// Each active cluster caches its best partner so a step only rescans rows
/// whose partner was consumed.
pub fn ward_cluster(cloud: &PointCloud) -> Result<Dendrogram> {
    cloud.check_clusterable()?;
    let p = cloud.len();
    let coords = cloud.coords();
    let mut mass = cloud.masses().to_vec();
    let mut key: Vec<String> = cloud.labels().to_vec();
    let mut node: Vec<usize> = (0..p).collect();
    let mut size = vec![1usize; p];
    let mut active = vec![true; p];

    let mut d = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in i + 1..p {
            let w = ward_increase(mass[i], &coords[i], mass[j], &coords[j]);
            d[i][j] = w;
            d[j][i] = w;
        }
    }

    let better =
        |d: &Vec<Vec<f64>>, key: &[String], i: usize, j: usize, best: Option<usize>| -> bool {
            match best {
                None => true,
                Some(b) => {
                    candidate_cmp(
                        d[i][j],
                        ordered_pair(&key[i], &key[j]),
                        d[i][b],
                        ordered_pair(&key[i], &key[b]),
                    ) == Ordering::Less
                }
            }
        };
    let rescan = |d: &Vec<Vec<f64>>, key: &[String], active: &[bool], i: usize| -> Option<usize> {
        let mut best = None;
        for (j, _) in active.iter().enumerate().filter(|&(_, &on)| on) {
            if j != i && better(d, key, i, j, best) {
                best = Some(j);
            }
        }
        best
    };

    let mut nn: Vec<Option<usize>> = (0..p).map(|i| rescan(&d, &key, &active, i)).collect();
    let mut merges = Vec::with_capacity(p - 1);

    for t in 0..p - 1 {
        let mut pick: Option<(usize, usize)> = None;
        for i in (0..p).filter(|&i| active[i]) {
            let j = nn[i].expect("another active cluster exists");
            let take = match pick {
                None => true,
                Some((a, b)) => {
                    candidate_cmp(
                        d[i][j],
                        ordered_pair(&key[i], &key[j]),
                        d[a][b],
                        ordered_pair(&key[a], &key[b]),
                    ) == Ordering::Less
                }
            };
            if take {
                pick = Some((i, j));
            }
        }
        let (i, j) = pick.expect("at least two active clusters");
        // Survivor slot holds the cluster with the smaller key; it becomes the left child.
        let (a, b) = if key[i] <= key[j] { (i, j) } else { (j, i) };
        let height = d[a][b];
        merges.push(Merge {
            left: node[a],
            right: node[b],
            height,
            size: size[a] + size[b],
        });

        let (ma, mb) = (mass[a], mass[b]);
        for c in 0..p {
            if active[c] && c != a && c != b {
                let mc = mass[c];
                let v = ((ma + mc) * d[a][c] + (mb + mc) * d[b][c] - mc * height) / (ma + mb + mc);
                d[a][c] = v;
                d[c][a] = v;
            }
        }
        active[b] = false;
        mass[a] = ma + mb;
        size[a] += size[b];
        node[a] = p + t;
        if key[b] < key[a] {
            key[a] = key[b].clone();
        }

        for c in 0..p {
            if !active[c] {
                continue;
            }
            if c == a || nn[c] == Some(a) || nn[c] == Some(b) {
                nn[c] = rescan(&d, &key, &active, c);
            } else if better(&d, &key, c, a, nn[c]) {
                nn[c] = Some(a);
            }
        }
    }
    Dendrogram::new(cloud.labels().to_vec(), merges, false)
}
