#![allow(dead_code)]

use gda_core::mca::{CategoricalDataset, Question, Role};
use gda_core::table::ContingencyTable;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Integer table without zero rows or columns.
pub fn table_strategy(
    max_rows: usize,
    max_cols: usize,
    max_cell: u32,
) -> impl Strategy<Value = ContingencyTable> {
    (2..=max_rows, 2..=max_cols).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(0..=max_cell, r * c).prop_map(move |cells| {
            let mut m = DMatrix::from_fn(r, c, |i, j| cells[i * c + j] as f64);
            fix_zero_lines(&mut m);
            ContingencyTable::from_matrix(m).unwrap()
        })
    })
}

pub fn fix_zero_lines(m: &mut DMatrix<f64>) {
    let (r, c) = m.shape();
    for i in 0..r {
        if m.row(i).sum() == 0.0 {
            m[(i, i % c)] = 1.0;
        }
    }
    for j in 0..c {
        if m.column(j).sum() == 0.0 {
            m[(j % r, j)] = 1.0;
        }
    }
}

/// Pearson chi-squared computed cell by cell from the raw counts.
pub fn chi_squared(t: &ContingencyTable) -> f64 {
    let m = t.counts();
    let n = m.sum();
    let rs: Vec<f64> = m.row_iter().map(|r| r.sum()).collect();
    let cs: Vec<f64> = m.column_iter().map(|c| c.sum()).collect();
    let mut chi = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let e = rs[i] * cs[j] / n;
            chi += (m[(i, j)] - e).powi(2) / e;
        }
    }
    chi
}

/// Chi-squared distance between two row profiles of the raw table.
pub fn chi_distance(t: &ContingencyTable, a: usize, b: usize) -> f64 {
    let m = t.counts();
    let n = m.sum();
    let ra = m.row(a).sum();
    let rb = m.row(b).sum();
    (0..m.ncols())
        .map(|j| {
            let c = m.column(j).sum() / n;
            (m[(a, j)] / ra - m[(b, j)] / rb).powi(2) / c
        })
        .sum::<f64>()
        .sqrt()
}

/// `n` individuals answering `q` principal questions with `k` categories
/// each, plus one supplementary question.
pub fn dataset_strategy(
    max_n: usize,
    max_q: usize,
    max_k: usize,
) -> impl Strategy<Value = CategoricalDataset> {
    (4..=max_n, 2..=max_q, 2..=max_k).prop_flat_map(|(n, q, k)| {
        proptest::collection::vec(0..k, n * (q + 1)).prop_map(move |cells| dataset(n, q, k, &cells))
    })
}

pub fn dataset(n: usize, q: usize, k: usize, cells: &[usize]) -> CategoricalDataset {
    let mut questions: Vec<Question> = (0..q)
        .map(|i| Question {
            label: format!("q{i}"),
            categories: (0..k).map(|c| format!("c{c}")).collect(),
            role: Role::Principal,
        })
        .collect();
    questions.push(Question {
        label: "s".into(),
        categories: (0..k).map(|c| format!("c{c}")).collect(),
        role: Role::Supplementary,
    });
    let responses = (0..n)
        .map(|i| (0..=q).map(|j| Some(cells[i * (q + 1) + j])).collect())
        .collect();
    CategoricalDataset::new(
        (0..n).map(|i| format!("i{i:03}")).collect(),
        questions,
        responses,
    )
    .unwrap()
}
