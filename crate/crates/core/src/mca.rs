//! Multiple correspondence analysis of individuals x categorical questions.
//!
//! Principal questions are coded as a 0/1 indicator matrix `Z` (one column
//! per category, one 1 per question in every row) and `Z` is analysed as an
//! ordinary contingency table. Supplementary questions never enter `Z`; their
//! categories are projected afterwards as supplementary columns.

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GdaError, Result};
use crate::factor::{
    fit_ca_with, project_supplementary, FactorModel, FitOptions, PointSet, SupplementaryKind,
    SupplementaryProjection,
};
use crate::table::ContingencyTable;

pub const MISSING_CATEGORY: &str = "missing";
pub const OTHER_CATEGORY: &str = "other";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Principal,
    Supplementary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub label: String,
    pub categories: Vec<String>,
    pub role: Role,
}

/// Individuals x questions. `None` is a missing response.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalDataset {
    individual_ids: Vec<String>,
    questions: Vec<Question>,
    responses: Vec<Vec<Option<usize>>>,
}

impl CategoricalDataset {
    pub fn new(
        individual_ids: Vec<String>,
        questions: Vec<Question>,
        responses: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        if responses.len() != individual_ids.len() {
            return Err(GdaError::Shape(format!(
                "{} individuals but {} response rows",
                individual_ids.len(),
                responses.len()
            )));
        }
        if let Some((i, _)) = responses
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != questions.len())
        {
            return Err(GdaError::Shape(format!(
                "individual {:?} answers {} questions, expected {}",
                individual_ids[i],
                responses[i].len(),
                questions.len()
            )));
        }
        let mut seen = HashSet::new();
        for id in &individual_ids {
            if !seen.insert(id) {
                return Err(GdaError::DuplicateLabel {
                    axis: crate::error::Axis::Row,
                    label: id.clone(),
                });
            }
        }
        if !questions.iter().any(|q| q.role == Role::Principal) {
            return Err(GdaError::NoPrincipalQuestion);
        }
        Ok(Self {
            individual_ids,
            questions,
            responses,
        })
    }

    pub fn individual_ids(&self) -> &[String] {
        &self.individual_ids
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn responses(&self) -> &[Vec<Option<usize>>] {
        &self.responses
    }

    /// Same data with the principal and supplementary roles exchanged.
    pub fn with_roles_swapped(&self) -> Result<Self> {
        let questions = self
            .questions
            .iter()
            .map(|q| Question {
                role: match q.role {
                    Role::Principal => Role::Supplementary,
                    Role::Supplementary => Role::Principal,
                },
                ..q.clone()
            })
            .collect();
        Self::new(
            self.individual_ids.clone(),
            questions,
            self.responses.clone(),
        )
    }

    pub fn with_roles(&self, roles: &[Role]) -> Result<Self> {
        if roles.len() != self.questions.len() {
            return Err(GdaError::Shape(format!(
                "{} roles for {} questions",
                roles.len(),
                self.questions.len()
            )));
        }
        let questions = self
            .questions
            .iter()
            .zip(roles)
            .map(|(q, &role)| Question { role, ..q.clone() })
            .collect();
        Self::new(
            self.individual_ids.clone(),
            questions,
            self.responses.clone(),
        )
    }

    fn check_ranges(&self) -> Result<()> {
        for (i, row) in self.responses.iter().enumerate() {
            for (q, resp) in row.iter().enumerate() {
                if let Some(idx) = *resp {
                    let n = self.questions[q].categories.len();
                    if idx >= n {
                        return Err(GdaError::ResponseOutOfRange {
                            individual: self.individual_ids[i].clone(),
                            question: self.questions[q].label.clone(),
                            index: idx,
                            n_categories: n,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Add a per-question "missing" category.
    #[default]
    ExplicitCategory,
    /// Remove individuals with any missing response.
    DropIndividual,
}

/// What happened to the dataset before coding.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub dropped_individuals: Vec<String>,
    pub fused: Vec<FusionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionRecord {
    pub question: String,
    pub categories: Vec<String>,
    pub into: String,
}

/// Applies the missing-value policy so every response is present.
pub fn resolve_missing(
    ds: &CategoricalDataset,
    policy: MissingPolicy,
) -> Result<(CategoricalDataset, Provenance)> {
    ds.check_ranges()?;
    let mut prov = Provenance::default();
    let mut questions = ds.questions.clone();
    let mut ids = Vec::new();
    let mut responses = Vec::new();
    match policy {
        MissingPolicy::ExplicitCategory => {
            let mut missing_idx = vec![None; questions.len()];
            for (q, question) in questions.iter_mut().enumerate() {
                if ds.responses.iter().any(|r| r[q].is_none()) {
                    missing_idx[q] = Some(
                        match question
                            .categories
                            .iter()
                            .position(|c| c == MISSING_CATEGORY)
                        {
                            Some(p) => p,
                            None => {
                                question.categories.push(MISSING_CATEGORY.to_string());
                                question.categories.len() - 1
                            }
                        },
                    );
                }
            }
            ids = ds.individual_ids.clone();
            responses = ds
                .responses
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(q, r)| r.or(missing_idx[q]))
                        .collect()
                })
                .collect();
        }
        MissingPolicy::DropIndividual => {
            for (id, row) in ds.individual_ids.iter().zip(&ds.responses) {
                if row.iter().all(Option::is_some) {
                    ids.push(id.clone());
                    responses.push(row.clone());
                } else {
                    prov.dropped_individuals.push(id.clone());
                }
            }
            if ids.is_empty() {
                return Err(GdaError::Empty(
                    "dataset after dropping incomplete individuals",
                ));
            }
        }
    }
    Ok((CategoricalDataset::new(ids, questions, responses)?, prov))
}

/// Fuses categories observed fewer than `threshold` times into "other".
pub fn fuse_rare_categories(
    ds: &CategoricalDataset,
    threshold: usize,
) -> Result<(CategoricalDataset, Vec<FusionRecord>)> {
    ds.check_ranges()?;
    let mut questions = Vec::with_capacity(ds.questions.len());
    let mut remaps: Vec<Vec<usize>> = Vec::with_capacity(ds.questions.len());
    let mut records = Vec::new();
    for (q, question) in ds.questions.iter().enumerate() {
        let mut freq = vec![0usize; question.categories.len()];
        for row in &ds.responses {
            if let Some(c) = row[q] {
                freq[c] += 1;
            }
        }
        let rare: Vec<usize> = (0..freq.len())
            .filter(|&c| freq[c] < threshold && question.categories[c] != OTHER_CATEGORY)
            .collect();
        if rare.is_empty() {
            questions.push(question.clone());
            remaps.push((0..freq.len()).collect());
            continue;
        }
        let mut categories = Vec::new();
        let mut remap = vec![0; freq.len()];
        for (c, label) in question.categories.iter().enumerate() {
            if !rare.contains(&c) && label != OTHER_CATEGORY {
                remap[c] = categories.len();
                categories.push(label.clone());
            }
        }
        let other = categories.len();
        categories.push(OTHER_CATEGORY.to_string());
        for (c, label) in question.categories.iter().enumerate() {
            if rare.contains(&c) || label == OTHER_CATEGORY {
                remap[c] = other;
            }
        }
        records.push(FusionRecord {
            question: question.label.clone(),
            categories: rare
                .iter()
                .map(|&c| question.categories[c].clone())
                .collect(),
            into: OTHER_CATEGORY.to_string(),
        });
        questions.push(Question {
            categories,
            ..question.clone()
        });
        remaps.push(remap);
    }
    let responses = ds
        .responses
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(q, r)| r.map(|c| remaps[q][c]))
                .collect()
        })
        .collect();
    Ok((
        CategoricalDataset::new(ds.individual_ids.clone(), questions, responses)?,
        records,
    ))
}

/// Complete disjunctive coding of the principal questions.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    pub z: DMatrix<f64>,
    pub individual_ids: Vec<String>,
    /// `question=category` labels, one per column.
    pub category_labels: Vec<String>,
    /// Index into the dataset's question list for every column.
    pub question_of_category: Vec<usize>,
    pub n_questions: usize,
}

impl IndicatorMatrix {
    pub fn category_frequencies(&self) -> Vec<f64> {
        self.z.column_iter().map(|c| c.sum()).collect()
    }

    pub fn as_table(&self) -> Result<ContingencyTable> {
        ContingencyTable::new(
            self.individual_ids.clone(),
            self.category_labels.clone(),
            self.z.clone(),
        )
    }
}

pub fn category_label(question: &str, category: &str) -> String {
    format!("{question}={category}")
}

/// Indicator coding of the principal questions. Missing responses are coded
/// as an explicit "missing" category.
pub fn build_indicator(ds: &CategoricalDataset) -> Result<IndicatorMatrix> {
    let (ds, _) = resolve_missing(ds, MissingPolicy::ExplicitCategory)?;
    let principal: Vec<usize> = (0..ds.questions.len())
        .filter(|&q| ds.questions[q].role == Role::Principal)
        .collect();
    let mut offsets = Vec::with_capacity(principal.len());
    let mut labels = Vec::new();
    let mut owner = Vec::new();
    for &q in &principal {
        offsets.push(labels.len());
        for c in &ds.questions[q].categories {
            labels.push(category_label(&ds.questions[q].label, c));
            owner.push(q);
        }
    }
    let mut z = DMatrix::zeros(ds.individual_ids.len(), labels.len());
    for (i, row) in ds.responses.iter().enumerate() {
        for (slot, &q) in principal.iter().enumerate() {
            let c = row[q].expect("missing responses resolved");
            z[(i, offsets[slot] + c)] = 1.0;
        }
    }
    Ok(IndicatorMatrix {
        z,
        individual_ids: ds.individual_ids.clone(),
        category_labels: labels,
        question_of_category: owner,
        n_questions: principal.len(),
    })
}

/// `B = Z^T Z`: every two-way cross-tabulation of the principal questions.
pub fn build_burt(z: &IndicatorMatrix) -> Result<ContingencyTable> {
    let b = z.z.transpose() * &z.z;
    ContingencyTable::new(z.category_labels.clone(), z.category_labels.clone(), b)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McaOptions {
    pub missing: MissingPolicy,
    /// Fuse categories seen fewer than this many times into "other".
    pub rare_threshold: Option<usize>,
    /// Also report Benzecri-corrected eigenvalues.
    pub benzecri: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McaResult {
    /// CA of the indicator matrix; rows are individuals, columns observed categories.
    pub model: FactorModel,
    /// Categories of supplementary questions, if any.
    pub supplementary: Option<SupplementaryProjection>,
    pub n_questions: usize,
    /// Number of observed principal categories (columns of the fitted table).
    pub n_categories: usize,
    pub benzecri: Option<Vec<f64>>,
    pub provenance: Provenance,
}

impl McaResult {
    /// `J/Q - 1`, the total inertia of indicator MCA.
    pub fn expected_total_inertia(&self) -> f64 {
        self.n_categories as f64 / self.n_questions as f64 - 1.0
    }
}

/// Benzecri's correction of indicator eigenvalues: eigenvalues at or below
/// `1/Q` vanish, the others become `(Q/(Q-1))^2 (lambda - 1/Q)^2`.
pub fn benzecri_corrected(inertias: &[f64], n_questions: usize) -> Option<Vec<f64>> {
    if n_questions < 2 {
        return None;
    }
    let q = n_questions as f64;
    Some(
        inertias
            .iter()
            .map(|&l| {
                if l > 1.0 / q {
                    (q / (q - 1.0)).powi(2) * (l - 1.0 / q).powi(2)
                } else {
                    0.0
                }
            })
            .collect(),
    )
}

pub fn fit_mca(ds: &CategoricalDataset) -> Result<McaResult> {
    fit_mca_with(ds, McaOptions::default())
}

pub fn fit_mca_with(ds: &CategoricalDataset, opts: McaOptions) -> Result<McaResult> {
    if let Some(q) = ds.questions.iter().find(|q| q.categories.len() < 2) {
        return Err(GdaError::SingleCategory(q.label.clone()));
    }
    let (mut ds, mut provenance) = resolve_missing(ds, opts.missing)?;
    if let Some(t) = opts.rare_threshold {
        let (fused, records) = fuse_rare_categories(&ds, t)?;
        if let Some(q) = fused.questions.iter().find(|q| q.categories.len() < 2) {
            return Err(GdaError::SingleCategory(q.label.clone()));
        }
        ds = fused;
        provenance.fused = records;
    }

    let z = build_indicator(&ds)?;
    // Unobserved categories are zero columns; they carry no mass and are dropped.
    let model = fit_ca_with(&z.as_table()?, FitOptions { lenient: true })?;
    let n_categories = model.col_labels().len();

    let supplementary = project_supplementary_questions(&ds, &model)?;
    let benzecri = if opts.benzecri {
        benzecri_corrected(&model.principal_inertias(), z.n_questions)
    } else {
        None
    };
    Ok(McaResult {
        model,
        supplementary,
        n_questions: z.n_questions,
        n_categories,
        benzecri,
        provenance,
    })
}

fn project_supplementary_questions(
    ds: &CategoricalDataset,
    model: &FactorModel,
) -> Result<Option<SupplementaryProjection>> {
    let mut labels = Vec::new();
    let mut profiles = Vec::new();
    for (q, question) in ds.questions.iter().enumerate() {
        if question.role != Role::Supplementary {
            continue;
        }
        for (c, cat) in question.categories.iter().enumerate() {
            let profile: Vec<f64> = ds
                .responses
                .iter()
                .map(|row| if row[q] == Some(c) { 1.0 } else { 0.0 })
                .collect();
            if profile.iter().any(|&v| v > 0.0) {
                labels.push(category_label(&question.label, cat));
                profiles.push(profile);
            }
        }
    }
    if labels.is_empty() {
        return Ok(None);
    }
    project_supplementary(
        model,
        &labels,
        &profiles,
        SupplementaryKind::SupplementaryColumn,
    )
    .map(Some)
}

/// Simplified sub-cloud summary: the subset's rows of `F` with their
/// mass-weighted mean and per-factor dispersion about that mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcloudProfile {
    pub ids: Vec<String>,
    pub coords: Vec<Vec<f64>>,
    pub mass: f64,
    pub mean: Vec<f64>,
    pub dispersion: Vec<f64>,
}

pub fn subcloud_profile(model: &FactorModel, ids: &[String]) -> Result<SubcloudProfile> {
    if ids.is_empty() {
        return Err(GdaError::Empty("subcloud"));
    }
    let mut index = BTreeMap::new();
    for id in ids {
        index.insert(id, model.index_of(PointSet::Rows, id)?);
    }
    let rows: Vec<usize> = ids.iter().map(|id| index[id]).collect();
    let k = model.n_factors();
    let f = model.row_coords();
    let r = model.row_masses();
    let mass: f64 = rows.iter().map(|&i| r[i]).sum();
    let mean: Vec<f64> = (0..k)
        .map(|a| rows.iter().map(|&i| r[i] * f[(i, a)]).sum::<f64>() / mass)
        .collect();
    let dispersion = (0..k)
        .map(|a| {
            rows.iter()
                .map(|&i| r[i] * (f[(i, a)] - mean[a]).powi(2))
                .sum::<f64>()
                / mass
        })
        .collect();
    Ok(SubcloudProfile {
        ids: ids.to_vec(),
        coords: rows
            .iter()
            .map(|&i| model.point(PointSet::Rows, i))
            .collect(),
        mass,
        mean,
        dispersion,
    })
}
