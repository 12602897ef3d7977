//! Single-document JSON persistence of a fitted model and its derived results.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::csvfmt::write_atomic;
use crate::error::{GdaError, Result};
use crate::factor::{DroppedLine, FactorModel, PointSet, SupplementaryProjection};
use crate::hcluster::Dendrogram;
use crate::mca;
use crate::narrative::{ImpactRecord, Trajectory};
use crate::textpipe::FilterRecord;

pub const ARCHIVE_VERSION: &str = "gda/1";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TableProvenance {
    pub source_files: Vec<String>,
    /// SHA-256 of the filter log, when the table came from text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_log_digest: Option<String>,
}

pub fn filter_log_digest(log: &[FilterRecord]) -> String {
    let bytes = serde_json::to_vec(log).expect("filter log serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Row-major matrix with its shape, so empty factor sets keep their row count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DMatrix<f64>> for MatrixRecord {
    fn from(m: &DMatrix<f64>) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.transpose().as_slice().to_vec(),
        }
    }
}

impl MatrixRecord {
    fn to_matrix(&self, what: &str) -> Result<DMatrix<f64>> {
        if self.rows * self.cols != self.data.len() {
            return Err(GdaError::Shape(format!(
                "archive matrix {what} has inconsistent shape"
            )));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub grand_total: f64,
    pub correspondence: MatrixRecord,
    pub row_masses: Vec<f64>,
    pub col_masses: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub row_coords: MatrixRecord,
    pub col_coords: MatrixRecord,
    pub row_contributions: MatrixRecord,
    pub col_contributions: MatrixRecord,
    pub row_sq_cosines: MatrixRecord,
    pub col_sq_cosines: MatrixRecord,
    pub dropped: Vec<DroppedLine>,
}

impl From<&FactorModel> for ModelRecord {
    fn from(m: &FactorModel) -> Self {
        Self {
            row_labels: m.row_labels.clone(),
            col_labels: m.col_labels.clone(),
            grand_total: m.grand_total,
            correspondence: (&m.correspondence).into(),
            row_masses: m.row_masses.iter().copied().collect(),
            col_masses: m.col_masses.iter().copied().collect(),
            singular_values: m.singular_values.clone(),
            row_coords: (&m.row_coords).into(),
            col_coords: (&m.col_coords).into(),
            row_contributions: (&m.row_contributions).into(),
            col_contributions: (&m.col_contributions).into(),
            row_sq_cosines: (&m.row_sq_cosines).into(),
            col_sq_cosines: (&m.col_sq_cosines).into(),
            dropped: m.dropped.clone(),
        }
    }
}

impl ModelRecord {
    pub fn to_model(&self) -> Result<FactorModel> {
        let (ni, nj, k) = (
            self.row_labels.len(),
            self.col_labels.len(),
            self.singular_values.len(),
        );
        let checks = [
            ("correspondence", &self.correspondence, ni, nj),
            ("row_coords", &self.row_coords, ni, k),
            ("col_coords", &self.col_coords, nj, k),
            ("row_contributions", &self.row_contributions, ni, k),
            ("col_contributions", &self.col_contributions, nj, k),
            ("row_sq_cosines", &self.row_sq_cosines, ni, k),
            ("col_sq_cosines", &self.col_sq_cosines, nj, k),
        ];
        for (what, m, r, c) in checks {
            if (m.rows, m.cols) != (r, c) {
                return Err(GdaError::Shape(format!(
                    "archive matrix {what} is {}x{}, expected {r}x{c}",
                    m.rows, m.cols
                )));
            }
        }
        if self.row_masses.len() != ni || self.col_masses.len() != nj {
            return Err(GdaError::Shape("archive masses do not match labels".into()));
        }
        Ok(FactorModel {
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            grand_total: self.grand_total,
            correspondence: self.correspondence.to_matrix("correspondence")?,
            row_masses: DVector::from_vec(self.row_masses.clone()),
            col_masses: DVector::from_vec(self.col_masses.clone()),
            singular_values: self.singular_values.clone(),
            row_coords: self.row_coords.to_matrix("row_coords")?,
            col_coords: self.col_coords.to_matrix("col_coords")?,
            row_contributions: self.row_contributions.to_matrix("row_contributions")?,
            col_contributions: self.col_contributions.to_matrix("col_contributions")?,
            row_sq_cosines: self.row_sq_cosines.to_matrix("row_sq_cosines")?,
            col_sq_cosines: self.col_sq_cosines.to_matrix("col_sq_cosines")?,
            dropped: self.dropped.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McaRecord {
    pub n_questions: usize,
    pub n_categories: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benzecri: Option<Vec<f64>>,
    pub provenance: mca::Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedDendrogram {
    pub name: String,
    pub entities: PointSet,
    pub dendrogram: Dendrogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format: String,
    pub provenance: TableProvenance,
    pub model: ModelRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mca: Option<McaRecord>,
    #[serde(default)]
    pub supplementary: Vec<SupplementaryProjection>,
    #[serde(default)]
    pub dendrograms: Vec<NamedDendrogram>,
    #[serde(default)]
    pub trajectories: Vec<Trajectory>,
    #[serde(default)]
    pub impacts: Vec<ImpactRecord>,
}

impl ModelArchive {
    pub fn new(model: &FactorModel, provenance: TableProvenance) -> Self {
        Self {
            format: ARCHIVE_VERSION.to_string(),
            provenance,
            model: model.into(),
            mca: None,
            supplementary: Vec::new(),
            dendrograms: Vec::new(),
            trajectories: Vec::new(),
            impacts: Vec::new(),
        }
    }

    pub fn from_mca(res: &mca::McaResult, provenance: TableProvenance) -> Self {
        let mut a = Self::new(&res.model, provenance);
        a.mca = Some(McaRecord {
            n_questions: res.n_questions,
            n_categories: res.n_categories,
            benzecri: res.benzecri.clone(),
            provenance: res.provenance.clone(),
        });
        a.supplementary.extend(res.supplementary.iter().cloned());
        a
    }

    pub fn factor_model(&self) -> Result<FactorModel> {
        self.model.to_model()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses an archive, rejecting any format version other than `gda/1`.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value.get("format").and_then(|v| v.as_str()).unwrap_or("");
        if found != ARCHIVE_VERSION {
            return Err(GdaError::Version {
                found: found.to_string(),
                expected: ARCHIVE_VERSION.to_string(),
            });
        }
        let archive: Self = serde_json::from_value(value)?;
        archive.model.to_model()?;
        for d in &archive.dendrograms {
            let d = &d.dendrogram;
            Dendrogram::new(d.labels().to_vec(), d.merges().to_vec(), d.is_constrained())?;
        }
        Ok(archive)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Replaces any dendrogram with the same name.
    pub fn put_dendrogram(&mut self, d: NamedDendrogram) {
        self.dendrograms.retain(|x| x.name != d.name);
        self.dendrograms.push(d);
    }

    pub fn put_trajectory(&mut self, t: Trajectory) {
        self.trajectories.retain(|x| x.term != t.term);
        self.trajectories.push(t);
    }

    pub fn put_supplementary(&mut self, s: SupplementaryProjection) {
        self.supplementary
            .retain(|x| !(x.kind == s.kind && x.labels == s.labels));
        self.supplementary.push(s);
    }
}
