//! JSON model and report files.
//!
//! Complex numbers are always `[re, im]` pairs. Matrices are written as a
//! flat row-major list of pairs; nested row lists are accepted on input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::engine::{AnalysisReport, Classification, DfsRecord, TupleDiagnostic};
use crate::error::DfsError;
use crate::linalg::{c64, ComplexMatrix, Subspace};
use crate::model::{DiagonalLindblad, Dissipator, EigTuple, GksDissipator, LindbladTerm, MasterEquationModel};
use crate::oracle::Verification;

pub const MODEL_FORMAT_VERSION: &str = "1.0";
pub const REPORT_SCHEMA_VERSION: &str = "1.0";
pub const TOOL_NAME: &str = "dfs";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Input-side failure: unreadable, unparsable or invalid document.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("unsupported {what} version {found} (this build reads {supported})")]
    Version { what: &'static str, found: String, supported: &'static str },
    #[error("{0}")]
    Model(#[from] DfsError),
}

fn field(field: impl Into<String>, message: impl Into<String>) -> FileError {
    FileError::Field {
        field: field.into(),
        message: message.into(),
    }
}

pub type Pair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Flat(Vec<Pair>),
    Rows(Vec<Vec<Pair>>),
}

impl MatrixRepr {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut out = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for k in 0..m.ncols() {
                let z = m[(i, k)];
                out.push([z.re, z.im]);
            }
        }
        Self::Flat(out)
    }

    pub fn to_matrix(&self, rows: usize, cols: usize, name: &str) -> Result<ComplexMatrix, FileError> {
        let flat: Vec<Pair> = match self {
            Self::Flat(v) => v.clone(),
            Self::Rows(r) => {
                if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                    return Err(field(name, format!("expected {rows} rows of {cols} entries")));
                }
                r.concat()
            }
        };
        if flat.len() != rows * cols {
            return Err(field(name, format!("expected {} entries, found {}", rows * cols, flat.len())));
        }
        if flat.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(field(name, "non-finite entry"));
        }
        Ok(ComplexMatrix::from_row_iterator(rows, cols, flat.iter().map(|p| c64(p[0], p[1]))))
    }
}

fn pairs(values: &[num_complex::Complex64]) -> Vec<Pair> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(values: &[Pair]) -> Vec<num_complex::Complex64> {
    values.iter().map(|p| c64(p[0], p[1])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GksFile {
    pub basis: Vec<MatrixRepr>,
    #[serde(rename = "A")]
    pub a: MatrixRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub lambda: f64,
    #[serde(rename = "J")]
    pub j: MatrixRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DissipatorFile {
    Gks(GksFile),
    Diagonal(Vec<TermFile>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default = "default_model_version")]
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dim: usize,
    pub h_eff: MatrixRepr,
    pub dissipator: DissipatorFile,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

fn default_model_version() -> String {
    MODEL_FORMAT_VERSION.to_string()
}

fn check_major(found: &str, supported: &'static str, what: &'static str) -> Result<(), FileError> {
    let major = |v: &str| v.split('.').next().unwrap_or("").to_string();
    if major(found) != major(supported) {
        return Err(FileError::Version {
            what,
            found: found.to_string(),
            supported,
        });
    }
    Ok(())
}

impl ModelFile {
    pub fn from_model(m: &MasterEquationModel) -> Self {
        let dissipator = match m.dissipator() {
            Dissipator::Gks(g) => DissipatorFile::Gks(GksFile {
                basis: g.basis().iter().map(MatrixRepr::from_matrix).collect(),
                a: MatrixRepr::from_matrix(g.coeff()),
            }),
            Dissipator::Diagonal(d) => DissipatorFile::Diagonal(
                d.terms()
                    .iter()
                    .map(|t| TermFile {
                        lambda: t.rate,
                        j: MatrixRepr::from_matrix(&t.jump),
                    })
                    .collect(),
            ),
        };
        Self {
            version: MODEL_FORMAT_VERSION.to_string(),
            label: Some(m.label().to_string()),
            dim: m.dim(),
            h_eff: MatrixRepr::from_matrix(m.h_eff()),
            dissipator,
            tolerances: BTreeMap::new(),
            truncated: m.is_truncated(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        let f: Self = serde_json::from_str(text)?;
        check_major(&f.version, MODEL_FORMAT_VERSION, "model file")?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    /// Apply the file's tolerance overrides on top of `base`.
    pub fn tolerances(&self, base: Tolerances) -> Result<Tolerances, FileError> {
        let mut tol = base;
        for (k, &v) in &self.tolerances {
            tol.set(k, v).map_err(|e| field(format!("tolerances.{k}"), e))?;
        }
        Ok(tol)
    }

    /// Build the model. Validation failures name the offending field.
    pub fn to_model(&self, tol: &Tolerances) -> Result<MasterEquationModel, FileError> {
        let n = self.dim;
        if n == 0 {
            return Err(field("dim", "must be at least 1"));
        }
        let h = self.h_eff.to_matrix(n, n, "h_eff")?;
        let tag = |f: &str, e: DfsError| match e {
            DfsError::NotHermitian { deviation, .. } => field(f, format!("not Hermitian (relative deviation {deviation:.3e})")),
            other => field(f, other.to_string()),
        };
        crate::linalg::ensure_hermitian(&h, tol.hermitian, "h_eff").map_err(|e| tag("h_eff", e))?;
        let dissipator = match &self.dissipator {
            DissipatorFile::Gks(g) => {
                let basis = g
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(k, f)| f.to_matrix(n, n, &format!("dissipator.gks.basis[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let count = n * n - 1;
                let a = g.a.to_matrix(count, count, "dissipator.gks.A")?;
                Dissipator::Gks(GksDissipator::new(n, basis, a, tol.hermitian).map_err(|e| tag("dissipator.gks", e))?)
            }
            DissipatorFile::Diagonal(terms) => {
                let mut out = Vec::with_capacity(terms.len());
                for (l, t) in terms.iter().enumerate() {
                    if !(t.lambda.is_finite() && t.lambda > 0.0) {
                        return Err(field(format!("dissipator.diagonal[{l}].lambda"), "rate must be positive"));
                    }
                    out.push(LindbladTerm::new(t.lambda, t.j.to_matrix(n, n, &format!("dissipator.diagonal[{l}].J"))?));
                }
                Dissipator::Diagonal(DiagonalLindblad::new(n, out, 0.0).map_err(|e| tag("dissipator.diagonal", e))?)
            }
        };
        let label = self.label.clone().unwrap_or_else(|| "model".into());
        Ok(MasterEquationModel::new(label, h, dissipator, tol)?.with_truncation_flag(self.truncated))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordFile {
    pub tuple: Vec<Pair>,
    pub dim: usize,
    /// Orthonormal basis vectors, each a list of `[re, im]` pairs.
    pub basis: Vec<Vec<Pair>>,
    pub classification: String,
    pub g: Option<f64>,
    pub h_ev_restricted: MatrixRepr,
    pub witness: f64,
    pub weighted_witness: f64,
    pub unweighted_witness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticFile {
    pub tuple: Vec<Pair>,
    pub eigenspace_dim: usize,
    pub single_pass_dim: usize,
    pub dfs_dim: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationFile {
    pub record: usize,
    pub passed: bool,
    pub max_purity_drift: f64,
    pub min_unitary_fidelity: f64,
    pub trials: usize,
    pub t_final: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub schema_version: String,
    pub tool: String,
    pub tool_version: String,
    pub model_label: String,
    pub dim: usize,
    pub tolerances: Tolerances,
    pub tuples_examined: usize,
    pub records: Vec<RecordFile>,
    pub diagnostics: Vec<DiagnosticFile>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Vec<VerificationFile>>,
}

impl ReportFile {
    pub fn from_report(r: &AnalysisReport) -> Self {
        let records = r
            .records
            .iter()
            .map(|rec| RecordFile {
                tuple: pairs(rec.tuple.values()),
                dim: rec.dim(),
                basis: rec.subspace.vectors().map(|v| pairs(v.as_slice())).collect(),
                classification: rec.classification.as_str().to_string(),
                g: rec.gamma_eigenvalue,
                h_ev_restricted: MatrixRepr::from_matrix(&rec.h_ev_restricted),
                witness: rec.witness,
                weighted_witness: rec.weighted_witness,
                unweighted_witness: rec.unweighted_witness,
            })
            .collect();
        let diagnostics = r
            .diagnostics
            .iter()
            .map(|d| DiagnosticFile {
                tuple: pairs(d.tuple.values()),
                eigenspace_dim: d.eigenspace_dim,
                single_pass_dim: d.single_pass_dim,
                dfs_dim: d.dfs_dim,
                iterations: d.iterations,
            })
            .collect();
        Self {
            schema_version: REPORT_SCHEMA_VERSION.to_string(),
            tool: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            model_label: r.model_label.clone(),
            dim: r.dim,
            tolerances: r.tolerances,
            tuples_examined: r.tuples_examined,
            records,
            diagnostics,
            notes: r.notes.clone(),
            verification: None,
        }
    }

    pub fn with_verification(mut self, results: &[Verification]) -> Self {
        self.verification = Some(
            results
                .iter()
                .enumerate()
                .map(|(i, v)| VerificationFile {
                    record: i,
                    passed: v.passed,
                    max_purity_drift: v.max_purity_drift,
                    min_unitary_fidelity: v.min_unitary_fidelity,
                    trials: v.trials,
                    t_final: v.t_final,
                    seed: v.seed,
                })
                .collect(),
        );
        self
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        #[derive(Deserialize)]
        struct Probe {
            schema_version: String,
        }
        let probe: Probe = serde_json::from_str(text)?;
        check_major(&probe.schema_version, REPORT_SCHEMA_VERSION, "report schema")?;
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rebuild the analysis report; bases must be orthonormal within `1e-8`.
    pub fn to_report(&self) -> Result<AnalysisReport, FileError> {
        let n = self.dim;
        let mut records = Vec::with_capacity(self.records.len());
        for (i, r) in self.records.iter().enumerate() {
            let name = |f: &str| format!("records[{i}].{f}");
            if r.basis.len() != r.dim {
                return Err(field(name("basis"), format!("{} vectors for dim {}", r.basis.len(), r.dim)));
            }
            let mut basis = ComplexMatrix::zeros(n, r.dim);
            for (k, v) in r.basis.iter().enumerate() {
                if v.len() != n {
                    return Err(field(name("basis"), format!("vector {k} has length {}, expected {n}", v.len())));
                }
                for (row, p) in v.iter().enumerate() {
                    basis[(row, k)] = c64(p[0], p[1]);
                }
            }
            let subspace = Subspace::from_orthonormal_columns(basis, 1e-8).map_err(|e| field(name("basis"), e.to_string()))?;
            let classification = Classification::parse(&r.classification)
                .ok_or_else(|| field(name("classification"), format!("unknown value '{}'", r.classification)))?;
            records.push(DfsRecord {
                tuple: EigTuple(complexes(&r.tuple)),
                subspace,
                classification,
                gamma_eigenvalue: r.g,
                h_ev_restricted: r.h_ev_restricted.to_matrix(r.dim, r.dim, &name("h_ev_restricted"))?,
                witness: r.witness,
                weighted_witness: r.weighted_witness,
                unweighted_witness: r.unweighted_witness,
            });
        }
        let diagnostics = self
            .diagnostics
            .iter()
            .map(|d| TupleDiagnostic {
                tuple: EigTuple(complexes(&d.tuple)),
                eigenspace_dim: d.eigenspace_dim,
                single_pass_dim: d.single_pass_dim,
                dfs_dim: d.dfs_dim,
                iterations: d.iterations,
            })
            .collect();
        Ok(AnalysisReport {
            model_label: self.model_label.clone(),
            dim: n,
            records,
            tuples_examined: self.tuples_examined,
            tolerances: self.tolerances,
            diagnostics,
            notes: self.notes.clone(),
        })
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &std::path::Path, text: &str) -> Result<(), FileError> {
    std::fs::write(path, text).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}
