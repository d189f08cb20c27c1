//! Python bindings for the decoherence-free subspace finder.
//!
//! Matrices cross the boundary as lists of rows of Python `complex`.

use dfs_core::engine::{self, AnalysisReport, DfsRecord};
use dfs_core::gallery::{self, ParamValue, Params};
use dfs_core::io::{ModelFile, ReportFile};
use dfs_core::linalg::{ComplexMatrix, ComplexVector};
use dfs_core::model::{EigTuple, LindbladTerm, MasterEquationModel};
use dfs_core::{oracle, DfsError, Tolerances};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use std::collections::HashMap;

create_exception!(pydfs, DfsException, PyException);

type Rows = Vec<Vec<Complex64>>;

fn err(e: DfsError) -> PyErr {
    DfsException::new_err(e.to_string())
}

fn to_matrix(rows: &Rows, what: &str) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err(format!("{what}: rows have different lengths")));
    }
    Ok(ComplexMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn tolerances(profile: Option<&str>, overrides: Option<HashMap<String, f64>>) -> PyResult<Tolerances> {
    let mut tol = match profile {
        None => Tolerances::default(),
        Some(p) => Tolerances::profile(p).ok_or_else(|| PyValueError::new_err(format!("unknown profile '{p}'")))?,
    };
    for (k, v) in overrides.unwrap_or_default() {
        tol.set(&k, v).map_err(PyValueError::new_err)?;
    }
    Ok(tol)
}

/// Master equation `dρ/dt = -i[H_eff, ρ] + L_D[ρ]`.
#[pyclass(name = "Model", module = "pydfs", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyModel {
    inner: MasterEquationModel,
}

#[pymethods]
impl PyModel {
    /// Model with a diagonal dissipator `Σ λ_l (J ρ J† - ½{J†J, ρ})`.
    #[staticmethod]
    #[pyo3(signature = (h_eff, rates, jumps, label = "model"))]
    fn diagonal(h_eff: Rows, rates: Vec<f64>, jumps: Vec<Rows>, label: &str) -> PyResult<Self> {
        if rates.len() != jumps.len() {
            return Err(PyValueError::new_err("rates and jumps differ in length"));
        }
        let h = to_matrix(&h_eff, "h_eff")?;
        let terms = rates
            .into_iter()
            .zip(&jumps)
            .map(|(r, j)| Ok(LindbladTerm::new(r, to_matrix(j, "jump")?)))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = MasterEquationModel::diagonal(label, h, terms).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, profile = None))]
    fn from_json(text: &str, profile: Option<&str>) -> PyResult<Self> {
        let file = ModelFile::parse(text).map_err(|e| DfsException::new_err(e.to_string()))?;
        let tol = file
            .tolerances(tolerances(profile, None)?)
            .map_err(|e| DfsException::new_err(e.to_string()))?;
        let inner = file.to_model(&tol).map_err(|e| DfsException::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    /// Build a gallery model; parameter values are given as strings.
    #[staticmethod]
    #[pyo3(signature = (name, params = None))]
    fn gallery(name: &str, params: Option<HashMap<String, String>>) -> PyResult<Self> {
        let params: Params = params
            .unwrap_or_default()
            .into_iter()
            .map(|(k, v)| (k, ParamValue::parse(&v)))
            .collect();
        let inner = gallery::build(name, &params).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn truncated(&self) -> bool {
        self.inner.is_truncated()
    }

    fn h_eff(&self) -> Rows {
        to_rows(self.inner.h_eff())
    }

    /// Decoherence operator `Γ = Σ λ_l J_l† J_l`.
    fn gamma(&self) -> Rows {
        to_rows(self.inner.decoherence_operator())
    }

    fn rates(&self) -> Vec<f64> {
        self.inner.lindblad().terms().iter().map(|t| t.rate).collect()
    }

    fn jumps(&self) -> Vec<Rows> {
        self.inner.lindblad().terms().iter().map(|t| to_rows(&t.jump)).collect()
    }

    fn apply_dissipator(&self, rho: Rows) -> PyResult<Rows> {
        let rho = to_matrix(&rho, "rho")?;
        self.inner.apply_dissipator(&rho).map(|m| to_rows(&m)).map_err(err)
    }

    fn liouvillian(&self, rho: Rows) -> PyResult<Rows> {
        let rho = to_matrix(&rho, "rho")?;
        self.inner.liouvillian_apply(&rho).map(|m| to_rows(&m)).map_err(err)
    }

    fn evolution_hamiltonian(&self, c: Vec<Complex64>) -> PyResult<Rows> {
        self.inner.evolution_hamiltonian(&EigTuple(c)).map(|m| to_rows(&m)).map_err(err)
    }

    fn to_json(&self) -> String {
        ModelFile::from_model(&self.inner).to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(label={:?}, dim={}, jumps={})",
            self.inner.label(),
            self.inner.dim(),
            self.inner.lindblad().len()
        )
    }
}

#[pyclass(name = "Record", module = "pydfs", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyRecord {
    inner: DfsRecord,
}

#[pymethods]
impl PyRecord {
    #[getter]
    fn tuple(&self) -> Vec<Complex64> {
        self.inner.tuple.values().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn classification(&self) -> &'static str {
        self.inner.classification.as_str()
    }

    #[getter]
    fn gamma_eigenvalue(&self) -> Option<f64> {
        self.inner.gamma_eigenvalue
    }

    #[getter]
    fn witness(&self) -> f64 {
        self.inner.witness
    }

    /// Orthonormal basis vectors of the subspace.
    fn basis(&self) -> Vec<Vec<Complex64>> {
        self.inner.subspace.vectors().map(|v| v.iter().copied().collect()).collect()
    }

    fn h_ev_restricted(&self) -> Rows {
        to_rows(&self.inner.h_ev_restricted)
    }

    fn __repr__(&self) -> String {
        format!("Record(dim={}, classification={})", self.inner.dim(), self.inner.classification)
    }
}

#[pyclass(name = "Report", module = "pydfs", frozen, skip_from_py_object)]
pub struct PyReport {
    inner: AnalysisReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn model_label(&self) -> String {
        self.inner.model_label.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn tuples_examined(&self) -> usize {
        self.inner.tuples_examined
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    #[getter]
    fn records(&self) -> Vec<PyRecord> {
        self.inner.records.iter().cloned().map(|inner| PyRecord { inner }).collect()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = ReportFile::parse(text)
            .and_then(|f| f.to_report())
            .map_err(|e| DfsException::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        ReportFile::from_report(&self.inner).to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    fn __repr__(&self) -> String {
        format!("Report(model={:?}, records={})", self.inner.model_label, self.inner.records.len())
    }
}

#[pyclass(name = "Verification", module = "pydfs", frozen, get_all, skip_from_py_object)]
pub struct PyVerification {
    passed: bool,
    max_purity_drift: f64,
    min_unitary_fidelity: f64,
    trials: usize,
    t_final: f64,
    seed: u64,
}

#[pyclass(name = "Trajectory", module = "pydfs", frozen, get_all, skip_from_py_object)]
pub struct PyTrajectory {
    times: Vec<f64>,
    purities: Vec<f64>,
    fidelities: Vec<f64>,
    steps: usize,
    final_state: Rows,
}

#[pyfunction]
#[pyo3(signature = (model, profile = None, tol = None))]
fn analyze(py: Python<'_>, model: &PyModel, profile: Option<&str>, tol: Option<HashMap<String, f64>>) -> PyResult<PyReport> {
    let tol = tolerances(profile, tol)?;
    let m = &model.inner;
    let inner = py.detach(|| engine::find_all_dfs(m, &tol)).map_err(err)?;
    Ok(PyReport { inner })
}

#[pyfunction]
#[pyo3(signature = (model, record, trials = 20, t_final = None, seed = 0))]
fn verify(
    py: Python<'_>,
    model: &PyModel,
    record: &PyRecord,
    trials: usize,
    t_final: Option<f64>,
    seed: u64,
) -> PyResult<PyVerification> {
    let (m, rec) = (&model.inner, &record.inner);
    let v = py
        .detach(|| oracle::verify_dfs_record(m, rec, trials, t_final, seed))
        .map_err(err)?;
    Ok(PyVerification {
        passed: v.passed,
        max_purity_drift: v.max_purity_drift,
        min_unitary_fidelity: v.min_unitary_fidelity,
        trials: v.trials,
        t_final: v.t_final,
        seed: v.seed,
    })
}

#[pyfunction]
#[pyo3(signature = (model, rho, t_final, steps = 64))]
fn propagate(py: Python<'_>, model: &PyModel, rho: Rows, t_final: f64, steps: usize) -> PyResult<PyTrajectory> {
    let rho = to_matrix(&rho, "rho")?;
    let m = &model.inner;
    let t = py.detach(|| oracle::propagate(m, &rho, t_final, steps)).map_err(err)?;
    Ok(PyTrajectory {
        final_state: to_rows(&t.final_state),
        times: t.times,
        purities: t.purities,
        fidelities: t.fidelity_to_unitary,
        steps: t.steps,
    })
}

/// Whether the pure state `psi` is instantaneously decoherence free.
#[pyfunction]
fn is_decoherence_free(model: &PyModel, psi: Vec<Complex64>) -> PyResult<bool> {
    let psi = ComplexVector::from_vec(psi);
    engine::instantaneous_df_check(&model.inner, &psi, &Tolerances::default())
        .map(|c| c.is_df)
        .map_err(err)
}

#[pyfunction]
fn purity(rho: Rows) -> PyResult<f64> {
    Ok(oracle::purity(&to_matrix(&rho, "rho")?))
}

#[pyfunction]
fn gallery_names() -> Vec<&'static str> {
    gallery::entries().into_iter().map(|e| e.name).collect()
}

#[pymodule]
fn pydfs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DfsException", m.py().get_type::<DfsException>())?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyRecord>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyVerification>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(is_decoherence_free, m)?)?;
    m.add_function(wrap_pyfunction!(purity, m)?)?;
    m.add_function(wrap_pyfunction!(gallery_names, m)?)?;
    Ok(())
}
