//! Enumeration and classification of dynamically stable decoherence-free
//! subspaces.
//!
//! For every eigenvalue tuple `c` of the jump operators the common eigenspace
//! `E_J(c)` is computed; the DFS for that tuple is the largest subspace of
//! `E_J(c)` left invariant by `H_ev(c)`. Each non-empty result is classified as
//! restricted (`L_D` vanishes on it) or IGC.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{DfsError, Result};
use crate::linalg::{
    c64, eigenspaces_with, frobenius, identity, kernel_below, outer, trace_product, ComplexMatrix, ComplexVector,
    Subspace,
};
use crate::model::{DiagonalLindblad, EigTuple, MasterEquationModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Restricted,
    Igc,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Restricted => "restricted",
            Self::Igc => "igc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "restricted" => Some(Self::Restricted),
            "igc" => Some(Self::Igc),
            _ => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Restricted => "Restricted",
            Self::Igc => "IGC",
        })
    }
}

/// Result of the instantaneous (single-time) decoherence-free test.
#[derive(Clone, Debug, PartialEq)]
pub struct InstantaneousCheck {
    pub is_df: bool,
    /// `c_l = ⟨ψ|J_l|ψ⟩`, present whenever every `J_l` has `ψ` as eigenvector.
    pub jump_tuple: Option<EigTuple>,
    /// `g = Σ λ_l |c_l|²`, present when `is_df`.
    pub g: Option<f64>,
    /// `‖L_D[|ψ⟩⟨ψ|]‖_F`.
    pub ld_norm: f64,
    /// `⟨ψ|L_D[|ψ⟩⟨ψ|]|ψ⟩`, half the instantaneous purity rate.
    pub ld_expectation: f64,
}

fn membership_threshold(d: &DiagonalLindblad, tol: &Tolerances) -> f64 {
    let max = d.terms().iter().map(|t| frobenius(&t.jump)).fold(0.0, f64::max);
    tol.membership * (1.0 + max)
}

fn classify_threshold(dim: usize, tol: &Tolerances) -> f64 {
    tol.classify * dim as f64
}

fn check_vector(m: &MasterEquationModel, psi: &ComplexVector) -> Result<()> {
    if psi.len() != m.dim() {
        return Err(DfsError::DimensionMismatch {
            expected: m.dim(),
            found: psi.len(),
            context: "state vector".into(),
        });
    }
    let norm = psi.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-8 {
        return Err(DfsError::NotNormalized { norm });
    }
    Ok(())
}

fn expectation(op: &ComplexMatrix, v: &ComplexVector) -> Complex64 {
    v.dotc(&(op * v))
}

/// Test whether `|ψ⟩⟨ψ|` is instantaneously decoherence-free.
pub fn instantaneous_df_check(m: &MasterEquationModel, psi: &ComplexVector, tol: &Tolerances) -> Result<InstantaneousCheck> {
    check_vector(m, psi)?;
    let d = m.lindblad();
    let thr = membership_threshold(d, tol);
    let mut values = Vec::with_capacity(d.len());
    let mut eigen = true;
    for t in d.terms() {
        let c = expectation(&t.jump, psi);
        eigen &= (&t.jump * psi - psi * c).norm() <= thr;
        values.push(c);
    }
    let g: f64 = d.terms().iter().zip(&values).map(|(t, c)| t.rate * c.norm_sqr()).sum();
    let gamma = m.decoherence_operator();
    let gamma_scale = tol.membership * (1.0 + frobenius(gamma));
    let gamma_eigen = (gamma * psi - psi * c64(g, 0.0)).norm() <= gamma_scale;
    let rho = outer(psi, psi);
    let ld = m.apply_dissipator(&rho)?;
    let ld_norm = frobenius(&ld);
    let ld_expectation = trace_product(&rho, &ld).re;
    let is_df = eigen && gamma_eigen && ld_norm <= classify_threshold(m.dim(), tol);
    Ok(InstantaneousCheck {
        is_df,
        jump_tuple: eigen.then(|| EigTuple(values)),
        g: is_df.then_some(g),
        ld_norm,
        ld_expectation,
    })
}

/// Common eigenspaces of all jump operators, by sequential refinement: the
/// eigenspaces of `J_1`, each split by the eigenvalues of `J_2` restricted to
/// it, and so on. Tuples are sorted lexicographically.
pub fn common_eigenspaces(d: &DiagonalLindblad, tol: &Tolerances) -> Result<Vec<(EigTuple, Subspace)>> {
    let n = d.dim();
    if d.is_empty() {
        return Ok(vec![(EigTuple(vec![]), Subspace::full(n))]);
    }
    let thr = membership_threshold(d, tol);
    let spectra: Vec<Vec<Complex64>> = d
        .terms()
        .iter()
        .map(|t| {
            let merge = tol.cluster * (1.0 + frobenius(&t.jump));
            eigenspaces_with(&t.jump, merge, thr).map(|pairs| pairs.into_iter().map(|p| p.value).collect())
        })
        .collect::<Result<_>>()?;

    let mut branches: Vec<Subspace> = vec![Subspace::full(n)];
    for (t, spectrum) in d.terms().iter().zip(&spectra) {
        let mut next = Vec::new();
        for space in &branches {
            let jq = &t.jump * space.basis();
            for &c in spectrum {
                let shifted = &jq - space.basis() * c;
                let coeffs = kernel_below(&shifted, thr);
                if !coeffs.is_empty() {
                    next.push(space.sub(coeffs.basis()));
                }
            }
        }
        branches = next;
        if branches.is_empty() {
            break;
        }
    }

    let mut out: Vec<(EigTuple, Subspace)> = branches
        .into_iter()
        .map(|s| {
            let k = s.dim() as f64;
            let values = d.terms().iter().map(|t| s.compress(&t.jump).trace() / k).collect();
            (EigTuple(values), s)
        })
        .collect();
    out.sort_by(|a, b| a.0.lex_cmp(&b.0));
    Ok(out)
}

/// Outcome of [`maximal_invariant_subspace`].
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSubspace {
    pub subspace: Subspace,
    /// Number of refinement passes, including the final confirming pass.
    pub iterations: usize,
    /// Dimension after each pass.
    pub dims: Vec<usize>,
}

/// Largest subspace `S ⊆ start` with `hS ⊆ S`, by iterating
/// `S ← {v ∈ S : hv ∈ S}` (the kernel of `(I − P)hQ`) to a fixed point.
/// Vectors are kept when `‖(I − P)hv‖ ≤ tol·(1 + ‖h‖_F)`.
pub fn maximal_invariant_subspace(h: &ComplexMatrix, start: &Subspace, tol: f64) -> InvariantSubspace {
    let thr = tol * (1.0 + frobenius(h));
    let mut s = start.clone();
    let mut iterations = 0;
    let mut dims = Vec::new();
    while !s.is_empty() {
        iterations += 1;
        let q = s.basis();
        let hq = h * q;
        let leak = &hq - q * (q.adjoint() * &hq);
        let keep = kernel_below(&leak, thr);
        if keep.dim() == s.dim() {
            dims.push(s.dim());
            break;
        }
        s = if keep.is_empty() { Subspace::empty(start.ambient_dim()) } else { s.sub(keep.basis()) };
        dims.push(s.dim());
    }
    InvariantSubspace {
        subspace: s,
        iterations,
        dims,
    }
}

/// One pass of the commutator filter: vectors of `ej` annihilated by every
/// `[h_ev, J_l]`.
pub fn single_pass_filter(d: &DiagonalLindblad, h_ev: &ComplexMatrix, ej: &Subspace, tol: f64) -> Subspace {
    if ej.is_empty() || d.is_empty() {
        return ej.clone();
    }
    let k = ej.dim();
    let n = ej.ambient_dim();
    let mut stacked = ComplexMatrix::zeros(n * d.len(), k);
    let mut scale: f64 = 0.0;
    for (l, t) in d.terms().iter().enumerate() {
        let b = h_ev * &t.jump - &t.jump * h_ev;
        scale = scale.max(frobenius(&b));
        stacked.view_mut((l * n, 0), (n, k)).copy_from(&(b * ej.basis()));
    }
    let keep = kernel_below(&stacked, tol * (1.0 + scale));
    if keep.is_empty() {
        Subspace::empty(n)
    } else {
        ej.sub(keep.basis())
    }
}

/// Classification of a verified DFS.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifyOutcome {
    pub classification: Classification,
    /// `g = Σ λ_l |c_l|²`, attached for restricted subspaces.
    pub g: Option<f64>,
    /// `max_ψ ‖L_D[|ψ⟩⟨ψ|]‖_F` over the basis.
    pub witness: f64,
    /// Largest eigen-residual of `Σ λ_l c_l J_l†` over the basis.
    pub weighted_witness: f64,
    /// Largest eigen-residual of `Σ c_l J_l†` over the basis.
    pub unweighted_witness: f64,
}

fn eigen_residual(op: &ComplexMatrix, v: &ComplexVector) -> f64 {
    let mu = expectation(op, v);
    (op * v - v * mu).norm()
}

fn check_common_eigenvectors(m: &MasterEquationModel, c: &EigTuple, s: &Subspace, tol: &Tolerances) -> Result<()> {
    let d = m.lindblad();
    if c.len() != d.len() {
        return Err(DfsError::DimensionMismatch {
            expected: d.len(),
            found: c.len(),
            context: "eigenvalue tuple length".into(),
        });
    }
    if s.ambient_dim() != m.dim() {
        return Err(DfsError::DimensionMismatch {
            expected: m.dim(),
            found: s.ambient_dim(),
            context: "subspace".into(),
        });
    }
    let thr = membership_threshold(d, tol);
    for v in s.vectors() {
        for (l, (t, &cl)) in d.terms().iter().zip(c.values()).enumerate() {
            let r = (&t.jump * &v - &v * cl).norm();
            if r > thr {
                return Err(DfsError::InvalidSubspace(format!(
                    "basis vector is not an eigenvector of J_{} for c = {cl} (residual {r:.3e})",
                    l + 1
                )));
            }
        }
    }
    Ok(())
}

/// Restricted vs IGC. Both forms of the IGC operator are measured: the
/// rate-weighted `Σ λ_l c_l J_l†` and the unweighted `Σ c_l J_l†`.
pub fn classify(m: &MasterEquationModel, c: &EigTuple, s: &Subspace, tol: &Tolerances) -> Result<ClassifyOutcome> {
    if s.is_empty() {
        return Err(DfsError::InvalidSubspace("cannot classify an empty subspace".into()));
    }
    check_common_eigenvectors(m, c, s, tol)?;
    let d = m.lindblad();
    let n = m.dim();
    let mut weighted = ComplexMatrix::zeros(n, n);
    let mut unweighted = ComplexMatrix::zeros(n, n);
    for (t, &cl) in d.terms().iter().zip(c.values()) {
        let jd = t.jump.adjoint();
        weighted += &jd * (cl * t.rate);
        unweighted += jd * cl;
    }
    let mut witness: f64 = 0.0;
    let mut weighted_witness: f64 = 0.0;
    let mut unweighted_witness: f64 = 0.0;
    for v in s.vectors() {
        witness = witness.max(frobenius(&d.apply(&outer(&v, &v))));
        weighted_witness = weighted_witness.max(eigen_residual(&weighted, &v));
        unweighted_witness = unweighted_witness.max(eigen_residual(&unweighted, &v));
    }
    let thr = classify_threshold(n, tol);
    let g: f64 = d.terms().iter().zip(c.values()).map(|(t, cl)| t.rate * cl.norm_sqr()).sum();
    if witness <= thr {
        return Ok(ClassifyOutcome {
            classification: Classification::Restricted,
            g: Some(g),
            witness,
            weighted_witness,
            unweighted_witness,
        });
    }
    // ‖L_D[|ψ⟩⟨ψ|]‖_F equals the weighted residual over √2 for a common
    // eigenvector, so an IGC state must have both a non-zero c_l and a
    // non-zero weighted residual.
    if c.max_abs() <= tol.membership || weighted_witness <= thr {
        return Err(DfsError::Inconsistent(format!(
            "IGC subspace with max |c_l| = {:.3e} and weighted residual {weighted_witness:.3e}",
            c.max_abs()
        )));
    }
    Ok(ClassifyOutcome {
        classification: Classification::Igc,
        g: None,
        witness,
        weighted_witness,
        unweighted_witness,
    })
}

/// Commutator test for a restricted DFS: `[H_eff, J_l]v = 0` and
/// `[H_eff, Γ]v = 0` for every basis vector. Returns `false` when the basis
/// does not share one `Γ` eigenvalue.
pub fn restricted_dfs_conditions(m: &MasterEquationModel, s: &Subspace, c: &EigTuple, tol: &Tolerances) -> Result<bool> {
    check_common_eigenvectors(m, c, s, tol)?;
    let gamma = m.decoherence_operator();
    let h = m.h_eff();
    let gamma_thr = tol.membership * (1.0 + frobenius(gamma));
    let mut g_common: Option<Complex64> = None;
    for v in s.vectors() {
        let g = expectation(gamma, &v);
        if (gamma * &v - &v * g).norm() > gamma_thr {
            return Ok(false);
        }
        match g_common {
            None => g_common = Some(g),
            Some(g0) if (g0 - g).norm() > gamma_thr => return Ok(false),
            _ => {}
        }
    }
    let d = m.lindblad();
    let max_j = d.terms().iter().map(|t| frobenius(&t.jump)).fold(0.0, f64::max);
    let thr = tol.invariance * (1.0 + frobenius(h)) * (1.0 + max_j + frobenius(gamma));
    let mut commutators: Vec<ComplexMatrix> = d.terms().iter().map(|t| h * &t.jump - &t.jump * h).collect();
    commutators.push(h * gamma - gamma * h);
    Ok(s.vectors().all(|v| commutators.iter().all(|b| (b * &v).norm() <= thr)))
}

/// One discovered decoherence-free subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct DfsRecord {
    pub tuple: EigTuple,
    pub subspace: Subspace,
    pub classification: Classification,
    /// `Γ` eigenvalue `Σ λ_l |c_l|²`, restricted subspaces only.
    pub gamma_eigenvalue: Option<f64>,
    /// `Q† H_ev Q`.
    pub h_ev_restricted: ComplexMatrix,
    pub witness: f64,
    pub weighted_witness: f64,
    pub unweighted_witness: f64,
}

impl DfsRecord {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// Per-tuple log of the analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleDiagnostic {
    pub tuple: EigTuple,
    pub eigenspace_dim: usize,
    /// Dimension left by one pass of the commutator filter.
    pub single_pass_dim: usize,
    pub dfs_dim: usize,
    pub iterations: usize,
}

impl TupleDiagnostic {
    /// True when one commutator pass did not already give the invariant subspace.
    pub fn refinement_differs(&self) -> bool {
        self.single_pass_dim != self.dfs_dim
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub model_label: String,
    pub dim: usize,
    pub records: Vec<DfsRecord>,
    pub tuples_examined: usize,
    pub tolerances: Tolerances,
    pub diagnostics: Vec<TupleDiagnostic>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn count(&self, class: Classification) -> usize {
        self.records.iter().filter(|r| r.classification == class).count()
    }
}

pub const TRUNCATION_NOTE: &str = "truncated Fock-space demonstration: the completeness result requires a \
finite-dimensional system, so records here describe the truncated model only and no coherent-state DFS is claimed";

/// Enumerate every DFS of the model.
pub fn find_all_dfs(m: &MasterEquationModel, tol: &Tolerances) -> Result<AnalysisReport> {
    let d = m.lindblad();
    let mut notes = Vec::new();
    if m.is_truncated() {
        notes.push(TRUNCATION_NOTE.to_string());
    }
    if d.is_empty() {
        let full = Subspace::full(m.dim());
        let record = DfsRecord {
            tuple: EigTuple(vec![]),
            h_ev_restricted: m.h_eff().clone(),
            subspace: full,
            classification: Classification::Restricted,
            gamma_eigenvalue: Some(0.0),
            witness: 0.0,
            weighted_witness: 0.0,
            unweighted_witness: 0.0,
        };
        notes.push("no dissipator: the whole space evolves unitarily".into());
        return Ok(AnalysisReport {
            model_label: m.label().to_string(),
            dim: m.dim(),
            diagnostics: vec![TupleDiagnostic {
                tuple: EigTuple(vec![]),
                eigenspace_dim: m.dim(),
                single_pass_dim: m.dim(),
                dfs_dim: m.dim(),
                iterations: 0,
            }],
            records: if m.dim() > 0 { vec![record] } else { vec![] },
            tuples_examined: 1,
            tolerances: *tol,
            notes,
        });
    }

    let spaces = common_eigenspaces(d, tol)?;
    let analysed: Vec<(TupleDiagnostic, Option<DfsRecord>)> = spaces
        .par_iter()
        .map(|(c, ej)| analyse_tuple(m, c, ej, tol))
        .collect::<Result<_>>()?;
    let tuples_examined = analysed.len();
    let mut diagnostics = Vec::with_capacity(tuples_examined);
    let mut records = Vec::new();
    for (diag, rec) in analysed {
        diagnostics.push(diag);
        records.extend(rec);
    }
    Ok(AnalysisReport {
        model_label: m.label().to_string(),
        dim: m.dim(),
        records,
        tuples_examined,
        tolerances: *tol,
        diagnostics,
        notes,
    })
}

fn analyse_tuple(
    m: &MasterEquationModel,
    c: &EigTuple,
    ej: &Subspace,
    tol: &Tolerances,
) -> Result<(TupleDiagnostic, Option<DfsRecord>)> {
    let h_ev = m.evolution_hamiltonian(c)?;
    let inv = maximal_invariant_subspace(&h_ev, ej, tol.invariance);
    let single = single_pass_filter(m.lindblad(), &h_ev, ej, tol.invariance);
    let diag = TupleDiagnostic {
        tuple: c.clone(),
        eigenspace_dim: ej.dim(),
        single_pass_dim: single.dim(),
        dfs_dim: inv.subspace.dim(),
        iterations: inv.iterations,
    };
    if inv.subspace.is_empty() {
        return Ok((diag, None));
    }
    let s = inv.subspace;
    let outcome = classify(m, c, &s, tol)?;
    let h_small = s.compress(&h_ev);
    let h_ev_restricted = (&h_small + h_small.adjoint()) * c64(0.5, 0.0);
    Ok((
        diag,
        Some(DfsRecord {
            tuple: c.clone(),
            subspace: s,
            classification: outcome.classification,
            gamma_eigenvalue: outcome.g,
            h_ev_restricted,
            witness: outcome.witness,
            weighted_witness: outcome.weighted_witness,
            unweighted_witness: outcome.unweighted_witness,
        }),
    ))
}

/// Largest `‖(I − P) h P‖_F` leak of `h` out of `s`.
pub fn invariance_defect(h: &ComplexMatrix, s: &Subspace) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let p = s.projector();
    let n = p.nrows();
    frobenius(&((identity(n) - &p) * h * p))
}

/// Largest spread of `⟨ψ_i|J_l|ψ_i⟩` across the basis of `s`.
pub fn tuple_spread(d: &DiagonalLindblad, s: &Subspace) -> f64 {
    let mut worst: f64 = 0.0;
    for t in d.terms() {
        let vals: Vec<Complex64> = s.vectors().map(|v| expectation(&t.jump, &v)).collect();
        if let Some(&first) = vals.first() {
            for v in &vals {
                worst = worst.max((v - first).norm());
            }
        }
    }
    worst
}
