//! Markovian master equations `ρ̇ = −i[H_eff, ρ] + L_D[ρ]` and the operators
//! derived from them.
//!
//! A dissipator is supplied either over an operator basis `{F_k}` with a
//! positive-semidefinite coefficient matrix `A` (GKS form) or directly as
//! rates and jump operators. GKS input is diagonalized once at construction;
//! every operation below works on the diagonal form.

use std::fmt;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{DfsError, Result};
use crate::linalg::{
    c64, cmp_complex, ensure_finite, ensure_hermitian, ensure_square, frobenius, hermitian_deviation,
    hermitian_eigenvalues, identity, orthonormalize_columns, ComplexMatrix, ComplexVector, I, ZERO,
};

/// One term `λ_l · D[J_l]` of a diagonal dissipator.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladTerm {
    pub rate: f64,
    pub jump: ComplexMatrix,
}

impl LindbladTerm {
    pub fn new(rate: f64, jump: ComplexMatrix) -> Self {
        Self { rate, jump }
    }
}

/// Dissipator in diagonal form: strictly positive rates with jump operators.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalLindblad {
    dim: usize,
    terms: Vec<LindbladTerm>,
}

impl DiagonalLindblad {
    /// Validates dimensions and drops terms with `rate ≤ tol_rate`. A rate
    /// below `−tol_rate` is rejected.
    pub fn new(dim: usize, terms: Vec<LindbladTerm>, tol_rate: f64) -> Result<Self> {
        let mut kept = Vec::with_capacity(terms.len());
        for (l, term) in terms.into_iter().enumerate() {
            ensure_finite(&term.jump, &format!("jump operator {l}"))?;
            if term.jump.nrows() != dim || term.jump.ncols() != dim {
                return Err(DfsError::DimensionMismatch {
                    expected: dim,
                    found: term.jump.nrows().max(term.jump.ncols()),
                    context: format!("jump operator {l}"),
                });
            }
            if !term.rate.is_finite() {
                return Err(DfsError::NonFinite(format!("rate {l}")));
            }
            if term.rate < -tol_rate {
                return Err(DfsError::NotPsd {
                    min_eigenvalue: term.rate,
                });
            }
            if term.rate > tol_rate {
                kept.push(term);
            }
        }
        if dim > 0 && kept.len() > dim * dim - 1 {
            return Err(DfsError::InvalidModel(format!(
                "{} jump operators exceed the maximum {} for dimension {dim}",
                kept.len(),
                dim * dim - 1
            )));
        }
        Ok(Self { dim, terms: kept })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[LindbladTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_rate(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.rate).reduce(f64::max)
    }

    /// `Γ = Σ λ_l J_l† J_l`.
    pub fn decoherence_operator(&self) -> ComplexMatrix {
        let mut gamma = ComplexMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            gamma += t.jump.adjoint() * &t.jump * c64(t.rate, 0.0);
        }
        gamma
    }

    /// `L_D[ρ] = ½ Σ λ_l ([J_l ρ, J_l†] + [J_l, ρ J_l†])`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            let jd = t.jump.adjoint();
            let j_rho = &t.jump * rho;
            let rho_jd = rho * &jd;
            let term = (&j_rho * &jd - &jd * &j_rho) + (&t.jump * &rho_jd - &rho_jd * &t.jump);
            out += term * c64(0.5 * t.rate, 0.0);
        }
        out
    }
}

/// Dissipator over an explicit operator basis `F_1..F_{N²−1}` (the identity
/// `F_0` excluded) with coefficient matrix `A = (a_kl)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GksDissipator {
    dim: usize,
    basis: Vec<ComplexMatrix>,
    coeff: ComplexMatrix,
}

impl GksDissipator {
    pub fn new(dim: usize, basis: Vec<ComplexMatrix>, coeff: ComplexMatrix, tol: f64) -> Result<Self> {
        let count = dim * dim - 1;
        if basis.len() != count {
            return Err(DfsError::InvalidModel(format!(
                "GKS basis must have {count} elements for dimension {dim}, found {}",
                basis.len()
            )));
        }
        for (k, f) in basis.iter().enumerate() {
            ensure_finite(f, &format!("basis element {}", k + 1))?;
            if f.nrows() != dim || f.ncols() != dim {
                return Err(DfsError::DimensionMismatch {
                    expected: dim,
                    found: f.nrows().max(f.ncols()),
                    context: format!("basis element {}", k + 1),
                });
            }
        }
        // Identity plus the basis must span all N×N operators.
        let mut stacked = ComplexMatrix::zeros(dim * dim, dim * dim);
        stacked.set_column(0, &ComplexVector::from_iterator(dim * dim, identity(dim).iter().copied()));
        for (k, f) in basis.iter().enumerate() {
            stacked.set_column(k + 1, &ComplexVector::from_iterator(dim * dim, f.iter().copied()));
        }
        if orthonormalize_columns(&stacked, 1e-10).dim() != dim * dim {
            return Err(DfsError::InvalidModel(
                "GKS basis together with the identity is linearly dependent".into(),
            ));
        }
        ensure_finite(&coeff, "coefficient matrix A")?;
        if coeff.nrows() != count || coeff.ncols() != count {
            return Err(DfsError::DimensionMismatch {
                expected: count,
                found: coeff.nrows().max(coeff.ncols()),
                context: "coefficient matrix A".into(),
            });
        }
        ensure_hermitian(&coeff, tol, "coefficient matrix A")?;
        let min = hermitian_eigenvalues(&coeff).first().copied().unwrap_or(0.0);
        if min < -tol * frobenius(&coeff).max(f64::MIN_POSITIVE) {
            return Err(DfsError::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { dim, basis, coeff })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn coeff(&self) -> &ComplexMatrix {
        &self.coeff
    }

    /// Direct double-sum evaluation
    /// `½ Σ_kl a_kl ([F_k, ρ F_l†] + [F_k ρ, F_l†])`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, fk) in self.basis.iter().enumerate() {
            let fk_rho = fk * rho;
            for (l, fl) in self.basis.iter().enumerate() {
                let a = self.coeff[(k, l)];
                if a == ZERO {
                    continue;
                }
                let fl_dag = fl.adjoint();
                let rho_fl_dag = rho * &fl_dag;
                let term = (fk * &rho_fl_dag - &rho_fl_dag * fk) + (&fk_rho * &fl_dag - &fl_dag * &fk_rho);
                out += term * (a * 0.5);
            }
        }
        out
    }

    /// Diagonalize `A = U diag(λ) U†` and form `J_m = Σ_k U_km F_k`.
    /// Eigenvalues at or below `tol_rate · trace(A)` are dropped. Each jump's
    /// phase is fixed so its largest coefficient `U_km` is real and positive.
    pub fn diagonalize(&self, tol_rate: f64) -> Result<DiagonalLindblad> {
        let trace: f64 = (0..self.coeff.nrows()).map(|k| self.coeff[(k, k)].re).sum();
        let sym = (&self.coeff + self.coeff.adjoint()) * c64(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        let cutoff = tol_rate * trace.abs();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let mut terms = Vec::new();
        for m in order {
            let rate = eig.eigenvalues[m];
            if rate <= cutoff {
                continue;
            }
            let mut u: ComplexVector = eig.eigenvectors.column(m).into_owned();
            let max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if let Some(pivot) = u.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied() {
                let phase = pivot.conj() / pivot.norm();
                u *= phase;
            }
            let mut jump = ComplexMatrix::zeros(self.dim, self.dim);
            for (k, f) in self.basis.iter().enumerate() {
                if u[k] != ZERO {
                    jump += f * u[k];
                }
            }
            terms.push(LindbladTerm::new(rate, jump));
        }
        DiagonalLindblad::new(self.dim, terms, cutoff)
    }
}

/// The dissipator exactly as supplied by the user.
#[derive(Clone, Debug, PartialEq)]
pub enum Dissipator {
    Gks(GksDissipator),
    Diagonal(DiagonalLindblad),
}

/// Eigenvalue tuple `(c_1, …, c_M)` of the jump operators.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EigTuple(pub Vec<Complex64>);

impl EigTuple {
    pub fn zeros(m: usize) -> Self {
        Self(vec![ZERO; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Lexicographic order by real, then imaginary parts, component-wise.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let ord = cmp_complex(a, b);
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl fmt::Display for EigTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let re = if z.re.abs() < 5e-13 { 0.0 } else { z.re };
            let im = if z.im.abs() < 5e-13 { 0.0 } else { z.im };
            if im == 0.0 {
                write!(f, "{re:.6}")?;
            } else {
                write!(f, "{re:.6}{im:+.6}i")?;
            }
        }
        write!(f, ")")
    }
}

/// A finite-dimensional Markovian master equation.
#[derive(Clone, Debug)]
pub struct MasterEquationModel {
    label: String,
    dim: usize,
    h_eff: ComplexMatrix,
    dissipator: Dissipator,
    lindblad: DiagonalLindblad,
    gamma: ComplexMatrix,
    h_nh: ComplexMatrix,
    truncated: bool,
}

impl MasterEquationModel {
    pub fn new(label: impl Into<String>, h_eff: ComplexMatrix, dissipator: Dissipator, tol: &Tolerances) -> Result<Self> {
        let dim = ensure_square(&h_eff)?;
        ensure_finite(&h_eff, "h_eff")?;
        ensure_hermitian(&h_eff, tol.hermitian, "h_eff")?;
        let lindblad = match &dissipator {
            Dissipator::Gks(g) => {
                if g.dim() != dim {
                    return Err(DfsError::DimensionMismatch {
                        expected: dim,
                        found: g.dim(),
                        context: "GKS dissipator".into(),
                    });
                }
                g.diagonalize(tol.rate)?
            }
            Dissipator::Diagonal(d) => {
                if d.dim() != dim {
                    return Err(DfsError::DimensionMismatch {
                        expected: dim,
                        found: d.dim(),
                        context: "diagonal dissipator".into(),
                    });
                }
                d.clone()
            }
        };
        let gamma = lindblad.decoherence_operator();
        let h_nh = &h_eff - &gamma * c64(0.0, 0.5);
        Ok(Self {
            label: label.into(),
            dim,
            h_eff,
            dissipator,
            lindblad,
            gamma,
            h_nh,
            truncated: false,
        })
    }

    /// Convenience constructor for diagonal-form models with default tolerances.
    pub fn diagonal(label: impl Into<String>, h_eff: ComplexMatrix, terms: Vec<LindbladTerm>) -> Result<Self> {
        let tol = Tolerances::default();
        let dim = h_eff.nrows();
        let d = DiagonalLindblad::new(dim, terms, 0.0)?;
        Self::new(label, h_eff, Dissipator::Diagonal(d), &tol)
    }

    /// Mark the model as a truncation of an infinite-dimensional system.
    pub fn with_truncation_flag(mut self, truncated: bool) -> Self {
        self.truncated = truncated;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h_eff(&self) -> &ComplexMatrix {
        &self.h_eff
    }

    pub fn dissipator(&self) -> &Dissipator {
        &self.dissipator
    }

    pub fn lindblad(&self) -> &DiagonalLindblad {
        &self.lindblad
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// `Γ = Σ λ_l J_l† J_l`.
    pub fn decoherence_operator(&self) -> &ComplexMatrix {
        &self.gamma
    }

    /// `H_nh = H_eff − iΓ/2`.
    pub fn non_hermitian_hamiltonian(&self) -> &ComplexMatrix {
        &self.h_nh
    }

    fn check_operand(&self, rho: &ComplexMatrix, what: &str) -> Result<()> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(DfsError::DimensionMismatch {
                expected: self.dim,
                found: if rho.nrows() != self.dim { rho.nrows() } else { rho.ncols() },
                context: what.to_string(),
            });
        }
        Ok(())
    }

    fn check_tuple(&self, c: &EigTuple) -> Result<()> {
        if c.len() != self.lindblad.len() {
            return Err(DfsError::DimensionMismatch {
                expected: self.lindblad.len(),
                found: c.len(),
                context: "eigenvalue tuple length".into(),
            });
        }
        Ok(())
    }

    /// `L_D[ρ]`.
    pub fn apply_dissipator(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(rho, "density matrix")?;
        Ok(self.lindblad.apply(rho))
    }

    /// `−i[H_eff, ρ] + L_D[ρ]`.
    pub fn liouvillian_apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(rho, "density matrix")?;
        // −i(H_nh ρ − ρ H_nh†) + Σ λ_l J_l ρ J_l†
        let h_rho = &self.h_nh * rho;
        let rho_h = rho * self.h_nh.adjoint();
        let mut out = (h_rho - rho_h) * c64(0.0, -1.0);
        for t in self.lindblad.terms() {
            out += &t.jump * rho * t.jump.adjoint() * c64(t.rate, 0.0);
        }
        Ok(out)
    }

    /// `H_D(b) = (i/2) Σ λ_l (b_l* J_l − b_l J_l†)`.
    pub fn shift_hamiltonian(&self, b: &EigTuple) -> Result<ComplexMatrix> {
        self.check_tuple(b)?;
        let mut h = ComplexMatrix::zeros(self.dim, self.dim);
        for (t, &bl) in self.lindblad.terms().iter().zip(b.values()) {
            let part = &t.jump * bl.conj() - t.jump.adjoint() * bl;
            h += part * (I * 0.5 * t.rate);
        }
        Ok(h)
    }

    /// `H_ev = H_eff + (i/2) Σ λ_l (c_l* J_l − c_l J_l†)`.
    pub fn evolution_hamiltonian(&self, c: &EigTuple) -> Result<ComplexMatrix> {
        Ok(&self.h_eff + self.shift_hamiltonian(c)?)
    }

    /// The equivalent model with `J_l → J_l − b_l I` and `H_eff → H_eff + H_D(b)`.
    pub fn shift_transform(&self, b: &EigTuple) -> Result<Self> {
        let h = self.evolution_hamiltonian(b)?;
        let eye = identity(self.dim);
        let terms = self
            .lindblad
            .terms()
            .iter()
            .zip(b.values())
            .map(|(t, &bl)| LindbladTerm::new(t.rate, &t.jump - &eye * bl))
            .collect();
        let d = DiagonalLindblad {
            dim: self.dim,
            terms,
        };
        let gamma = d.decoherence_operator();
        let h_nh = &h - &gamma * c64(0.0, 0.5);
        Ok(Self {
            label: self.label.clone(),
            dim: self.dim,
            h_eff: h,
            dissipator: Dissipator::Diagonal(d.clone()),
            lindblad: d,
            gamma,
            h_nh,
            truncated: self.truncated,
        })
    }

    /// Largest relative Hermiticity defect among the model's Hermitian operators.
    pub fn hermiticity_defect(&self) -> f64 {
        hermitian_deviation(&self.h_eff).max(hermitian_deviation(&self.gamma))
    }
}
