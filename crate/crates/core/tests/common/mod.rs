#![allow(dead_code)]

use dfs_core::linalg::{c64, ComplexMatrix, ComplexVector};
use dfs_core::MasterEquationModel;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Column-stacking superoperator of the full generator, built from Kronecker
/// products: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
pub fn superoperator(m: &MasterEquationModel) -> ComplexMatrix {
    let n = m.dim();
    let eye = ComplexMatrix::identity(n, n);
    let h = m.h_eff();
    let mut l = (eye.kronecker(h) - h.transpose().kronecker(&eye)) * c64(0.0, -1.0);
    for t in m.lindblad().terms() {
        let j = &t.jump;
        let jdj = j.adjoint() * j;
        let term = j.conjugate().kronecker(j) - (eye.kronecker(&jdj) + jdj.transpose().kronecker(&eye)) * c64(0.5, 0.0);
        l += term * c64(t.rate, 0.0);
    }
    l
}

pub fn vec_of(rho: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(rho.as_slice())
}

pub fn unvec(v: &ComplexVector, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

pub fn purity(rho: &ComplexMatrix) -> f64 {
    (rho * rho).trace().re
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn haar_state(rng: &mut impl Rng, n: usize) -> ComplexVector {
    let v = gaussian_vector(rng, n);
    let norm = v.norm();
    v / c64(norm, 0.0)
}

pub fn random_density(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn projector(psi: &ComplexVector) -> ComplexMatrix {
    psi * psi.adjoint()
}

pub fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

pub fn phase_aligned_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c64(1.0, 0.0) };
    (a * phase - b).norm()
}

pub fn criterion(n: u32, ok: bool, detail: &str) {
    println!("{} criterion {n}: {detail}", if ok { "PASS" } else { "FAIL" });
}
