//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Eigen-solvers, SVD and the
//! matrix exponential come from nalgebra; this module layers the
//! rank-revealing, clustering and subspace logic on top of them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{DfsError, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default relative rank tolerance.
pub const DEFAULT_TOL_RANK: f64 = 1e-10;

/// Relative eigenvalue perturbation allowed for a cluster of algebraic
/// multiplicity `m` is `DEFECT_SCALE^(1/m)`.
const DEFECT_SCALE: f64 = 1e-12;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm.
pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(DfsError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(DfsError::NonFinite(what.to_string()))
    }
}

/// `‖m − m†‖_F / ‖m‖_F`, zero for the zero matrix.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let norm = frobenius(m);
    if norm == 0.0 {
        return 0.0;
    }
    frobenius(&(m - m.adjoint())) / norm
}

pub fn ensure_hermitian(m: &ComplexMatrix, tol: f64, what: &str) -> Result<()> {
    ensure_square(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > tol {
        return Err(DfsError::NotHermitian {
            what: what.to_string(),
            deviation,
        });
    }
    Ok(())
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// `|u⟩⟨v|`
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// Computational basis vector `|k⟩` in dimension `n`.
pub fn basis_vector(n: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(n);
    v[k] = ONE;
    v
}

/// Trace of `a·b` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// An orthonormal basis (stored as matrix columns) of a subspace of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: ComplexMatrix,
}

impl Subspace {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: ComplexMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: identity(ambient_dim),
        }
    }

    /// Wrap columns that are already orthonormal; fails if the Gram matrix
    /// deviates from identity by more than `tol` in any entry.
    pub fn from_orthonormal_columns(basis: ComplexMatrix, tol: f64) -> Result<Self> {
        let k = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let deviation = (gram - identity(k))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > tol {
            return Err(DfsError::InvalidSubspace(format!(
                "basis is not orthonormal (Gram deviation {deviation:.3e})"
            )));
        }
        if k > basis.nrows() {
            return Err(DfsError::InvalidSubspace(format!(
                "{k} basis vectors in dimension {}",
                basis.nrows()
            )));
        }
        Ok(Self {
            ambient_dim: basis.nrows(),
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.basis.column(k).into_owned()
    }

    pub fn vectors(&self) -> impl Iterator<Item = ComplexVector> + '_ {
        (0..self.dim()).map(move |k| self.vector(k))
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `‖v − Pv‖ / ‖v‖`.
    pub fn projection_residual(&self, v: &ComplexVector) -> f64 {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let coeffs = self.basis.adjoint() * v;
        (v - &self.basis * coeffs).norm() / norm
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let gram = self.basis.adjoint() * &self.basis;
        (gram - identity(self.dim()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Principal angles (radians, ascending) between `self` and `other`;
    /// `min(dim)` angles are returned.
    pub fn principal_angles(&self, other: &Subspace) -> Vec<f64> {
        if self.is_empty() || other.is_empty() {
            return Vec::new();
        }
        // Project the smaller subspace onto the larger; cosines and sines
        // come from separate SVDs so small angles stay accurate.
        let (big, small) = if self.dim() >= other.dim() { (self, other) } else { (other, self) };
        let overlap = big.basis.adjoint() * &small.basis;
        let residual = &small.basis - &big.basis * &overlap;
        let mut cosines: Vec<f64> = overlap.svd(false, false).singular_values.iter().copied().collect();
        let mut sines: Vec<f64> = residual.svd(false, false).singular_values.iter().copied().collect();
        cosines.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sines.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cosines
            .into_iter()
            .zip(sines)
            .map(|(c, s)| s.atan2(c))
            .collect()
    }

    /// True when both subspaces have equal dimension and every principal
    /// angle is at most `tol`.
    pub fn same_span(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.ambient_dim == other.ambient_dim
            && self.principal_angles(other).iter().all(|&a| a <= tol)
    }

    /// `Q† h Q`, the operator compressed onto this subspace.
    pub fn compress(&self, h: &ComplexMatrix) -> ComplexMatrix {
        self.basis.adjoint() * h * &self.basis
    }

    /// Orthonormal basis of `{Q a : a ∈ span(coeffs)}` for coefficient
    /// columns expressed in this subspace's basis.
    pub fn sub(&self, coeffs: &ComplexMatrix) -> Subspace {
        orthonormalize_columns(&(&self.basis * coeffs), DEFAULT_TOL_RANK)
    }
}

/// One eigenvalue together with a basis of its geometric eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub vectors: Subspace,
}

/// Eigen-decomposition of a Hermitian matrix with degenerate eigenvalues
/// grouped. Pairs are sorted by descending eigenvalue.
pub fn hermitian_eigendecompose(m: &ComplexMatrix, tol: f64) -> Result<Vec<EigenPair>> {
    ensure_hermitian(m, tol, "matrix")?;
    let n = m.nrows();
    let sym = (m + m.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let radius = tol.max(1e-13) * (1.0 + frobenius(m));
    let mut pairs: Vec<EigenPair> = Vec::new();
    let mut group: Vec<usize> = Vec::new();
    let flush = |group: &mut Vec<usize>, pairs: &mut Vec<EigenPair>| {
        if group.is_empty() {
            return;
        }
        let mean = group.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / group.len() as f64;
        let mut basis = ComplexMatrix::zeros(n, group.len());
        for (col, &i) in group.iter().enumerate() {
            basis.set_column(col, &eig.eigenvectors.column(i));
        }
        pairs.push(EigenPair {
            value: c64(mean, 0.0),
            vectors: Subspace {
                ambient_dim: n,
                basis,
            },
        });
        group.clear();
    };
    for &i in &order {
        if let Some(&last) = group.last() {
            if (eig.eigenvalues[last] - eig.eigenvalues[i]).abs() > radius {
                flush(&mut group, &mut pairs);
            }
        }
        group.push(i);
    }
    flush(&mut group, &mut pairs);
    Ok(pairs)
}

/// Real eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c64(0.5, 0.0);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// All eigenvalues (with algebraic multiplicity) from a complex Schur form.
///
/// Uses faer's Hessenberg QR; nalgebra's complex Schur iteration stalls on
/// the highly degenerate collective jump operators.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    ensure_finite(m, "matrix")?;
    let f = faer::Mat::<Complex64>::from_fn(n, n, |i, j| m[(i, j)]);
    f.eigenvalues()
        .map_err(|e| DfsError::NoConvergence(format!("eigenvalues of {n}x{n} matrix: {e:?}")))
}

/// Default eigenvalue clustering radius for `m`.
pub fn default_cluster_tol(m: &ComplexMatrix) -> f64 {
    1e-8 * (1.0 + frobenius(m))
}

/// Eigenvalues of a (possibly non-normal or defective) matrix together with
/// their geometric eigenspaces `ker(m − cI)`.
///
/// Computed eigenvalues of a defective eigenvalue of multiplicity `k` scatter
/// on a circle of radius `O(ε^{1/k})`, so clusters are formed coarse-to-fine:
/// a cluster is accepted once its spread is compatible with that bound and the
/// kernel at its mean is non-trivial. `tol_cluster` is both the final merge
/// radius and the residual threshold `‖(m − cI)v‖ ≤ tol_cluster` for kernel
/// membership. Pairs are sorted lexicographically by (re, im).
pub fn geometric_eigenspaces(m: &ComplexMatrix, tol_cluster: f64) -> Result<Vec<EigenPair>> {
    eigenspaces_with(m, tol_cluster, tol_cluster)
}

pub(crate) fn eigenspaces_with(
    m: &ComplexMatrix,
    merge_radius: f64,
    kernel_threshold: f64,
) -> Result<Vec<EigenPair>> {
    let n = ensure_square(m)?;
    ensure_finite(m, "matrix")?;
    let values = eigenvalues(m)?;
    let scale = 1.0 + frobenius(m);
    let kernel_at = |mu: Complex64| {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] -= mu;
        }
        kernel_below(&shifted, kernel_threshold)
    };

    let mut accepted: Vec<EigenPair> = Vec::new();
    let mut pending: Vec<Complex64> = values;
    let mut radius = (0.1 * scale).max(merge_radius);
    loop {
        let last = radius <= merge_radius;
        let clusters = single_linkage(&pending, radius);
        let mut remaining = Vec::new();
        for cluster in clusters {
            let members: Vec<Complex64> = cluster.iter().map(|&i| pending[i]).collect();
            let mu = members.iter().sum::<Complex64>() / members.len() as f64;
            let spread = members.iter().map(|z| (z - mu).norm()).fold(0.0, f64::max);
            let allowed = scale * DEFECT_SCALE.powf(1.0 / members.len() as f64);
            if spread <= allowed.max(merge_radius) || last {
                let kernel = kernel_at(mu);
                if !kernel.is_empty() {
                    accepted.push(EigenPair {
                        value: mu,
                        vectors: kernel,
                    });
                    continue;
                }
            }
            remaining.extend(members);
        }
        pending = remaining;
        if pending.is_empty() || last {
            break;
        }
        radius = (radius / 10.0).max(merge_radius);
    }

    accepted.sort_by(|a, b| cmp_complex(&a.value, &b.value));
    // Merge accepted clusters that ended up within the merge radius.
    let mut merged: Vec<EigenPair> = Vec::new();
    for pair in accepted {
        if let Some(prev) = merged.last_mut() {
            if (prev.value - pair.value).norm() <= merge_radius {
                let mut cols: Vec<ComplexVector> = prev.vectors.vectors().collect();
                cols.extend(pair.vectors.vectors());
                prev.vectors = orthonormalize_in(n, &cols, DEFAULT_TOL_RANK);
                continue;
            }
        }
        merged.push(pair);
    }
    Ok(merged)
}

/// Lexicographic order on complex numbers: real part, then imaginary part.
pub fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re
        .partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

fn single_linkage(points: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Orthonormal basis of `{v : ‖mv‖ ≤ threshold·‖v‖}` from the right singular
/// vectors of `m`.
pub fn kernel_below(m: &ComplexMatrix, threshold: f64) -> Subspace {
    let cols = m.ncols();
    if cols == 0 {
        return Subspace::empty(0);
    }
    if m.nrows() == 0 {
        return Subspace::full(cols);
    }
    // Pad with zero rows so the SVD returns a full set of right vectors.
    let padded;
    let a = if m.nrows() < cols {
        let mut p = ComplexMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = a.clone().svd(false, true);
    let v = svd.v_t.expect("requested V").adjoint();
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= threshold)
        .map(|(i, _)| i)
        .collect();
    let mut basis = ComplexMatrix::zeros(cols, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        basis.set_column(col, &v.column(i));
    }
    Subspace {
        ambient_dim: cols,
        basis,
    }
}

/// Orthonormal basis of `{v : ‖mv‖ ≤ tol_rank·‖m‖_F·‖v‖}`.
pub fn nullspace(m: &ComplexMatrix, tol_rank: f64) -> Subspace {
    kernel_below(m, tol_rank * frobenius(m))
}

/// Matrix exponential (Padé approximation with scaling and squaring).
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    Ok(m.exp())
}

/// Rank-revealing orthonormalization of the columns of `m`: left singular
/// vectors whose singular value exceeds `tol_rank·σ_max`.
pub fn orthonormalize_columns(m: &ComplexMatrix, tol_rank: f64) -> Subspace {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return Subspace::empty(n);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Subspace::empty(n);
    }
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol_rank * smax)
        .map(|(i, _)| i)
        .collect();
    let mut basis = ComplexMatrix::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        basis.set_column(col, &u.column(i));
    }
    Subspace {
        ambient_dim: n,
        basis,
    }
}

fn orthonormalize_in(n: usize, vectors: &[ComplexVector], tol_rank: f64) -> Subspace {
    let mut m = ComplexMatrix::zeros(n, vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        m.set_column(k, v);
    }
    orthonormalize_columns(&m, tol_rank)
}

/// Orthonormal basis for the span of `vectors`; linearly dependent inputs are
/// dropped. An empty input yields an empty subspace of dimension 0.
pub fn orthonormalize(vectors: &[ComplexVector], tol_rank: f64) -> Subspace {
    match vectors.first() {
        None => Subspace::empty(0),
        Some(v) => orthonormalize_in(v.len(), vectors, tol_rank),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn real(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(rows, cols, &data.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>())
    }

    fn sigma_x() -> ComplexMatrix {
        real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    fn sigma_y_standard() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    #[test]
    fn hermitian_identity_is_one_degenerate_pair() {
        let pairs = hermitian_eigendecompose(&identity(2), 1e-10).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].value - ONE).norm() < 1e-14);
        assert_eq!(pairs[0].vectors.dim(), 2);
        assert!(pairs[0].vectors.gram_deviation() < 1e-12);
    }

    #[test]
    fn hermitian_diagonal_pairs() {
        let pairs = hermitian_eigendecompose(&real(2, 2, &[2.0, 0.0, 0.0, 0.0]), 1e-10).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!((pairs[0].value.re - 2.0).abs() < 1e-14);
        assert!(pairs[0].vectors.projection_residual(&basis_vector(2, 0)) < 1e-12);
        assert!(pairs[1].value.re.abs() < 1e-14);
        assert!(pairs[1].vectors.projection_residual(&basis_vector(2, 1)) < 1e-12);
    }

    #[test]
    fn hermitian_rejects_non_hermitian_and_non_square() {
        let m = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eigendecompose(&m, 1e-10), Err(DfsError::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigendecompose(&r, 1e-10), Err(DfsError::NotSquare { .. })));
    }

    #[test]
    fn hermitian_reconstruction() {
        let m = ComplexMatrix::from_row_slice(
            3,
            3,
            &[c64(2.0, 0.0), c64(0.5, 0.5), c64(0.0, -1.0), c64(0.5, -0.5), c64(1.0, 0.0), c64(0.3, 0.0), c64(0.0, 1.0), c64(0.3, 0.0), c64(-1.0, 0.0)],
        );
        let pairs = hermitian_eigendecompose(&m, 1e-10).unwrap();
        let mut recon = ComplexMatrix::zeros(3, 3);
        for p in &pairs {
            recon += p.vectors.projector() * p.value;
        }
        assert!(frobenius(&(recon - &m)) <= 1e-10 * frobenius(&m));
    }

    #[test]
    fn nilpotent_three_level_jump_has_two_dimensional_kernel() {
        // (|0⟩⟨1| + |0⟩⟨2|)/√2; hand nullspace: v1 = −v2, v0 free.
        let j = real(3, 3, &[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let pairs = geometric_eigenspaces(&j, default_cluster_tol(&j)).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].value.norm() < 1e-12);
        let expected = orthonormalize(
            &[basis_vector(3, 0), (basis_vector(3, 1) - basis_vector(3, 2)) * c64(FRAC_1_SQRT_2, 0.0)],
            1e-10,
        );
        assert!(pairs[0].vectors.same_span(&expected, 1e-10));
    }

    #[test]
    fn two_by_two_non_normal_eigenspaces() {
        // |0⟩⟨0| + |0⟩⟨1|: c=1 on |0⟩, c=0 on (|0⟩ − |1⟩)/√2.
        let j = real(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let pairs = geometric_eigenspaces(&j, default_cluster_tol(&j)).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(pairs[0].value.norm() < 1e-12);
        let v0 = (basis_vector(2, 0) - basis_vector(2, 1)) * c64(FRAC_1_SQRT_2, 0.0);
        assert!(pairs[0].vectors.projection_residual(&v0) < 1e-10);
        assert!((pairs[1].value - ONE).norm() < 1e-12);
        assert!(pairs[1].vectors.projection_residual(&basis_vector(2, 0)) < 1e-10);
    }

    #[test]
    fn identity_is_single_cluster() {
        let pairs = geometric_eigenspaces(&identity(4), 1e-8).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].vectors.dim(), 4);
    }

    #[test]
    fn rotated_jordan_block_keeps_one_eigenvector() {
        // Unitarily rotated 5x5 nilpotent Jordan block: Schur eigenvalues
        // scatter by ~ε^{1/5}, the kernel is still one-dimensional.
        let n = 5;
        let mut jb = ComplexMatrix::zeros(n, n);
        for i in 0..n - 1 {
            jb[(i, i + 1)] = ONE;
        }
        let h = ComplexMatrix::from_fn(n, n, |i, k| {
            let x = ((i * 7 + k * 3) % 5) as f64 * 0.3;
            c64(x + if i == k { 1.0 } else { 0.0 }, (i as f64 - k as f64) * 0.2)
        });
        let herm = (&h + h.adjoint()) * c64(0.5, 0.0);
        let u = matrix_exponential(&(herm * I)).unwrap();
        let m = &u * jb * u.adjoint();
        let pairs = geometric_eigenspaces(&m, default_cluster_tol(&m)).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].value.norm() < 1e-10);
        assert_eq!(pairs[0].vectors.dim(), 1);
        let v = pairs[0].vectors.vector(0);
        assert!((&m * v).norm() < 1e-10);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace(&ComplexMatrix::zeros(3, 3), 1e-10).dim(), 3);
        assert_eq!(nullspace(&identity(3), 1e-10).dim(), 0);
        let wide = real(1, 3, &[1.0, 1.0, 0.0]);
        let k = nullspace(&wide, 1e-10);
        assert_eq!(k.dim(), 2);
        for v in k.vectors() {
            assert!((&wide * v).norm() < 1e-12);
        }
    }

    #[test]
    fn exponential_examples() {
        assert!(frobenius(&(matrix_exponential(&ComplexMatrix::zeros(3, 3)).unwrap() - identity(3))) < 1e-15);
        let rot = matrix_exponential(&(sigma_x() * c64(0.0, PI / 2.0))).unwrap();
        assert!(frobenius(&(rot - sigma_x() * I)) < 1e-12);
        let minus = matrix_exponential(&(sigma_y_standard() * c64(0.0, -PI))).unwrap();
        assert!(frobenius(&(minus + identity(2))) < 1e-12);
    }

    #[test]
    fn orthonormalize_examples() {
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        let s = orthonormalize(&[e1.clone(), &e1 + &e2], 1e-10);
        assert_eq!(s.dim(), 2);
        assert!(s.same_span(&Subspace::full(2), 1e-10));
        let v = ComplexVector::from_vec(vec![c64(1.0, 1.0), c64(0.0, 2.0), c64(-1.0, 0.0)]);
        let s = orthonormalize(&[v.clone(), &v * c64(2.0, 0.0)], 1e-10);
        assert_eq!(s.dim(), 1);
        assert!(s.projection_residual(&v) < 1e-12);
        assert!(orthonormalize(&[], 1e-10).is_empty());
    }

    #[test]
    fn from_orthonormal_columns_rejects_skewed_basis() {
        let skew = real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(Subspace::from_orthonormal_columns(skew, 1e-10).is_err());
    }
}
