//! Parameterized constructors for the reference models, plus seeded random
//! models for property tests.
//!
//! Conventions, fixed for every entry: basis order `(|0⟩, |1⟩)` with `|1⟩` the
//! excited state, `σ₋ = |0⟩⟨1|`, `σ₊ = |1⟩⟨0|`, `σ_z = |1⟩⟨1| − |0⟩⟨0|`,
//! `σ_y = i(σ₋ − σ₊)`, `σ_x = σ₋ + σ₊`. Multi-qubit states are ordered with
//! the first atom as the most significant bit. Fock operators are truncated at
//! `n_max` (dimension `n_max + 1`) with `a|n⟩ = √n |n−1⟩`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::Tolerances;
use crate::engine::Classification;
use crate::error::{DfsError, Result};
use crate::linalg::{c64, identity, matrix_exponential, ComplexMatrix, ComplexVector, I, ONE, ZERO};
use crate::model::{DiagonalLindblad, Dissipator, GksDissipator, LindbladTerm, MasterEquationModel};

pub const MAX_DICKE_ATOMS: usize = 8;
pub const MAX_RANDOM_DIM: usize = 16;

pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[-ONE, ZERO, ZERO, ONE])
}

pub fn sigma_x() -> ComplexMatrix {
    sigma_minus() + sigma_plus()
}

pub fn sigma_y() -> ComplexMatrix {
    (sigma_minus() - sigma_plus()) * I
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `op` acting on atom `site` of `n` two-level atoms.
pub fn embed(op: &ComplexMatrix, site: usize, n: usize) -> ComplexMatrix {
    let mut out = identity(1);
    for k in 0..n {
        out = if k == site { kron(&out, op) } else { kron(&out, &identity(2)) };
    }
    out
}

/// Truncated annihilation operator on Fock states `0..=n_max`.
pub fn annihilation(n_max: usize) -> ComplexMatrix {
    let d = n_max + 1;
    let mut a = ComplexMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = c64((n as f64).sqrt(), 0.0);
    }
    a
}

/// Coherent state `|α⟩` on the truncated Fock space, renormalized.
pub fn coherent_state(n_max: usize, alpha: Complex64) -> ComplexVector {
    let mut v = ComplexVector::zeros(n_max + 1);
    let mut amp = ONE;
    for n in 0..=n_max {
        if n > 0 {
            amp = amp * alpha / (n as f64).sqrt();
        }
        v[n] = amp;
    }
    let norm = v.norm();
    v / c64(norm, 0.0)
}

fn unit(n: usize, i: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, k)] = ONE;
    m
}

/// Three-level model given in GKS form with `F₁ = |0⟩⟨1|`, `F₂ = |0⟩⟨2|` and
/// `a_kl = 1` for `k, l ∈ {1, 2}`. Its single jump is `(F₁ + F₂)/√2` at rate 2.
pub fn three_level_counterexample() -> MasterEquationModel {
    let basis = vec![
        unit(3, 0, 1),
        unit(3, 0, 2),
        unit(3, 1, 0),
        unit(3, 1, 2),
        unit(3, 2, 0),
        unit(3, 2, 1),
        unit(3, 1, 1) - unit(3, 0, 0),
        unit(3, 2, 2) - unit(3, 0, 0),
    ];
    let mut a = ComplexMatrix::zeros(8, 8);
    for k in 0..2 {
        for l in 0..2 {
            a[(k, l)] = ONE;
        }
    }
    let tol = Tolerances::default();
    let gks = GksDissipator::new(3, basis, a, tol.hermitian).expect("valid GKS data");
    MasterEquationModel::new(
        "three_level_counterexample",
        ComplexMatrix::zeros(3, 3),
        Dissipator::Gks(gks),
        &tol,
    )
    .expect("valid model")
}

/// Two levels with `J₁ = |1⟩⟨1|`, `J₂ = |0⟩⟨0| + |0⟩⟨1|`, unit rates, `H = 0`.
pub fn two_level_nonsemisimple() -> MasterEquationModel {
    MasterEquationModel::diagonal(
        "two_level_nonsemisimple",
        ComplexMatrix::zeros(2, 2),
        vec![
            LindbladTerm::new(1.0, unit(2, 1, 1)),
            LindbladTerm::new(1.0, unit(2, 0, 0) + unit(2, 0, 1)),
        ],
    )
    .expect("valid model")
}

/// `J = σ₊ + σ_z` at rate 2 with `H = σ_y`; `|1⟩` is stationary.
pub fn igc_two_level() -> MasterEquationModel {
    MasterEquationModel::diagonal(
        "igc_two_level",
        sigma_y(),
        vec![LindbladTerm::new(2.0, sigma_plus() + sigma_z())],
    )
    .expect("valid model")
}

/// Spontaneous emission `J = σ₋` at rate `gamma` with `H = (omega/2) σ_z`.
pub fn two_level_decay(gamma: f64, omega: f64) -> Result<MasterEquationModel> {
    positive("gamma", gamma)?;
    MasterEquationModel::diagonal(
        "two_level_decay",
        sigma_z() * c64(omega / 2.0, 0.0),
        vec![LindbladTerm::new(gamma, sigma_minus())],
    )
}

/// Two-level atom in a squeezed-vacuum reservoir: `J = cosh(r) σ₋ + sinh(r) σ₊`
/// at rate `gamma0`, `H_S = branch · (γ₀/2) √(sc) (s − c) σ_y`.
///
/// `branch = +1` stabilizes the eigenvalue `+√(sc)`, `−1` stabilizes `−√(sc)`
/// and `0` switches the Hamiltonian off.
pub fn squeezed_vacuum_two_level(r: f64, gamma0: f64, branch: i64) -> Result<MasterEquationModel> {
    positive("gamma0", gamma0)?;
    if !(-1..=1).contains(&branch) {
        return Err(DfsError::InvalidModel(format!("branch must be -1, 0 or +1, got {branch}")));
    }
    let (s, c) = (r.sinh(), r.cosh());
    let jump = sigma_minus() * c64(c, 0.0) + sigma_plus() * c64(s, 0.0);
    let h = sigma_y() * c64(branch as f64 * gamma0 / 2.0 * (s * c).sqrt() * (s - c), 0.0);
    MasterEquationModel::diagonal("squeezed_vacuum_two_level", h, vec![LindbladTerm::new(gamma0, jump)])
}

/// Eigenvectors of the squeezed-vacuum jump for eigenvalues `±√(sc)`,
/// normalized: `(√c |0⟩ ± √s |1⟩)/√(c + s)`.
pub fn squeezed_eigenvector(r: f64, sign: f64) -> ComplexVector {
    let (s, c) = (r.sinh(), r.cosh());
    let norm = (c + s).sqrt();
    ComplexVector::from_vec(vec![c64(c.sqrt() / norm, 0.0), c64(sign * s.sqrt() / norm, 0.0)])
}

/// `n` atoms in the Dicke limit with the collective jump
/// `J = Σ_n (c σ₋ + s σ₊)_n` at rate `gamma` and
/// `H_D = (γ/2)(n₊ − n₋) √(sc) (s − c) S_y`, which stabilizes the sector with
/// `n_plus` factors of the `+√(sc)` eigenvector.
pub fn dicke_squeezed(n: usize, r: f64, gamma: f64, n_plus: usize) -> Result<MasterEquationModel> {
    positive("gamma", gamma)?;
    if n == 0 {
        return Err(DfsError::InvalidModel("need at least one atom".into()));
    }
    if n > MAX_DICKE_ATOMS {
        return Err(DfsError::TooLarge(format!("{n} atoms exceeds the cap of {MAX_DICKE_ATOMS}")));
    }
    if n_plus > n {
        return Err(DfsError::InvalidModel(format!("n_plus = {n_plus} exceeds N = {n}")));
    }
    let (s, c) = (r.sinh(), r.cosh());
    let single = sigma_minus() * c64(c, 0.0) + sigma_plus() * c64(s, 0.0);
    let dim = 1 << n;
    let mut jump = ComplexMatrix::zeros(dim, dim);
    let mut s_y = ComplexMatrix::zeros(dim, dim);
    for site in 0..n {
        jump += embed(&single, site, n);
        s_y += embed(&sigma_y(), site, n);
    }
    let imbalance = n_plus as f64 - (n - n_plus) as f64;
    let h = s_y * c64(gamma / 2.0 * imbalance * (s * c).sqrt() * (s - c), 0.0);
    MasterEquationModel::diagonal("dicke_squeezed", h, vec![LindbladTerm::new(gamma, jump)])
}

fn fock_requirement(alpha: Complex64) -> usize {
    (4.0 * alpha.norm_sqr() + 10.0).ceil() as usize
}

/// Damped harmonic oscillator `J = a` at rate `gamma`, truncated at `n_max`.
///
/// Undriven: `H = ω₀ a†a`. Driven with `g(t) = (i/2) γ α e^{−iω₀t}`: the model
/// is written in the frame rotating at `ω₀`, where `H = g₀* a + g₀ a†` with the
/// constant `g₀ = (i/2) γ α` and the coherent state `|α⟩` is stationary.
pub fn damped_oscillator_truncated(
    n_max: usize,
    omega0: f64,
    gamma: f64,
    alpha: Complex64,
    driven: bool,
) -> Result<MasterEquationModel> {
    positive("gamma", gamma)?;
    let required = fock_requirement(alpha);
    if n_max < required {
        return Err(DfsError::TruncationTooSmall { n_max, required });
    }
    let a = annihilation(n_max);
    let h = if driven {
        let g0 = I * 0.5 * gamma * alpha;
        &a * g0.conj() + a.adjoint() * g0
    } else {
        a.adjoint() * &a * c64(omega0, 0.0)
    };
    Ok(
        MasterEquationModel::diagonal("damped_oscillator_truncated", h, vec![LindbladTerm::new(gamma, a)])?
            .with_truncation_flag(true),
    )
}

/// Two-photon absorber `J = a²` at rate `gamma`, truncated at `n_max`, with
/// the parametric drive `H = (iγ/2)(α² a†² − (α*)² a²)` under which both
/// `|±α⟩` are stationary.
pub fn two_photon_absorber_truncated(n_max: usize, gamma: f64, alpha: Complex64) -> Result<MasterEquationModel> {
    positive("gamma", gamma)?;
    let required = fock_requirement(alpha);
    if n_max < required {
        return Err(DfsError::TruncationTooSmall { n_max, required });
    }
    let a = annihilation(n_max);
    let a2 = &a * &a;
    let a2d = a2.adjoint();
    let h = (a2d * (alpha * alpha) - &a2 * (alpha.conj() * alpha.conj())) * (I * 0.5 * gamma);
    Ok(
        MasterEquationModel::diagonal("two_photon_absorber_truncated", h, vec![LindbladTerm::new(gamma, a2)])?
            .with_truncation_flag(true),
    )
}

/// Jump structure for [`random_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
    /// Dense complex Gaussian jumps.
    Generic,
    /// Commuting normal jumps `U D_l U†` sharing one random unitary.
    NormalJumps,
    /// Strictly upper-triangular (decay-like) jumps.
    DecayLike,
    /// Diagonal jumps.
    Dephasing,
}

impl RandomKind {
    pub const ALL: [RandomKind; 4] = [Self::Generic, Self::NormalJumps, Self::DecayLike, Self::Dephasing];

    pub fn name(self) -> &'static str {
        match self {
            Self::Generic => "generic",
            Self::NormalJumps => "normal-jumps",
            Self::DecayLike => "decay-like",
            Self::Dephasing => "dephasing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng));
    (&g + g.adjoint()) * c64(0.5 / (n as f64).sqrt(), 0.0)
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, n) * c64(3.0, 0.0);
    matrix_exponential(&(h * I)).expect("square")
}

/// Hermitian matrix that is block-diagonal over the classes of equal keys.
fn block_hermitian(rng: &mut ChaCha8Rng, keys: &[Vec<Complex64>]) -> ComplexMatrix {
    let n = keys.len();
    let full = random_hermitian(rng, n);
    ComplexMatrix::from_fn(n, n, |i, k| if keys[i] == keys[k] { full[(i, k)] } else { ZERO })
}

/// Seeded random model. Rates are uniform in `[0.5, 2]`. For the structured
/// kinds, half of the seeds get a Hamiltonian that preserves the common
/// eigenspaces of the jumps, so decoherence-free subspaces actually occur.
pub fn random_model(dim: usize, m: usize, kind: RandomKind, seed: u64) -> Result<MasterEquationModel> {
    if dim == 0 || dim > MAX_RANDOM_DIM {
        return Err(DfsError::TooLarge(format!("random model dimension must be in 1..={MAX_RANDOM_DIM}, got {dim}")));
    }
    if m > dim * dim - 1 {
        return Err(DfsError::InvalidModel(format!("{m} jumps exceed {} for dimension {dim}", dim * dim - 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rates: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..2.0)).collect();
    let structured = rng.random_bool(0.5);
    let (jumps, h): (Vec<ComplexMatrix>, ComplexMatrix) = match kind {
        RandomKind::Generic => {
            let scale = c64(1.0 / (dim as f64).sqrt(), 0.0);
            let jumps = (0..m)
                .map(|_| ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(&mut rng)) * scale)
                .collect();
            (jumps, random_hermitian(&mut rng, dim))
        }
        RandomKind::NormalJumps | RandomKind::Dephasing => {
            let palette: &[Complex64] = if kind == RandomKind::Dephasing {
                &[c64(-1.0, 0.0), ZERO, ONE]
            } else {
                &[c64(-1.0, 0.0), ZERO, ONE, I, -I]
            };
            let diagonals: Vec<Vec<Complex64>> = (0..m)
                .map(|_| (0..dim).map(|_| palette[rng.random_range(0..palette.len())]).collect())
                .collect();
            let keys: Vec<Vec<Complex64>> = (0..dim).map(|i| diagonals.iter().map(|d| d[i]).collect()).collect();
            let h_diag = if structured { block_hermitian(&mut rng, &keys) } else { random_hermitian(&mut rng, dim) };
            let u = if kind == RandomKind::NormalJumps { random_unitary(&mut rng, dim) } else { identity(dim) };
            let jumps = diagonals
                .iter()
                .map(|d| &u * ComplexMatrix::from_diagonal(&ComplexVector::from_vec(d.clone())) * u.adjoint())
                .collect();
            (jumps, &u * h_diag * u.adjoint())
        }
        RandomKind::DecayLike => {
            let jumps = (0..m)
                .map(|_| {
                    ComplexMatrix::from_fn(dim, dim, |i, k| {
                        if k > i && rng.random_bool(0.5) {
                            gaussian(&mut rng)
                        } else {
                            ZERO
                        }
                    })
                })
                .collect();
            let h = if structured {
                ComplexMatrix::from_diagonal(&ComplexVector::from_fn(dim, |_, _| c64(rng.sample(StandardNormal), 0.0)))
            } else {
                random_hermitian(&mut rng, dim)
            };
            (jumps, h)
        }
    };
    let terms = rates.into_iter().zip(jumps).map(|(r, j)| LindbladTerm::new(r, j)).collect();
    let tol = Tolerances::default();
    let h = (&h + h.adjoint()) * c64(0.5, 0.0);
    let d = DiagonalLindblad::new(dim, terms, 0.0)?;
    MasterEquationModel::new(format!("random_model:{}:{dim}:{m}:{seed}", kind.name()), h, Dissipator::Diagonal(d), &tol)
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(DfsError::InvalidModel(format!("{name} must be positive, got {value}")))
    }
}

/// A builder parameter value.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Complex(Complex64),
    Flag(bool),
    Text(String),
}

impl ParamValue {
    /// Parse a command-line value: integers, reals, `re,im` complex pairs,
    /// `true`/`false`, otherwise text.
    pub fn parse(s: &str) -> Self {
        let s = s.trim();
        if let Ok(i) = s.parse::<i64>() {
            return Self::Int(i);
        }
        if let Ok(x) = s.parse::<f64>() {
            return Self::Real(x);
        }
        if let Some((re, im)) = s.split_once(',') {
            if let (Ok(re), Ok(im)) = (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
                return Self::Complex(c64(re, im));
            }
        }
        match s {
            "true" => Self::Flag(true),
            "false" => Self::Flag(false),
            _ => Self::Text(s.to_string()),
        }
    }

    fn as_real(&self, name: &str) -> Result<f64> {
        match self {
            Self::Int(i) => Ok(*i as f64),
            Self::Real(x) => Ok(*x),
            other => Err(DfsError::InvalidModel(format!("parameter {name} must be real, got {other}"))),
        }
    }

    fn as_int(&self, name: &str) -> Result<i64> {
        match self {
            Self::Int(i) => Ok(*i),
            Self::Real(x) if x.fract() == 0.0 => Ok(*x as i64),
            other => Err(DfsError::InvalidModel(format!("parameter {name} must be an integer, got {other}"))),
        }
    }

    fn as_count(&self, name: &str) -> Result<usize> {
        let i = self.as_int(name)?;
        usize::try_from(i).map_err(|_| DfsError::InvalidModel(format!("parameter {name} must be non-negative, got {i}")))
    }

    fn as_complex(&self, name: &str) -> Result<Complex64> {
        match self {
            Self::Complex(z) => Ok(*z),
            other => other.as_real(name).map(|x| c64(x, 0.0)),
        }
    }

    fn as_flag(&self, name: &str) -> Result<bool> {
        match self {
            Self::Flag(b) => Ok(*b),
            Self::Int(0) => Ok(false),
            Self::Int(1) => Ok(true),
            other => Err(DfsError::InvalidModel(format!("parameter {name} must be true/false, got {other}"))),
        }
    }

    fn as_text(&self) -> String {
        match self {
            Self::Text(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Int(i) => write!(f, "{i}"),
            Self::Real(x) => write!(f, "{x}"),
            Self::Complex(z) => write!(f, "{},{}", z.re, z.im),
            Self::Flag(b) => write!(f, "{b}"),
            Self::Text(s) => write!(f, "{s}"),
        }
    }
}

pub type Params = BTreeMap<String, ParamValue>;

#[derive(Clone, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: ParamValue,
    pub doc: &'static str,
}

/// Expected outcome of the analysis at default parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    /// `(dimension, classification)` per record, in report order.
    pub records: Vec<(usize, Classification)>,
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamSpec>,
    pub expected: Option<Expectation>,
}

impl GalleryEntry {
    pub fn defaults(&self) -> Params {
        self.params.iter().map(|p| (p.name.to_string(), p.default.clone())).collect()
    }
}

fn spec(name: &'static str, default: ParamValue, doc: &'static str) -> ParamSpec {
    ParamSpec { name, default, doc }
}

/// All gallery entries; names are stable identifiers.
pub fn entries() -> Vec<GalleryEntry> {
    use Classification::{Igc, Restricted};
    use ParamValue::{Complex, Flag, Int, Real, Text};
    vec![
        GalleryEntry {
            name: "three_level_counterexample",
            summary: "3 levels, GKS form with a_kl = 1 on F1=|0><1|, F2=|0><2|",
            params: vec![],
            expected: Some(Expectation { records: vec![(2, Restricted)] }),
        },
        GalleryEntry {
            name: "two_level_nonsemisimple",
            summary: "J1 = |1><1|, J2 = |0><0| + |0><1|: common eigenstate that is not decoherence-free",
            params: vec![],
            expected: Some(Expectation { records: vec![] }),
        },
        GalleryEntry {
            name: "igc_two_level",
            summary: "J = s+ + sz (rate 2), H = sy: stationary IGC state |1>",
            params: vec![],
            expected: Some(Expectation { records: vec![(1, Igc)] }),
        },
        GalleryEntry {
            name: "squeezed_vacuum_two_level",
            summary: "two-level atom in squeezed vacuum, J = cosh(r) s- + sinh(r) s+",
            params: vec![
                spec("r", Real(0.5), "squeezing parameter"),
                spec("gamma0", Real(1.0), "decay rate"),
                spec("branch", Int(1), "+1 / -1 selects the stabilized eigenvalue, 0 removes H_S"),
            ],
            expected: Some(Expectation { records: vec![(1, Igc)] }),
        },
        GalleryEntry {
            name: "dicke_squeezed",
            summary: "N atoms in the Dicke limit in squeezed vacuum, collective jump",
            params: vec![
                spec("N", Int(3), "number of atoms (<= 8)"),
                spec("r", Real(0.5), "squeezing parameter"),
                spec("gamma", Real(1.0), "collective decay rate"),
                spec("n_plus", Int(2), "sector stabilized by the drive"),
            ],
            expected: Some(Expectation { records: vec![(3, Igc)] }),
        },
        GalleryEntry {
            name: "damped_oscillator_truncated",
            summary: "driven damped oscillator, truncated Fock space (demonstration only)",
            params: vec![
                spec("n_max", Int(24), "Fock truncation"),
                spec("omega0", Real(1.0), "oscillator frequency"),
                spec("gamma", Real(1.0), "damping rate"),
                spec("alpha", Complex(c64(1.0, 0.0)), "coherent amplitude matched by the drive"),
                spec("driven", Flag(true), "rotating-frame drive on/off"),
            ],
            expected: Some(Expectation { records: vec![] }),
        },
        GalleryEntry {
            name: "two_photon_absorber_truncated",
            summary: "two-photon absorber with parametric drive, truncated Fock space (demonstration only)",
            params: vec![
                spec("n_max", Int(30), "Fock truncation"),
                spec("gamma", Real(1.0), "two-photon loss rate"),
                spec("alpha", Complex(c64(1.0, 0.0)), "coherent amplitude"),
            ],
            expected: Some(Expectation { records: vec![] }),
        },
        GalleryEntry {
            name: "two_level_decay",
            summary: "spontaneous emission J = s- with H = (omega/2) sz",
            params: vec![spec("gamma", Real(1.0), "decay rate"), spec("omega", Real(0.0), "level splitting")],
            expected: Some(Expectation { records: vec![(1, Restricted)] }),
        },
        GalleryEntry {
            name: "random_model",
            summary: "seeded random model for property tests",
            params: vec![
                spec("dim", Int(3), "Hilbert-space dimension (<= 16)"),
                spec("M", Int(1), "number of jump operators"),
                spec("kind", Text("generic".into()), "generic | normal-jumps | decay-like | dephasing"),
                spec("seed", Int(0), "RNG seed"),
            ],
            expected: None,
        },
    ]
}

pub fn entry(name: &str) -> Option<GalleryEntry> {
    entries().into_iter().find(|e| e.name == name)
}

/// Build a gallery model; parameters not given take their defaults.
pub fn build(name: &str, overrides: &Params) -> Result<MasterEquationModel> {
    let e = entry(name).ok_or_else(|| DfsError::InvalidModel(format!("unknown gallery model '{name}'")))?;
    for key in overrides.keys() {
        if !e.params.iter().any(|p| p.name == key) {
            return Err(DfsError::InvalidModel(format!("model {name} has no parameter '{key}'")));
        }
    }
    let mut p = e.defaults();
    p.extend(overrides.clone());
    let get = |k: &str| p.get(k).expect("declared parameter");
    match name {
        "three_level_counterexample" => Ok(three_level_counterexample()),
        "two_level_nonsemisimple" => Ok(two_level_nonsemisimple()),
        "igc_two_level" => Ok(igc_two_level()),
        "squeezed_vacuum_two_level" => squeezed_vacuum_two_level(
            get("r").as_real("r")?,
            get("gamma0").as_real("gamma0")?,
            get("branch").as_int("branch")?,
        ),
        "dicke_squeezed" => dicke_squeezed(
            get("N").as_count("N")?,
            get("r").as_real("r")?,
            get("gamma").as_real("gamma")?,
            get("n_plus").as_count("n_plus")?,
        ),
        "damped_oscillator_truncated" => damped_oscillator_truncated(
            get("n_max").as_count("n_max")?,
            get("omega0").as_real("omega0")?,
            get("gamma").as_real("gamma")?,
            get("alpha").as_complex("alpha")?,
            get("driven").as_flag("driven")?,
        ),
        "two_photon_absorber_truncated" => two_photon_absorber_truncated(
            get("n_max").as_count("n_max")?,
            get("gamma").as_real("gamma")?,
            get("alpha").as_complex("alpha")?,
        ),
        "two_level_decay" => two_level_decay(get("gamma").as_real("gamma")?, get("omega").as_real("omega")?),
        "random_model" => {
            let kind_name = get("kind").as_text();
            let kind = RandomKind::parse(&kind_name)
                .ok_or_else(|| DfsError::InvalidModel(format!("unknown random model kind '{kind_name}'")))?;
            random_model(
                get("dim").as_count("dim")?,
                get("M").as_count("M")?,
                kind,
                get("seed").as_int("seed")? as u64,
            )
        }
        _ => unreachable!("entry() matched"),
    }
    .map(|m| m.with_label(name))
}
