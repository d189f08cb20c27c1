//! Independent verification by direct integration of the master equation.
//!
//! States are propagated with fixed-step RK4 applied to the Liouvillian action
//! (no superoperator matrix is built). The step count is doubled until two
//! successive resolutions agree on the final state.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::engine::DfsRecord;
use crate::error::{DfsError, Result};
use crate::linalg::{
    basis_vector, c64, frobenius, hermitian_deviation, hermitian_eigenvalues, matrix_exponential, outer,
    trace_product, ComplexMatrix, ComplexVector, Subspace,
};
use crate::model::MasterEquationModel;

pub const CHECKPOINTS: usize = 64;
pub const DEFAULT_MAX_STEPS: usize = 1 << 20;
pub const CONVERGENCE_TOL: f64 = 1e-8;
pub const PURITY_TOL: f64 = 1e-7;
pub const FIDELITY_TOL: f64 = 1e-7;

/// `Tr(ρ²)`.
pub fn purity(rho: &ComplexMatrix) -> f64 {
    trace_product(rho, rho).re
}

/// `∂_t Tr(ρ²) = 2 Tr(ρ L_D[ρ])`.
pub fn purity_rate(m: &MasterEquationModel, rho: &ComplexMatrix) -> Result<f64> {
    let ld = m.apply_dissipator(rho)?;
    Ok(2.0 * trace_product(rho, &ld).re)
}

/// Checks Hermiticity, unit trace and positivity within `1e-10`.
pub fn validate_density_matrix(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(DfsError::NotDensityMatrix(format!(
            "expected {dim}x{dim}, found {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(DfsError::NotDensityMatrix("non-finite entry".into()));
    }
    let dev = hermitian_deviation(rho);
    if dev > 1e-10 {
        return Err(DfsError::NotDensityMatrix(format!("not Hermitian (deviation {dev:.3e})")));
    }
    let tr = rho.trace();
    if (tr - c64(1.0, 0.0)).norm() > 1e-10 {
        return Err(DfsError::NotDensityMatrix(format!("trace {tr} differs from 1")));
    }
    let min = hermitian_eigenvalues(rho).first().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(DfsError::NotDensityMatrix(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    pub purities: Vec<f64>,
    /// `Tr(ρ(t) σ(t)) / Tr(σ(t)²)` with `σ(t) = U(t) ρ(0) U(t)†` generated by
    /// the reference Hamiltonian.
    pub fidelity_to_unitary: Vec<f64>,
    pub final_state: ComplexMatrix,
    /// State at each checkpoint, `states[0] = ρ(0)`.
    pub states: Vec<ComplexMatrix>,
    pub steps: usize,
}

impl TrajectoryResult {
    pub fn max_purity_drift(&self) -> f64 {
        let p0 = self.purities.first().copied().unwrap_or(1.0);
        self.purities.iter().map(|p| (p - p0).abs()).fold(0.0, f64::max)
    }

    pub fn min_fidelity(&self) -> f64 {
        self.fidelity_to_unitary.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct PropagationOptions {
    /// Initial step count; rounded up to a multiple of the checkpoint count.
    pub steps: usize,
    pub checkpoints: usize,
    pub max_steps: usize,
    pub convergence: f64,
    /// Hamiltonian of the unitary reference; `H_eff` when absent.
    pub reference: Option<ComplexMatrix>,
    /// Skip the doubling safeguard and run exactly `steps` steps.
    pub fixed: bool,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            steps: CHECKPOINTS,
            checkpoints: CHECKPOINTS,
            max_steps: DEFAULT_MAX_STEPS,
            convergence: CONVERGENCE_TOL,
            reference: None,
            fixed: false,
        }
    }
}

/// Propagate with the default options and the given initial step count.
pub fn propagate(m: &MasterEquationModel, rho0: &ComplexMatrix, t_final: f64, steps: usize) -> Result<TrajectoryResult> {
    propagate_with(
        m,
        rho0,
        t_final,
        &PropagationOptions {
            steps,
            ..Default::default()
        },
    )
}

pub fn propagate_with(
    m: &MasterEquationModel,
    rho0: &ComplexMatrix,
    t_final: f64,
    opts: &PropagationOptions,
) -> Result<TrajectoryResult> {
    validate_density_matrix(rho0, m.dim())?;
    if opts.steps == 0 || opts.checkpoints == 0 {
        return Err(DfsError::InvalidModel("step and checkpoint counts must be at least 1".into()));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(DfsError::InvalidModel(format!("t_final must be finite and non-negative, got {t_final}")));
    }
    let cp = opts.checkpoints;
    let mut n = opts.steps.div_ceil(cp) * cp;
    let mut coarse = rk4(m, rho0, t_final, n, cp);
    if !opts.fixed {
        let mut difference = f64::INFINITY;
        loop {
            if 2 * n > opts.max_steps {
                return Err(DfsError::StepCapExceeded {
                    cap: opts.max_steps,
                    difference,
                });
            }
            let fine = rk4(m, rho0, t_final, 2 * n, cp);
            difference = frobenius(&(fine.last().unwrap() - coarse.last().unwrap()));
            n *= 2;
            coarse = fine;
            if difference <= opts.convergence {
                break;
            }
        }
    }
    let states = coarse;
    let h_ref = opts.reference.clone().unwrap_or_else(|| m.h_eff().clone());
    let dt = t_final / cp as f64;
    let u = matrix_exponential(&(h_ref * c64(0.0, -dt)))?;
    let ud = u.adjoint();
    let mut sigma = rho0.clone();
    let mut times = Vec::with_capacity(cp + 1);
    let mut purities = Vec::with_capacity(cp + 1);
    let mut fidelity = Vec::with_capacity(cp + 1);
    for (k, rho) in states.iter().enumerate() {
        if k > 0 {
            sigma = &u * &sigma * &ud;
        }
        times.push(k as f64 * dt);
        purities.push(purity(rho));
        fidelity.push(trace_product(rho, &sigma).re / purity(&sigma));
    }
    Ok(TrajectoryResult {
        times,
        purities,
        fidelity_to_unitary: fidelity,
        final_state: states.last().unwrap().clone(),
        states,
        steps: n,
    })
}

/// Liouvillian on Hermitian arguments, with the adjoints precomputed:
/// `−i(Xρ − (Xρ)†) + Σ λ_l (J_l ρ) J_l†` where `X = H_nh`, Hermitized.
struct Generator {
    h_nh: ComplexMatrix,
    jumps: Vec<(Complex64, ComplexMatrix, ComplexMatrix)>,
}

impl Generator {
    fn new(m: &MasterEquationModel) -> Self {
        Self {
            h_nh: m.non_hermitian_hamiltonian().clone(),
            jumps: m
                .lindblad()
                .terms()
                .iter()
                .map(|t| (c64(t.rate, 0.0), t.jump.clone(), t.jump.adjoint()))
                .collect(),
        }
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let x = &self.h_nh * rho;
        let mut jumps = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
        for (rate, j, jd) in &self.jumps {
            jumps += (j * rho) * jd * *rate;
        }
        // Rounding leaves (Jρ)J† slightly non-Hermitian. The shortcut above
        // mistreats anti-Hermitian input and would amplify that part like
        // exp(λ‖J‖² t), so the output is kept exactly Hermitian.
        (&x - x.adjoint()) * c64(0.0, -1.0) + (&jumps + jumps.adjoint()) * c64(0.5, 0.0)
    }
}

/// Fixed-step RK4; returns the state at `checkpoints + 1` evenly spaced times.
fn rk4(m: &MasterEquationModel, rho0: &ComplexMatrix, t_final: f64, steps: usize, checkpoints: usize) -> Vec<ComplexMatrix> {
    let gen = Generator::new(m);
    let h = t_final / steps as f64;
    let per = steps / checkpoints;
    let half = c64(h / 2.0, 0.0);
    let full = c64(h, 0.0);
    let sixth = c64(h / 6.0, 0.0);
    let two = c64(2.0, 0.0);
    let mut rho = rho0.clone();
    let mut out = Vec::with_capacity(checkpoints + 1);
    out.push(rho.clone());
    for step in 1..=steps {
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1 * half));
        let k3 = gen.apply(&(&rho + &k2 * half));
        let k4 = gen.apply(&(&rho + &k3 * full));
        rho += (k1 + (k2 + k3) * two + k4) * sixth;
        if step % per == 0 {
            out.push(rho.clone());
        }
    }
    out
}

/// Rough bound on the Liouvillian's norm, used to pick a stable initial step.
pub fn liouvillian_scale(m: &MasterEquationModel) -> f64 {
    let jumps: f64 = m.lindblad().terms().iter().map(|t| t.rate * spectral_norm(&t.jump).powi(2)).sum();
    2.0 * spectral_norm(m.h_eff()) + 2.0 * jumps
}

fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Default horizon `10 / max λ_l` (10 for a closed system).
pub fn default_t_final(m: &MasterEquationModel) -> f64 {
    m.lindblad().max_rate().map_or(10.0, |r| 10.0 / r)
}

/// Step count that keeps `h · scale ≤ 2`, inside the RK4 stability region;
/// at least one step per checkpoint.
pub fn initial_steps(m: &MasterEquationModel, t_final: f64) -> usize {
    let n = (t_final * liouvillian_scale(m) / 2.0).ceil() as usize;
    n.max(CHECKPOINTS)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub passed: bool,
    pub max_purity_drift: f64,
    pub min_unitary_fidelity: f64,
    pub trials: usize,
    pub t_final: f64,
    pub seed: u64,
}

/// Haar-random unit vector inside `s`: complex-Gaussian coefficients in its
/// basis, normalized. Trial `k` uses stream `k` of a ChaCha8 generator seeded
/// with `seed`.
pub fn random_state_in(s: &Subspace, seed: u64, trial: u64) -> ComplexVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let a = ComplexVector::from_fn(s.dim(), |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        c64(re, im)
    });
    let v = s.basis() * a;
    let norm = v.norm();
    v / c64(norm, 0.0)
}

/// Propagate `trials` random pure states drawn inside the record's subspace
/// and compare each with the unitary evolution generated by `H_ev`.
pub fn verify_dfs_record(
    m: &MasterEquationModel,
    rec: &DfsRecord,
    trials: usize,
    t_final: Option<f64>,
    seed: u64,
) -> Result<Verification> {
    if trials == 0 {
        return Err(DfsError::InvalidModel("at least one trial is required".into()));
    }
    if rec.subspace.ambient_dim() != m.dim() {
        return Err(DfsError::DimensionMismatch {
            expected: m.dim(),
            found: rec.subspace.ambient_dim(),
            context: "record subspace".into(),
        });
    }
    if rec.subspace.is_empty() {
        return Err(DfsError::InvalidSubspace("record has an empty basis".into()));
    }
    let t_final = t_final.unwrap_or_else(|| default_t_final(m));
    let h_ev = m.evolution_hamiltonian(&rec.tuple)?;
    let opts = PropagationOptions {
        steps: initial_steps(m, t_final),
        reference: Some(h_ev),
        ..Default::default()
    };
    let results: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let psi = random_state_in(&rec.subspace, seed, k as u64);
            let traj = propagate_with(m, &outer(&psi, &psi), t_final, &opts)?;
            Ok((traj.max_purity_drift(), traj.min_fidelity()))
        })
        .collect::<Result<_>>()?;
    let max_purity_drift = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let min_unitary_fidelity = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(Verification {
        passed: max_purity_drift <= PURITY_TOL && min_unitary_fidelity >= 1.0 - FIDELITY_TOL,
        max_purity_drift,
        min_unitary_fidelity,
        trials,
        t_final,
        seed,
    })
}

/// Copy of `rec` whose first basis vector is rotated by `angle` radians
/// towards a direction orthogonal to the subspace.
pub fn tilted_record(rec: &DfsRecord, angle: f64) -> Result<DfsRecord> {
    let s = &rec.subspace;
    let n = s.ambient_dim();
    if s.is_empty() || s.dim() == n {
        return Err(DfsError::InvalidSubspace("cannot tilt an empty or full subspace".into()));
    }
    let (best, _) = (0..n)
        .map(|i| (i, s.projection_residual(&basis_vector(n, i))))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let e = basis_vector(n, best);
    let w = &e - s.basis() * (s.basis().adjoint() * &e);
    let w = &w / c64(w.norm(), 0.0);
    let mut basis = s.basis().clone();
    let v0 = basis.column(0) * c64(angle.cos(), 0.0) + w * c64(angle.sin(), 0.0);
    basis.set_column(0, &v0);
    let mut out = rec.clone();
    out.subspace = Subspace::from_orthonormal_columns(basis, 1e-10)?;
    Ok(out)
}

/// No-jump evolution `|ψ(t)⟩ = e^{−itH_nh}|ψ₀⟩`, unnormalized, at
/// `steps + 1` evenly spaced times.
pub fn nonhermitian_drift(
    m: &MasterEquationModel,
    psi0: &ComplexVector,
    t_final: f64,
    steps: usize,
) -> Result<Vec<(f64, ComplexVector)>> {
    if psi0.len() != m.dim() {
        return Err(DfsError::DimensionMismatch {
            expected: m.dim(),
            found: psi0.len(),
            context: "state vector".into(),
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(DfsError::NotNormalized { norm });
    }
    let steps = steps.max(1);
    let dt = t_final / steps as f64;
    let u = matrix_exponential(&(m.non_hermitian_hamiltonian() * Complex64::new(0.0, -dt)))?;
    let mut psi = psi0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, psi.clone()));
    for k in 1..=steps {
        psi = &u * psi;
        out.push((k as f64 * dt, psi.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::engine::find_all_dfs;
    use crate::gallery;
    use crate::linalg::identity;

    #[test]
    fn purity_examples() {
        let e0 = basis_vector(2, 0);
        assert!((purity(&outer(&e0, &e0)) - 1.0).abs() < 1e-15);
        assert!((purity(&(identity(4) * c64(0.25, 0.0))) - 0.25).abs() < 1e-15);
        assert!((purity(&(identity(2) * c64(0.5, 0.0))) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_system_stays_pure() {
        let m = MasterEquationModel::diagonal("closed", gallery::sigma_z(), vec![]).unwrap();
        let plus = (basis_vector(2, 0) + basis_vector(2, 1)) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let traj = propagate(&m, &outer(&plus, &plus), 5.0, 64).unwrap();
        assert!(traj.max_purity_drift() < 1e-9);
        assert!(traj.min_fidelity() > 1.0 - 1e-9);
    }

    #[test]
    fn rejects_bad_density_matrix() {
        let m = gallery::igc_two_level();
        assert!(matches!(propagate(&m, &identity(2), 1.0, 64), Err(DfsError::NotDensityMatrix(_))));
    }

    #[test]
    fn step_cap_reported() {
        let m = gallery::two_level_decay(1.0, 0.0).unwrap();
        let e1 = basis_vector(2, 1);
        let opts = PropagationOptions {
            steps: 64,
            max_steps: 128,
            convergence: 1e-30,
            ..Default::default()
        };
        assert!(matches!(
            propagate_with(&m, &outer(&e1, &e1), 5.0, &opts),
            Err(DfsError::StepCapExceeded { cap: 128, .. })
        ));
    }

    #[test]
    fn verification_is_deterministic() {
        let m = gallery::three_level_counterexample();
        let rep = find_all_dfs(&m, &Tolerances::default()).unwrap();
        let a = verify_dfs_record(&m, &rep.records[0], 3, None, 11).unwrap();
        let b = verify_dfs_record(&m, &rep.records[0], 3, None, 11).unwrap();
        assert!(a.passed);
        assert_eq!(a, b);
        assert_eq!(random_state_in(&rep.records[0].subspace, 5, 2), random_state_in(&rep.records[0].subspace, 5, 2));
    }

    #[test]
    fn generator_matches_liouvillian() {
        let m = gallery::random_model(4, 2, gallery::RandomKind::Generic, 3).unwrap();
        let v = random_state_in(&Subspace::full(4), 1, 0);
        let rho = outer(&v, &v);
        let diff = Generator::new(&m).apply(&rho) - m.liouvillian_apply(&rho).unwrap();
        assert!(frobenius(&diff) < 1e-12);
    }

    #[test]
    fn strong_jumps_stay_stable() {
        // collective jump with λ‖J‖² ≈ 24: rounding noise must not grow
        let m = gallery::dicke_squeezed(3, 0.5, 1.0, 2).unwrap();
        let rep = find_all_dfs(&m, &Tolerances::default()).unwrap();
        let v = random_state_in(&rep.records[0].subspace, 7, 0);
        let rho = outer(&v, &v);
        let opts = PropagationOptions {
            steps: 128,
            fixed: true,
            ..Default::default()
        };
        let traj = propagate_with(&m, &rho, 10.0, &opts).unwrap();
        assert!(frobenius(&(&traj.final_state - traj.final_state.adjoint())) == 0.0);
        assert!(frobenius(&(&traj.final_state - &rho)) < 1e-10);
    }

    #[test]
    fn no_jump_norm_decay() {
        let m = gallery::two_level_decay(0.7, 0.0).unwrap();
        let path = nonhermitian_drift(&m, &basis_vector(2, 1), 3.0, 30).unwrap();
        for (t, psi) in path {
            assert!((psi.norm_squared() - (-0.7 * t).exp()).abs() < 1e-12);
        }
    }
}
