//! Numeric tolerances. Every threshold in the analysis is read from here so a
//! run can be reproduced from the values recorded in its report.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative Hermiticity tolerance for `H_eff`, `A` and derived operators.
    pub hermitian: f64,
    /// Rates of the diagonalized dissipator below `rate · trace(A)` are dropped.
    pub rate: f64,
    /// Eigenvalue clustering radius, scaled by `1 + ‖J‖_F`.
    pub cluster: f64,
    /// Relative rank tolerance for orthonormalization.
    pub rank: f64,
    /// Eigen-residual tolerance for common-eigenspace membership, scaled by
    /// `1 + max_l ‖J_l‖_F`.
    pub membership: f64,
    /// Invariant-subspace refinement threshold, scaled by `1 + ‖H_ev‖_F`.
    pub invariance: f64,
    /// Threshold on `‖L_D[|ψ⟩⟨ψ|]‖_F`, scaled by the dimension.
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            rate: 1e-12,
            cluster: 1e-8,
            rank: 1e-10,
            membership: 1e-8,
            invariance: 1e-9,
            classify: 1e-9,
        }
    }
}

impl Tolerances {
    /// Named profiles: `default`, `strict` (10x tighter), `loose` (100x looser).
    pub fn profile(name: &str) -> Option<Self> {
        let base = Self::default();
        match name {
            "default" => Some(base),
            "strict" => Some(base.scaled(0.1)),
            "loose" => Some(base.scaled(100.0)),
            _ => None,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            hermitian: self.hermitian * factor,
            rate: self.rate * factor,
            cluster: self.cluster * factor,
            rank: self.rank * factor,
            membership: self.membership * factor,
            invariance: self.invariance * factor,
            classify: self.classify * factor,
        }
    }

    /// Apply `key=value` overrides; returns the offending key on failure.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("tolerance {key} must be positive, got {value}"));
        }
        let slot = match key {
            "hermitian" => &mut self.hermitian,
            "rate" => &mut self.rate,
            "cluster" => &mut self.cluster,
            "rank" => &mut self.rank,
            "membership" => &mut self.membership,
            "invariance" => &mut self.invariance,
            "classify" => &mut self.classify,
            _ => return Err(format!("unknown tolerance '{key}'")),
        };
        *slot = value;
        Ok(())
    }
}
