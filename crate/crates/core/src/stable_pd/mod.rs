//! β-stable analytics, the h-conditioned subordinator and its two samplers,
//! Poisson–Dirichlet stick-breaking and the ν₋ dislocation sampler.

mod conditioned;
mod density;
mod nu_minus;
mod pd;

pub use conditioned::{
    conditioned_sampler, sample_conditioned_bridge_method, sample_conditioned_lamperti_method, BridgeMethod,
    ConditionedSampler, ConditionedSubPath, DeathTimeSampler, LampertiMethod, CONDITIONED_SAMPLERS,
};
pub use density::{
    death_time_density, death_time_survival, moments_of_death_time, phi_closed_form, potential_h, stable_density,
    standard_density, transition_density, xi_laplace_exponent, xi_levy_density,
};
pub use nu_minus::{sample_nu_minus, NuMinusSample};
pub use pd::{
    eval_ppy_joint_density, ppy_marginal_density, sample_pd, sample_pd_with_residual, size_biased_permutation,
    size_biased_pick, size_biased_pick_with_dust, stick_residuals,
};

use serde::{Deserialize, Serialize};
use libm::tgamma as gamma;

use crate::error::{param, Result};

/// `(β, C)` fixing the subordinator Laplace exponent `q ↦ C·q^β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub beta: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl StableParams {
    pub fn new(beta: f64, c: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return param(format!("beta must lie in (0, 1), got {beta}"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return param(format!("C must be positive, got {c}"));
        }
        Ok(StableParams { beta, c })
    }

    /// The Brownian case `β = 1/2`, `C = 2√2`.
    pub fn brownian() -> Self {
        StableParams { beta: 0.5, c: 2.0 * std::f64::consts::SQRT_2 }
    }

    /// The stable-tree case for `α ∈ (1, 2)`: `β = 1 − 1/α`,
    /// `C = Γ(1−β)/Γ(2−β)`.
    pub fn stable_tree(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return param(format!("alpha must lie in (1, 2), got {alpha}"));
        }
        let beta = 1.0 - 1.0 / alpha;
        StableParams::new(beta, gamma(1.0 - beta) / gamma(2.0 - beta))
    }

    pub fn is_brownian(&self) -> bool {
        self.beta == 0.5 && (self.c - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12
    }

    pub fn laplace_exponent(&self, q: f64) -> f64 {
        self.c * q.powf(self.beta)
    }

    /// Exponent `a` of the Lamperti clock `∫ exp(a·ξ_s) ds` producing the
    /// tagged mass `exp(−ξ)`, equal to `−β`. The death-time moments are
    /// `E[ζ^k] = k! / ∏ φ(−a·i)`.
    pub fn lamperti_exponent(&self) -> f64 {
        -self.beta
    }
}

/// `(β, θ)` of the two-parameter Poisson–Dirichlet law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdParams {
    pub beta: f64,
    pub theta: f64,
}

impl PdParams {
    pub fn new(beta: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return param(format!("PD beta must lie in [0, 1), got {beta}"));
        }
        if !(theta > -beta) || !theta.is_finite() {
            return param(format!("PD theta must exceed -beta, got {theta}"));
        }
        Ok(PdParams { beta, theta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert!(StableParams::brownian().is_brownian());
        let p = StableParams::stable_tree(1.5).unwrap();
        assert!((p.beta - 1.0 / 3.0).abs() < 1e-15);
        // βC/Γ(1−β) = β/Γ(2−β) is the Lévy-density prefactor of the tree case.
        assert!((p.beta * p.c / gamma(1.0 - p.beta) - p.beta / gamma(2.0 - p.beta)).abs() < 1e-14);
        assert!(StableParams::new(1.0, 1.0).is_err());
        assert!(PdParams::new(0.5, -0.6).is_err());
    }

    #[test]
    fn lamperti_exponent_gives_rayleigh_moments() {
        // ζ from mass 1 has density 4a·exp(−2a²): E ζ = √(π/8), E ζ² = 1/2.
        let p = StableParams::brownian();
        let a = p.lamperti_exponent();
        assert_eq!(a, -0.5);
        let phi = |q: f64| phi_closed_form(q, &p);
        assert!((1.0 / phi(-a) - (std::f64::consts::PI / 8.0).sqrt()).abs() < 1e-14);
        assert!((2.0 / (phi(-a) * phi(-2.0 * a)) - 0.5).abs() < 1e-14);
    }
}
