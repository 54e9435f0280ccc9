use rand_distr::Exp1;
use rand::Rng;
use serde::{Deserialize, Serialize};
use libm::tgamma as gamma;

use crate::error::{param, Result};
use crate::opensets::RankedMasses;
use crate::paths::Seed;

/// One importance-weighted draw for the ν₋ dislocation measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuMinusSample {
    /// The `n_jumps` largest jumps of `T` on `[0, 1]` divided by `T₁`.
    pub masses: RankedMasses,
    /// Share of `T₁` carried by the jumps beyond the truncation;
    /// `masses.total() + dust = 1`.
    pub dust: f64,
    /// Unnormalized weight `α²Γ(2−1/α)/Γ(2−α)·T₁`.
    pub weight: f64,
}

/// Samples the ranked jumps of a `1/α`-stable subordinator `T` with Laplace
/// exponent `q^{1/α}` on `[0, 1]`, normalized by `T₁`.
///
/// The `k`-th largest jump is `(Γ(1−γ)·Γ_k)^{−1/γ}` with `γ = 1/α` and `Γ_k`
/// the arrival times of a unit Poisson process. The jumps below the
/// truncation are replaced by their mean total, so `T₁` is estimated without
/// the downward bias of the truncated sum.
pub fn sample_nu_minus(alpha: f64, n_jumps: usize, seed: Seed) -> Result<NuMinusSample> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return param(format!("alpha must lie in (1, 2), got {alpha}"));
    }
    if n_jumps == 0 {
        return param("need at least one jump");
    }
    let g = 1.0 / alpha;
    let gg = gamma(1.0 - g);
    let mut rng = seed.rng();
    let mut arrival = 0.0f64;
    let mut jumps = Vec::with_capacity(n_jumps);
    for _ in 0..n_jumps {
        arrival += rng.sample::<f64, _>(Exp1);
        jumps.push((gg * arrival).powf(-1.0 / g));
    }
    let smallest = *jumps.last().expect("nonempty");
    let residual = g / gg * smallest.powf(1.0 - g) / (1.0 - g);
    let total: f64 = jumps.iter().sum::<f64>() + residual;
    let masses = RankedMasses::from_unsorted(jumps.iter().map(|j| j / total).collect())?;
    let weight = alpha * alpha * gamma(2.0 - g) / gamma(2.0 - alpha) * total;
    Ok(NuMinusSample { dust: residual / total, masses, weight })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_positive_and_mass_complete() {
        for i in 0..20 {
            let s = sample_nu_minus(1.5, 100, Seed::new(1, i)).unwrap();
            assert!(s.weight > 0.0);
            assert!((s.masses.total() + s.dust - 1.0).abs() < 1e-12);
        }
        assert!(sample_nu_minus(2.5, 10, Seed::new(0, 0)).is_err());
    }

    #[test]
    fn weighted_largest_mass_is_stable_under_truncation() {
        let est = |n: usize| {
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..4000 {
                let s = sample_nu_minus(1.5, n, Seed::new(9, i)).unwrap();
                num += s.weight * s.masses.largest();
                den += s.weight;
            }
            num / den
        };
        let (a, b) = (est(1000), est(10_000));
        assert!(((a - b) / b).abs() < 1e-3, "{a} vs {b}");
    }
}
