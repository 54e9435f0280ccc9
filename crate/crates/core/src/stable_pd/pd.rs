use rand::Rng;
use rand_distr::{Beta, Distribution, Exp1};
use libm::tgamma as gamma;

use super::density::{potential_h, stable_density};
use super::{PdParams, StableParams};
use crate::error::{Error, Result};
use crate::opensets::RankedMasses;
use crate::paths::Seed;
use crate::quad;

/// GEM stick-breaking with sticks `Beta(1−β, θ+kβ)`, ranked, together with
/// the unallocated residual mass.
pub fn sample_pd_with_residual(pd: PdParams, n_sticks: usize, seed: Seed) -> Result<(RankedMasses, f64)> {
    let mut rng = seed.rng();
    let mut rest = 1.0f64;
    let mut sticks = Vec::with_capacity(n_sticks);
    for k in 1..=n_sticks {
        let law = Beta::new(1.0 - pd.beta, pd.theta + k as f64 * pd.beta)
            .map_err(|e| Error::Parameter(format!("stick {k}: {e}")))?;
        let y: f64 = law.sample(&mut rng);
        sticks.push(rest * y);
        rest *= 1.0 - y;
    }
    Ok((RankedMasses::from_unsorted(sticks)?, rest))
}

/// Ranked PD(β, θ) masses from `n_sticks` sticks.
pub fn sample_pd(pd: PdParams, n_sticks: usize, seed: Seed) -> Result<RankedMasses> {
    sample_pd_with_residual(pd, n_sticks, seed).map(|r| r.0)
}

/// Size-biased permutation of positive masses.
///
/// Ordering independent exponential clocks of rates `m_i` picks each next
/// element with probability proportional to its mass among those remaining.
pub fn size_biased_permutation(masses: &[f64], seed: Seed) -> Result<Vec<f64>> {
    if !(masses.iter().sum::<f64>() > 0.0) {
        return Err(Error::Parameter("size-biased permutation needs positive total mass".into()));
    }
    let mut rng = seed.rng();
    let mut keyed: Vec<(f64, f64)> = masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| {
            let e: f64 = rng.sample(Exp1);
            (e / m, m)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(keyed.into_iter().map(|k| k.1).collect())
}

/// One size-biased pick, as a fraction of the total mass.
pub fn size_biased_pick<R: Rng + ?Sized>(masses: &[f64], rng: &mut R) -> f64 {
    let total: f64 = masses.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for &m in masses {
        if u < m {
            return m / total;
        }
        u -= m;
    }
    masses.last().copied().unwrap_or(0.0) / total
}

/// One size-biased pick from masses of total at most one, the missing mass
/// being dust made of infinitesimal pieces; a pick landing in the dust is 0.
pub fn size_biased_pick_with_dust<R: Rng + ?Sized>(masses: &[f64], rng: &mut R) -> f64 {
    let mut u = rng.random::<f64>();
    for &m in masses {
        if u < m {
            return m;
        }
        u -= m;
    }
    0.0
}

/// Residual fractions `Y_k = Ṽ_k / (1 − Ṽ_1 − … − Ṽ_{k−1})` of a sequence,
/// relative to its total.
pub fn stick_residuals(perm: &[f64]) -> Vec<f64> {
    let total: f64 = perm.iter().sum();
    let mut rest = total;
    perm.iter()
        .map(|&v| {
            let y = if rest > 0.0 { (v / rest).min(1.0) } else { 1.0 };
            rest -= v;
            y
        })
        .collect()
}

/// Joint density of the first `n` size-biased residual fractions and the
/// death time `a` of the tagged fragment:
/// `a^n Θ(y₁)Θ(ȳ₁y₂)⋯Θ(ȳ₁⋯ȳ_{n−1}y_n)·f_a(ȳ₁⋯ȳ_n)/h(1)` with
/// `Θ(x) = βC/Γ(1−β)·x^{−β}` and `ȳ = 1 − y`.
pub fn eval_ppy_joint_density(ys: &[f64], a: f64, params: &StableParams) -> Result<f64> {
    if ys.iter().any(|&y| !(y > 0.0 && y < 1.0)) || !(a > 0.0) {
        return Ok(0.0);
    }
    let b = params.beta;
    let k = b * params.c / gamma(1.0 - b);
    let mut rest = 1.0;
    let mut dens = a.powi(ys.len() as i32);
    for &y in ys {
        dens *= k * (rest * y).powf(-b);
        rest *= 1.0 - y;
    }
    Ok(dens * stable_density(a, rest, params)? / potential_h(1.0, params))
}

/// [`eval_ppy_joint_density`] integrated over `a` by quadrature.
pub fn ppy_marginal_density(ys: &[f64], params: &StableParams) -> Result<f64> {
    let mut err = None;
    let v = quad::quad_inf(
        |a| match eval_ppy_joint_density(ys, a, params) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        0.0,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{beta_cdf, ks_one_sample};

    #[test]
    fn stick_sums() {
        let (m, rest) = sample_pd_with_residual(PdParams::new(0.5, 0.5).unwrap(), 10_000, Seed::new(1, 0)).unwrap();
        assert!((m.total() + rest - 1.0).abs() < 1e-10);
        assert!(rest < 1e-2);
        let (_, rest) = sample_pd_with_residual(PdParams::new(0.3, 0.3).unwrap(), 10_000, Seed::new(1, 0)).unwrap();
        assert!(rest < 1e-6);
    }

    #[test]
    fn single_mass_permutes_to_itself() {
        assert_eq!(size_biased_permutation(&[0.7], Seed::new(0, 0)).unwrap(), vec![0.7]);
        assert!(size_biased_permutation(&[], Seed::new(0, 0)).is_err());
    }

    #[test]
    fn two_masses_pick_frequency() {
        let n = 30_000;
        let hits = (0..n)
            .filter(|&i| size_biased_permutation(&[2.0 / 3.0, 1.0 / 3.0], Seed::new(5, i)).unwrap()[0] == 2.0 / 3.0)
            .count();
        let p = hits as f64 / n as f64;
        let sd = (2.0 / 9.0 / n as f64).sqrt();
        assert!((p - 2.0 / 3.0).abs() < 4.0 * sd, "{p}");
    }

    #[test]
    fn pd_half_half_first_pick_is_beta_half_one() {
        let pd = PdParams::new(0.5, 0.5).unwrap();
        let y1: Vec<f64> = (0..2000)
            .map(|i| {
                let m = sample_pd(pd, 2000, Seed::new(7, i)).unwrap();
                stick_residuals(&size_biased_permutation(m.as_slice(), Seed::new(8, i)).unwrap())[0]
            })
            .collect();
        let r = ks_one_sample(&y1, |x| beta_cdf(x, 0.5, 1.0)).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
        let below = y1.iter().filter(|&&y| y <= 0.25).count() as f64 / y1.len() as f64;
        assert!((below - 0.5).abs() < 0.05);
    }

    #[test]
    fn ppy_density_integrates_to_beta() {
        let p = StableParams::brownian();
        for &y in &[0.1, 0.4, 0.8] {
            let v = ppy_marginal_density(&[y], &p).unwrap();
            assert!((v - 0.5 / y.sqrt()).abs() < 1e-8, "{y}: {v}");
        }
        assert!(eval_ppy_joint_density(&[0.3, 0.6], 0.4, &p).unwrap() > 0.0);
    }

    #[test]
    fn ppy_density_ignores_c() {
        for beta in [0.5, 0.3] {
            let p1 = StableParams::new(beta, 1.3).unwrap();
            let p2 = StableParams::new(beta, 2.6).unwrap();
            let ys = [0.2, 0.5];
            let a = ppy_marginal_density(&ys, &p1).unwrap();
            let b = ppy_marginal_density(&ys, &p2).unwrap();
            assert!(((a - b) / a).abs() < 1e-10, "{beta}: {a} vs {b}");
        }
    }
}
