//! Kolmogorov–Smirnov tests, empirical Laplace transforms, moment summaries
//! and the reference CDFs used as oracles.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use libm::erf;

use crate::error::{Error, Result};

/// Smallest sample size for which asymptotic KS p-values are reported.
pub const MIN_KS_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size used in the asymptotic law.
    pub n_eff: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Jacobi-transformed series converges fast for small x.
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        let mut s = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            s += (-j * j * c).exp();
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * x * x).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value with Stephens' finite-sample correction.
pub fn ks_p_value(statistic: f64, n_eff: f64) -> f64 {
    let r = n_eff.sqrt();
    kolmogorov_sf((r + 0.12 + 0.11 / r) * statistic)
}

fn finite_sorted(samples: &[f64], what: &str) -> Result<Vec<f64>> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples { need: MIN_KS_SAMPLES, got: samples.len() });
    }
    if let Some(x) = samples.iter().find(|x| x.is_nan()) {
        return Err(Error::Numeric(format!("{what} contains {x}")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    let v = finite_sorted(samples, "sample")?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let d = d.clamp(0.0, 1.0);
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n), n_eff: n })
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let x = finite_sorted(a, "first sample")?;
    let y = finite_sorted(b, "second sample")?;
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let n_eff = n * m / (n + m);
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n_eff), n_eff })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Standardized distance to `target`; infinite when the error is zero and
    /// the target differs.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.value - target;
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

pub fn mean_estimate(samples: &[f64]) -> Estimate {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return Estimate { value: f64::NAN, std_error: f64::NAN };
    }
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return Estimate { value: mean, std_error: 0.0 };
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Estimate { value: mean, std_error: (var / n).sqrt() }
}

/// Mean of `exp(−q·x)` with its CLT standard error.
pub fn empirical_laplace(samples: &[f64], q: f64) -> Result<Estimate> {
    if !(q >= 0.0) {
        return Err(Error::Parameter(format!("Laplace argument must be nonnegative, got {q}")));
    }
    let t: Vec<f64> = samples.iter().map(|&x| (-q * x).exp()).collect();
    Ok(mean_estimate(&t))
}

pub fn pearson_correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Empirical quantile by linear interpolation of order statistics.
pub fn quantile(samples: &[f64], p: f64) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let h = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// CDF of `|N(0, sd²)|`.
pub fn half_normal_cdf(x: f64, sd: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        erf(x / (sd * std::f64::consts::SQRT_2))
    }
}

pub fn beta_cdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        beta_reg(a, b, x)
    }
}

/// CDF of the norm of a 3-dimensional centered Gaussian with per-coordinate
/// variance `s` (the BES(3) marginal at time `s`).
pub fn chi3_cdf(x: f64, s: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = x / s.sqrt();
    erf(y / std::f64::consts::SQRT_2) - (2.0 / std::f64::consts::PI).sqrt() * y * (-y * y / 2.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn kolmogorov_branches_agree() {
        for &x in &[1.0, 1.1, 1.17, 1.19, 1.3] {
            let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
            let small: f64 = 1.0
                - (2.0 * std::f64::consts::PI).sqrt() / x
                    * (1..=20).map(|k| (-(((2 * k - 1) * (2 * k - 1)) as f64) * c).exp()).sum::<f64>();
            let large: f64 = 2.0
                * (1..=100)
                    .map(|k| {
                        let t = (-2.0 * (k * k) as f64 * x * x).exp();
                        if k % 2 == 1 {
                            t
                        } else {
                            -t
                        }
                    })
                    .sum::<f64>();
            assert!((small - large).abs() < 1e-12, "{x}: {small} vs {large}");
        }
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn refuses_small_samples() {
        assert!(matches!(ks_one_sample(&[0.5; 10], |x| x), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn constant_sample_is_far_from_continuous_cdf() {
        let r = ks_one_sample(&[0.5; 200], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.statistic >= 0.5 && r.statistic <= 1.0);
    }

    #[test]
    fn two_sample_extremes() {
        let a: Vec<f64> = (0..150).map(|k| k as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        let b: Vec<f64> = (0..150).map(|k| 1000.0 + k as f64).collect();
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 1.0);
    }

    #[test]
    fn one_sample_calibration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut rejections = 0;
        for _ in 0..200 {
            let s: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
            if ks_one_sample(&s, |x| x).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        let frac = rejections as f64 / 200.0;
        assert!((0.02..=0.09).contains(&frac), "{frac}");
    }

    #[test]
    fn two_sample_calibration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(18);
        let mut rejections = 0;
        for _ in 0..200 {
            let a: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
            let b: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
            if ks_two_sample(&a, &b).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        let frac = rejections as f64 / 200.0;
        assert!((0.02..=0.09).contains(&frac), "{frac}");
    }

    #[test]
    fn laplace_edge_cases() {
        let e = empirical_laplace(&[1.0, 2.0, 3.0], 0.0).unwrap();
        assert_eq!((e.value, e.std_error), (1.0, 0.0));
        assert_eq!(empirical_laplace(&[0.0], 3.0).unwrap().value, 1.0);
    }

    #[test]
    fn laplace_of_truncated_normal_matches_quadrature() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s: Vec<f64> = (0..100_000)
            .map(|_| {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                z.abs()
            })
            .collect();
        let target = crate::quad::quad_inf(
            |x| (-x).exp() * (2.0 / std::f64::consts::PI).sqrt() * (-x * x / 2.0).exp(),
            0.0,
        )
        .unwrap();
        let e = empirical_laplace(&s, 1.0).unwrap();
        assert!(e.z_score(target).abs() < 4.0);
    }

    #[test]
    fn chi3_cdf_matches_quadrature() {
        let dens = |x: f64| (2.0 / std::f64::consts::PI).sqrt() * x * x * (-x * x / 2.0).exp();
        for &x in &[0.3, 1.0, 2.5] {
            let q = crate::quad::quad(dens, 0.0, x).unwrap();
            assert!((q - chi3_cdf(x, 1.0)).abs() < 1e-12, "{x}: {q} vs {}", chi3_cdf(x, 1.0));
        }
    }
}
