use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::paths::{RefinedBridge, RefinementConfig, Seed};
use crate::stats::{chi3_cdf, ks_one_sample, pearson_correlation, KsResult};

/// Values `X_s = √v·e_{s/v}` and `X̃_s = √v·e_{1−s/v}` of an excursion of
/// length `v` at each `s` of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JeulinSample {
    pub front: Vec<f64>,
    pub back: Vec<f64>,
}

pub fn sample_jeulin_functionals(v: f64, s_grid: &[f64], cfg: RefinementConfig, seed: Seed) -> Result<JeulinSample> {
    let s_max = s_grid.iter().copied().fold(0.0, f64::max);
    if !(v > 0.0) || s_grid.iter().any(|s| !(*s > 0.0)) || s_max > v {
        return param(format!("need 0 < s <= v, got v = {v} and s up to {s_max}"));
    }
    let mut rb = RefinedBridge::new(cfg, seed)?;
    let ends = rb.excursion_ends((s_max / v).min(1.0))?;
    let scale = v.sqrt();
    Ok(JeulinSample {
        front: s_grid.iter().map(|s| scale * ends.front.value_at(s / v)).collect(),
        back: s_grid.iter().map(|s| scale * ends.back.value_at(1.0 - s / v)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JeulinPoint {
    pub s: f64,
    /// `X_s` against the BES(3) marginal at time `s`.
    pub front: KsResult,
    /// `X̃_s` against the same marginal.
    pub back: KsResult,
    /// Sample correlation of `X_s` and `X̃_s`.
    pub correlation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JeulinReport {
    pub v: f64,
    pub n_paths: usize,
    pub points: Vec<JeulinPoint>,
    /// `3/√N`, the band for the correlations.
    pub correlation_bound: f64,
}

impl JeulinReport {
    pub fn min_p_value(&self) -> f64 {
        self.points.iter().flat_map(|p| [p.front.p_value, p.back.p_value]).fold(1.0, f64::min)
    }

    pub fn max_abs_correlation(&self) -> f64 {
        self.points.iter().map(|p| p.correlation.abs()).fold(0.0, f64::max)
    }
}

pub fn jeulin_report(v: f64, s_grid: &[f64], samples: &[JeulinSample]) -> Result<JeulinReport> {
    let mut points = Vec::with_capacity(s_grid.len());
    for (i, &s) in s_grid.iter().enumerate() {
        let f: Vec<f64> = samples.iter().map(|x| x.front[i]).collect();
        let b: Vec<f64> = samples.iter().map(|x| x.back[i]).collect();
        points.push(JeulinPoint {
            s,
            front: ks_one_sample(&f, |x| chi3_cdf(x, s))?,
            back: ks_one_sample(&b, |x| chi3_cdf(x, s))?,
            correlation: pearson_correlation(&f, &b),
        });
    }
    Ok(JeulinReport { v, n_paths: samples.len(), points, correlation_bound: 3.0 / (samples.len() as f64).sqrt() })
}

/// Samples `n_paths` excursions on the replicate seeds of `(master, tag)`
/// and compares their ends with BES(3).
pub fn jeulin_fixed_time_check(
    v: f64,
    s_grid: &[f64],
    n_paths: u32,
    cfg: RefinementConfig,
    master: u64,
    tag: u32,
) -> Result<JeulinReport> {
    let samples = (0..n_paths)
        .map(|i| sample_jeulin_functionals(v, s_grid, cfg, Seed::replicate(master, tag, i)))
        .collect::<Result<Vec<_>>>()?;
    jeulin_report(v, s_grid, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RefinementConfig {
        RefinementConfig { coarse_cells: 1024, branching: 8, levels: 2, miss_exponent: 30.0 }
    }

    #[test]
    fn long_excursion_ends_look_like_bes3() {
        let r = jeulin_fixed_time_check(400.0, &[0.5, 1.0], 600, cfg(), 11, 0).unwrap();
        assert!(r.min_p_value() > 1e-3, "{r:?}");
        assert!(r.max_abs_correlation() < 1.5 * r.correlation_bound);
    }

    #[test]
    fn short_excursion_is_not_bes3() {
        let r = jeulin_fixed_time_check(1.0, &[0.5], 600, cfg(), 12, 0).unwrap();
        assert!(r.min_p_value() < 1e-3);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(sample_jeulin_functionals(1.0, &[2.0], cfg(), Seed::new(0, 0)).is_err());
    }
}
