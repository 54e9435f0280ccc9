use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::opensets::{component_containing, level_set};
use crate::paths::{half_stable_increment, RefinedBridge, RefinementConfig, Seed};
use crate::stats::quantile;

/// Extra dyadic scales summed below the finest one when building the
/// subordinator; their share is below 2^{-2·TAIL_SCALES} in scale.
const TAIL_SCALES: u32 = 40;

/// `log|log t| / (2t²)`.
pub fn lil_normalizer(t: f64) -> f64 {
    t.ln().abs().ln() / (2.0 * t * t)
}

/// Whether `log log(1/t)` is large enough for the iterated-logarithm
/// normalization to be meaningful.
pub fn lil_regime_reached(t: f64) -> bool {
    t.ln().abs().ln() >= 3.0
}

fn dyadic(k: u32) -> f64 {
    0.5f64.powi(k as i32)
}

fn running_min(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut m = f64::INFINITY;
    xs.map(|x| {
        m = m.min(x);
        m
    })
    .collect()
}

/// Running minima over `k = k_min..=k_max` of `g(t_k)·σ_{t_k}` with
/// `t_k = 2^{−k}`, `g` the normalizer and `σ` the stable subordinator with
/// Laplace exponent `2√(2λ)` (the sum of two independent BES(3) last-passage
/// processes).
pub fn sample_lil_subordinator(k_min: u32, k_max: u32, seed: Seed) -> Result<Vec<f64>> {
    if !(2..=480).contains(&k_min) || k_max < k_min || k_max > 480 {
        return param(format!("need 2 <= k_min <= k_max <= 480, got {k_min}..{k_max}"));
    }
    let mut rng = seed.rng();
    let deepest = k_max + TAIL_SCALES;
    // sigma[k] accumulates increments on (t_{j+1}, t_j] for j ≥ k.
    let mut acc = 0.0;
    let mut sigma = vec![0.0; (k_max - k_min + 1) as usize];
    for j in (k_min..deepest).rev() {
        acc += half_stable_increment(dyadic(j + 1), &mut rng);
        if j <= k_max {
            sigma[(j - k_min) as usize] = acc;
        }
    }
    Ok(running_min((k_min..=k_max).zip(sigma).map(|(k, s)| lil_normalizer(dyadic(k)) * s)))
}

/// Running minima of `g(t)·H_t`, `g(t)·M_t` and `g(t)·L_t` for one excursion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LilCurves {
    pub h: Vec<f64>,
    pub m: Vec<f64>,
    pub l: Vec<f64>,
    /// Set when `F̂_t` reached the edge of the refined window at some level,
    /// so `M_t` and `L_t` there are lower bounds.
    pub truncated: bool,
}

/// Curves over `t_k = 2^{−k}` from an excursion refined around its maximum.
pub fn sample_lil_excursion(k_min: u32, k_max: u32, cfg: RefinementConfig, seed: Seed) -> Result<LilCurves> {
    if k_min < 1 || k_max < k_min {
        return param(format!("need 1 <= k_min <= k_max, got {k_min}..{k_max}"));
    }
    let t_big = dyadic(k_min);
    let half_width = (16.0 * t_big * t_big).min(0.5);
    let mut rb = RefinedBridge::new(cfg, seed)?;
    let peak = rb.excursion_peak(half_width)?;
    let win = &peak.window;
    let (mut hs, mut ms, mut ls) = (Vec::new(), Vec::new(), Vec::new());
    let mut truncated = false;
    for k in k_min..=k_max {
        let t = dyadic(k);
        let level = peak.max - t;
        let v = level_set(win, level);
        truncated |= win.values[0] > level || win.values[win.len() - 1] > level;
        let g = lil_normalizer(t);
        hs.push(g * component_containing(&v, peak.argmax).map_or(0.0, |(a, b)| b - a));
        ms.push(g * v.lebesgue());
        ls.push(g * v.span());
    }
    Ok(LilCurves {
        h: running_min(hs.into_iter()),
        m: running_min(ms.into_iter()),
        l: running_min(ls.into_iter()),
        truncated,
    })
}

/// Cross-path quantiles of running-minimum curves, one row per scale.
pub fn curve_quantiles(curves: &[Vec<f64>], probs: &[f64]) -> Vec<Vec<f64>> {
    let len = curves.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| {
            let mut col: Vec<f64> = curves.iter().map(|c| c[i]).collect();
            col.sort_by(f64::total_cmp);
            probs.iter().map(|&p| quantile(&col, p)).collect()
        })
        .collect()
}
