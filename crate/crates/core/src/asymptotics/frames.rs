use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::opensets::{component_containing, level_set, restrict, OpenSet};
use crate::paths::{sample_two_sided_bes3, ExcursionPeak, GridPath, Seed};

/// `(r, H, M_leb, L_span)` of one snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameStats {
    pub r: f64,
    /// Length of the component containing the origin.
    #[serde(rename = "H")]
    pub h: f64,
    /// Lebesgue measure.
    #[serde(rename = "M_leb")]
    pub m_leb: f64,
    /// Length of the smallest interval containing the set.
    #[serde(rename = "L_span")]
    pub l_span: f64,
}

/// The extinction-centered fragmentation `(F̂_{rt} − S)/t²` restricted to
/// `(−n, n)` for each `r` of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionFrame {
    #[serde(rename = "M")]
    pub max: f64,
    #[serde(rename = "S")]
    pub argmax: f64,
    pub t: f64,
    pub window_n: f64,
    pub snapshots: Vec<(f64, OpenSet)>,
}

/// `{s : Z_s < r}` restricted to `(−n, n)` for a two-sided path `Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitFrame {
    #[serde(rename = "Z")]
    pub z: GridPath,
    pub window_n: f64,
    pub snapshots: Vec<(f64, OpenSet)>,
}

impl ExtinctionFrame {
    pub fn statistics(&self) -> Vec<FrameStats> {
        statistics_hml(&self.snapshots)
    }
}

impl LimitFrame {
    pub fn statistics(&self) -> Vec<FrameStats> {
        statistics_hml(&self.snapshots)
    }
}

/// `H ≤ M_leb ≤ L_span` for each snapshot, `H` taken around 0.
pub fn statistics_hml(snapshots: &[(f64, OpenSet)]) -> Vec<FrameStats> {
    snapshots
        .iter()
        .map(|(r, v)| FrameStats {
            r: *r,
            h: component_containing(v, 0.0).map_or(0.0, |(l, r)| r - l),
            m_leb: v.lebesgue(),
            l_span: v.span(),
        })
        .collect()
}

/// `{s : z_s < r}` restricted to `(−n, n)`, for each `r`.
fn below_sets(z: &GridPath, r_grid: &[f64], n: f64) -> Vec<(f64, OpenSet)> {
    let neg = GridPath { t0: z.t0, dt: z.dt, values: z.values.iter().map(|v| -v).collect() };
    r_grid.iter().map(|&r| (r, restrict(&level_set(&neg, -r), (-n, n)))).collect()
}

fn check_grid(r_grid: &[f64], t: f64, n: f64) -> Result<()> {
    if r_grid.iter().any(|r| !(*r >= 0.0)) {
        return param("levels r must be nonnegative");
    }
    if !(t > 0.0) || !(n > 0.0) {
        return param(format!("scale t and window n must be positive, got {t} and {n}"));
    }
    Ok(())
}

/// Knots on either side of the maximum needed to cover `n·t²`.
fn half_window(dt: f64, t: f64, n: f64) -> usize {
    (n * t * t / dt).ceil() as usize + 1
}

/// Builds `Z_j = (M − e_{p+j})/t` on the rescaled grid `j·dt/t²`.
fn rescaled_around(values: &[f64], p: usize, w: usize, max: f64, dt: f64, t: f64) -> Result<GridPath> {
    let zs = values[p - w..=p + w].iter().map(|v| (max - v) / t).collect();
    let ds = dt / (t * t);
    GridPath::new(-(w as f64 * ds), ds, zs)
}

/// The frame computed from `e` around its first grid argmax. Returns `None`
/// when `n·t² < S < 1 − n·t²` fails (the frame is rejected).
pub fn extinction_frame(e: &GridPath, t: f64, r_grid: &[f64], window_n: f64) -> Result<Option<ExtinctionFrame>> {
    check_grid(r_grid, t, window_n)?;
    let p = e.argmax();
    let s = e.time(p);
    let margin = window_n * t * t;
    if !(e.t0 + margin < s && s < e.t_end() - margin) {
        return Ok(None);
    }
    let w = half_window(e.dt, t, window_n);
    if p < w || p + w >= e.len() {
        return Ok(None);
    }
    let z = rescaled_around(&e.values, p, w, e.values[p], e.dt, t)?;
    Ok(Some(ExtinctionFrame { max: e.values[p], argmax: s, t, window_n, snapshots: below_sets(&z, r_grid, window_n) }))
}

/// The frame from a locally refined excursion near its maximum.
pub fn extinction_frame_from_peak(
    peak: &ExcursionPeak,
    t: f64,
    r_grid: &[f64],
    window_n: f64,
) -> Result<Option<ExtinctionFrame>> {
    check_grid(r_grid, t, window_n)?;
    let margin = window_n * t * t;
    if !(margin < peak.argmax && peak.argmax < 1.0 - margin) {
        return Ok(None);
    }
    let win = &peak.window;
    let p = ((peak.argmax - win.t0) / win.dt).round() as usize;
    let w = half_window(win.dt, t, window_n);
    if p < w || p + w >= win.len() {
        return param(format!("peak window of {} points is too narrow for n t^2 = {margin}", win.len()));
    }
    let z = rescaled_around(&win.values, p, w, peak.max, win.dt, t)?;
    Ok(Some(ExtinctionFrame {
        max: peak.max,
        argmax: peak.argmax,
        t,
        window_n,
        snapshots: below_sets(&z, r_grid, window_n),
    }))
}

/// The same frame read off the root-changed excursion `e^S` alone: the part
/// of `{s ≥ 0 : e^S_{st²} < rt}` below `n`, together with the mirror image
/// of `{s ≥ 0 : e^S_{1−st²} < rt}`.
pub fn extinction_frame_from_root_change(es: &GridPath, t: f64, r_grid: &[f64], window_n: f64) -> Result<ExtinctionFrame> {
    check_grid(r_grid, t, window_n)?;
    let period = es.len() - 1;
    let w = half_window(es.dt, t, window_n);
    if 2 * w >= period {
        return param("window wider than the excursion");
    }
    let max = es.values.iter().copied().fold(0.0, f64::max);
    // Z_j = e^S_{j mod 1}/t with e^S = M − e_{S+·}.
    let zs = (0..=2 * w).map(|i| es.values[(period + i - w) % period] / t).collect();
    let ds = es.dt / (t * t);
    let z = GridPath::new(-(w as f64 * ds), ds, zs)?;
    Ok(ExtinctionFrame { max, argmax: f64::NAN, t, window_n, snapshots: below_sets(&z, r_grid, window_n) })
}

/// Two-sided path from `Z_s = front(s)` for `s ≥ 0` and `Z_s = back(−s)`
/// for `s < 0`, trimmed to cover `(−n, n)`.
pub fn two_sided(front: &GridPath, back: &GridPath, window_n: f64) -> Result<GridPath> {
    if front.dt != back.dt || front.t0 != 0.0 || back.t0 != 0.0 {
        return param("two-sided path needs both sides on the same grid from 0");
    }
    let w = (window_n / front.dt).ceil() as usize + 1;
    if w >= front.len() || w >= back.len() {
        return param(format!("paths of {} and {} points do not cover (-{window_n}, {window_n})", front.len(), back.len()));
    }
    let mut zs: Vec<f64> = back.values[1..=w].iter().rev().copied().collect();
    zs.extend_from_slice(&front.values[..=w]);
    GridPath::new(-(w as f64 * front.dt), front.dt, zs)
}

pub fn limit_frame(front: &GridPath, back: &GridPath, r_grid: &[f64], window_n: f64) -> Result<LimitFrame> {
    check_grid(r_grid, 1.0, window_n)?;
    let z = two_sided(front, back, window_n)?;
    let snapshots = below_sets(&z, r_grid, window_n);
    Ok(LimitFrame { z, window_n, snapshots })
}

/// Limit frame from a two-sided BES(3) on step `dt`.
pub fn sample_limit_frame(dt: f64, r_grid: &[f64], window_n: f64, seed: Seed) -> Result<LimitFrame> {
    if !(dt > 0.0) {
        return param(format!("grid step must be positive, got {dt}"));
    }
    let steps = (window_n / dt).ceil() as usize + 2;
    let (front, back) = sample_two_sided_bes3(steps + 1, steps as f64 * dt, seed)?;
    limit_frame(&front, &back, r_grid, window_n)
}
