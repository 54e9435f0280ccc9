//! Cyclic Brownian bridge on [0, 1] that is refined locally.
//!
//! The bridge is first drawn on `coarse_cells` steps. A cell at level `l`
//! (width `1/(coarse_cells·branching^l)`) can be split into `branching`
//! children by exact Brownian-bridge infill between its endpoint values. The
//! values on the finest level therefore have the law of a random-walk bridge
//! with `coarse_cells·branching^levels` steps, but only the cells near the
//! points of interest are ever materialized. Each cell draws from its own
//! substream, so the result does not depend on the order of refinement.
//!
//! The excursion is the Vervaat transform of the finest-level bridge.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{bridge_values, GridPath, Seed, MAX_SUBSTREAMS};
use crate::error::{param, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementConfig {
    pub coarse_cells: usize,
    pub branching: usize,
    pub levels: usize,
    /// A cell is skipped by the extremum search when the chance that its
    /// interior beats the current record is below `exp(-miss_exponent)`.
    pub miss_exponent: f64,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig { coarse_cells: 1 << 12, branching: 16, levels: 3, miss_exponent: 30.0 }
    }
}

impl RefinementConfig {
    pub fn finest_cells(&self) -> u64 {
        self.coarse_cells as u64 * (self.branching as u64).pow(self.levels as u32)
    }

    pub fn finest_step(&self) -> f64 {
        1.0 / self.finest_cells() as f64
    }

    fn cells(&self, level: usize) -> u64 {
        self.coarse_cells as u64 * (self.branching as u64).pow(level as u32)
    }

    fn validate(&self) -> Result<()> {
        if self.coarse_cells < 2 || self.branching < 2 {
            return param("refinement needs at least 2 coarse cells and branching 2");
        }
        let total: u64 = (0..self.levels).map(|l| self.cells(l)).sum();
        if total + 1 >= MAX_SUBSTREAMS {
            return param(format!("refinement with {total} cells exceeds the substream budget"));
        }
        Ok(())
    }
}

/// Excursion near its maximum.
#[derive(Clone, Debug)]
pub struct ExcursionPeak {
    pub max: f64,
    /// Excursion time of the maximum.
    pub argmax: f64,
    /// Excursion values on the finest grid, in excursion time, truncated to
    /// `[0, 1]`.
    pub window: GridPath,
}

/// Excursion near both endpoints: `front` on `[0, w]` and `back` on `[1−w, 1]`.
#[derive(Clone, Debug)]
pub struct ExcursionEnds {
    pub front: GridPath,
    pub back: GridPath,
}

pub struct RefinedBridge {
    cfg: RefinementConfig,
    seed: Seed,
    coarse: Vec<f64>,
    refined: Vec<HashMap<u64, Vec<f64>>>,
    offsets: Vec<u64>,
}

impl RefinedBridge {
    pub fn new(cfg: RefinementConfig, seed: Seed) -> Result<Self> {
        cfg.validate()?;
        let coarse = bridge_values(&mut seed.substream(0), cfg.coarse_cells + 1, 1.0);
        let mut offsets = Vec::with_capacity(cfg.levels);
        let mut acc = 1;
        for l in 0..cfg.levels {
            offsets.push(acc);
            acc += cfg.cells(l);
        }
        Ok(RefinedBridge { cfg, seed, coarse, refined: vec![HashMap::new(); cfg.levels], offsets })
    }

    pub fn config(&self) -> &RefinementConfig {
        &self.cfg
    }

    fn knot(&self, level: usize, j: u64) -> f64 {
        let j = j % self.cfg.cells(level);
        if level == 0 {
            return self.coarse[j as usize];
        }
        let b = self.cfg.branching as u64;
        let (c, r) = (j / b, j % b);
        if r == 0 {
            return self.knot(level - 1, c);
        }
        self.refined[level - 1].get(&c).expect("knot requested from an unrefined cell")[r as usize]
    }

    fn refine(&mut self, level: usize, cell: u64) {
        let cell = cell % self.cfg.cells(level);
        if self.refined[level].contains_key(&cell) {
            return;
        }
        let x = self.knot(level, cell);
        let y = self.knot(level, cell + 1);
        let b = self.cfg.branching;
        let sd = (1.0 / (self.cfg.cells(level) as f64 * b as f64)).sqrt();
        let mut rng = self.seed.substream(self.offsets[level] + cell);
        let mut w = Vec::with_capacity(b + 1);
        w.push(0.0);
        let mut acc = 0.0;
        for _ in 0..b {
            let z: f64 = rng.sample(StandardNormal);
            acc += sd * z;
            w.push(acc);
        }
        let end = w[b];
        let mut v: Vec<f64> = (0..=b)
            .map(|r| {
                let f = r as f64 / b as f64;
                x + w[r] - f * end + f * (y - x)
            })
            .collect();
        v[0] = x;
        v[b] = y;
        self.refined[level].insert(cell, v);
    }

    /// Finest-level index and value of the extremum of `sign·bridge`.
    fn locate_extremum(&mut self, sign: f64) -> (u64, f64) {
        let b = self.cfg.branching as u64;
        let levels = self.cfg.levels;
        let scale = |l: usize| b.pow((levels - l) as u32);
        let cfg = self.cfg;
        let margin = |l: usize| (cfg.miss_exponent / (2.0 * cfg.cells(l) as f64)).sqrt();

        let mut best_val = f64::NEG_INFINITY;
        let mut best_idx = 0u64;
        for (j, &v) in self.coarse.iter().enumerate().take(self.cfg.coarse_cells) {
            if sign * v > best_val {
                best_val = sign * v;
                best_idx = j as u64 * scale(0);
            }
        }
        let m0 = margin(0);
        let mut cand: Vec<u64> = (0..self.cfg.coarse_cells)
            .filter(|&c| (sign * self.coarse[c]).max(sign * self.coarse[c + 1]) >= best_val - m0)
            .map(|c| c as u64)
            .collect();
        for l in 0..levels {
            for &c in &cand {
                self.refine(l, c);
            }
            for &c in &cand {
                let v = &self.refined[l][&c];
                for r in 1..b as usize {
                    if sign * v[r] > best_val {
                        best_val = sign * v[r];
                        best_idx = (c * b + r as u64) * scale(l + 1);
                    }
                }
            }
            if l + 1 == levels {
                break;
            }
            let m = margin(l + 1);
            let mut next = Vec::new();
            for &c in &cand {
                let v = &self.refined[l][&c];
                for r in 0..b as usize {
                    if (sign * v[r]).max(sign * v[r + 1]) >= best_val - m {
                        next.push(c * b + r as u64);
                    }
                }
            }
            cand = next;
        }
        (best_idx, sign * best_val)
    }

    /// Materializes every finest-level knot with index in `[lo, hi]`
    /// (unreduced, may wrap cyclically).
    fn materialize(&mut self, lo: i64, hi: i64) {
        let b = self.cfg.branching as i64;
        for l in 0..self.cfg.levels {
            let s = b.pow((self.cfg.levels - l) as u32);
            let c_lo = lo.div_euclid(s);
            let c_hi = (hi + s - 1).div_euclid(s);
            let n = self.cfg.cells(l) as i64;
            for c in c_lo..c_hi {
                self.refine(l, c.rem_euclid(n) as u64);
            }
        }
    }

    fn finest(&self, j: i64) -> f64 {
        let n = self.cfg.finest_cells() as i64;
        self.knot(self.cfg.levels, j.rem_euclid(n) as u64)
    }

    /// Excursion values around the maximum, on excursion times within
    /// `half_width` of the argmax.
    pub fn excursion_peak(&mut self, half_width: f64) -> Result<ExcursionPeak> {
        let n = self.cfg.finest_cells() as i64;
        let (tau, low) = self.locate_extremum(-1.0);
        let (sigma, high) = self.locate_extremum(1.0);
        let p = (sigma as i64 - tau as i64).rem_euclid(n);
        let w = (half_width * n as f64).ceil() as i64 + 1;
        let lo = (p - w).max(0);
        let hi = (p + w).min(n);
        self.materialize(tau as i64 + lo, tau as i64 + hi);
        let values: Vec<f64> = (lo..=hi)
            .map(|r| if r == 0 || r == n { 0.0 } else { self.finest(tau as i64 + r) - low })
            .collect();
        let dt = 1.0 / n as f64;
        Ok(ExcursionPeak {
            max: high - low,
            argmax: p as f64 * dt,
            window: GridPath::new(lo as f64 * dt, dt, values)?,
        })
    }

    /// Excursion values on `[0, width]` and `[1 − width, 1]`.
    pub fn excursion_ends(&mut self, width: f64) -> Result<ExcursionEnds> {
        let n = self.cfg.finest_cells() as i64;
        let (tau, low) = self.locate_extremum(-1.0);
        let w = ((width * n as f64).ceil() as i64).min(n);
        let tau = tau as i64;
        self.materialize(tau - w, tau + w);
        let dt = 1.0 / n as f64;
        let front: Vec<f64> =
            (0..=w).map(|r| if r == 0 { 0.0 } else { self.finest(tau + r) - low }).collect();
        let back: Vec<f64> =
            (n - w..=n).map(|r| if r == n { 0.0 } else { self.finest(tau + r) - low }).collect();
        Ok(ExcursionEnds {
            front: GridPath::new(0.0, dt, front)?,
            back: GridPath::new((n - w) as f64 * dt, dt, back)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RefinementConfig {
        RefinementConfig { coarse_cells: 64, branching: 4, levels: 2, miss_exponent: 30.0 }
    }

    fn full_finest(rb: &mut RefinedBridge) -> Vec<f64> {
        let n = rb.cfg.finest_cells() as i64;
        rb.materialize(0, n);
        (0..=n).map(|j| rb.finest(j)).collect()
    }

    #[test]
    fn search_matches_brute_force() {
        for k in 0..50 {
            let seed = Seed::new(11, k);
            let mut rb = RefinedBridge::new(small(), seed).unwrap();
            let (imax, vmax) = rb.locate_extremum(1.0);
            let (imin, vmin) = rb.locate_extremum(-1.0);
            let mut full = RefinedBridge::new(small(), seed).unwrap();
            let all = full_finest(&mut full);
            let top = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let bottom = all.iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(vmax, top);
            assert_eq!(vmin, bottom);
            assert_eq!(all[imax as usize], top);
            assert_eq!(all[imin as usize], bottom);
        }
    }

    #[test]
    fn refinement_is_order_independent() {
        let seed = Seed::new(5, 5);
        let mut a = RefinedBridge::new(small(), seed).unwrap();
        let va = full_finest(&mut a);
        let mut b = RefinedBridge::new(small(), seed).unwrap();
        b.locate_extremum(1.0);
        let vb = full_finest(&mut b);
        assert_eq!(va, vb);
    }

    #[test]
    fn peak_window_agrees_with_vervaat() {
        let seed = Seed::new(8, 1);
        let mut full = RefinedBridge::new(small(), seed).unwrap();
        let all = full_finest(&mut full);
        let e = super::super::vervaat(&all);
        let eg = GridPath::new(0.0, 1.0 / (all.len() - 1) as f64, e).unwrap();
        let mut rb = RefinedBridge::new(small(), seed).unwrap();
        let peak = rb.excursion_peak(0.05).unwrap();
        assert_eq!(peak.max, eg.max());
        assert_eq!(peak.argmax, eg.time(eg.argmax()));
        for (k, &v) in peak.window.values.iter().enumerate() {
            let t = peak.window.time(k);
            let j = (t * 1024.0).round() as usize;
            assert!((v - eg.values[j]).abs() < 1e-12);
        }
        let ends = rb.excursion_ends(0.1).unwrap();
        assert_eq!(ends.front.values[0], 0.0);
        assert_eq!(*ends.back.values.last().unwrap(), 0.0);
        for (k, &v) in ends.back.values.iter().enumerate() {
            let j = (ends.back.time(k) * 1024.0).round() as usize;
            assert!((v - eg.values[j]).abs() < 1e-12);
        }
    }
}
