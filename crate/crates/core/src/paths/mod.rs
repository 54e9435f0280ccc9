//! Seed-driven samplers for the continuous-path ingredients: Brownian
//! bridges, normalized excursions, BES(3) paths and 1/2-stable increments.

mod refined;

pub use refined::{ExcursionEnds, ExcursionPeak, RefinedBridge, RefinementConfig};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::stable_pd::StableParams;

/// Identifies one reproducible random stream.
///
/// The ChaCha8 key is `master` in little-endian order followed by 24 zero
/// bytes and the ChaCha stream id is `stream`, so distinct pairs never share
/// keystream. Substream `k` of a seed is the same keystream positioned at word
/// `k << 40`; substream 0 is the start of the stream. Keeping `k < 2^28` keeps
/// substreams disjoint for up to 2^40 words each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

pub type Rng64 = ChaCha8Rng;

pub const MAX_SUBSTREAMS: u64 = 1 << 28;

impl Seed {
    pub const fn new(master: u64, stream: u64) -> Self {
        Seed { master, stream }
    }

    pub fn rng(&self) -> Rng64 {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream);
        rng
    }

    pub fn substream(&self, k: u64) -> Rng64 {
        assert!(k < MAX_SUBSTREAMS, "substream index {k} out of range");
        let mut rng = self.rng();
        rng.set_word_pos((k as u128) << 40);
        rng
    }

    /// Seed for replicate `index` of the case tagged `tag`.
    pub fn replicate(master: u64, tag: u32, index: u32) -> Self {
        Seed::new(master, ((tag as u64) << 32) | index as u64)
    }
}

/// Real-valued path on the grid `t0 + k·dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl GridPath {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return param(format!("grid step must be positive, got {dt}"));
        }
        if values.is_empty() {
            return param("grid path needs at least one value");
        }
        Ok(GridPath { t0, dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn duration(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    /// Index `k` of the segment `[t_k, t_{k+1}]` containing `t`, clamped to
    /// the path.
    pub fn segment_index(&self, t: f64) -> usize {
        if self.len() < 2 {
            return 0;
        }
        let x = ((t - self.t0) / self.dt).floor();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.len() - 2)
        }
    }

    /// Linear interpolation, constant beyond the ends.
    pub fn value_at(&self, t: f64) -> f64 {
        if self.len() == 1 || t <= self.t0 {
            return self.values[0];
        }
        if t >= self.t_end() {
            return self.values[self.len() - 1];
        }
        let k = self.segment_index(t);
        let w = (t - self.time(k)) / self.dt;
        self.values[k] + w * (self.values[k + 1] - self.values[k])
    }

    /// Time at which the interpolated segment `[k, k+1]` meets `level`.
    ///
    /// Requires `level` between the two knot values. When `level` equals a
    /// knot value the knot time is returned exactly; every level-crossing
    /// computation in the crate goes through here so that endpoints agree
    /// bitwise across routines.
    #[inline]
    pub fn crossing(&self, k: usize, level: f64) -> f64 {
        let a = self.values[k];
        let b = self.values[k + 1];
        if level == a {
            return self.time(k);
        }
        if level == b {
            return self.time(k + 1);
        }
        let w = ((level - a) / (b - a)).clamp(0.0, 1.0);
        self.time(k) + w * self.dt
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        best
    }

    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = k;
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax()]
    }

    pub fn min(&self) -> f64 {
        self.values[self.argmin()]
    }
}

fn check_grid(n_points: usize, min_points: usize, span: f64, what: &str) -> Result<()> {
    if n_points < min_points {
        return param(format!("{what} needs at least {min_points} grid points, got {n_points}"));
    }
    if !(span > 0.0 && span.is_finite()) {
        return param(format!("{what} length must be positive, got {span}"));
    }
    Ok(())
}

/// Random-walk bridge values on `n_points` knots over `[0, length]`, pinned
/// exactly to 0 at both ends.
pub(crate) fn bridge_values<R: Rng + ?Sized>(rng: &mut R, n_points: usize, length: f64) -> Vec<f64> {
    let m = n_points - 1;
    let sd = (length / m as f64).sqrt();
    let mut w = Vec::with_capacity(n_points);
    w.push(0.0);
    let mut acc = 0.0;
    for _ in 0..m {
        let z: f64 = rng.sample(StandardNormal);
        acc += sd * z;
        w.push(acc);
    }
    let end = w[m];
    for (k, v) in w.iter_mut().enumerate() {
        *v -= (k as f64 / m as f64) * end;
    }
    w[0] = 0.0;
    w[m] = 0.0;
    w
}

/// Brownian bridge from 0 to 0 on `n_points` knots over `[0, length]`.
pub fn sample_brownian_bridge(n_points: usize, length: f64, seed: Seed) -> Result<GridPath> {
    check_grid(n_points, 2, length, "brownian bridge")?;
    let values = bridge_values(&mut seed.rng(), n_points, length);
    GridPath::new(0.0, length / (n_points - 1) as f64, values)
}

/// Vervaat transform of pinned bridge values: cyclic shift (period
/// `len − 1`) starting at the first index of the minimum, minus the minimum.
pub fn vervaat(bridge: &[f64]) -> Vec<f64> {
    let m = bridge.len() - 1;
    let mut j = 0;
    for k in 1..m {
        if bridge[k] < bridge[j] {
            j = k;
        }
    }
    let floor = bridge[j];
    (0..=m).map(|k| bridge[(j + k) % m] - floor).collect()
}

/// Normalized Brownian excursion on `n_points` knots over `[0, 1]`, built by
/// the Vervaat transform of a Brownian bridge.
pub fn sample_normalized_excursion(n_points: usize, seed: Seed) -> Result<GridPath> {
    check_grid(n_points, 3, 1.0, "normalized excursion")?;
    let b = bridge_values(&mut seed.rng(), n_points, 1.0);
    GridPath::new(0.0, 1.0 / (n_points - 1) as f64, vervaat(&b))
}

pub(crate) fn bes3_values<R: Rng + ?Sized>(rng: &mut R, n_points: usize, horizon: f64) -> Vec<f64> {
    let sd = (horizon / (n_points - 1) as f64).sqrt();
    let mut w = [0.0f64; 3];
    let mut out = Vec::with_capacity(n_points);
    out.push(0.0);
    for _ in 1..n_points {
        for c in w.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *c += sd * z;
        }
        out.push((w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt());
    }
    out
}

/// BES(3) from 0: the norm of a three-dimensional Brownian motion, on
/// `n_points` knots over `[0, horizon]`.
pub fn sample_bes3(n_points: usize, horizon: f64, seed: Seed) -> Result<GridPath> {
    check_grid(n_points, 2, horizon, "bes3")?;
    let values = bes3_values(&mut seed.rng(), n_points, horizon);
    GridPath::new(0.0, horizon / (n_points - 1) as f64, values)
}

/// Two independent BES(3) paths `(R, R')` drawn from substreams 0 and 1.
pub fn sample_two_sided_bes3(n_points_per_side: usize, horizon: f64, seed: Seed) -> Result<(GridPath, GridPath)> {
    check_grid(n_points_per_side, 2, horizon, "two-sided bes3")?;
    let dt = horizon / (n_points_per_side - 1) as f64;
    let r = bes3_values(&mut seed.substream(0), n_points_per_side, horizon);
    let l = bes3_values(&mut seed.substream(1), n_points_per_side, horizon);
    Ok((GridPath::new(0.0, dt, r)?, GridPath::new(0.0, dt, l)?))
}

/// `T_t` for the subordinator with Laplace exponent `2√(2q)`: the first
/// passage of a Brownian motion above level `2t`, i.e. `4t²/N²`.
#[inline]
pub fn half_stable_increment<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    4.0 * t * t / (z * z)
}

pub fn sample_half_stable_increment(t: f64, params: &StableParams, seed: Seed) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return param(format!("time must be positive, got {t}"));
    }
    if !params.is_brownian() {
        return Err(Error::Unsupported(format!(
            "half-stable increments need beta = 1/2 and C = 2*sqrt(2), got {params:?}"
        )));
    }
    Ok(half_stable_increment(t, &mut seed.rng()))
}
