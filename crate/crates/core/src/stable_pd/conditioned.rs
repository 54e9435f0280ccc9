use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use libm::tgamma as gamma;

use super::density::{death_time_density, xi_levy_density};
use super::StableParams;
use crate::error::{Error, Result};
use crate::opensets::RankedMasses;
use crate::paths::{Rng64, Seed};
use crate::quad;

/// A path of the h-conditioned negated subordinator, from `start` down to 0
/// at `death_time`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionedSubPath {
    pub start: f64,
    pub death_time: f64,
    /// `(time, size)` of resolved jumps, times strictly increasing.
    pub jumps: Vec<(f64, f64)>,
    /// Mass lost below the sampler's resolution.
    pub unresolved: f64,
    /// `(time, value)` knots of the right-continuous path, times increasing.
    pub knots: Vec<(f64, f64)>,
}

impl ConditionedSubPath {
    pub fn value_at(&self, t: f64) -> f64 {
        if t >= self.death_time {
            return 0.0;
        }
        let i = self.knots.partition_point(|&(s, _)| s <= t);
        if i == 0 {
            self.start
        } else {
            self.knots[i - 1].1
        }
    }

    pub fn jump_total(&self) -> f64 {
        self.jumps.iter().map(|j| j.1).sum()
    }

    /// Jump sizes as fractions of the start value, sorted nonincreasing; the
    /// unresolved share is left out.
    pub fn ranked_jumps(&self) -> Result<RankedMasses> {
        if self.jumps.is_empty() {
            return Err(Error::State("path has no resolved jumps".into()));
        }
        RankedMasses::from_unsorted(self.jumps.iter().map(|j| (j.1 / self.start).min(1.0)).collect())
    }

    /// Lengths of the gaps in the closure of the range, as fractions of the
    /// start value.
    pub fn ranked_range_gaps(&self) -> Result<RankedMasses> {
        RankedMasses::from_unsorted(self.jumps.iter().map(|j| (j.1 / self.start).min(1.0)).collect())
    }
}

/// A sampler for [`ConditionedSubPath`]s started at mass 1.
pub trait ConditionedSampler: Send + Sync {
    fn name(&self) -> &'static str;
    fn params(&self) -> &StableParams;
    fn sample(&self, seed: Seed) -> Result<ConditionedSubPath>;
}

pub const CONDITIONED_SAMPLERS: &[&str] = &["bridge", "lamperti"];

/// Looks up a conditioned sampler by name with default settings.
pub fn conditioned_sampler(name: &str, params: StableParams) -> Result<Box<dyn ConditionedSampler>> {
    match name {
        "bridge" => Ok(Box::new(BridgeMethod::new(params)?)),
        "lamperti" => Ok(Box::new(LampertiMethod::new(params)?)),
        other => Err(Error::Parameter(format!(
            "unknown conditioned sampler {other:?}; known: {}",
            CONDITIONED_SAMPLERS.join(", ")
        ))),
    }
}

/// Draws the death time of the process started at `x`.
///
/// At `β = 1/2` the law is explicit, `ζ = (2/C)·√(x·E)` with `E ~ Exp(1)`.
/// Otherwise the death time from 1 is tabulated once and rescaled by
/// `ζ_x = x^β·ζ_1`.
#[derive(Clone, Debug)]
pub struct DeathTimeSampler {
    params: StableParams,
    table: Option<(Vec<f64>, Vec<f64>)>,
}

impl DeathTimeSampler {
    pub fn new(params: StableParams) -> Result<Self> {
        if params.beta == 0.5 {
            return Ok(DeathTimeSampler { params, table: None });
        }
        let mean = gamma(params.beta) / (params.c * gamma(2.0 * params.beta));
        let n = 4000;
        let (lo, hi) = ((mean * 1e-4).ln(), (mean * 60.0).ln());
        let mut a = Vec::with_capacity(n);
        let mut dens = Vec::with_capacity(n);
        for i in 0..n {
            let la = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let v = la.exp();
            a.push(v);
            // Density in log a.
            dens.push(death_time_density(v, 1.0, &params)? * v);
        }
        let mut cdf = vec![0.0; n];
        let h = (hi - lo) / (n - 1) as f64;
        for i in 1..n {
            cdf[i] = cdf[i - 1] + 0.5 * h * (dens[i] + dens[i - 1]);
        }
        let total = cdf[n - 1];
        if !(total > 0.99 && total < 1.01) {
            return Err(Error::Numeric(format!("death-time table integrates to {total}")));
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(DeathTimeSampler { params, table: Some((cdf, a)) })
    }

    pub fn sample<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        match &self.table {
            None => {
                let e: f64 = rng.sample(Exp1);
                2.0 / self.params.c * (x * e).sqrt()
            }
            Some((cdf, a)) => {
                let u: f64 = rng.random();
                let i = cdf.partition_point(|&c| c < u).clamp(1, cdf.len() - 1);
                let w = ((u - cdf[i - 1]) / (cdf[i] - cdf[i - 1])).clamp(0.0, 1.0);
                let z = (a[i - 1].ln() + w * (a[i].ln() - a[i - 1].ln())).exp();
                x.powf(self.params.beta) * z
            }
        }
    }
}

/// Samples `ζ`, then the subordinator bridge from `x` to 0 over `[0, ζ]` by
/// recursive dyadic midpoint splitting.
///
/// At `β = 1/2` the midpoint split is exact: with half-length `s` and
/// increment `D`, the fraction `w` of `D` taken by the first half satisfies
/// `1/(w(1−w)) − 4 ~ Gamma(1/2, rate λ)`, `λ = s²C²/(4D)`, with a fair
/// choice between the two roots. Other `β` use inverse-CDF sampling of the
/// midpoint density on a logistic grid.
#[derive(Clone, Debug)]
pub struct BridgeMethod {
    pub params: StableParams,
    pub start: f64,
    pub depth: u32,
    pub midpoint_grid: usize,
    death: DeathTimeSampler,
}

impl BridgeMethod {
    pub fn new(params: StableParams) -> Result<Self> {
        Ok(BridgeMethod { params, start: 1.0, depth: 14, midpoint_grid: 1 << 12, death: DeathTimeSampler::new(params)? })
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_start(mut self, x: f64) -> Self {
        self.start = x;
        self
    }

    fn split_half_stable(&self, s: f64, d: f64, rng: &mut Rng64) -> f64 {
        let lambda = s * s * self.params.c * self.params.c / (4.0 * d);
        let z: f64 = rng.sample(StandardNormal);
        let v = 4.0 + z * z / (2.0 * lambda);
        let root = (1.0 - 4.0 / v).max(0.0).sqrt();
        let small = (2.0 / v) / (1.0 + root);
        if rng.random::<bool>() {
            small
        } else {
            1.0 - small
        }
    }

    fn split_general(&self, s: f64, d: f64, rng: &mut Rng64) -> Result<f64> {
        let beta = self.params.beta;
        let scale = (s * self.params.c).powf(1.0 / beta);
        let r = d / scale;
        let n = self.midpoint_grid;
        let span = r.max(1.0).ln() + 12.0;
        let mut w = Vec::with_capacity(n);
        let mut lf = Vec::with_capacity(n);
        for i in 0..n {
            let u = -span + 2.0 * span * (i as f64 + 0.5) / n as f64;
            let wi = 1.0 / (1.0 + (-u).exp());
            let a = super::density::standard_density(wi * r, beta)?;
            let b = super::density::standard_density((1.0 - wi) * r, beta)?;
            // Jacobian of the logistic map.
            w.push(wi);
            lf.push(a * b * wi * (1.0 - wi));
        }
        let mut cdf = vec![0.0; n + 1];
        for i in 0..n {
            cdf[i + 1] = cdf[i] + lf[i];
        }
        let total = cdf[n];
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numeric(format!("midpoint density vanished for increment ratio {r}")));
        }
        let u: f64 = rng.random::<f64>() * total;
        let i = cdf.partition_point(|&c| c <= u).clamp(1, n) - 1;
        let lo = if i == 0 { 0.0 } else { w[i - 1] };
        let frac = ((u - cdf[i]) / lf[i]).clamp(0.0, 1.0);
        Ok(lo + frac * (w[i] - lo))
    }

    pub fn sample_from(&self, x: f64, seed: Seed) -> Result<ConditionedSubPath> {
        if !(x > 0.0) {
            return Err(Error::Parameter(format!("start must be positive, got {x}")));
        }
        let mut rng = seed.rng();
        let zeta = self.death.sample(x, &mut rng);
        let mut inc = vec![x];
        let mut len = zeta;
        for _ in 0..self.depth {
            let s = 0.5 * len;
            let mut next = Vec::with_capacity(inc.len() * 2);
            for &d in &inc {
                let w = if d <= 0.0 {
                    0.5
                } else if self.params.beta == 0.5 {
                    self.split_half_stable(s, d, &mut rng)
                } else {
                    self.split_general(s, d, &mut rng)?
                };
                let first = w * d;
                next.push(first);
                next.push(d - first);
            }
            inc = next;
            len = s;
        }
        let cells = inc.len();
        let dt = zeta / cells as f64;
        let threshold = x / cells as f64;
        let mut jumps = Vec::new();
        let mut knots = Vec::with_capacity(cells);
        let mut unresolved = 0.0;
        let mut spent = 0.0;
        for (k, &d) in inc.iter().enumerate() {
            let t = (k + 1) as f64 * dt;
            spent += d;
            if d >= threshold {
                jumps.push((t, d));
            } else {
                unresolved += d;
            }
            knots.push((t, (x - spent).max(0.0)));
        }
        Ok(ConditionedSubPath { start: x, death_time: zeta, jumps, unresolved, knots })
    }
}

impl ConditionedSampler for BridgeMethod {
    fn name(&self) -> &'static str {
        "bridge"
    }
    fn params(&self) -> &StableParams {
        &self.params
    }
    fn sample(&self, seed: Seed) -> Result<ConditionedSubPath> {
        self.sample_from(self.start, seed)
    }
}

/// Builds the tagged mass `exp(−ξ)` from a subordinator `ξ` through the
/// Lamperti clock `A_t = ∫_0^t exp(−β ξ_s) ds`.
///
/// Jumps of `ξ` above `eps` form a compound Poisson process sampled by
/// inverting the tail `(K/β)(e^y − 1)^{−β}`; jumps below `eps` are replaced by
/// their mean drift `∫_0^eps y ρ(y) dy`. Simulation stops once the mass is
/// below `stop_mass`; the expected remaining clock is then added to `ζ`.
#[derive(Clone, Debug)]
pub struct LampertiMethod {
    pub params: StableParams,
    pub eps: f64,
    pub stop_mass: f64,
    rate: f64,
    drift: f64,
    small_jump_sd: f64,
    mean_death_time: f64,
}

/// Largest accepted standard deviation of the small-jump part of `ξ` per
/// unit time.
pub const LAMPERTI_TRUNCATION_TOLERANCE: f64 = 1e-3;

impl LampertiMethod {
    pub fn new(params: StableParams) -> Result<Self> {
        Self::with_truncation(params, 1e-4)
    }

    pub fn with_truncation(params: StableParams, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!("truncation level must lie in (0, 1), got {eps}")));
        }
        let b = params.beta;
        let k = b * params.c / gamma(1.0 - b);
        let rate = k / b * eps.exp_m1().powf(-b);
        let drift = quad::quad(|y| y * xi_levy_density(y, &params), 0.0, eps)?;
        let second = quad::quad(|y| y * y * xi_levy_density(y, &params), 0.0, eps)?;
        let small_jump_sd = second.sqrt();
        if small_jump_sd > LAMPERTI_TRUNCATION_TOLERANCE {
            return Err(Error::Numeric(format!(
                "truncation at {eps} leaves small-jump noise {small_jump_sd:.3e} above {LAMPERTI_TRUNCATION_TOLERANCE:e}"
            )));
        }
        let mean_death_time = gamma(b) / (params.c * gamma(2.0 * b));
        Ok(LampertiMethod { params, eps, stop_mass: 1e-16, rate, drift, small_jump_sd, mean_death_time })
    }

    pub fn jump_rate(&self) -> f64 {
        self.rate
    }

    pub fn small_jump_drift(&self) -> f64 {
        self.drift
    }

    pub fn small_jump_sd(&self) -> f64 {
        self.small_jump_sd
    }
}

impl ConditionedSampler for LampertiMethod {
    fn name(&self) -> &'static str {
        "lamperti"
    }
    fn params(&self) -> &StableParams {
        &self.params
    }
    fn sample(&self, seed: Seed) -> Result<ConditionedSubPath> {
        let mut rng = seed.rng();
        let b = self.params.beta;
        let d = self.drift;
        let em1 = self.eps.exp_m1();
        let (mut xi, mut clock, mut lost) = (0.0f64, 0.0f64, 0.0f64);
        let mut jumps = Vec::new();
        let mut knots = Vec::new();
        loop {
            let tau: f64 = rng.sample::<f64, _>(Exp1) / self.rate;
            let weight = (-b * xi).exp();
            clock += if d > 0.0 { weight * -(-b * d * tau).exp_m1() / (b * d) } else { weight * tau };
            let before = xi + d * tau;
            lost += (-xi).exp() - (-before).exp();
            let u: f64 = 1.0 - rng.random::<f64>();
            let j = (em1 * u.powf(-1.0 / b)).ln_1p();
            let mass_before = (-before).exp();
            let size = mass_before * -(-j).exp_m1();
            xi = before + j;
            let mass = (-xi).exp();
            jumps.push((clock, size));
            knots.push((clock, mass));
            if mass < self.stop_mass {
                break;
            }
        }
        let remaining = (-xi).exp();
        let death_time = clock + remaining.powf(b) * self.mean_death_time;
        Ok(ConditionedSubPath { start: 1.0, death_time, jumps, unresolved: lost + remaining, knots })
    }
}

/// Bridge-method path from `x` with default resolution.
pub fn sample_conditioned_bridge_method(x: f64, params: &StableParams, seed: Seed) -> Result<ConditionedSubPath> {
    BridgeMethod::new(*params)?.sample_from(x, seed)
}

/// Lamperti-method path from mass 1 with default truncation.
pub fn sample_conditioned_lamperti_method(params: &StableParams, seed: Seed) -> Result<ConditionedSubPath> {
    LampertiMethod::new(*params)?.sample(seed)
}
