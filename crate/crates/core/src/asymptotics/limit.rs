use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{param, Result};
use crate::paths::Rng64;

/// Reflection terms kept on each side in [`bes3_bridge_hit_probability`].
const REFLECTIONS: i32 = 6;

/// `(√(2q)/sinh √(2q))²`, the Laplace transform at `q` of the limit of
/// `H_t/t²`.
pub fn laplace_target_h(q: f64) -> f64 {
    if q == 0.0 {
        return 1.0;
    }
    let a = (2.0 * q).sqrt();
    (a / a.sinh()).powi(2)
}

/// `(1/cosh √(2q))²`, the Laplace transform at `q` of the limit of `M_t/t²`.
pub fn laplace_target_m(q: f64) -> f64 {
    (1.0 / (2.0 * q).sqrt().cosh()).powi(2)
}

/// Chance that a BES(3) bridge from `x` to `y` over time `h` reaches `a`,
/// for `0 < x, y < a`.
///
/// The BES(3) bridge is the Brownian bridge conditioned to avoid 0, so this
/// is `1 − P(bridge stays in (0, a)) / P(bridge stays above 0)`, both from
/// the method of images.
pub fn bes3_bridge_hit_probability(x: f64, y: f64, a: f64, h: f64) -> f64 {
    if x >= a || y >= a {
        return 1.0;
    }
    let d2 = (y - x) * (y - x);
    let mut stay = 0.0;
    for k in -REFLECTIONS..=REFLECTIONS {
        let ka = 2.0 * k as f64 * a;
        stay += (-((y - x + ka).powi(2) - d2) / (2.0 * h)).exp() - (-((y + x + ka).powi(2) - d2) / (2.0 * h)).exp();
    }
    let above_zero = -(-2.0 * x * y / h).exp_m1();
    if !(above_zero > 0.0) {
        return 0.0;
    }
    (1.0 - stay / above_zero).clamp(0.0, 1.0)
}

struct Bes3Walker {
    w: [f64; 3],
    sd: f64,
}

impl Bes3Walker {
    fn from(x: f64, h: f64) -> Self {
        Bes3Walker { w: [x, 0.0, 0.0], sd: h.sqrt() }
    }

    fn step(&mut self, rng: &mut Rng64) -> f64 {
        for c in self.w.iter_mut() {
            *c += self.sd * rng.sample::<f64, _>(StandardNormal);
        }
        (self.w[0] * self.w[0] + self.w[1] * self.w[1] + self.w[2] * self.w[2]).sqrt()
    }
}

/// First passage of BES(3) from 0 over `level`, on steps of `h` with the
/// in-step crossing chance of the bridge; a crossing is placed mid-step.
pub fn sample_bes3_passage_time(level: f64, h: f64, rng: &mut Rng64) -> Result<f64> {
    if !(level > 0.0 && h > 0.0) {
        return param(format!("level and step must be positive, got {level} and {h}"));
    }
    let mut walker = Bes3Walker::from(0.0, h);
    let mut x = 0.0;
    let mut t = 0.0;
    loop {
        let y = walker.step(rng);
        if y >= level || (x > 0.0 && rng.random::<f64>() < bes3_bridge_hit_probability(x, y, level, h)) {
            return Ok(t + 0.5 * h);
        }
        x = y;
        t += h;
    }
}

/// Time spent in `(0, level)` between two knots under linear interpolation.
fn time_below(x: f64, y: f64, level: f64, h: f64) -> f64 {
    match (x < level, y < level) {
        (true, true) => h,
        (false, false) => 0.0,
        (true, false) => h * (level - x) / (y - x),
        (false, true) => h * (level - y) / (x - y),
    }
}

/// Total time BES(3) from 0 spends in `(0, level)`.
///
/// The path is walked until a knot lands at or above `2·level`. From there
/// it returns to `level` with probability `level/y`, after which the walk
/// restarts at `level`; the descent itself never enters `(0, level)`.
pub fn sample_bes3_occupation(level: f64, h: f64, rng: &mut Rng64) -> Result<f64> {
    if !(level > 0.0 && h > 0.0) {
        return param(format!("level and step must be positive, got {level} and {h}"));
    }
    let mut total = 0.0;
    let mut start = 0.0;
    loop {
        let mut walker = Bes3Walker::from(start, h);
        let mut x = start;
        loop {
            let y = walker.step(rng);
            total += time_below(x, y, level, h);
            x = y;
            if y >= 2.0 * level {
                break;
            }
        }
        if rng.random::<f64>() >= level / x {
            return Ok(total);
        }
        start = level;
    }
}

/// Limit of `H_{rt}/t²`: two independent BES(3) passage times over `r`.
pub fn sample_limit_h(r: f64, h: f64, rng: &mut Rng64) -> Result<f64> {
    Ok(sample_bes3_passage_time(r, h, rng)? + sample_bes3_passage_time(r, h, rng)?)
}

/// Limit of `M_{rt}/t²`: two independent BES(3) occupation times of `(0, r)`.
pub fn sample_limit_m(r: f64, h: f64, rng: &mut Rng64) -> Result<f64> {
    Ok(sample_bes3_occupation(r, h, rng)? + sample_bes3_occupation(r, h, rng)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::Seed;
    use crate::stats::empirical_laplace;

    #[test]
    fn targets_at_one() {
        assert!((laplace_target_h(1.0) - 0.53412).abs() < 5e-6);
        assert!((laplace_target_m(1.0) - 0.21077).abs() < 5e-6);
        assert_eq!(laplace_target_h(0.0), 1.0);
        assert_eq!(laplace_target_m(0.0), 1.0);
    }

    #[test]
    fn hit_probability_limits() {
        // Far from the barrier the bridge almost never reaches it.
        assert!(bes3_bridge_hit_probability(0.1, 0.1, 1.0, 1e-3) < 1e-100);
        assert!(bes3_bridge_hit_probability(0.999, 0.999, 1.0, 1e-2) > 0.9);
        assert_eq!(bes3_bridge_hit_probability(1.2, 0.5, 1.0, 1e-2), 1.0);
        let p = bes3_bridge_hit_probability(0.9, 0.95, 1.0, 1e-2);
        // Single-barrier Brownian value exp(−2(a−x)(a−y)/h) for comparison.
        assert!((p - (-2.0f64 * 0.1 * 0.05 / 1e-2).exp()).abs() < 1e-3);
    }

    #[test]
    fn passage_mean_is_one_third() {
        let mut rng = Seed::new(1, 0).rng();
        let n = 4000;
        let xs: Vec<f64> = (0..n).map(|_| sample_bes3_passage_time(1.0, 1e-3, &mut rng).unwrap()).collect();
        let m = crate::stats::mean_estimate(&xs);
        assert!(m.z_score(1.0 / 3.0).abs() < 4.0, "{m:?}");
    }

    #[test]
    fn occupation_laplace_near_target() {
        let mut rng = Seed::new(2, 0).rng();
        let xs: Vec<f64> = (0..4000).map(|_| sample_bes3_occupation(1.0, 1e-3, &mut rng).unwrap()).collect();
        let est = empirical_laplace(&xs, 1.0).unwrap();
        assert!(est.z_score(laplace_target_m(1.0).sqrt()).abs() < 4.0, "{est:?}");
    }
}
