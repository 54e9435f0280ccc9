//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Integrable endpoint singularities are handled by bisection since the
//! rule never evaluates the endpoints. Half-line integrals use the map
//! `x = a + s/(1−s)`.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 20_000 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if parts.len() >= opts.max_intervals {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not converge: estimate {total}, error {err}"
            )));
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (l, r, pv, pe) = parts.swap_remove(k);
        let m = 0.5 * (l + r);
        if m <= l || m >= r {
            return Err(Error::Numeric(format!("quadrature interval collapsed near {m}")));
        }
        let (v1, e1) = gk15(&mut f, l, m);
        let (v2, e2) = gk15(&mut f, m, r);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        parts.push((l, m, v1, e1));
        parts.push((m, r, v2, e2));
    }
    let value: f64 = parts.iter().map(|p| p.2).sum();
    let error: f64 = parts.iter().map(|p| p.3).sum();
    if !value.is_finite() {
        return Err(Error::Numeric(format!("quadrature on [{a}, {b}] produced {value}")));
    }
    Ok(QuadResult { value, error, intervals: parts.len() })
}

/// Integral of `f` over `[a, ∞)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate(
        |s| {
            let d = 1.0 - s;
            let v = f(a + s / d) / (d * d);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Convenience wrapper returning only the value with default options.
pub fn quad<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, QuadOptions::default()).map(|r| r.value)
}

pub fn quad_inf<F: FnMut(f64) -> f64>(f: F, a: f64) -> Result<f64> {
    integrate_to_infinity(f, a, QuadOptions::default()).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = quad(|x| x * x * x - 2.0 * x, 0.0, 2.0).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        let v = quad(|x| x.powf(-0.5), 0.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn half_line() {
        let v = quad_inf(|x| (-x).exp(), 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        let g = quad_inf(|x| (-x * x / 2.0).exp(), 0.0).unwrap();
        assert!((g - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-11);
    }
}
