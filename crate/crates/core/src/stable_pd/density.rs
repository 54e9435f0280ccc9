use std::f64::consts::PI;

use libm::{lgamma as ln_gamma, tgamma as gamma};

use super::StableParams;
use crate::error::{Error, Result};
use crate::quad;

/// Series terms are accepted while the largest term exceeds the sum by at
/// most this factor (roughly the number of significant digits lost).
const SERIES_CANCELLATION_LIMIT: f64 = 1e3;
const SERIES_MAX_TERMS: usize = 4000;

fn humbert_pollard(y: f64, beta: f64) -> Option<f64> {
    let ly = y.ln();
    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    let mut prev_mag = f64::INFINITY;
    for k in 1..=SERIES_MAX_TERMS {
        let kf = k as f64;
        let log_mag = ln_gamma(kf * beta + 1.0) - ln_gamma(kf + 1.0) - (kf * beta + 1.0) * ly;
        let mag = log_mag.exp();
        let s = (PI * kf * beta).sin();
        let term = if k % 2 == 1 { mag * s } else { -mag * s } / PI;
        if k == 1 && log_mag < -700.0 {
            // Far tail: later terms are smaller by powers of y^{-β}.
            return Some(term);
        }
        sum += term;
        largest = largest.max(term.abs());
        if mag < prev_mag && mag < 1e-17 * sum.abs() {
            return (sum > 0.0 && largest <= SERIES_CANCELLATION_LIMIT * sum).then_some(sum);
        }
        prev_mag = mag;
    }
    None
}

/// Kanter's integral: `P(X > y)`-type representation differentiated in `y`.
fn kanter(y: f64, beta: f64) -> Result<f64> {
    let g = beta / (1.0 - beta);
    let z = y.powf(-g);
    let a = |u: f64| {
        let sb = (beta * u).sin();
        (sb / u.sin()).powf(1.0 / (1.0 - beta)) * ((1.0 - beta) * u).sin() / sb
    };
    let integrand = |u: f64| {
        let au = a(u);
        let x = au * z;
        if !x.is_finite() || x > 745.0 {
            0.0
        } else {
            au * (-x).exp()
        }
    };
    let opts = quad::QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 4000 };
    let r = quad::integrate(integrand, 0.0, PI, opts)?;
    Ok(g / PI * y.powf(-g - 1.0) * r.value)
}

/// Density of the standard positive β-stable law, `E exp(−qX) = exp(−q^β)`.
pub fn standard_density(y: f64, beta: f64) -> Result<f64> {
    if !(y > 0.0) || y == f64::INFINITY {
        return Ok(0.0);
    }
    if beta == 0.5 {
        return Ok(0.5 / PI.sqrt() * y.powf(-1.5) * (-0.25 / y).exp());
    }
    if let Some(v) = humbert_pollard(y, beta) {
        return Ok(v);
    }
    kanter(y, beta).map_err(|e| Error::Numeric(format!("stable density at y={y}, beta={beta}: {e}")))
}

/// Density `f_t(x)` of `σ_t` for the subordinator with exponent `C·q^β`.
pub fn stable_density(t: f64, x: f64, params: &StableParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("time must be positive, got {t}")));
    }
    if !(x > 0.0) {
        return Ok(0.0);
    }
    if params.beta == 0.5 {
        let c = t * params.c;
        return Ok(c / (2.0 * PI.sqrt()) * x.powf(-1.5) * (-c * c / (4.0 * x)).exp());
    }
    let s = (t * params.c).powf(1.0 / params.beta);
    Ok(standard_density(x / s, params.beta)? / s)
}

/// `h(x) = 1/(C·Γ(β)·x^{1−β})`, the potential density at `x`.
pub fn potential_h(x: f64, params: &StableParams) -> f64 {
    1.0 / (params.c * gamma(params.beta) * x.powf(1.0 - params.beta))
}

/// Density of the death time of `−σʰ` started at `x`, `a ↦ f_a(x)/h(x)`.
pub fn death_time_density(a: f64, x: f64, params: &StableParams) -> Result<f64> {
    if !(a > 0.0) {
        return Ok(0.0);
    }
    Ok(stable_density(a, x, params)? / potential_h(x, params))
}

/// `P(ζ > a)` for the process started at `x`.
pub fn death_time_survival(a: f64, x: f64, params: &StableParams) -> Result<f64> {
    if a <= 0.0 {
        return Ok(1.0);
    }
    if params.beta == 0.5 {
        return Ok((-a * a * params.c * params.c / (4.0 * x)).exp());
    }
    let tail = quad::quad_inf(|s| stable_density(s, x, params).unwrap_or(f64::NAN), a)?;
    Ok((tail / potential_h(x, params)).clamp(0.0, 1.0))
}

/// `p_s(x, y) = f_s(x−y)·h(y)/h(x)` for `0 < y < x`, else 0.
pub fn transition_density(s: f64, x: f64, y: f64, params: &StableParams) -> Result<f64> {
    if !(y > 0.0 && y < x) {
        return Ok(0.0);
    }
    Ok(stable_density(s, x - y, params)? * potential_h(y, params) / potential_h(x, params))
}

/// Lévy density of the subordinator `ξ` with `exp(−ξ)` the tagged mass:
/// `y ↦ (βC/Γ(1−β))·e^y/(e^y−1)^{1+β}`.
pub fn xi_levy_density(y: f64, params: &StableParams) -> f64 {
    if !(y > 0.0) {
        return 0.0;
    }
    let b = params.beta;
    let k = b * params.c / gamma(1.0 - b);
    k * (-b * y).exp() * (-(-y).exp_m1()).powf(-1.0 - b)
}

/// `φ(q) = ∫ (1 − e^{−qy}) ρ_ξ(y) dy` by quadrature.
pub fn xi_laplace_exponent(q: f64, params: &StableParams) -> Result<f64> {
    if q == 0.0 {
        return Ok(0.0);
    }
    let f = |y: f64| -(-q * y).exp_m1() * xi_levy_density(y, params);
    let opts = quad::QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 20_000 };
    let head = quad::integrate(f, 0.0, 1.0, opts)?;
    let tail = quad::integrate_to_infinity(f, 1.0, opts)?;
    Ok(head.value + tail.value)
}

/// Closed form `φ(q) = C·Γ(q+β)/Γ(q)`, used as an independent check of the
/// quadrature.
pub fn phi_closed_form(q: f64, params: &StableParams) -> f64 {
    params.c * (ln_gamma(q + params.beta) - ln_gamma(q)).exp()
}

/// `E[ζ^k] = k! / ∏_{i=1}^{k} φ(−a·i)` with `a` the Lamperti exponent.
pub fn moments_of_death_time(k: u32, params: &StableParams) -> Result<f64> {
    if k == 0 {
        return Err(Error::Parameter("moment order must be at least 1".into()));
    }
    let a = params.lamperti_exponent();
    let mut m = 1.0;
    for i in 1..=k {
        m *= i as f64 / xi_laplace_exponent(-a * i as f64, params)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn brownian_closed_forms() {
        let p = StableParams::brownian();
        let f11 = stable_density(1.0, 1.0, &p).unwrap();
        assert!((f11 - (2.0 / PI).sqrt() * (-2.0f64).exp()).abs() < 1e-15);
        assert!((f11 - 0.10798).abs() < 5e-6);
        assert!((potential_h(1.0, &p) - 0.19947).abs() < 5e-6);
        let d = death_time_density(0.5, 1.0, &p).unwrap();
        assert!((d - 2.0 * (-0.5f64).exp()).abs() < 1e-14);
        assert!((d - 1.21306).abs() < 5e-6);
    }

    #[test]
    fn standard_density_routes_agree() {
        for &beta in &[0.3, 0.4, 0.6, 0.75] {
            for &y in &[0.3, 0.8, 1.5, 4.0, 20.0] {
                let s = humbert_pollard(y, beta);
                let k = kanter(y, beta).unwrap();
                if let Some(s) = s {
                    assert!(rel(s, k) < 1e-9, "beta={beta} y={y}: {s} vs {k}");
                }
            }
            let k = kanter(0.5, 0.5).unwrap();
            assert!(rel(k, standard_density(0.5, 0.5).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn potential_is_integral_of_density() {
        let p = StableParams::brownian();
        for &x in &[0.5, 1.0, 2.0] {
            let q = quad::quad_inf(|t| stable_density(t, x, &p).unwrap(), 0.0).unwrap();
            assert!((q - potential_h(x, &p)).abs() < 1e-6);
        }
        assert!(potential_h(2.0, &p) < potential_h(1.0, &p));
    }

    #[test]
    fn death_density_mean_and_mass() {
        let p = StableParams::brownian();
        let mass = quad::quad_inf(|a| death_time_density(a, 1.0, &p).unwrap(), 0.0).unwrap();
        assert!((mass - 1.0).abs() < 1e-9);
        let mean = quad::quad_inf(|a| a * death_time_density(a, 1.0, &p).unwrap(), 0.0).unwrap();
        assert!((mean - (PI / 8.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn transition_mass_balance() {
        let p = StableParams::brownian();
        for &(s, x) in &[(0.3, 1.0), (1.0, 2.0), (0.1, 0.5)] {
            let alive = quad::quad(|y| transition_density(s, x, y, &p).unwrap(), 0.0, x).unwrap();
            let dead = 1.0 - death_time_survival(s, x, &p).unwrap();
            assert!((alive + dead - 1.0).abs() < 1e-6, "s={s} x={x}: {alive} + {dead}");
        }
    }

    #[test]
    fn brownian_finite_dimensional_product_form() {
        // Telescoping h-ratios: h(y)/h(x) = √(x/y) at β = 1/2.
        let p = StableParams::brownian();
        let (v, x1, x2) = (1.0, 0.7, 0.2);
        let (t1, t2) = (0.2, 0.5);
        let chained = transition_density(t1, v, x1, &p).unwrap() * transition_density(t2 - t1, x1, x2, &p).unwrap();
        let product = stable_density(t1, v - x1, &p).unwrap()
            * stable_density(t2 - t1, x1 - x2, &p).unwrap()
            * (v / x2).sqrt();
        assert!(rel(chained, product) < 1e-13);
    }

    #[test]
    fn chapman_kolmogorov() {
        let p = StableParams::brownian();
        let (s, t, x, y) = (0.2, 0.3, 1.0, 0.4);
        let direct = transition_density(s + t, x, y, &p).unwrap();
        let via = quad::quad(
            |z| transition_density(s, x, z, &p).unwrap() * transition_density(t, z, y, &p).unwrap(),
            y,
            x,
        )
        .unwrap();
        assert!((direct - via).abs() < 1e-5);
    }

    #[test]
    fn phi_quadrature_matches_closed_form() {
        for p in [StableParams::brownian(), StableParams::new(0.3, 1.7).unwrap()] {
            for &q in &[0.25, 0.5, 1.0, 2.0, 4.0] {
                let a = xi_laplace_exponent(q, &p).unwrap();
                assert!(rel(a, phi_closed_form(q, &p)) < 1e-9, "{q}: {a}");
            }
        }
    }

    #[test]
    fn brownian_moments() {
        let p = StableParams::brownian();
        let m1 = moments_of_death_time(1, &p).unwrap();
        assert!((m1 - (PI / 8.0).sqrt()).abs() < 1e-9);
        assert!((m1 - 0.62666).abs() < 5e-6);
        let m2 = moments_of_death_time(2, &p).unwrap();
        assert!((m2 - 0.5).abs() < 1e-9);
        // Rayleigh(1/2) moments: E ζ^k = 2^{-k/2} Γ(1 + k/2).
        for k in 1..=5 {
            let m = moments_of_death_time(k, &p).unwrap();
            assert!(rel(m, 0.5f64.powf(k as f64 / 2.0) * gamma(1.0 + k as f64 / 2.0)) < 1e-9);
        }
    }
}
