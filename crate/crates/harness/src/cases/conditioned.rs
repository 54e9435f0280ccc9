use std::f64::consts::PI;

use fragstoch_core::opensets::{excursion_intervals, ranked_lengths};
use fragstoch_core::paths::sample_brownian_bridge;
use fragstoch_core::quad;
use fragstoch_core::stable_pd::{
    conditioned_sampler, sample_pd, sample_pd_with_residual, size_biased_permutation, size_biased_pick_with_dust,
    stable_density, standard_density, stick_residuals, xi_laplace_exponent, ConditionedSubPath, CONDITIONED_SAMPLERS,
};
use fragstoch_core::stats::{beta_cdf, ks_one_sample, ks_two_sample, mean_estimate};
use fragstoch_core::{PdParams, StableParams};

use super::column;
use crate::error::{Error, Result};
use crate::registry::{replicates, CaseContext, CaseOutcome, VerificationCase};
use crate::report::{Check, Series};

fn rayleigh_cdf(a: f64) -> f64 {
    -(-2.0 * a * a).exp_m1()
}

fn sample_paths(ctx: &CaseContext, name: &str, role: u32, n: u32) -> Result<Vec<ConditionedSubPath>> {
    let s = conditioned_sampler(name, StableParams::brownian())?;
    replicates(n, |i| Ok(s.sample(ctx.seed(role, i))?))
}

/// Jumps of each conditioned-subordinator sampler against PD(1/2, 1/2).
pub struct ConditionedVsPd;

impl VerificationCase for ConditionedVsPd {
    fn id(&self) -> &'static str {
        "thm1-conditioned-samplers"
    }
    fn suite(&self) -> &'static str {
        "thm1"
    }
    fn statement(&self) -> &'static str {
        "ranked jumps of the h-conditioned subordinator from either sampler are PD(1/2, 1/2)"
    }
    fn tag(&self) -> u32 {
        2
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.conditioned;
        let pd = PdParams::new(0.5, 0.5)?;
        let oracle = replicates(cfg.n, |i| {
            let (m, _) = sample_pd_with_residual(pd, cfg.pd_sticks, ctx.seed(0, i))?;
            Ok([size_biased_pick_with_dust(m.as_slice(), &mut ctx.seed(1, i).rng()), m.largest()])
        })?;
        let mut out = CaseOutcome { replicates: cfg.n as u64, ..Default::default() };
        for (k, name) in CONDITIONED_SAMPLERS.iter().enumerate() {
            let role = 2 + 2 * k as u32;
            let paths = sample_paths(ctx, name, role, cfg.n)?;
            let rows = replicates(cfg.n, |i| {
                let m = paths[i as usize].ranked_jumps()?;
                Ok([size_biased_pick_with_dust(m.as_slice(), &mut ctx.seed(role + 1, i).rng()), m.largest()])
            })?;
            out.push(format!("{name}: first pick vs PD(1/2, 1/2) sample"), ctx.ks(ks_two_sample(&column(&rows, 0), &column(&oracle, 0))?));
            out.push(format!("{name}: largest jump vs PD(1/2, 1/2) sample"), ctx.ks(ks_two_sample(&column(&rows, 1), &column(&oracle, 1))?));
        }
        Ok(out)
    }
}

/// The bridge and Lamperti constructions of the conditioned subordinator
/// agree in law.
pub struct SamplerEquivalence;

impl VerificationCase for SamplerEquivalence {
    fn id(&self) -> &'static str {
        "prop2-sampler-equivalence"
    }
    fn suite(&self) -> &'static str {
        "prop2"
    }
    fn statement(&self) -> &'static str {
        "bridge and Lamperti samplers give the same death-time law, 4a exp(-2a^2), and the same fixed-time masses"
    }
    fn tag(&self) -> u32 {
        3
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.conditioned;
        let bridge = sample_paths(ctx, "bridge", 0, cfg.n)?;
        let lamperti = sample_paths(ctx, "lamperti", 1, cfg.n)?;
        let death = |ps: &[ConditionedSubPath]| ps.iter().map(|p| p.death_time).collect::<Vec<f64>>();
        let (db, dl) = (death(&bridge), death(&lamperti));
        let mut out = CaseOutcome { replicates: 2 * cfg.n as u64, ..Default::default() };
        out.push("death times: bridge vs lamperti", ctx.ks(ks_two_sample(&db, &dl)?));
        out.push("death times: bridge vs 4a exp(-2a^2)", ctx.ks(ks_one_sample(&db, rayleigh_cdf)?));
        out.push("death times: lamperti vs 4a exp(-2a^2)", ctx.ks(ks_one_sample(&dl, rayleigh_cdf)?));
        for &t in &cfg.times {
            let a: Vec<f64> = bridge.iter().map(|p| p.value_at(t)).collect();
            let b: Vec<f64> = lamperti.iter().map(|p| p.value_at(t)).collect();
            out.push(format!("mass at t = {t}: bridge vs lamperti"), ctx.ks(ks_two_sample(&a, &b)?));
        }
        Ok(out)
    }
}

/// Death-time moments through the Laplace exponent of the Lamperti
/// subordinator. `literal` checks the targets at `q = 2, 4` instead of the
/// ones matching the clock exponent `−β`.
pub struct Moments {
    pub literal: bool,
}

impl VerificationCase for Moments {
    fn id(&self) -> &'static str {
        if self.literal {
            "lemma7-moments-literal"
        } else {
            "lemma7-moments"
        }
    }
    fn suite(&self) -> &'static str {
        "lemma7"
    }
    fn statement(&self) -> &'static str {
        if self.literal {
            "phi(2) = sqrt(8/pi) and E[zeta^2] = 2/(phi(2) phi(4))"
        } else {
            "phi(1/2) = sqrt(8/pi) and E[zeta^2] = 2/(phi(1/2) phi(1)), phi the Laplace exponent of xi"
        }
    }
    fn tag(&self) -> u32 {
        if self.literal {
            5
        } else {
            4
        }
    }
    fn gating(&self) -> bool {
        !self.literal
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.moments;
        let p = StableParams::brownian();
        let q = if self.literal { 2.0 } else { 0.5 };
        let phi_q = xi_laplace_exponent(q, &p)?;
        let phi_2q = xi_laplace_exponent(2.0 * q, &p)?;
        let target = 2.0 / (phi_q * phi_2q);
        let mut out = CaseOutcome { replicates: 2 * cfg.n as u64, ..Default::default() };
        out.push(
            format!("phi({q}) by quadrature vs sqrt(8/pi)"),
            Check::Tolerance { value: phi_q, target: (8.0 / PI).sqrt(), tolerance: cfg.phi_tolerance },
        );
        for (k, name) in CONDITIONED_SAMPLERS.iter().enumerate() {
            let paths = sample_paths(ctx, name, k as u32, cfg.n)?;
            let sq: Vec<f64> = paths.iter().map(|p| p.death_time * p.death_time).collect();
            out.push(format!("{name}: E[zeta^2] vs 2/(phi({q}) phi({}))", 2.0 * q), ctx.z(mean_estimate(&sq), target));
        }
        if self.literal {
            out.notes.push(format!(
                "with the clock exponent -beta the matching targets sit at q = 1/2 and 1 (see lemma7-moments); \
                 here phi(2) = {phi_q:.6} and 2/(phi(2) phi(4)) = {target:.6}"
            ));
        }
        Ok(out)
    }
}

/// Gaps in the range of the conditioned subordinator against excursions of
/// a reflected Brownian bridge.
pub struct ZeroSet;

impl VerificationCase for ZeroSet {
    fn id(&self) -> &'static str {
        "prop3-zero-set"
    }
    fn suite(&self) -> &'static str {
        "prop3"
    }
    fn statement(&self) -> &'static str {
        "ranked gaps of the range of the conditioned subordinator match ranked excursion lengths of a reflected Brownian bridge"
    }
    fn tag(&self) -> u32 {
        8
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.zero_set;
        let paths = sample_paths(ctx, "bridge", 0, cfg.n)?;
        let gaps = replicates(cfg.n, |i| {
            let g = paths[i as usize].ranked_range_gaps()?;
            Ok([g.largest(), size_biased_pick_with_dust(g.as_slice(), &mut ctx.seed(1, i).rng())])
        })?;
        let excursions = replicates(cfg.n, |i| {
            let b = sample_brownian_bridge(cfg.grid_points, 1.0, ctx.seed(2, i))?;
            let l = ranked_lengths(&excursion_intervals(&b))?;
            Ok([l.largest(), size_biased_pick_with_dust(l.as_slice(), &mut ctx.seed(3, i).rng())])
        })?;
        let mut out = CaseOutcome { replicates: 2 * cfg.n as u64, ..Default::default() };
        out.push("largest gap vs largest excursion", ctx.ks(ks_two_sample(&column(&gaps, 0), &column(&excursions, 0))?));
        out.push("first size-biased pick", ctx.ks(ks_two_sample(&column(&gaps, 1), &column(&excursions, 1))?));
        Ok(out)
    }
}

/// `∫ g = 1` for the standard β-stable density, integrated in `log y`.
fn density_mass(beta: f64) -> Result<f64> {
    let mut bad = None;
    let mut f = |u: f64| {
        let y = u.exp();
        match standard_density(y, beta) {
            Ok(v) => v * y,
            Err(e) => {
                bad.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let lower = quad::quad(&mut f, -60.0, 0.0);
    let upper = quad::quad(&mut f, 0.0, 700.0);
    if let Some(e) = bad {
        return Err(e.into());
    }
    Ok(lower? + upper?)
}

/// Largest relative gap in `f_t(y) = f_{t·y^{−β}}(1)/y`.
fn scaling_gap(p: &StableParams) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in [0.25, 1.0, 4.0] {
        for y in [0.2, 0.7, 1.0, 3.0, 10.0] {
            let lhs = stable_density(t, y, p)?;
            let rhs = stable_density(t * y.powf(-p.beta), 1.0, p)? / y;
            worst = worst.max((lhs - rhs).abs() / lhs.abs());
        }
    }
    Ok(worst)
}

/// General β: stable densities and the PD(β, β) stick law.
pub struct GeneralBeta;

impl VerificationCase for GeneralBeta {
    fn id(&self) -> &'static str {
        "general-beta-stable-pd"
    }
    fn suite(&self) -> &'static str {
        "general-beta"
    }
    fn statement(&self) -> &'static str {
        "for beta off 1/2 the stable density is normalized and self-similar and PD(beta, beta) has Beta(1-beta, theta+k beta) sticks"
    }
    fn tag(&self) -> u32 {
        14
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.general_beta;
        let mut out = CaseOutcome { replicates: cfg.n as u64 * cfg.betas.len() as u64, ..Default::default() };
        for (k, &beta) in cfg.betas.iter().enumerate() {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::Config(format!("general_beta.betas must lie in (0, 1), got {beta}")));
            }
            let p = StableParams::stable_tree(1.0 / (1.0 - beta))?;
            out.push(
                format!("beta = {beta}: density mass"),
                Check::Tolerance { value: density_mass(beta)?, target: 1.0, tolerance: cfg.density_tolerance },
            );
            out.push(
                format!("beta = {beta}: scaling identity, relative gap"),
                Check::Tolerance { value: scaling_gap(&p)?, target: 0.0, tolerance: cfg.scaling_tolerance },
            );
            let pd = PdParams::new(beta, beta)?;
            let role = 3 * k as u32;
            let rows = replicates(cfg.n, |i| {
                let m = sample_pd(pd, cfg.pd_sticks, ctx.seed(role, i))?;
                let perm = size_biased_permutation(m.as_slice(), ctx.seed(role + 1, i))?;
                let y = stick_residuals(&perm);
                let first = size_biased_pick_with_dust(m.as_slice(), &mut ctx.seed(role + 2, i).rng());
                Ok([first, y[0], y.get(1).copied().unwrap_or(1.0)])
            })?;
            out.push(
                format!("beta = {beta}: first pick vs Beta({}, {})", 1.0 - beta, 2.0 * beta),
                ctx.ks(ks_one_sample(&column(&rows, 0), |x| beta_cdf(x, 1.0 - beta, 2.0 * beta))?),
            );
            out.push(
                format!("beta = {beta}: second residual vs Beta({}, {})", 1.0 - beta, 3.0 * beta),
                ctx.ks(ks_one_sample(&column(&rows, 2), |x| beta_cdf(x, 1.0 - beta, 3.0 * beta))?),
            );
            out.series.push(Series {
                name: format!("residuals-beta-{beta}"),
                columns: vec!["y1".into(), "y2".into()],
                rows: rows.iter().take(1000).map(|r| vec![r[1], r[2]]).collect(),
            });
        }
        Ok(out)
    }
}
