use fragstoch_core::asymptotics::{
    curve_quantiles, extinction_frame_from_peak, jeulin_report, laplace_target_h, laplace_target_m,
    lil_regime_reached, sample_jeulin_functionals, sample_lil_excursion, sample_lil_subordinator, sample_limit_frame,
    sample_limit_h, sample_limit_m, FrameStats,
};
use fragstoch_core::fragmentation::haas_transform;
use fragstoch_core::paths::{sample_normalized_excursion, RefinedBridge, RefinementConfig};
use fragstoch_core::stats::{empirical_laplace, ks_two_sample, quantile};

use super::mean;
use crate::error::Result;
use crate::registry::{replicates, CaseContext, CaseOutcome, VerificationCase};
use crate::report::{Check, Series};

/// The root change at the maximum preserves the law of the excursion.
pub struct HaasMarginals;

impl VerificationCase for HaasMarginals {
    fn id(&self) -> &'static str {
        "haas-marginals"
    }
    fn suite(&self) -> &'static str {
        "haas"
    }
    fn statement(&self) -> &'static str {
        "the excursion re-rooted at its maximum and reflected has the law of the excursion"
    }
    fn tag(&self) -> u32 {
        7
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.haas;
        let rows = replicates(cfg.n, |i| {
            let e = sample_normalized_excursion(cfg.grid_points, ctx.seed(0, i))?;
            let h = haas_transform(&sample_normalized_excursion(cfg.grid_points, ctx.seed(1, i))?)?;
            Ok(cfg.times.iter().map(|&s| (e.value_at(s), h.value_at(s))).collect::<Vec<_>>())
        })?;
        let mut out = CaseOutcome { replicates: 2 * cfg.n as u64, ..Default::default() };
        for (j, s) in cfg.times.iter().enumerate() {
            let a: Vec<f64> = rows.iter().map(|r| r[j].0).collect();
            let b: Vec<f64> = rows.iter().map(|r| r[j].1).collect();
            out.push(format!("value at s = {s}"), ctx.ks(ks_two_sample(&a, &b)?));
        }
        Ok(out)
    }
}

/// Finite-t extinction frames against the two-sided BES(3) limit.
pub struct ExtinctionFrames;

impl VerificationCase for ExtinctionFrames {
    fn id(&self) -> &'static str {
        "thm4-extinction-frames"
    }
    fn suite(&self) -> &'static str {
        "thm4"
    }
    fn statement(&self) -> &'static str {
        "the fragment containing the last point to vanish, rescaled by t^2, matches the two-sided BES(3) limit"
    }
    fn tag(&self) -> u32 {
        9
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.frames;
        let refinement = RefinementConfig::from(cfg.refinement);
        let (t, n) = (cfg.t, cfg.window);
        let finite: Vec<Option<Vec<FrameStats>>> = replicates(cfg.n, |i| {
            let mut rb = RefinedBridge::new(refinement, ctx.seed(0, i))?;
            let peak = rb.excursion_peak(n * t * t)?;
            Ok(extinction_frame_from_peak(&peak, t, &cfg.r, n)?.map(|f| f.statistics()))
        })?;
        let finite: Vec<Vec<FrameStats>> = finite.into_iter().flatten().collect();
        let dz = refinement.finest_step() / (t * t);
        let limit = replicates(cfg.n, |i| Ok(sample_limit_frame(dz, &cfg.r, n, ctx.seed(1, i))?.statistics()))?;
        let mut out = CaseOutcome { replicates: 2 * cfg.n as u64, ..Default::default() };
        let mut rows = Vec::new();
        for (j, r) in cfg.r.iter().enumerate() {
            let pick = |fs: &[Vec<FrameStats>], g: fn(&FrameStats) -> f64| fs.iter().map(|s| g(&s[j])).collect::<Vec<f64>>();
            let (ha, hb) = (pick(&finite, |s| s.h), pick(&limit, |s| s.h));
            out.push(format!("H at r = {r}: finite t vs limit"), ctx.ks(ks_two_sample(&ha, &hb)?));
            rows.push(vec![
                *r,
                mean(&ha),
                mean(&hb),
                mean(&pick(&finite, |s| s.m_leb)),
                mean(&pick(&limit, |s| s.m_leb)),
                mean(&pick(&finite, |s| s.l_span)),
                mean(&pick(&limit, |s| s.l_span)),
            ]);
        }
        let columns = ["r", "H_finite", "H_limit", "M_leb_finite", "M_leb_limit", "L_span_finite", "L_span_limit"];
        out.series.push(Series { name: "frame-means".into(), columns: columns.map(String::from).to_vec(), rows });
        out.notes.push(format!(
            "t = {t}, window ({}, {n}), rescaled step {dz:.3e}; {} of {} frames rejected near the ends",
            -n,
            cfg.n as usize - finite.len(),
            cfg.n
        ));
        Ok(out)
    }
}

/// Laplace transforms of the limiting fragment lengths.
pub struct LaplaceLimits;

impl VerificationCase for LaplaceLimits {
    fn id(&self) -> &'static str {
        "cor5-laplace"
    }
    fn suite(&self) -> &'static str {
        "cor5"
    }
    fn statement(&self) -> &'static str {
        "limit H and M have Laplace transforms (sqrt(2q)/sinh sqrt(2q))^2 and (1/cosh sqrt(2q))^2"
    }
    fn tag(&self) -> u32 {
        10
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.limit;
        let hs = replicates(cfg.n, |i| Ok(sample_limit_h(cfg.r, cfg.step, &mut ctx.seed(0, i).rng())?))?;
        let ms = replicates(cfg.n, |i| Ok(sample_limit_m(cfg.r, cfg.step, &mut ctx.seed(1, i).rng())?))?;
        let mut out = CaseOutcome { replicates: 2 * cfg.n as u64, ..Default::default() };
        let mut rows = Vec::new();
        // Brownian scaling: the level-r variables are r² times the level-1 ones.
        let r2 = cfg.r * cfg.r;
        for &q in &cfg.q {
            let (eh, em) = (empirical_laplace(&hs, q)?, empirical_laplace(&ms, q)?);
            let (th, tm) = (laplace_target_h(q * r2), laplace_target_m(q * r2));
            out.push(format!("E exp(-{q} H)"), ctx.z(eh, th));
            out.push(format!("E exp(-{q} M)"), ctx.z(em, tm));
            rows.push(vec![q, eh.value, eh.std_error, th, em.value, em.std_error, tm]);
        }
        let columns = ["q", "H_estimate", "H_std_error", "H_target", "M_estimate", "M_std_error", "M_target"];
        out.series.push(Series { name: "laplace".into(), columns: columns.map(String::from).to_vec(), rows });
        Ok(out)
    }
}

/// Iterated-logarithm running minima; reported against a band, not gated.
pub struct LilDiagnostic;

impl VerificationCase for LilDiagnostic {
    fn id(&self) -> &'static str {
        "lil-running-minima"
    }
    fn suite(&self) -> &'static str {
        "lil"
    }
    fn statement(&self) -> &'static str {
        "running minima of g(t) L_t, g(t) = log|log t|/(2t^2), settle near 1 as t decreases"
    }
    fn tag(&self) -> u32 {
        12
    }
    fn gating(&self) -> bool {
        false
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.lil;
        let probs = [0.1, 0.5, 0.9];
        let ks: Vec<u32> = (cfg.k_min..=cfg.k_max).collect();
        let curves = replicates(cfg.n, |i| Ok(sample_lil_subordinator(cfg.k_min, cfg.k_max, ctx.seed(0, i))?))?;
        let q = curve_quantiles(&curves, &probs);
        let mut finest: Vec<f64> = curves.iter().map(|c| c[c.len() - 1]).collect();
        finest.sort_by(f64::total_cmp);
        let median = quantile(&finest, 0.5);
        let mut out = CaseOutcome { replicates: cfg.n as u64, ..Default::default() };
        out.push(
            format!("median running minimum of g(t) L_t at t = 2^-{}", cfg.k_max),
            Check::Band { value: median, low: cfg.band.0, high: cfg.band.1 },
        );
        let columns = ["k", "q10", "q50", "q90"].map(String::from).to_vec();
        let rows = ks.iter().zip(&q).map(|(&k, row)| [vec![k as f64], row.clone()].concat()).collect();
        out.series.push(Series { name: "L-subordinator".into(), columns: columns.clone(), rows });
        let t_finest = 0.5f64.powi(cfg.k_max as i32);
        out.notes.push(format!(
            "log log(1/t) >= 3 {} at the finest t",
            if lil_regime_reached(t_finest) { "holds" } else { "fails" }
        ));

        let refinement = RefinementConfig::from(cfg.refinement);
        let exc = replicates(cfg.excursion_paths, |i| {
            Ok(sample_lil_excursion(cfg.k_min, cfg.excursion_k_max, refinement, ctx.seed(1, i))?)
        })?;
        let ek: Vec<u32> = (cfg.k_min..=cfg.excursion_k_max).collect();
        for (name, get) in [
            ("H-excursion", (|c: &fragstoch_core::asymptotics::LilCurves| c.h.clone()) as fn(&_) -> Vec<f64>),
            ("M-excursion", |c| c.m.clone()),
            ("L-excursion", |c| c.l.clone()),
        ] {
            let q = curve_quantiles(&exc.iter().map(get).collect::<Vec<_>>(), &probs);
            let rows = ek.iter().zip(&q).map(|(&k, row)| [vec![k as f64], row.clone()].concat()).collect();
            out.series.push(Series { name: name.into(), columns: columns.clone(), rows });
        }
        let truncated = exc.iter().filter(|c| c.truncated).count();
        out.notes.push(format!(
            "excursion curves stop at t = 2^-{} and are not gated; {truncated} of {} reached the edge of the refined window",
            cfg.excursion_k_max, cfg.excursion_paths
        ));
        Ok(out)
    }
}

/// Both ends of a long excursion look like independent BES(3) processes.
pub struct JeulinEnds;

impl VerificationCase for JeulinEnds {
    fn id(&self) -> &'static str {
        "jeulin-fixed-time"
    }
    fn suite(&self) -> &'static str {
        "jeulin"
    }
    fn statement(&self) -> &'static str {
        "the two ends of a long Brownian excursion are asymptotically independent BES(3) processes"
    }
    fn tag(&self) -> u32 {
        13
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.jeulin;
        let refinement = RefinementConfig::from(cfg.refinement);
        let samples = replicates(cfg.n, |i| Ok(sample_jeulin_functionals(cfg.v, &cfg.s, refinement, ctx.seed(0, i))?))?;
        let report = jeulin_report(cfg.v, &cfg.s, &samples)?;
        let mut out = CaseOutcome { replicates: 2 * cfg.n as u64, ..Default::default() };
        let b = report.correlation_bound;
        for p in &report.points {
            out.push(format!("v = {}: front at s = {} vs BES(3)", cfg.v, p.s), ctx.ks(p.front));
            out.push(format!("v = {}: back at s = {} vs BES(3)", cfg.v, p.s), ctx.ks(p.back));
            out.push(format!("v = {}: correlation of the ends at s = {}", cfg.v, p.s), Check::Band { value: p.correlation, low: -b, high: b });
        }
        let s_control = cfg.s.iter().copied().filter(|&s| s < cfg.control_v).fold(0.0, f64::max);
        if s_control > 0.0 {
            // The control reads the whole bridge, so it stays one level deep.
            let coarse = RefinementConfig { levels: refinement.levels.min(1), ..refinement };
            let control =
                replicates(cfg.n, |i| Ok(sample_jeulin_functionals(cfg.control_v, &[s_control], coarse, ctx.seed(1, i))?))?;
            let r = jeulin_report(cfg.control_v, &[s_control], &control)?;
            out.push(
                format!("control v = {}: front at s = {s_control} is not BES(3)", cfg.control_v),
                Check::ks_reject(r.points[0].front, ctx.significance()),
            );
        }
        Ok(out)
    }
}
