use fragstoch_core::fragmentation::{
    bertoin_pitman, ranked_jumps, sample_obliteration, tagged_fragment, JUMP_THRESHOLD_STEPS,
};
use fragstoch_core::opensets::ranked_lengths;
use fragstoch_core::paths::sample_normalized_excursion;
use fragstoch_core::stable_pd::{sample_pd_with_residual, size_biased_pick, size_biased_pick_with_dust};
use fragstoch_core::stats::{beta_cdf, ks_one_sample, ks_two_sample};
use fragstoch_core::PdParams;
use rand::Rng;

use super::{column, mean};
use crate::error::Result;
use crate::registry::{replicates, CaseContext, CaseOutcome, VerificationCase};
use crate::report::{Check, Series};

/// Tagged-fragment jumps of the height fragmentation against PD(1/2, 1/2).
pub struct TaggedPicks;

impl VerificationCase for TaggedPicks {
    fn id(&self) -> &'static str {
        "thm1-beta-half"
    }
    fn suite(&self) -> &'static str {
        "thm1"
    }
    fn statement(&self) -> &'static str {
        "ranked jumps of the tagged fragment of a Brownian excursion are PD(1/2, 1/2)"
    }
    fn tag(&self) -> u32 {
        1
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.tagged;
        let rows = replicates(cfg.n, |i| {
            let e = sample_normalized_excursion(cfg.grid_points, ctx.seed(0, i))?;
            let mut rng = ctx.seed(1, i).rng();
            let tf = tagged_fragment(&e, rng.random())?;
            let r = ranked_jumps(&tf)?;
            Ok([size_biased_pick_with_dust(r.as_slice(), &mut rng), r.largest(), tf.unresolved])
        })?;
        let pd = PdParams::new(0.5, 0.5)?;
        let oracle = replicates(cfg.n, |i| {
            let (m, _) = sample_pd_with_residual(pd, cfg.pd_sticks, ctx.seed(2, i))?;
            let mut rng = ctx.seed(3, i).rng();
            Ok([size_biased_pick_with_dust(m.as_slice(), &mut rng), m.largest()])
        })?;
        let picks = column(&rows, 0);
        let mut out = CaseOutcome { replicates: cfg.n as u64, ..Default::default() };
        out.push("first pick vs Beta(1/2, 1)", ctx.ks(ks_one_sample(&picks, |x| beta_cdf(x, 0.5, 1.0))?));
        out.push("first pick vs PD(1/2, 1/2) sample", ctx.ks(ks_two_sample(&picks, &column(&oracle, 0))?));
        out.push("largest jump vs PD(1/2, 1/2) sample", ctx.ks(ks_two_sample(&column(&rows, 1), &column(&oracle, 1))?));
        out.notes.push(format!(
            "grid of {} points; mean unresolved share {:.5} enters the pick as dust",
            cfg.grid_points,
            mean(&column(&rows, 2))
        ));
        Ok(out)
    }
}

/// Jump intervals of the tagged fragment and excursion intervals of the
/// Bertoin–Pitman bridge, compared exactly.
pub struct Bijection;

impl VerificationCase for Bijection {
    fn id(&self) -> &'static str {
        "bijection-bertoin-pitman"
    }
    fn suite(&self) -> &'static str {
        "bijection"
    }
    fn statement(&self) -> &'static str {
        "excursion intervals of the Bertoin-Pitman bridge are exactly the jump intervals of the tagged fragment"
    }
    fn tag(&self) -> u32 {
        6
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.bijection;
        let rows = replicates(cfg.n, |i| {
            let e = sample_normalized_excursion(cfg.grid_points, ctx.seed(0, i))?;
            let u: f64 = ctx.seed(1, i).rng().random();
            let tf = tagged_fragment(&e, u)?;
            let bp = bertoin_pitman(&e, u)?;
            let thr = JUMP_THRESHOLD_STEPS * e.dt;
            let mut from_b: Vec<(f64, f64)> = bp.excursions().into_iter().filter(|&(l, r)| r - l >= thr).collect();
            let mut from_chi: Vec<(f64, f64)> = tf.jumps.iter().map(|j| j.interval).collect();
            from_b.sort_by(|a, b| a.0.total_cmp(&b.0));
            from_chi.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok([(from_b != from_chi) as u64, from_chi.len() as u64])
        })?;
        let mismatches = rows.iter().map(|r| r[0]).sum();
        let intervals: u64 = rows.iter().map(|r| r[1]).sum();
        let mut out = CaseOutcome { replicates: cfg.n as u64, ..Default::default() };
        out.push("paths with differing intervals", Check::Exact { checked: cfg.n as u64, mismatches });
        out.notes.push(format!("{intervals} intervals compared on grids of {} points", cfg.grid_points));
        Ok(out)
    }
}

/// Masses after repeated Bertoin–Pitman cuts against PD(1/2, n − 1/2).
pub struct ObliterationMasses;

impl VerificationCase for ObliterationMasses {
    fn id(&self) -> &'static str {
        "obliteration-masses"
    }
    fn suite(&self) -> &'static str {
        "obliteration"
    }
    fn statement(&self) -> &'static str {
        "after n ancestral-line cuts the first size-biased mass is Beta(1/2, n)"
    }
    fn tag(&self) -> u32 {
        11
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome> {
        let cfg = &ctx.config.obliteration;
        let rows = replicates(cfg.n, |i| {
            let e = sample_normalized_excursion(cfg.grid_points, ctx.seed(0, i))?;
            let mut rng = ctx.seed(1, i).rng();
            let states = sample_obliteration(e, cfg.cuts, &mut rng)?;
            states[1..]
                .iter()
                .map(|s| Ok(size_biased_pick(ranked_lengths(&s.v)?.as_slice(), &mut rng)))
                .collect::<Result<Vec<f64>>>()
        })?;
        let mut out = CaseOutcome { replicates: cfg.n as u64, ..Default::default() };
        let mut means = Vec::new();
        for k in 1..=cfg.cuts {
            let picks: Vec<f64> = rows.iter().map(|r| r[k as usize - 1]).collect();
            let b = k as f64;
            out.push(format!("n = {k}: first pick vs Beta(1/2, {k})"), ctx.ks(ks_one_sample(&picks, |x| beta_cdf(x, 0.5, b))?));
            means.push(vec![b, mean(&picks), 1.0 / (2.0 * b + 1.0)]);
        }
        out.series.push(Series { name: "pick-means".into(), columns: vec!["n".into(), "mean".into(), "target".into()], rows: means });
        Ok(out)
    }
}
