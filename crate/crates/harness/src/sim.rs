//! Named sampling targets for `fragstoch simulate`.

use std::io::Write;

use fragstoch_core::asymptotics::{
    extinction_frame_from_peak, sample_limit_frame, sample_limit_h, sample_limit_m, sample_lil_subordinator,
    FrameStats,
};
use fragstoch_core::fragmentation::{height_fragmentation, ranked_jumps, sample_obliteration, tagged_fragment};
use fragstoch_core::opensets::ranked_lengths;
use fragstoch_core::paths::{sample_normalized_excursion, RefinedBridge, RefinementConfig};
use fragstoch_core::stable_pd::{
    conditioned_sampler, sample_pd_with_residual, size_biased_pick, size_biased_pick_with_dust,
};
use fragstoch_core::{PdParams, Seed, StableParams};
use rand::Rng;
use serde_json::json;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::registry::replicates;

pub enum SimOutput {
    Csv { columns: Vec<String>, rows: Vec<Vec<f64>> },
    Json(serde_json::Value),
}

impl SimOutput {
    fn csv(columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        SimOutput::Csv { columns: columns.iter().map(|c| c.to_string()).collect(), rows }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            SimOutput::Csv { .. } => "csv",
            SimOutput::Json(_) => "json",
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        match self {
            SimOutput::Csv { columns, rows } => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(columns)?;
                for r in rows {
                    out.write_record(r.iter().map(|v| v.to_string()))?;
                }
                out.flush()?;
            }
            SimOutput::Json(v) => {
                serde_json::to_writer_pretty(&mut w, v)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

pub trait SimTarget: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// What `--n` counts when given, and its value otherwise.
    fn default_n(&self, cfg: &Config) -> usize;
    fn run(&self, n: usize, seed: u64, cfg: &Config) -> Result<SimOutput>;
}

/// Stream tag of `simulate` seeds, apart from those of verification cases.
const SIM_TAG: u32 = 1 << 20;

fn seed(master: u64, role: u32, i: u32) -> Seed {
    Seed::replicate(master, SIM_TAG + role, i)
}

fn count(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Config(format!("--n {n} is too large")))
}

struct Excursion;

impl SimTarget for Excursion {
    fn name(&self) -> &'static str {
        "excursion"
    }
    fn description(&self) -> &'static str {
        "one normalized Brownian excursion; --n grid points; CSV t,e"
    }
    fn default_n(&self, cfg: &Config) -> usize {
        cfg.simulate.grid_points
    }
    fn run(&self, n: usize, master: u64, _: &Config) -> Result<SimOutput> {
        let e = sample_normalized_excursion(n, seed(master, 0, 0))?;
        Ok(SimOutput::csv(&["t", "e"], (0..e.len()).map(|k| vec![e.time(k), e.values[k]]).collect()))
    }
}

struct TaggedFragment;

impl SimTarget for TaggedFragment {
    fn name(&self) -> &'static str {
        "tagged-fragment"
    }
    fn description(&self) -> &'static str {
        "tagged fragment of one excursion at a uniform point; --n grid points; JSON"
    }
    fn default_n(&self, cfg: &Config) -> usize {
        cfg.simulate.grid_points
    }
    fn run(&self, n: usize, master: u64, _: &Config) -> Result<SimOutput> {
        let e = sample_normalized_excursion(n, seed(master, 0, 0))?;
        let u: f64 = seed(master, 1, 0).rng().random();
        Ok(SimOutput::Json(serde_json::to_value(tagged_fragment(&e, u)?)?))
    }
}

struct HeightFragmentation;

impl SimTarget for HeightFragmentation {
    fn name(&self) -> &'static str {
        "height-fragmentation"
    }
    fn description(&self) -> &'static str {
        "open sets {e > level} of one excursion at evenly spaced levels; --n grid points; JSON"
    }
    fn default_n(&self, cfg: &Config) -> usize {
        cfg.simulate.grid_points
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let e = sample_normalized_excursion(n, seed(master, 0, 0))?;
        let k = cfg.simulate.levels.max(1);
        let levels: Vec<f64> = (0..k).map(|j| e.max() * j as f64 / k as f64).collect();
        let sets: Vec<_> = levels.iter().map(|&l| height_fragmentation(&e, l)).collect();
        Ok(SimOutput::Json(json!({ "levels": levels, "sets": sets })))
    }
}

struct TaggedPicks;

impl SimTarget for TaggedPicks {
    fn name(&self) -> &'static str {
        "tagged-picks"
    }
    fn description(&self) -> &'static str {
        "first size-biased pick and largest of ranked tagged-fragment jumps; --n replicates; CSV"
    }
    fn default_n(&self, _: &Config) -> usize {
        1000
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let grid = cfg.tagged.grid_points;
        let rows = replicates(count(n)?, |i| {
            let e = sample_normalized_excursion(grid, seed(master, 0, i))?;
            let mut rng = seed(master, 1, i).rng();
            let tf = tagged_fragment(&e, rng.random())?;
            let r = ranked_jumps(&tf)?;
            Ok(vec![size_biased_pick_with_dust(r.as_slice(), &mut rng), r.largest(), tf.unresolved])
        })?;
        Ok(SimOutput::csv(&["first_pick", "largest", "unresolved"], rows))
    }
}

struct Conditioned(&'static str, &'static str);

impl SimTarget for Conditioned {
    fn name(&self) -> &'static str {
        self.0
    }
    fn description(&self) -> &'static str {
        self.1
    }
    fn default_n(&self, _: &Config) -> usize {
        1
    }
    fn run(&self, n: usize, master: u64, _: &Config) -> Result<SimOutput> {
        let s = conditioned_sampler(self.0.trim_start_matches("conditioned-"), StableParams::brownian())?;
        let paths = replicates(count(n)?, |i| Ok(s.sample(seed(master, 0, i))?))?;
        Ok(SimOutput::Json(serde_json::to_value(paths)?))
    }
}

struct Pd;

impl SimTarget for Pd {
    fn name(&self) -> &'static str {
        "pd"
    }
    fn description(&self) -> &'static str {
        "PD(beta, theta) by stick-breaking, simulate.pd_beta/pd_theta; --n replicates; CSV"
    }
    fn default_n(&self, _: &Config) -> usize {
        1000
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let pd = PdParams::new(cfg.simulate.pd_beta, cfg.simulate.pd_theta)?;
        let rows = replicates(count(n)?, |i| {
            let (m, rest) = sample_pd_with_residual(pd, cfg.tagged.pd_sticks, seed(master, 0, i))?;
            Ok(vec![size_biased_pick_with_dust(m.as_slice(), &mut seed(master, 1, i).rng()), m.largest(), rest])
        })?;
        Ok(SimOutput::csv(&["first_pick", "largest", "residual"], rows))
    }
}

fn frame_rows(stats: Vec<Option<Vec<FrameStats>>>) -> Vec<Vec<f64>> {
    stats
        .into_iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|s| (i, s)))
        .flat_map(|(i, s)| s.into_iter().map(move |f| vec![i as f64, f.r, f.h, f.m_leb, f.l_span]))
        .collect()
}

const FRAME_COLUMNS: [&str; 5] = ["replicate", "r", "H", "M_leb", "L_span"];

struct ExtinctionFrame;

impl SimTarget for ExtinctionFrame {
    fn name(&self) -> &'static str {
        "extinction-frame"
    }
    fn description(&self) -> &'static str {
        "per-frame statistics of the extinction-centered fragmentation (frames.*); --n replicates; CSV"
    }
    fn default_n(&self, _: &Config) -> usize {
        100
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let f = &cfg.frames;
        let refinement = RefinementConfig::from(f.refinement);
        let stats = replicates(count(n)?, |i| {
            let peak = RefinedBridge::new(refinement, seed(master, 0, i))?.excursion_peak(f.window * f.t * f.t)?;
            Ok(extinction_frame_from_peak(&peak, f.t, &f.r, f.window)?.map(|fr| fr.statistics()))
        })?;
        Ok(SimOutput::csv(&FRAME_COLUMNS, frame_rows(stats)))
    }
}

struct LimitFrame;

impl SimTarget for LimitFrame {
    fn name(&self) -> &'static str {
        "limit-frame"
    }
    fn description(&self) -> &'static str {
        "per-frame statistics of the two-sided BES(3) limit on the frames.* grid; --n replicates; CSV"
    }
    fn default_n(&self, _: &Config) -> usize {
        100
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let f = &cfg.frames;
        let dz = RefinementConfig::from(f.refinement).finest_step() / (f.t * f.t);
        let stats =
            replicates(count(n)?, |i| Ok(Some(sample_limit_frame(dz, &f.r, f.window, seed(master, 0, i))?.statistics())))?;
        Ok(SimOutput::csv(&FRAME_COLUMNS, frame_rows(stats)))
    }
}

struct LimitLengths;

impl SimTarget for LimitLengths {
    fn name(&self) -> &'static str {
        "limit-hm"
    }
    fn description(&self) -> &'static str {
        "limit component length H and mass M at level limit.r; --n replicates; CSV"
    }
    fn default_n(&self, _: &Config) -> usize {
        1000
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let l = &cfg.limit;
        let rows = replicates(count(n)?, |i| {
            let mut rng = seed(master, 0, i).rng();
            Ok(vec![sample_limit_h(l.r, l.step, &mut rng)?, sample_limit_m(l.r, l.step, &mut rng)?])
        })?;
        Ok(SimOutput::csv(&["H", "M"], rows))
    }
}

struct Obliteration;

impl SimTarget for Obliteration {
    fn name(&self) -> &'static str {
        "obliteration"
    }
    fn description(&self) -> &'static str {
        "first size-biased mass after each of obliteration.cuts cuts; --n replicates; CSV"
    }
    fn default_n(&self, _: &Config) -> usize {
        1000
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let o = &cfg.obliteration;
        let per = replicates(count(n)?, |i| {
            let e = sample_normalized_excursion(o.grid_points, seed(master, 0, i))?;
            let mut rng = seed(master, 1, i).rng();
            let states = sample_obliteration(e, o.cuts, &mut rng)?;
            states[1..]
                .iter()
                .enumerate()
                .map(|(k, s)| Ok(vec![i as f64, (k + 1) as f64, size_biased_pick(ranked_lengths(&s.v)?.as_slice(), &mut rng)]))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(SimOutput::csv(&["replicate", "cuts", "first_pick"], per.into_iter().flatten().collect()))
    }
}

struct Lil;

impl SimTarget for Lil {
    fn name(&self) -> &'static str {
        "lil"
    }
    fn description(&self) -> &'static str {
        "running minima of g(t) L_t over t = 2^-k for the limiting subordinator (lil.*); --n replicates; CSV"
    }
    fn default_n(&self, _: &Config) -> usize {
        20
    }
    fn run(&self, n: usize, master: u64, cfg: &Config) -> Result<SimOutput> {
        let l = &cfg.lil;
        let curves = replicates(count(n)?, |i| Ok(sample_lil_subordinator(l.k_min, l.k_max, seed(master, 0, i))?))?;
        let rows = curves
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().enumerate().map(move |(j, &v)| vec![i as f64, (l.k_min as usize + j) as f64, v]))
            .collect();
        Ok(SimOutput::csv(&["replicate", "k", "running_min"], rows))
    }
}

pub fn targets() -> Vec<Box<dyn SimTarget>> {
    vec![
        Box::new(Excursion),
        Box::new(HeightFragmentation),
        Box::new(TaggedFragment),
        Box::new(TaggedPicks),
        Box::new(Conditioned("conditioned-bridge", "h-conditioned subordinator paths, bridge method; --n paths; JSON")),
        Box::new(Conditioned("conditioned-lamperti", "h-conditioned subordinator paths, Lamperti method; --n paths; JSON")),
        Box::new(Pd),
        Box::new(Obliteration),
        Box::new(ExtinctionFrame),
        Box::new(LimitFrame),
        Box::new(LimitLengths),
        Box::new(Lil),
    ]
}

pub fn target(name: &str) -> Result<Box<dyn SimTarget>> {
    let all = targets();
    let known = all.iter().map(|t| t.name()).collect::<Vec<_>>().join(", ");
    all.into_iter()
        .find(|t| t.name() == name)
        .ok_or(Error::Unknown { kind: "simulation target", name: name.into(), known })
}
