use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::tagged::resolve_tag;
use crate::error::{param, Error, Result};
use crate::opensets::{component_containing, level_set, OpenSet};
use crate::paths::{GridPath, Rng64};

/// Attempts at drawing a uniform point inside the current positivity set
/// before giving up.
const MAX_TAG_ATTEMPTS: usize = 1_000_000;

/// The coding function `bⁿ` after `n` cuts and its positivity set `Vₙ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObliterationState {
    pub b: GridPath,
    pub v: OpenSet,
    pub n: u32,
}

impl ObliterationState {
    pub fn new(e: GridPath) -> Result<Self> {
        resolve_tag(&e, 0.5 * (e.t0 + e.t_end()) + 0.25 * e.dt)?;
        let v = level_set(&e, 0.0);
        Ok(ObliterationState { b: e, v, n: 0 })
    }
}

/// Subtracts from `b` the two-sided running minimum toward `u` inside the
/// component of `V` containing `u`; outside that component nothing changes.
pub fn obliterate(state: &ObliterationState, u: f64) -> Result<ObliterationState> {
    let b = &state.b;
    if !(u > b.t0 && u < b.t_end()) {
        return param(format!("cut point {u} outside ({}, {})", b.t0, b.t_end()));
    }
    let u = resolve_tag(b, u)?;
    let (l, r) = component_containing(&state.v, u)
        .ok_or_else(|| Error::Domain(format!("cut point {u} is not in the positivity set")))?;
    let k = b.segment_index(u);
    let z = b.value_at(u);
    let mut out = b.values.clone();
    let mut m = z;
    for j in (0..=k).rev().take_while(|&j| b.time(j) > l) {
        m = m.min(b.values[j]);
        out[j] -= m;
    }
    m = z;
    for j in (k + 1..b.len()).take_while(|&j| b.time(j) < r) {
        m = m.min(b.values[j]);
        out[j] -= m;
    }
    let nb = GridPath::new(b.t0, b.dt, out)?;
    let v = level_set(&nb, 0.0);
    Ok(ObliterationState { b: nb, v, n: state.n + 1 })
}

fn uniform_tag(state: &ObliterationState, rng: &mut Rng64) -> Result<f64> {
    let (a, w) = (state.b.t0, state.b.duration());
    for _ in 0..MAX_TAG_ATTEMPTS {
        let u = a + w * rng.random::<f64>();
        if component_containing(&state.v, u).is_some() {
            return Ok(u);
        }
    }
    Err(Error::State(format!("no cut point found in V after {} cuts", state.n)))
}

/// `n_cuts` successive obliterations at uniform points, each redrawn until
/// it falls in the current positivity set. Returns all states, `V₀` first.
pub fn sample_obliteration(e: GridPath, n_cuts: u32, rng: &mut Rng64) -> Result<Vec<ObliterationState>> {
    let mut states = vec![ObliterationState::new(e)?];
    for _ in 0..n_cuts {
        let last = states.last().expect("nonempty");
        let u = uniform_tag(last, rng)?;
        states.push(obliterate(last, u)?);
    }
    Ok(states)
}

/// Number of arrivals by time `t` of a unit-rate Poisson process.
pub fn poisson_clock_cuts(t: f64, rng: &mut Rng64) -> u32 {
    let mut n = 0;
    let mut clock: f64 = rng.sample(Exp1);
    while clock <= t {
        n += 1;
        clock += rng.sample::<f64, _>(Exp1);
    }
    n
}

/// `V_{N_t}` for a unit-rate Poisson clock `N`.
pub fn sample_obliteration_at_time(e: GridPath, t: f64, rng: &mut Rng64) -> Result<ObliterationState> {
    if !(t >= 0.0) {
        return param(format!("time must be nonnegative, got {t}"));
    }
    let n = poisson_clock_cuts(t, rng);
    let mut states = sample_obliteration(e, n, rng)?;
    Ok(states.pop().expect("nonempty"))
}
