//! The Brownian height fragmentation `t ↦ {s : e_s > t}`, its tagged
//! fragment and three path transformations: Bertoin–Pitman, the Haas
//! root change and ancestral-line obliteration.

mod obliteration;
mod tagged;

pub use obliteration::{
    obliterate, poisson_clock_cuts, sample_obliteration, sample_obliteration_at_time, ObliterationState,
};
pub use tagged::{
    bertoin_pitman, ranked_jumps, tagged_fragment, BertoinPitman, FragmentJump, TaggedFragmentPath,
    JUMP_THRESHOLD_STEPS,
};

use std::f64::consts::PI;

use crate::error::{param, Result};
use crate::opensets::{level_set, OpenSet};
use crate::paths::GridPath;

/// `F_t = {s : e_s > t}`.
pub fn height_fragmentation(e: &GridPath, t: f64) -> OpenSet {
    level_set(e, t)
}

/// Re-roots an excursion at its maximum: `s ↦ M − e_{(S+s) mod 1}` with `S`
/// the first grid argmax.
pub fn haas_transform(e: &GridPath) -> Result<GridPath> {
    let n = e.len();
    if n < 3 || e.values[0] != e.values[n - 1] {
        return param("root change needs a path with equal end values and at least three points");
    }
    let period = n - 1;
    let s = e.argmax() % period;
    let top = e.values[s];
    let mut out = Vec::with_capacity(n);
    out.extend((0..period).map(|k| top - e.values[(s + k) % period]));
    out.push(out[0]);
    GridPath::new(e.t0, e.dt, out)
}

/// Density of the largest mass under the binary dislocation measure of the
/// Brownian fragmentation, `2/√(2π x³(1−x)³)` on `[1/2, 1)`.
pub fn eval_binary_dislocation_density(x: f64) -> f64 {
    if !(0.5..1.0).contains(&x) {
        return 0.0;
    }
    2.0 / (2.0 * PI * (x * (1.0 - x)).powi(3)).sqrt()
}
