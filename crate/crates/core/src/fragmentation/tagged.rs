use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::opensets::RankedMasses;
use crate::paths::GridPath;

/// Mass drops shorter than this many grid steps are below resolution and
/// are booked as unresolved mass instead of jumps.
pub const JUMP_THRESHOLD_STEPS: f64 = 2.0;

/// One jump of the tagged mass: at `level` the component loses `interval`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragmentJump {
    pub level: f64,
    pub size: f64,
    pub interval: (f64, f64),
}

/// The mass `χ_t` of the component containing a tagged point, as a function
/// of the level `t`, up to the death level `ζ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedFragmentPath {
    pub start_mass: f64,
    pub tagged_point: f64,
    pub death_level: f64,
    /// `(level, χ_level)` with levels strictly increasing; `χ` is linear
    /// between consecutive steps apart from jumps, which happen at step levels.
    pub steps: Vec<(f64, f64)>,
    /// `χ` just below each step level, equal to the step mass unless a jump
    /// happens there.
    pub left_limits: Vec<f64>,
    /// Jumps of at least [`JUMP_THRESHOLD_STEPS`] grid steps, by level.
    pub jumps: Vec<FragmentJump>,
    /// Mass lost by continuous shrinking or by drops below the threshold.
    pub unresolved: f64,
}

impl TaggedFragmentPath {
    pub fn is_complete(&self) -> bool {
        matches!(self.steps.last(), Some(&(l, m)) if m == 0.0 && l == self.death_level)
    }

    pub fn jump_total(&self) -> f64 {
        self.jumps.iter().map(|j| j.size).sum()
    }

    /// `χ_t`, right-continuous; zero from the death level on.
    pub fn mass_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.start_mass;
        }
        if t >= self.death_level {
            return 0.0;
        }
        let i = self.steps.partition_point(|s| s.0 <= t) - 1;
        let (l0, m0) = self.steps[i];
        if l0 == t {
            return m0;
        }
        let l1 = self.steps[i + 1].0;
        m0 + (t - l0) / (l1 - l0) * (self.left_limits[i + 1] - m0)
    }
}

/// Ranked jump sizes as fractions of the start mass. The unresolved share
/// is left out, so the total is `1 − unresolved/start_mass`.
pub fn ranked_jumps(tf: &TaggedFragmentPath) -> Result<RankedMasses> {
    if !tf.is_complete() {
        return Err(Error::State("tagged fragment path does not reach its death level".into()));
    }
    if tf.jumps.is_empty() {
        return Err(Error::State("tagged fragment path has no resolved jumps".into()));
    }
    RankedMasses::from_unsorted(tf.jumps.iter().map(|j| (j.size / tf.start_mass).min(1.0)).collect())
}

/// Checks that `e` is a nonnegative path vanishing at both ends and moves a
/// tagged point sitting on a grid node by half a step toward the middle.
pub(crate) fn resolve_tag(e: &GridPath, u: f64) -> Result<f64> {
    if e.len() < 3 {
        return param("excursion path needs at least three grid points");
    }
    if e.values[0] != 0.0 || e.values[e.len() - 1] != 0.0 || e.values.iter().any(|&v| !(v >= 0.0)) {
        return param("path must be nonnegative and vanish at both ends");
    }
    if !(u > e.t0 && u < e.t_end()) {
        return param(format!("tagged point {u} outside ({}, {})", e.t0, e.t_end()));
    }
    let x = (u - e.t0) / e.dt;
    if x == x.round() {
        let mid = 0.5 * (e.t0 + e.t_end());
        return Ok(if u < mid { u + 0.5 * e.dt } else { u - 0.5 * e.dt });
    }
    Ok(u)
}

/// `(level, position before, position at)` of one boundary of the tagged
/// component, levels strictly increasing from 0 to `ζ`.
struct Ladder {
    entries: Vec<(f64, f64, f64)>,
}

impl Ladder {
    fn position(&self, t: f64) -> f64 {
        let i = self.entries.partition_point(|e| e.0 <= t) - 1;
        let (l0, _, p0) = self.entries[i];
        if l0 == t || i + 1 == self.entries.len() {
            return p0;
        }
        let (l1, q1, _) = self.entries[i + 1];
        p0 + (t - l0) / (l1 - l0) * (q1 - p0)
    }

    fn left_limit(&self, t: f64) -> f64 {
        let i = self.entries.partition_point(|e| e.0 < t);
        match self.entries.get(i) {
            Some(&(l, q, _)) if l == t => q,
            _ => self.position(t),
        }
    }
}

/// Walks outward from `u` recording the running minimum; every new minimum
/// ends a flat stretch of the boundary (a jump) and a linear stretch (a
/// slide).
fn ladder(e: &GridPath, u: f64, zeta: f64, k: usize, leftward: bool) -> Ladder {
    let n = e.len();
    let mut m = zeta;
    let mut p = u;
    let mut entries = Vec::new();
    let knots: Box<dyn Iterator<Item = usize>> = if leftward { Box::new((0..=k).rev()) } else { Box::new(k + 1..n) };
    for j in knots {
        let v = e.values[j];
        if v < m {
            let first = if leftward { j == k } else { j == k + 1 };
            let c = if first {
                u
            } else if leftward {
                e.crossing(j, m)
            } else {
                e.crossing(j - 1, m)
            };
            entries.push((m, c, p));
            m = v;
            p = e.time(j);
        }
    }
    entries.push((m, p, p));
    entries.reverse();
    Ladder { entries }
}

/// The tagged fragment: for each level `t` the length of the component of
/// `{e > t}` containing `u`.
pub fn tagged_fragment(e: &GridPath, u: f64) -> Result<TaggedFragmentPath> {
    let u = resolve_tag(e, u)?;
    let k = e.segment_index(u);
    let zeta = e.value_at(u);
    if !(zeta > 0.0) {
        return Err(Error::Domain(format!("tagged point {u} sits at height zero")));
    }
    let left = ladder(e, u, zeta, k, true);
    let right = ladder(e, u, zeta, k, false);
    let threshold = JUMP_THRESHOLD_STEPS * e.dt;

    let mut levels: Vec<f64> = left.entries.iter().chain(&right.entries).map(|x| x.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let steps: Vec<(f64, f64)> = levels
        .iter()
        .map(|&t| (t, if t == zeta { 0.0 } else { right.position(t) - left.position(t) }))
        .collect();
    let left_limits = levels
        .iter()
        .map(|&t| if t == 0.0 { e.duration() } else { right.left_limit(t) - left.left_limit(t) })
        .collect();

    let mut jumps = Vec::new();
    let mut unresolved = 0.0;
    for (side, is_left) in [(&left, true), (&right, false)] {
        for w in side.entries.windows(2) {
            let (_, _, p0) = w[0];
            let (l1, q1, p1) = w[1];
            unresolved += (q1 - p0).abs();
            let interval = if is_left { (q1, p1) } else { (p1, q1) };
            let size = interval.1 - interval.0;
            if size >= threshold {
                jumps.push(FragmentJump { level: l1, size, interval });
            } else {
                unresolved += size;
            }
        }
    }
    jumps.sort_by(|a, b| a.level.total_cmp(&b.level).then(a.interval.0.total_cmp(&b.interval.0)));
    Ok(TaggedFragmentPath {
        start_mass: e.duration(),
        tagged_point: u,
        death_level: zeta,
        steps,
        left_limits,
        jumps,
        unresolved,
    })
}

/// The Bertoin–Pitman decomposition `e = K + b` with `K` the running
/// minimum of `e` looking toward `u` from either side.
#[derive(Clone, Debug)]
pub struct BertoinPitman {
    pub u: f64,
    /// `b` at the grid knots.
    pub b: GridPath,
    /// `K` at the grid knots.
    pub k: GridPath,
    e: GridPath,
    seg: usize,
    zeta: f64,
}

impl BertoinPitman {
    /// `K(s)` of the interpolated path; `K` has kinks off the grid, so this
    /// is not the interpolation of [`BertoinPitman::k`].
    pub fn k_at(&self, s: f64) -> f64 {
        let es = self.e.value_at(s);
        let j = self.e.segment_index(s);
        let bound = if j == self.seg {
            self.zeta
        } else if j < self.seg {
            self.k.values[j + 1]
        } else {
            self.k.values[j]
        };
        es.min(bound)
    }

    pub fn b_at(&self, s: f64) -> f64 {
        self.e.value_at(s) - self.k_at(s)
    }

    /// Maximal open intervals where `b > 0`, in order.
    pub fn excursions(&self) -> Vec<(f64, f64)> {
        let e = &self.e;
        let kv = &self.k.values;
        let mut pieces: Vec<(f64, f64, bool)> = Vec::new();
        // Left of u: on segment j the bound is K at knot j+1.
        for j in 0..self.seg {
            let m = kv[j + 1];
            let (a, c) = (e.values[j], e.values[j + 1]);
            let hi_open = c > m;
            if a > m && c >= m {
                pieces.push((e.time(j), e.time(j + 1), hi_open));
            } else if a <= m && c > m {
                pieces.push((e.crossing(j, m), e.time(j + 1), hi_open));
            }
        }
        let (ek, ek1) = (e.values[self.seg], e.values[self.seg + 1]);
        if ek > self.zeta {
            pieces.push((e.time(self.seg), self.u, false));
        }
        if ek1 > self.zeta {
            pieces.push((self.u, e.time(self.seg + 1), ek1 > kv[self.seg + 1]));
        }
        for j in self.seg + 2..e.len() {
            let m = kv[j - 1];
            let (a, c) = (e.values[j - 1], e.values[j]);
            let hi_open = c > kv[j];
            if a >= m && c > m {
                pieces.push((e.time(j - 1), e.time(j), hi_open));
            } else if a > m && c <= m {
                pieces.push((e.time(j - 1), e.crossing(j - 1, m), false));
            }
        }
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut joins = false;
        for (l, r, open_right) in pieces {
            match out.last_mut() {
                Some(last) if joins && last.1 == l => last.1 = r,
                _ => out.push((l, r)),
            }
            joins = open_right;
        }
        out.retain(|&(l, r)| r > l);
        out
    }
}

/// `K(s) = min e` over `[s, u]` or `[u, s]`, and `b = e − K`.
pub fn bertoin_pitman(e: &GridPath, u: f64) -> Result<BertoinPitman> {
    let u = resolve_tag(e, u)?;
    let seg = e.segment_index(u);
    let zeta = e.value_at(u);
    let n = e.len();
    let mut kv = vec![0.0; n];
    let mut m = zeta;
    for j in (0..=seg).rev() {
        m = m.min(e.values[j]);
        kv[j] = m;
    }
    m = zeta;
    for j in seg + 1..n {
        m = m.min(e.values[j]);
        kv[j] = m;
    }
    let bv = e.values.iter().zip(&kv).map(|(x, k)| x - k).collect();
    Ok(BertoinPitman {
        u,
        b: GridPath::new(e.t0, e.dt, bv)?,
        k: GridPath::new(e.t0, e.dt, kv)?,
        e: e.clone(),
        seg,
        zeta,
    })
}
