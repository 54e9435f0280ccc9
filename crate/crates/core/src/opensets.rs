//! Finite unions of disjoint open intervals: level sets of grid paths, the
//! distance-to-complement metric, restriction and ranked component lengths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::GridPath;

/// Components shorter than this are dropped.
pub const MIN_COMPONENT: f64 = 1e-15;
/// Slack allowed on the total mass of a [`RankedMasses`].
pub const MASS_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub enum Domain {
    Interval(f64, f64),
    Line,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DomainRepr {
    Interval([f64; 2]),
    Named(String),
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        match d {
            Domain::Interval(a, b) => DomainRepr::Interval([a, b]),
            Domain::Line => DomainRepr::Named("line".into()),
        }
    }
}

impl TryFrom<DomainRepr> for Domain {
    type Error = String;
    fn try_from(r: DomainRepr) -> std::result::Result<Self, String> {
        match r {
            DomainRepr::Interval([a, b]) if a <= b => Ok(Domain::Interval(a, b)),
            DomainRepr::Interval([a, b]) => Err(format!("empty domain [{a}, {b}]")),
            DomainRepr::Named(s) if s == "line" => Ok(Domain::Line),
            DomainRepr::Named(s) => Err(format!("unknown domain {s:?}")),
        }
    }
}

impl Domain {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Interval(a, b) => (a, b),
            Domain::Line => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OpenSetRepr")]
pub struct OpenSet {
    domain: Domain,
    components: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct OpenSetRepr {
    domain: Domain,
    components: Vec<(f64, f64)>,
}

impl TryFrom<OpenSetRepr> for OpenSet {
    type Error = Error;
    fn try_from(r: OpenSetRepr) -> Result<Self> {
        OpenSet::new(r.domain, r.components)
    }
}

impl OpenSet {
    /// Validates sortedness, disjointness, nonemptiness and containment.
    pub fn new(domain: Domain, components: Vec<(f64, f64)>) -> Result<Self> {
        let (a, b) = domain.bounds();
        let mut prev = a;
        for &(l, r) in &components {
            if !(l < r) || l < prev || r > b || l.is_nan() || r.is_nan() {
                return Err(Error::Domain(format!(
                    "component ({l}, {r}) breaks ordering or leaves the domain [{a}, {b}]"
                )));
            }
            prev = r;
        }
        Ok(OpenSet { domain, components })
    }

    pub fn empty(domain: Domain) -> Self {
        OpenSet { domain, components: Vec::new() }
    }

    pub(crate) fn from_parts(domain: Domain, mut components: Vec<(f64, f64)>) -> Self {
        components.retain(|&(l, r)| r - l >= MIN_COMPONENT);
        debug_assert!(OpenSet::new(domain, components.clone()).is_ok());
        OpenSet { domain, components }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn lebesgue(&self) -> f64 {
        self.components.iter().map(|(l, r)| r - l).sum()
    }

    /// Length of the smallest closed interval containing the set.
    pub fn span(&self) -> f64 {
        match (self.components.first(), self.components.last()) {
            (Some(f), Some(l)) => l.1 - f.0,
            _ => 0.0,
        }
    }

    /// Whether every component of `self` lies inside a component of `other`.
    pub fn is_subset_of(&self, other: &OpenSet) -> bool {
        self.components.iter().all(|&(l, r)| {
            let m = 0.5 * (l + r);
            matches!(component_containing(other, m), Some((a, b)) if a <= l && r <= b)
        })
    }

    /// Distance from `x` to the complement of the set within its domain.
    pub fn distance_to_complement(&self, x: f64) -> f64 {
        match component_containing(self, x) {
            Some((l, r)) => (x - l).min(r - x),
            None => 0.0,
        }
    }
}

/// Maximal open intervals where the linearly interpolated path exceeds
/// `level` strictly.
pub fn level_set(path: &GridPath, level: f64) -> OpenSet {
    let domain = Domain::Interval(path.t0, path.t_end());
    let v = &path.values;
    let mut comps = Vec::new();
    let mut start = if v[0] > level { Some(path.t0) } else { None };
    for k in 0..v.len().saturating_sub(1) {
        let a = v[k] > level;
        let b = v[k + 1] > level;
        if !a && b {
            start = Some(path.crossing(k, level));
        } else if a && !b {
            let l = start.take().expect("open component");
            comps.push((l, path.crossing(k, level)));
        }
    }
    if let Some(l) = start {
        comps.push((l, path.t_end()));
    }
    OpenSet::from_parts(domain, comps)
}

/// Intervals on which the interpolated path stays away from zero: the
/// components of `{path > 0}` together with those of `{path < 0}`.
pub fn excursion_intervals(path: &GridPath) -> OpenSet {
    let neg = GridPath { t0: path.t0, dt: path.dt, values: path.values.iter().map(|v| -v).collect() };
    let mut comps = level_set(path, 0.0).components;
    comps.extend(level_set(&neg, 0.0).components);
    comps.sort_by(|a, b| a.0.total_cmp(&b.0));
    OpenSet::from_parts(Domain::Interval(path.t0, path.t_end()), comps)
}

/// The component of `v` containing `u`, if any.
pub fn component_containing(v: &OpenSet, u: f64) -> Option<(f64, f64)> {
    let c = &v.components;
    let i = c.partition_point(|&(_, r)| r <= u);
    match c.get(i) {
        Some(&(l, r)) if l < u && u < r => Some((l, r)),
        _ => None,
    }
}

/// `sup_x |χ_{V1}(x) − χ_{V2}(x)|` with `χ_V` the distance to the complement.
pub fn hausdorff_distance(v1: &OpenSet, v2: &OpenSet) -> Result<f64> {
    match (v1.domain, v2.domain) {
        (Domain::Interval(a1, b1), Domain::Interval(a2, b2)) if a1 == a2 && b1 == b2 => {}
        (d1, d2) => {
            return Err(Error::Domain(format!("hausdorff distance needs equal bounded domains, got {d1:?} and {d2:?}")))
        }
    }
    let mut pts = Vec::with_capacity(3 * (v1.components.len() + v2.components.len()));
    for &(l, r) in v1.components.iter().chain(&v2.components) {
        pts.extend_from_slice(&[l, r, 0.5 * (l + r)]);
    }
    Ok(pts
        .iter()
        .map(|&x| (v1.distance_to_complement(x) - v2.distance_to_complement(x)).abs())
        .fold(0.0, f64::max))
}

/// Intersection with the open window `(a, b)`; the result lives on `[a, b]`.
pub fn restrict(v: &OpenSet, window: (f64, f64)) -> OpenSet {
    let (a, b) = window;
    let comps = v
        .components
        .iter()
        .filter(|&&(l, r)| r > a && l < b)
        .map(|&(l, r)| (l.max(a), r.min(b)))
        .collect();
    OpenSet::from_parts(Domain::Interval(a, b), comps)
}

/// Weight of window `(n, n+1)` in [`line_distance`].
pub fn line_weight(n: i64) -> f64 {
    0.5f64.powi(n.unsigned_abs() as i32) / 4.0
}

/// `Σ_{n=−n_max}^{n_max−1} 2^{−|n|}/4 · d(V1 ∩ (n, n+1), V2 ∩ (n, n+1))`.
pub fn line_distance(v1: &OpenSet, v2: &OpenSet, n_max: u32) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::Parameter("line distance needs n_max >= 1".into()));
    }
    let n_max = n_max as i64;
    let mut total = 0.0;
    for n in -n_max..n_max {
        let w = (n as f64, n as f64 + 1.0);
        total += line_weight(n) * hausdorff_distance(&restrict(v1, w), &restrict(v2, w))?;
    }
    Ok(total)
}

/// Bound on the part of the line distance dropped by truncating at `n_max`:
/// the omitted windows `n >= n_max` and `n < -n_max`, each at distance at
/// most 1.
pub fn line_truncation_bound(n_max: u32) -> f64 {
    3.0 * 0.5f64.powi(n_max as i32) / 4.0
}

/// Nonincreasing positive masses with total at most one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RankedMasses {
    masses: Vec<f64>,
}

impl TryFrom<Vec<f64>> for RankedMasses {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        RankedMasses::new(v)
    }
}

impl From<RankedMasses> for Vec<f64> {
    fn from(m: RankedMasses) -> Self {
        m.masses
    }
}

impl RankedMasses {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::Domain("ranked masses must be positive and finite".into()));
        }
        if masses.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Domain("ranked masses must be nonincreasing".into()));
        }
        let s: f64 = masses.iter().sum();
        if s > 1.0 + MASS_SLACK {
            return Err(Error::Domain(format!("ranked masses sum to {s} > 1")));
        }
        Ok(RankedMasses { masses })
    }

    /// Sorts, drops nonpositive entries and validates.
    pub fn from_unsorted(mut masses: Vec<f64>) -> Result<Self> {
        masses.retain(|&m| m > 0.0);
        masses.sort_by(|a, b| b.total_cmp(a));
        RankedMasses::new(masses)
    }

    pub fn empty() -> Self {
        RankedMasses { masses: Vec::new() }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn largest(&self) -> f64 {
        self.masses.first().copied().unwrap_or(0.0)
    }
}

/// Component lengths, as fractions of the domain length, sorted
/// nonincreasing.
pub fn ranked_lengths(v: &OpenSet) -> Result<RankedMasses> {
    let (a, b) = match v.domain {
        Domain::Interval(a, b) if b > a => (a, b),
        d => return Err(Error::Domain(format!("ranked lengths need a bounded nondegenerate domain, got {d:?}"))),
    };
    RankedMasses::from_unsorted(v.components.iter().map(|(l, r)| (r - l) / (b - a)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(c: Vec<(f64, f64)>) -> OpenSet {
        OpenSet::new(Domain::Interval(0.0, 1.0), c).unwrap()
    }

    #[test]
    fn excursions_of_a_sign_changing_path() {
        let p = GridPath::new(0.0, 0.25, vec![0.0, 1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(excursion_intervals(&p).components(), &[(0.0, 0.375), (0.375, 0.75)]);
    }

    #[test]
    fn tent_level_set() {
        let p = GridPath::new(0.0, 0.5, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(level_set(&p, 0.5).components(), &[(0.25, 0.75)]);
        assert!(level_set(&p, 1.0).is_empty());
        assert_eq!(level_set(&p, 0.0).components(), &[(0.0, 1.0)]);
    }

    #[test]
    fn knot_at_level_does_not_exceed() {
        let p = GridPath::new(0.0, 1.0, vec![0.0, 1.0, 0.5, 1.0, 0.0]).unwrap();
        assert_eq!(level_set(&p, 0.5).components(), &[(0.5, 2.0), (2.0, 3.5)]);
    }

    #[test]
    fn hausdorff_examples() {
        let a = unit(vec![(0.0, 1.0)]);
        let b = unit(vec![(0.0, 0.5)]);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 0.5);
        let other = OpenSet::empty(Domain::Interval(0.0, 2.0));
        assert!(hausdorff_distance(&a, &other).is_err());
    }

    #[test]
    fn lookups_and_lengths() {
        let v = unit(vec![(0.0, 0.25), (0.5, 1.0)]);
        assert_eq!(component_containing(&v, 0.6), Some((0.5, 1.0)));
        assert_eq!(component_containing(&v, 0.3), None);
        assert_eq!(component_containing(&v, 0.5), None);
        assert_eq!(component_containing(&unit(vec![(0.0, 1.0)]), 0.3), Some((0.0, 1.0)));
        assert_eq!(component_containing(&OpenSet::empty(Domain::Interval(0.0, 1.0)), 0.3), None);
        assert_eq!(ranked_lengths(&v).unwrap().as_slice(), &[0.5, 0.25]);
        assert!(ranked_lengths(&unit(vec![])).unwrap().is_empty());
        assert!(ranked_lengths(&OpenSet::empty(Domain::Line)).is_err());
    }

    #[test]
    fn restriction_examples() {
        let line = |c| OpenSet::new(Domain::Line, c).unwrap();
        assert_eq!(restrict(&line(vec![(-2.0, 2.0)]), (0.0, 1.0)).components(), &[(0.0, 1.0)]);
        assert!(restrict(&line(vec![]), (0.0, 1.0)).is_empty());
        assert_eq!(restrict(&line(vec![(-1.0, 0.5)]), (0.0, 1.0)).components(), &[(0.0, 0.5)]);
    }

    #[test]
    fn line_distance_weights() {
        let v = OpenSet::new(Domain::Line, vec![(-3.0, 0.0), (0.0, 1.0), (2.0, 5.0)]).unwrap();
        assert_eq!(line_distance(&v, &v, 4).unwrap(), 0.0);
        let w = OpenSet::new(Domain::Line, vec![(-3.0, 0.0), (0.0, 0.5), (2.0, 5.0)]).unwrap();
        assert_eq!(line_distance(&v, &w, 4).unwrap(), 0.5 / 4.0);
        assert_eq!(line_truncation_bound(4), 3.0 / 64.0);
    }

    #[test]
    fn json_round_trip() {
        let v = unit(vec![(0.0, 0.25), (0.5, 1.0)]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"domain":[0.0,1.0],"components":[[0.0,0.25],[0.5,1.0]]}"#);
        assert_eq!(serde_json::from_str::<OpenSet>(&s).unwrap(), v);
        let l: OpenSet = serde_json::from_str(r#"{"domain":"line","components":[[-1,2]]}"#).unwrap();
        assert_eq!(l.domain(), Domain::Line);
        assert!(serde_json::from_str::<OpenSet>(r#"{"domain":[0,1],"components":[[0.5,0.2]]}"#).is_err());
    }

    fn arb_path() -> impl Strategy<Value = GridPath> {
        prop::collection::vec(0.0f64..1.0, 3..40).prop_map(|mut v| {
            let n = v.len();
            v[0] = 0.0;
            v[n - 1] = 0.0;
            GridPath::new(0.0, 1.0 / (n - 1) as f64, v).unwrap()
        })
    }

    fn arb_set() -> impl Strategy<Value = OpenSet> {
        prop::collection::vec(0.0f64..1.0, 0..12).prop_map(|mut pts| {
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let comps = pts.chunks_exact(2).filter(|c| c[1] > c[0]).map(|c| (c[0], c[1])).collect();
            OpenSet::from_parts(Domain::Interval(0.0, 1.0), comps)
        })
    }

    proptest! {
        #[test]
        fn level_sets_are_antitone(p in arb_path(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
            let big = level_set(&p, lo);
            let small = level_set(&p, hi);
            prop_assert!(small.is_subset_of(&big));
        }

        #[test]
        fn lengths_sum_to_measure(p in arb_path(), t in 0.0f64..1.0) {
            let v = level_set(&p, t);
            let m = ranked_lengths(&v).unwrap();
            prop_assert!((m.total() - v.lebesgue()).abs() <= 1e-12 * v.lebesgue().max(1e-300));
        }

        #[test]
        fn hausdorff_is_a_metric(a in arb_set(), b in arb_set(), c in arb_set()) {
            let ab = hausdorff_distance(&a, &b).unwrap();
            let ba = hausdorff_distance(&b, &a).unwrap();
            let ac = hausdorff_distance(&a, &c).unwrap();
            let cb = hausdorff_distance(&c, &b).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ab >= 0.0);
            prop_assert!(ab <= ac + cb + 1e-15);
            prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
            if a != b {
                prop_assert!(ab > 0.0);
            }
        }
    }
}
