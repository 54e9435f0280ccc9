use fragstoch_core::asymptotics::{laplace_target_h, laplace_target_m};
use fragstoch_core::fragmentation::{bertoin_pitman, height_fragmentation, ranked_jumps, tagged_fragment, JUMP_THRESHOLD_STEPS};
use fragstoch_core::opensets::{component_containing, ranked_lengths};
use fragstoch_core::paths::sample_normalized_excursion;
use fragstoch_core::stable_pd::{conditioned_sampler, ConditionedSubPath, CONDITIONED_SAMPLERS};
use fragstoch_core::fragmentation::TaggedFragmentPath;
use fragstoch_core::{Domain, OpenSet, Seed, StableParams};
use proptest::prelude::*;

#[test]
fn open_sets_round_trip_through_json() {
    for v in [
        OpenSet::new(Domain::Interval(0.0, 1.0), vec![(0.1, 0.2), (0.5, 0.75)]).unwrap(),
        OpenSet::new(Domain::Line, vec![(-3.0, -1.0), (0.25, 8.0)]).unwrap(),
        OpenSet::empty(Domain::Interval(0.0, 1.0)),
    ] {
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<OpenSet>(&text).unwrap(), v);
    }
}

#[test]
fn open_set_json_is_validated() {
    assert!(serde_json::from_str::<OpenSet>(r#"{"domain":[0,1],"components":[[0.5,0.2]]}"#).is_err());
    assert!(serde_json::from_str::<OpenSet>(r#"{"domain":[0,1],"components":[[0.1,0.5],[0.4,0.6]]}"#).is_err());
    assert!(serde_json::from_str::<OpenSet>(r#"{"domain":"plane","components":[]}"#).is_err());
}

#[test]
fn tagged_fragment_round_trips_through_json() {
    let e = sample_normalized_excursion(2049, Seed::replicate(5, 1, 0)).unwrap();
    let tf = tagged_fragment(&e, 0.37).unwrap();
    let back: TaggedFragmentPath = serde_json::from_str(&serde_json::to_string(&tf).unwrap()).unwrap();
    assert_eq!(back, tf);
    for l in [0.0, 0.1, 0.5 * tf.death_level, tf.death_level] {
        assert_eq!(back.mass_at(l), tf.mass_at(l));
    }
}

#[test]
fn conditioned_paths_round_trip_through_json() {
    for name in CONDITIONED_SAMPLERS {
        let s = conditioned_sampler(name, StableParams::brownian()).unwrap();
        let p = s.sample(Seed::replicate(9, 2, 0)).unwrap();
        let back: ConditionedSubPath = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p, "{name}");
        let t = 0.5 * p.death_time;
        assert_eq!(back.value_at(t), p.value_at(t), "{name}");
        assert!(p.value_at(t) < p.start, "{name}");
    }
}

#[test]
fn limit_laplace_values_at_q_one() {
    // Independent evaluation through exponentials.
    let x = 2f64.sqrt();
    let sinh = (x.exp() - (-x).exp()) / 2.0;
    let cosh = (x.exp() + (-x).exp()) / 2.0;
    let h = (x / sinh).powi(2);
    let m = (1.0 / cosh).powi(2);
    assert!((h - 0.53412).abs() < 5e-6 && (m - 0.21077).abs() < 5e-6);
    assert!((laplace_target_h(1.0) - h).abs() < 1e-14);
    assert!((laplace_target_m(1.0) - m).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn height_fragmentation_shrinks(seed in any::<u64>(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let e = sample_normalized_excursion(1025, Seed::replicate(seed, 0, 0)).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let upper = height_fragmentation(&e, hi * e.max());
        let lower = height_fragmentation(&e, lo * e.max());
        prop_assert!(upper.is_subset_of(&lower));
        prop_assert!(upper.lebesgue() <= lower.lebesgue() + 1e-12);
    }

    #[test]
    fn tagged_mass_matches_the_containing_component(seed in any::<u64>(), u in 0.01f64..0.99, frac in 0.0f64..0.95) {
        let e = sample_normalized_excursion(1025, Seed::replicate(seed, 0, 0)).unwrap();
        let tf = tagged_fragment(&e, u).unwrap();
        prop_assert!(tf.is_complete());
        prop_assert!(tf.steps.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
        let level = frac * tf.death_level;
        let v = height_fragmentation(&e, level);
        if let Some((l, r)) = component_containing(&v, u) {
            prop_assert!((tf.mass_at(level) - (r - l)).abs() < 1e-9);
        }
    }

    #[test]
    fn jumps_and_unresolved_account_for_the_mass(seed in any::<u64>(), u in 0.01f64..0.99) {
        let e = sample_normalized_excursion(2049, Seed::replicate(seed, 0, 0)).unwrap();
        let tf = tagged_fragment(&e, u).unwrap();
        if let Ok(r) = ranked_jumps(&tf) {
            prop_assert!((r.total() + tf.unresolved / tf.start_mass - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bertoin_pitman_excursions_are_the_jumps(seed in any::<u64>(), u in 0.01f64..0.99) {
        let e = sample_normalized_excursion(2049, Seed::replicate(seed, 0, 0)).unwrap();
        let tf = tagged_fragment(&e, u).unwrap();
        let bp = bertoin_pitman(&e, u).unwrap();
        let thr = JUMP_THRESHOLD_STEPS * e.dt;
        let mut from_b: Vec<(f64, f64)> = bp.excursions().into_iter().filter(|&(l, r)| r - l >= thr).collect();
        let mut from_chi: Vec<(f64, f64)> = tf.jumps.iter().map(|j| j.interval).collect();
        from_b.sort_by(|a, b| a.0.total_cmp(&b.0));
        from_chi.sort_by(|a, b| a.0.total_cmp(&b.0));
        prop_assert_eq!(from_b, from_chi);
    }

    #[test]
    fn ranked_lengths_sum_to_lebesgue(seed in any::<u64>(), frac in 0.0f64..0.9) {
        let e = sample_normalized_excursion(1025, Seed::replicate(seed, 0, 0)).unwrap();
        let v = height_fragmentation(&e, frac * e.max());
        let r = ranked_lengths(&v).unwrap();
        prop_assert!((r.total() - v.lebesgue()).abs() < 1e-12);
        prop_assert!(r.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }
}
