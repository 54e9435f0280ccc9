//! The fragmentation seen from its extinction: frames of `F̂` rescaled
//! around the maximum, the two-sided BES(3) limit, the Laplace targets of
//! the limiting masses, the fixed-time check of the excursion ends and the
//! iterated-logarithm diagnostic.

mod frames;
mod jeulin;
mod limit;
mod lil;

pub use frames::{
    extinction_frame, extinction_frame_from_peak, extinction_frame_from_root_change, limit_frame,
    sample_limit_frame, statistics_hml, two_sided, ExtinctionFrame, FrameStats, LimitFrame,
};
pub use jeulin::{
    jeulin_fixed_time_check, jeulin_report, sample_jeulin_functionals, JeulinPoint, JeulinReport, JeulinSample,
};
pub use limit::{
    bes3_bridge_hit_probability, laplace_target_h, laplace_target_m, sample_bes3_occupation,
    sample_bes3_passage_time, sample_limit_h, sample_limit_m,
};
pub use lil::{
    curve_quantiles, lil_normalizer, lil_regime_reached, sample_lil_excursion, sample_lil_subordinator, LilCurves,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragmentation::haas_transform;
    use crate::paths::{sample_normalized_excursion, RefinedBridge, RefinementConfig, Seed};
    use crate::stats::ks_two_sample;

    const R: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

    #[test]
    fn frame_basics() {
        let e = sample_normalized_excursion(1 << 14, Seed::new(1, 0)).unwrap();
        let f = extinction_frame(&e, 0.05, &R, 4.0).unwrap().unwrap();
        assert!(f.snapshots[0].1.is_empty());
        for w in f.snapshots.windows(2) {
            assert!(w[0].1.is_subset_of(&w[1].1));
        }
        for s in f.statistics() {
            assert!(s.h <= s.m_leb && s.m_leb <= s.l_span);
            if s.r > 0.0 {
                assert!(s.h > 0.0);
            }
        }
    }

    #[test]
    fn frame_rejected_near_the_edge() {
        let e = sample_normalized_excursion(1 << 12, Seed::new(2, 0)).unwrap();
        assert!(extinction_frame(&e, 0.5, &R, 4.0).unwrap().is_none());
    }

    #[test]
    fn root_change_gives_the_same_frame() {
        for i in 0..20 {
            let e = sample_normalized_excursion(1 << 13, Seed::new(3, i)).unwrap();
            let Some(direct) = extinction_frame(&e, 0.04, &R, 4.0).unwrap() else { continue };
            let via = extinction_frame_from_root_change(&haas_transform(&e).unwrap(), 0.04, &R, 4.0).unwrap();
            assert_eq!(direct.snapshots, via.snapshots);
        }
    }

    #[test]
    fn limit_frame_component_is_two_passage_times() {
        let f = sample_limit_frame(1e-3, &[1.0], 4.0, Seed::new(4, 0)).unwrap();
        let z = &f.z;
        let zero = z.values.iter().position(|&v| v == 0.0).unwrap();
        let right = (zero..z.len()).find(|&k| z.values[k] >= 1.0).unwrap();
        let left = (0..=zero).rev().find(|&k| z.values[k] >= 1.0).unwrap();
        let h = f.statistics()[0].h;
        assert!(h <= z.time(right) - z.time(left) && h >= z.time(right - 1) - z.time(left + 1));
    }

    #[test]
    fn refined_frame_matches_limit_in_law() {
        let cfg = RefinementConfig { coarse_cells: 1024, branching: 8, levels: 3, miss_exponent: 30.0 };
        let t = 0.05;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for i in 0..400 {
            let mut rb = RefinedBridge::new(cfg, Seed::new(5, i)).unwrap();
            let peak = rb.excursion_peak(4.0 * t * t).unwrap();
            if let Some(f) = extinction_frame_from_peak(&peak, t, &[1.0], 4.0).unwrap() {
                a.push(f.statistics()[0].h);
            }
            let dz = cfg.finest_step() / (t * t);
            b.push(sample_limit_frame(dz, &[1.0], 4.0, Seed::new(6, i)).unwrap().statistics()[0].h);
        }
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 1e-3);
    }
}
