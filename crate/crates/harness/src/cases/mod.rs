//! The registered verification cases, grouped by the object they sample.

mod conditioned;
mod extinction;
mod fragment;

use crate::error::Result;
use crate::registry::Registry;

pub use conditioned::{ConditionedVsPd, GeneralBeta, Moments, SamplerEquivalence, ZeroSet};
pub use extinction::{ExtinctionFrames, HaasMarginals, JeulinEnds, LaplaceLimits, LilDiagnostic};
pub use fragment::{Bijection, ObliterationMasses, TaggedPicks};

/// Every case, in report order.
pub fn default_registry() -> Result<Registry> {
    let mut r = Registry::new();
    r.register(Box::new(TaggedPicks))?;
    r.register(Box::new(ConditionedVsPd))?;
    r.register(Box::new(SamplerEquivalence))?;
    r.register(Box::new(Moments { literal: false }))?;
    r.register(Box::new(Moments { literal: true }))?;
    r.register(Box::new(Bijection))?;
    r.register(Box::new(HaasMarginals))?;
    r.register(Box::new(ZeroSet))?;
    r.register(Box::new(ExtinctionFrames))?;
    r.register(Box::new(LaplaceLimits))?;
    r.register(Box::new(ObliterationMasses))?;
    r.register(Box::new(LilDiagnostic))?;
    r.register(Box::new(JeulinEnds))?;
    r.register(Box::new(GeneralBeta))?;
    Ok(r)
}

/// Column `j` of fixed-width rows.
fn column<const N: usize>(rows: &[[f64; N]], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_well_formed() {
        let r = default_registry().unwrap();
        assert_eq!(r.cases().count(), 14);
        assert_eq!(r.select("thm1").unwrap().len(), 2);
        assert!(r.select("thm1").unwrap().iter().all(|c| c.suite() == "thm1"));
        assert_eq!(r.select("lemma7-moments-literal").unwrap().len(), 1);
        let non_gating: Vec<&str> = r.cases().filter(|c| !c.gating()).map(|c| c.id()).collect();
        assert_eq!(non_gating, ["lemma7-moments-literal", "lil-running-minima"]);
    }
}
