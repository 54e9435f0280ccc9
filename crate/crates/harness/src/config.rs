//! Run settings. Every field has a default; a TOML file given with
//! `--config` overrides any subset of them, section by section:
//!
//! ```toml
//! [verify]
//! significance = 1e-3
//!
//! [tagged]
//! n = 2000
//! grid_points = 16385
//! ```
//!
//! `fragstoch config` prints the full default file.

use std::path::Path;

use fragstoch_core::paths::RefinementConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub verify: VerifyConfig,
    pub tagged: TaggedConfig,
    pub bijection: BijectionConfig,
    pub obliteration: ObliterationConfig,
    pub conditioned: ConditionedConfig,
    pub moments: MomentsConfig,
    pub zero_set: ZeroSetConfig,
    pub haas: HaasConfig,
    pub frames: FramesConfig,
    pub limit: LimitConfig,
    pub jeulin: JeulinConfig,
    pub lil: LilConfig,
    pub general_beta: GeneralBetaConfig,
    pub simulate: SimulateConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.verify.significance;
        if !(a > 0.0 && a <= 0.1) {
            return Err(Error::Config(format!("significance must lie in (0, 0.1], got {a}")));
        }
        if !(self.verify.max_abs_z > 0.0) {
            return Err(Error::Config("max_abs_z must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Level of each KS test, already Bonferroni-adjusted within its suite.
    pub significance: f64,
    /// Band for z-score checks, in standard errors.
    pub max_abs_z: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { significance: 1e-3, max_abs_z: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggedConfig {
    pub n: u32,
    pub grid_points: usize,
    /// Sticks drawn for the PD(1/2, 1/2) comparison sample.
    pub pd_sticks: usize,
}

impl Default for TaggedConfig {
    fn default() -> Self {
        TaggedConfig { n: 10_000, grid_points: (1 << 16) + 1, pd_sticks: 4000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BijectionConfig {
    pub n: u32,
    pub grid_points: usize,
}

impl Default for BijectionConfig {
    fn default() -> Self {
        BijectionConfig { n: 1000, grid_points: (1 << 14) + 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObliterationConfig {
    pub n: u32,
    pub grid_points: usize,
    pub cuts: u32,
}

impl Default for ObliterationConfig {
    fn default() -> Self {
        ObliterationConfig { n: 10_000, grid_points: (1 << 16) + 1, cuts: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionedConfig {
    pub n: u32,
    /// Times at which the two samplers' marginal masses are compared.
    pub times: Vec<f64>,
    pub pd_sticks: usize,
}

impl Default for ConditionedConfig {
    fn default() -> Self {
        ConditionedConfig { n: 10_000, times: vec![0.1, 0.3, 0.6], pd_sticks: 4000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsConfig {
    pub n: u32,
    pub phi_tolerance: f64,
}

impl Default for MomentsConfig {
    fn default() -> Self {
        MomentsConfig { n: 10_000, phi_tolerance: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZeroSetConfig {
    pub n: u32,
    pub grid_points: usize,
}

impl Default for ZeroSetConfig {
    fn default() -> Self {
        ZeroSetConfig { n: 10_000, grid_points: (1 << 16) + 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HaasConfig {
    pub n: u32,
    pub grid_points: usize,
    pub times: Vec<f64>,
}

impl Default for HaasConfig {
    fn default() -> Self {
        HaasConfig { n: 100_000, grid_points: 1025, times: vec![0.25, 0.5, 0.75] }
    }
}

/// Settings of the locally refined bridge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Refinement {
    pub coarse_cells: usize,
    pub branching: usize,
    pub levels: usize,
    pub miss_exponent: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        let d = RefinementConfig::default();
        Refinement { coarse_cells: d.coarse_cells, branching: d.branching, levels: d.levels, miss_exponent: d.miss_exponent }
    }
}

impl From<Refinement> for RefinementConfig {
    fn from(r: Refinement) -> Self {
        RefinementConfig { coarse_cells: r.coarse_cells, branching: r.branching, levels: r.levels, miss_exponent: r.miss_exponent }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FramesConfig {
    pub n: u32,
    pub t: f64,
    pub r: Vec<f64>,
    pub window: f64,
    pub refinement: Refinement,
}

impl Default for FramesConfig {
    fn default() -> Self {
        FramesConfig {
            n: 10_000,
            t: 0.01,
            r: vec![0.5, 1.0, 2.0],
            window: 4.0,
            refinement: Refinement { levels: 4, ..Refinement::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitConfig {
    pub n: u32,
    pub r: f64,
    /// Time step of the BES(3) walks.
    pub step: f64,
    pub q: Vec<f64>,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig { n: 50_000, r: 1.0, step: 1e-3, q: vec![0.5, 1.0, 2.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JeulinConfig {
    pub n: u32,
    /// Excursion length of the main check.
    pub v: f64,
    /// Excursion length of the negative control, which must be rejected.
    pub control_v: f64,
    pub s: Vec<f64>,
    pub refinement: Refinement,
}

impl Default for JeulinConfig {
    fn default() -> Self {
        JeulinConfig {
            n: 2000,
            v: 400.0,
            control_v: 1.0,
            s: vec![0.5, 1.0, 2.0],
            refinement: Refinement { coarse_cells: 1024, branching: 8, levels: 4, ..Refinement::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LilConfig {
    pub n: u32,
    pub k_min: u32,
    pub k_max: u32,
    /// Band for the median running minimum at the finest scale.
    pub band: (f64, f64),
    pub excursion_paths: u32,
    pub excursion_k_max: u32,
    pub refinement: Refinement,
}

impl Default for LilConfig {
    fn default() -> Self {
        LilConfig {
            n: 400,
            k_min: 4,
            k_max: 200,
            band: (0.5, 2.0),
            excursion_paths: 100,
            excursion_k_max: 10,
            refinement: Refinement::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneralBetaConfig {
    pub betas: Vec<f64>,
    pub n: u32,
    pub pd_sticks: usize,
    pub density_tolerance: f64,
    pub scaling_tolerance: f64,
}

impl Default for GeneralBetaConfig {
    fn default() -> Self {
        GeneralBetaConfig {
            betas: vec![0.3, 0.4],
            n: 10_000,
            pd_sticks: 4000,
            density_tolerance: 1e-8,
            scaling_tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Grid points of paths drawn by `simulate`.
    pub grid_points: usize,
    pub pd_beta: f64,
    pub pd_theta: f64,
    /// Number of levels for the height-fragmentation snapshots.
    pub levels: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { grid_points: 4097, pd_beta: 0.5, pd_theta: 0.5, levels: 8 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let d = Config::default();
        assert_eq!(Config::from_toml(&d.to_toml()).unwrap(), d);
    }

    #[test]
    fn partial_override() {
        let c = Config::from_toml("[tagged]\nn = 50\n[frames.refinement]\nlevels = 2\n").unwrap();
        assert_eq!(c.tagged.n, 50);
        assert_eq!(c.tagged.grid_points, TaggedConfig::default().grid_points);
        assert_eq!(c.frames.refinement.levels, 2);
        assert_eq!(c.frames.refinement.branching, 16);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_levels() {
        assert!(Config::from_toml("[tagged]\nsize = 3\n").is_err());
        assert!(Config::from_toml("[verify]\nsignificance = 0.5\n").is_err());
    }
}
