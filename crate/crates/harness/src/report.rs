//! Versioned, machine-readable verification reports. Every verdict can be
//! recomputed from the numbers stored next to it; [`Report::audit`] does so.

use std::path::Path;

use fragstoch_core::stats::{Estimate, KsResult};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One numeric check and the rule that decides it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    /// Passes when `p_value > threshold`.
    Ks { statistic: f64, p_value: f64, n_eff: f64, threshold: f64 },
    /// Negative control: passes when `p_value < threshold`.
    KsReject { statistic: f64, p_value: f64, n_eff: f64, threshold: f64 },
    /// Passes when `|estimate − target| ≤ max_abs_z · std_error`.
    ZScore { estimate: f64, std_error: f64, target: f64, max_abs_z: f64 },
    /// Passes when `|value − target| ≤ tolerance`.
    Tolerance { value: f64, target: f64, tolerance: f64 },
    /// Passes when nothing mismatched.
    Exact { checked: u64, mismatches: u64 },
    /// Passes when `low ≤ value ≤ high`.
    Band { value: f64, low: f64, high: f64 },
}

impl Check {
    pub fn ks(r: KsResult, threshold: f64) -> Self {
        Check::Ks { statistic: r.statistic, p_value: r.p_value, n_eff: r.n_eff, threshold }
    }

    pub fn ks_reject(r: KsResult, threshold: f64) -> Self {
        Check::KsReject { statistic: r.statistic, p_value: r.p_value, n_eff: r.n_eff, threshold }
    }

    pub fn z(e: Estimate, target: f64, max_abs_z: f64) -> Self {
        Check::ZScore { estimate: e.value, std_error: e.std_error, target, max_abs_z }
    }

    pub fn passed(&self) -> bool {
        match *self {
            Check::Ks { p_value, threshold, .. } => p_value > threshold,
            Check::KsReject { p_value, threshold, .. } => p_value < threshold,
            Check::ZScore { estimate, std_error, target, max_abs_z } => {
                (estimate - target).abs() <= max_abs_z * std_error
            }
            Check::Tolerance { value, target, tolerance } => (value - target).abs() <= tolerance,
            Check::Exact { mismatches, .. } => mismatches == 0,
            Check::Band { value, low, high } => low <= value && value <= high,
        }
    }

    /// Whether this check spends part of the suite's significance budget.
    pub fn is_test(&self) -> bool {
        matches!(self, Check::Ks { .. })
    }

    /// A one-line rendering of the stored numbers.
    pub fn summary(&self) -> String {
        match *self {
            Check::Ks { statistic, p_value, threshold, .. } => format!("D = {statistic:.4}, p = {p_value:.3e} (> {threshold:e})"),
            Check::KsReject { statistic, p_value, threshold, .. } => {
                format!("D = {statistic:.4}, p = {p_value:.3e} (< {threshold:e})")
            }
            Check::ZScore { estimate, std_error, target, max_abs_z } => {
                let z = (estimate - target) / std_error;
                format!("{estimate:.5} ± {std_error:.5} vs {target:.5}, z = {z:.2} (|z| <= {max_abs_z})")
            }
            Check::Tolerance { value, target, tolerance } => {
                format!("{value:.10} vs {target:.10}, |diff| = {:.2e} (<= {tolerance:e})", (value - target).abs())
            }
            Check::Exact { checked, mismatches } => format!("{mismatches} mismatches in {checked}"),
            Check::Band { value, low, high } => format!("{value:.4} in [{low}, {high}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    #[serde(flatten)]
    pub check: Check,
    pub passed: bool,
}

impl TestResult {
    pub fn new(name: impl Into<String>, check: Check) -> Self {
        let passed = check.passed();
        TestResult { name: name.into(), check, passed }
    }
}

/// A named table attached to a case, for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The case could not be evaluated; `error` says why.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub case: String,
    pub suite: String,
    pub statement: String,
    /// Whether a failure makes the run fail.
    pub gating: bool,
    pub master_seed: u64,
    pub seed_tag: u32,
    pub replicates: u64,
    pub tests: Vec<TestResult>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub verdict: Verdict,
    pub runtime_secs: f64,
}

impl StatReport {
    pub fn derive_verdict(tests: &[TestResult], error: &Option<String>) -> Verdict {
        if error.is_some() {
            Verdict::Error
        } else if tests.iter().all(|t| t.check.passed()) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn test(&self, name: &str) -> Option<&TestResult> {
        self.tests.iter().find(|t| t.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub cases: usize,
    /// KS tests in the suite.
    pub tests: usize,
    pub per_test_significance: f64,
    /// Family-wise level of the suite, `tests · per_test_significance`.
    pub family_significance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub generator: String,
    pub master_seed: u64,
    pub significance: f64,
    pub cases: Vec<StatReport>,
    pub suites: Vec<SuiteSummary>,
    /// False iff some gating case did not pass.
    pub passed: bool,
}

impl Report {
    pub fn new(master_seed: u64, significance: f64, cases: Vec<StatReport>) -> Self {
        let mut suites: Vec<SuiteSummary> = Vec::new();
        for c in &cases {
            let tests = c.tests.iter().filter(|t| t.check.is_test()).count();
            let ok = !c.gating || c.verdict == Verdict::Pass;
            match suites.iter_mut().find(|s| s.suite == c.suite) {
                Some(s) => {
                    s.cases += 1;
                    s.tests += tests;
                    s.passed &= ok;
                }
                None => suites.push(SuiteSummary {
                    suite: c.suite.clone(),
                    cases: 1,
                    tests,
                    per_test_significance: significance,
                    family_significance: 0.0,
                    passed: ok,
                }),
            }
        }
        for s in &mut suites {
            s.family_significance = s.tests as f64 * significance;
        }
        let passed = suites.iter().all(|s| s.passed);
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            generator: concat!("fragstoch ", env!("CARGO_PKG_VERSION")).to_string(),
            master_seed,
            significance,
            cases,
            suites,
            passed,
        }
    }

    pub fn case(&self, id: &str) -> Option<&StatReport> {
        self.cases.iter().find(|c| c.case == id)
    }

    /// Recomputes every verdict from the stored numbers and reports the
    /// first disagreement.
    pub fn audit(&self) -> Result<()> {
        for c in &self.cases {
            for t in &c.tests {
                if t.passed != t.check.passed() {
                    return Err(Error::Report(format!("{}: stored verdict of {} disagrees with its numbers", c.case, t.name)));
                }
            }
            if c.verdict != StatReport::derive_verdict(&c.tests, &c.error) {
                return Err(Error::Report(format!("{}: case verdict disagrees with its tests", c.case)));
            }
        }
        let again = Report::new(self.master_seed, self.significance, self.cases.clone());
        if again.suites != self.suites || again.passed != self.passed {
            return Err(Error::Report("suite summaries disagree with the cases".into()));
        }
        Ok(())
    }

    /// The same report with wall-clock fields zeroed.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.cases {
            c.runtime_secs = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.get("schema_version").and_then(|x| x.as_u64()) {
            Some(x) if x == REPORT_SCHEMA_VERSION as u64 => {}
            Some(x) => return Err(Error::Report(format!("schema version {x} is not supported (expected {REPORT_SCHEMA_VERSION})"))),
            None => return Err(Error::Report("missing schema_version".into())),
        }
        let r: Report = serde_json::from_value(v)?;
        r.audit()?;
        Ok(r)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
