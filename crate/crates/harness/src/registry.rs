use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use fragstoch_core::Seed;
use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::report::{Check, Report, Series, StatReport, TestResult};

/// What a case hands back: its checks plus anything worth plotting.
#[derive(Clone, Debug, Default)]
pub struct CaseOutcome {
    pub replicates: u64,
    pub tests: Vec<TestResult>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
}

impl CaseOutcome {
    pub fn push(&mut self, name: impl Into<String>, check: Check) {
        self.tests.push(TestResult::new(name, check));
    }
}

/// Everything a case may depend on. Seeds come from `(master, tag)` only,
/// so a case is reproducible from its id and the master seed.
pub struct CaseContext<'a> {
    pub master: u64,
    pub tag: u32,
    pub config: &'a Config,
}

/// Replicate streams available to one case.
pub const ROLES_PER_CASE: u32 = 16;

impl CaseContext<'_> {
    pub fn significance(&self) -> f64 {
        self.config.verify.significance
    }

    pub fn max_abs_z(&self) -> f64 {
        self.config.verify.max_abs_z
    }

    /// Seed of replicate `i` for one of the case's sampling roles.
    pub fn seed(&self, role: u32, i: u32) -> Seed {
        debug_assert!(role < ROLES_PER_CASE);
        Seed::replicate(self.master, self.tag * ROLES_PER_CASE + role, i)
    }

    pub fn ks(&self, r: fragstoch_core::stats::KsResult) -> Check {
        Check::ks(r, self.significance())
    }

    pub fn z(&self, e: fragstoch_core::stats::Estimate, target: f64) -> Check {
        Check::z(e, target, self.max_abs_z())
    }
}

/// Runs `f` on replicates `0..n` in parallel; results come back in index
/// order whatever the scheduling.
pub fn replicates<T, F>(n: u32, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u32) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

pub trait VerificationCase: Send + Sync {
    fn id(&self) -> &'static str;
    fn suite(&self) -> &'static str;
    /// The property being checked, in one sentence.
    fn statement(&self) -> &'static str;
    /// Seed tag; distinct across registered cases.
    fn tag(&self) -> u32;
    fn gating(&self) -> bool {
        true
    }
    fn run(&self, ctx: &CaseContext) -> Result<CaseOutcome>;
}

#[derive(Default)]
pub struct Registry {
    cases: Vec<Box<dyn VerificationCase>>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn register(&mut self, case: Box<dyn VerificationCase>) -> Result<()> {
        if let Some(c) = self.cases.iter().find(|c| c.id() == case.id() || c.tag() == case.tag()) {
            return Err(Error::Config(format!("case {} clashes with {} (id or seed tag)", case.id(), c.id())));
        }
        self.cases.push(case);
        Ok(())
    }

    pub fn cases(&self) -> impl Iterator<Item = &dyn VerificationCase> {
        self.cases.iter().map(|c| c.as_ref())
    }

    /// Cases whose id or suite equals one of the comma-separated names in
    /// `filter`; all cases when the filter is empty.
    pub fn select(&self, filter: &str) -> Result<Vec<&dyn VerificationCase>> {
        let names: Vec<&str> = filter.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if names.is_empty() {
            return Ok(self.cases().collect());
        }
        for n in &names {
            if !self.cases().any(|c| c.id() == *n || c.suite() == *n) {
                let mut known: Vec<&str> = self.cases().flat_map(|c| [c.suite(), c.id()]).collect();
                known.dedup();
                return Err(Error::Unknown { kind: "case or suite", name: n.to_string(), known: known.join(", ") });
            }
        }
        Ok(self.cases().filter(|c| names.iter().any(|n| c.id() == *n || c.suite() == *n)).collect())
    }
}

fn run_case(case: &dyn VerificationCase, master: u64, config: &Config) -> StatReport {
    let ctx = CaseContext { master, tag: case.tag(), config };
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(|| case.run(&ctx)));
    let runtime_secs = start.elapsed().as_secs_f64();
    let (outcome, error) = match result {
        Ok(Ok(o)) => (o, None),
        Ok(Err(e)) => (CaseOutcome::default(), Some(e.to_string())),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (CaseOutcome::default(), Some(format!("panicked: {msg}")))
        }
    };
    let verdict = StatReport::derive_verdict(&outcome.tests, &error);
    StatReport {
        case: case.id().into(),
        suite: case.suite().into(),
        statement: case.statement().into(),
        gating: case.gating(),
        master_seed: master,
        seed_tag: case.tag(),
        replicates: outcome.replicates,
        tests: outcome.tests,
        series: outcome.series,
        notes: outcome.notes,
        error,
        verdict,
        runtime_secs,
    }
}

/// Runs the selected cases one after another, each parallel over its
/// replicates on a pool of `workers` threads (0 means one per core).
/// `on_done` sees each case report as soon as it is finished.
pub fn run_registry_with(
    registry: &Registry,
    filter: &str,
    master: u64,
    workers: usize,
    config: &Config,
    mut on_done: impl FnMut(&StatReport),
) -> Result<Report> {
    config.validate()?;
    let selected = registry.select(filter)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut reports = Vec::with_capacity(selected.len());
    for case in selected {
        let r = pool.install(|| run_case(case, master, config));
        on_done(&r);
        reports.push(r);
    }
    Ok(Report::new(master, config.verify.significance, reports))
}

pub fn run_registry(registry: &Registry, filter: &str, master: u64, workers: usize, config: &Config) -> Result<Report> {
    run_registry_with(registry, filter, master, workers, config, |_| {})
}
