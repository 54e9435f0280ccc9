//! The eleven acceptance criteria at full scale, one PASS/FAIL line each.
//!
//! Runs every registered case with the default configuration and master
//! seed 0. Expect several minutes on one core.

use fragstoch::cases::default_registry;
use fragstoch::report::{Check, Report, StatReport};
use fragstoch::{run_registry_with, Config, Verdict};

const MASTER_SEED: u64 = 0;

struct Criterion {
    label: &'static str,
    cases: &'static [&'static str],
}

const CRITERIA: [Criterion; 11] = [
    Criterion { label: "1  tagged-fragment picks vs Beta(1/2,1) and PD(1/2,1/2)", cases: &["thm1-beta-half", "thm1-conditioned-samplers"] },
    Criterion { label: "2  bridge vs Lamperti conditioned samplers", cases: &["prop2-sampler-equivalence"] },
    Criterion { label: "3  phi(1/2) quadrature and E[zeta^2]", cases: &["lemma7-moments"] },
    Criterion { label: "4  Bertoin-Pitman bijection, exact", cases: &["bijection-bertoin-pitman"] },
    Criterion { label: "5  Haas marginal invariance", cases: &["haas-marginals"] },
    Criterion { label: "6  conditioned range gaps vs reflected-bridge excursions", cases: &["prop3-zero-set"] },
    Criterion { label: "7  extinction frames vs BES(3) limit", cases: &["thm4-extinction-frames"] },
    Criterion { label: "8  Laplace transforms of limit H and M", cases: &["cor5-laplace"] },
    Criterion { label: "9  obliteration masses vs Beta(1/2,n)", cases: &["obliteration-masses"] },
    Criterion { label: "10 running minima of g(t) L_t in band", cases: &["lil-running-minima"] },
    Criterion { label: "11 general beta density, scaling, PD sticks", cases: &["general-beta-stable-pd"] },
];

fn case<'a>(r: &'a Report, id: &str) -> &'a StatReport {
    r.case(id).unwrap_or_else(|| panic!("case {id} missing from the report"))
}

fn line(ok: bool, label: &str, detail: &str) -> String {
    format!("{} criterion {label}: {detail}", if ok { "PASS" } else { "FAIL" })
}

fn detail(c: &StatReport) -> String {
    let mut parts: Vec<String> = c.tests.iter().map(|t| format!("{} [{}]", t.name, t.check.summary())).collect();
    if let Some(e) = &c.error {
        parts.push(format!("error: {e}"));
    }
    parts.join("; ")
}

#[test]
fn acceptance() {
    let registry = default_registry().unwrap();
    let config = Config::default();
    let report = run_registry_with(&registry, "", MASTER_SEED, 0, &config, |c| {
        eprintln!("finished {} in {:.1} s: {:?}", c.case, c.runtime_secs, c.verdict);
    })
    .unwrap();
    report.audit().unwrap();

    let mut failed = Vec::new();
    println!();
    for crit in &CRITERIA {
        let cases: Vec<&StatReport> = crit.cases.iter().map(|id| case(&report, id)).collect();
        let ok = cases.iter().all(|c| c.verdict == Verdict::Pass);
        let details: Vec<String> = cases.iter().map(|c| detail(c)).collect();
        println!("{}", line(ok, crit.label, &details.join(" | ")));
        if !ok {
            failed.push(crit.label);
        }
    }

    // The moment identities as literally written use phi(2) and phi(4); they
    // are reported for the record and expected to fail.
    let literal = case(&report, "lemma7-moments-literal");
    println!(
        "{} criterion 3  literal phi(2), 2/(phi(2) phi(4)) reading (expected FAIL, not asserted): {}",
        if literal.verdict == Verdict::Pass { "PASS" } else { "FAIL" },
        detail(literal)
    );

    // The band is asserted on the subordinator curves; excursion curves are
    // emitted only.
    let lil = case(&report, "lil-running-minima");
    assert!(lil.tests.iter().any(|t| matches!(t.check, Check::Band { .. })), "LIL band check missing");
    assert!(lil.series.len() >= 2, "LIL curves missing");

    let jeulin = case(&report, "jeulin-fixed-time");
    println!("{} extra jeulin-fixed-time: {}", if jeulin.verdict == Verdict::Pass { "PASS" } else { "FAIL" }, detail(jeulin));
    if jeulin.verdict != Verdict::Pass {
        failed.push("jeulin-fixed-time");
    }

    assert!(failed.is_empty(), "failed: {failed:?}");
}
