//! Plot data and gnuplot scripts from a saved report.
//!
//! Scripts set no terminal, so the caller picks the output format:
//! `gnuplot -e "set terminal svg; set output 'p.svg'" pvalues.gp`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::report::{Check, Report, Series};

/// Writes `pvalues.csv`/`.gp` and one `.csv`/`.gp` pair per series into
/// `dir`, returning the paths written.
pub fn write_plots(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let mut w = csv::Writer::from_path(dir.join("pvalues.csv"))?;
    w.write_record(["case", "test", "p_value", "threshold", "passed"])?;
    let mut n_tests = 0;
    let mut threshold = report.significance;
    for c in &report.cases {
        for t in &c.tests {
            if let Check::Ks { p_value, threshold: th, .. } | Check::KsReject { p_value, threshold: th, .. } = t.check {
                w.write_record([c.case.clone(), t.name.clone(), p_value.to_string(), th.to_string(), t.passed.to_string()])?;
                threshold = th;
                n_tests += 1;
            }
        }
    }
    w.flush()?;
    written.push(dir.join("pvalues.csv"));
    written.push(write_script(dir, "pvalues.gp", &pvalue_script(n_tests, threshold))?);

    for c in &report.cases {
        for s in &c.series {
            let stem = format!("{}__{}", c.case, s.name);
            let data = dir.join(format!("{stem}.csv"));
            write_series(s, &data)?;
            written.push(data);
            written.push(write_script(dir, &format!("{stem}.gp"), &series_script(&c.case, s, &format!("{stem}.csv")))?);
        }
    }
    Ok(written)
}

fn write_script(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

fn write_series(s: &Series, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&s.columns)?;
    for r in &s.rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn pvalue_script(n_tests: usize, threshold: f64) -> String {
    let mut g = String::new();
    writeln!(g, "# -log10 p of every KS test; the dashed line is the per-test level").unwrap();
    writeln!(g, "set datafile separator ','").unwrap();
    writeln!(g, "set key autotitle columnhead").unwrap();
    writeln!(g, "set style fill solid 0.6").unwrap();
    writeln!(g, "set boxwidth 0.7").unwrap();
    writeln!(g, "set xtics rotate by 60 right font ',7'").unwrap();
    writeln!(g, "set ylabel '-log10 p'").unwrap();
    writeln!(g, "set xrange [-1:{n_tests}]").unwrap();
    writeln!(g, "set arrow from -1,{t} to {n_tests},{t} nohead dt 2", t = -threshold.log10()).unwrap();
    writeln!(
        g,
        "plot 'pvalues.csv' using 0:(-log10($3)):xticlabels(stringcolumn(1).': '.stringcolumn(2)) with boxes notitle"
    )
    .unwrap();
    g
}

fn series_script(case: &str, s: &Series, data: &str) -> String {
    let mut g = String::new();
    writeln!(g, "# {case}: {}", s.name).unwrap();
    writeln!(g, "set datafile separator ','").unwrap();
    writeln!(g, "set key autotitle columnhead").unwrap();
    writeln!(g, "set title '{case}: {}' noenhanced", s.name).unwrap();
    if let Some(x) = s.columns.first() {
        writeln!(g, "set xlabel '{x}' noenhanced").unwrap();
    }
    let curves: Vec<String> =
        (2..=s.columns.len()).map(|j| format!("'{data}' using 1:{j} with linespoints noenhanced")).collect();
    writeln!(g, "plot {}", curves.join(", \\\n     ")).unwrap();
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{StatReport, TestResult, Verdict};

    fn report() -> Report {
        let tests = vec![
            TestResult::new("a", Check::Ks { statistic: 0.01, p_value: 0.4, n_eff: 100.0, threshold: 1e-3 }),
            TestResult::new("b", Check::Band { value: 1.0, low: 0.5, high: 2.0 }),
        ];
        let case = StatReport {
            case: "demo".into(),
            suite: "demo".into(),
            statement: "x".into(),
            gating: true,
            master_seed: 1,
            seed_tag: 1,
            replicates: 100,
            verdict: Verdict::Pass,
            tests,
            series: vec![Series {
                name: "means".into(),
                columns: vec!["r".into(), "mean".into(), "target".into()],
                rows: vec![vec![0.5, 1.0, 1.1], vec![1.0, 2.0, 2.1]],
            }],
            notes: vec![],
            error: None,
            runtime_secs: 0.0,
        };
        Report::new(1, 1e-3, vec![case])
    }

    #[test]
    fn writes_data_and_scripts() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_plots(&report(), dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        let p = fs::read_to_string(dir.path().join("pvalues.csv")).unwrap();
        assert_eq!(p.lines().count(), 2);
        let gp = fs::read_to_string(dir.path().join("demo__means.gp")).unwrap();
        assert!(gp.contains("'demo__means.csv' using 1:2") && gp.contains("using 1:3"));
        assert!(!gp.contains("set terminal"));
    }
}
