use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fragstoch::cases::default_registry;
use fragstoch::plots::write_plots;
use fragstoch::report::Report;
use fragstoch::sim::{target, targets};
use fragstoch::{run_registry_with, Config, Result, StatReport, Verdict};

#[derive(Parser)]
#[command(name = "fragstoch", version, about = "Simulate and verify fragmentations of Brownian excursions")]
struct Cli {
    /// TOML file overriding default settings (see `fragstoch config`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples from a named target and write CSV or JSON.
    Simulate {
        /// Target name; `--list` shows them all.
        #[arg(required_unless_present = "list")]
        target: Option<String>,
        /// Replicates, or grid points for single-path targets.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        list: bool,
    },
    /// Run verification cases and print one line per test.
    Verify {
        /// Comma-separated case ids or suite names; all cases if absent.
        #[arg(long, default_value = "")]
        filter: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// List the registered cases and exit.
        #[arg(long)]
        list: bool,
    },
    /// Summarize a saved report and optionally write plot data and scripts.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Print the default configuration as TOML.
    Config,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Simulate { list: true, .. } => {
            for t in targets() {
                println!("{:<22} {}", t.name(), t.description());
            }
            Ok(true)
        }
        Command::Simulate { target: name, n, seed, out, .. } => {
            let t = target(name.as_deref().unwrap_or_default())?;
            let output = t.run(n.unwrap_or_else(|| t.default_n(&config)), seed, &config)?;
            match out {
                Some(p) => output.write_to(BufWriter::new(File::create(p)?))?,
                None => output.write_to(io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Verify { list: true, .. } => {
            for c in default_registry()?.cases() {
                let gate = if c.gating() { "" } else { " (non-gating)" };
                println!("{:<28} {:<12} {}{gate}", c.id(), c.suite(), c.statement());
            }
            Ok(true)
        }
        Command::Verify { filter, seed, workers, report, .. } => {
            let registry = default_registry()?;
            let r = run_registry_with(&registry, &filter, seed, workers, &config, print_case)?;
            println!("{}", summary_line(&r));
            if let Some(p) = report {
                r.write(&p)?;
            }
            Ok(r.passed)
        }
        Command::Report { input, plots } => {
            let r = Report::read(&input)?;
            for c in &r.cases {
                print_case(c);
            }
            println!("{}", summary_line(&r));
            if let Some(dir) = plots {
                let files = write_plots(&r, &dir)?;
                println!("wrote {} files to {}", files.len(), dir.display());
            }
            Ok(true)
        }
        Command::Config => {
            print!("{}", config.to_toml());
            Ok(true)
        }
    }
}

fn print_case(c: &StatReport) {
    let mut out = io::stdout().lock();
    let verdict = match c.verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Error => "ERROR",
    };
    let gate = if c.gating { "" } else { " (non-gating)" };
    let _ = writeln!(out, "{verdict} {}{gate} [{} replicates, {:.1} s]", c.case, c.replicates, c.runtime_secs);
    for t in &c.tests {
        let _ = writeln!(out, "    {} {}: {}", if t.passed { "ok  " } else { "FAIL" }, t.name, t.check.summary());
    }
    if let Some(e) = &c.error {
        let _ = writeln!(out, "    error: {e}");
    }
    for n in &c.notes {
        let _ = writeln!(out, "    note: {n}");
    }
}

fn summary_line(r: &Report) -> String {
    let failed: Vec<&str> = r.suites.iter().filter(|s| !s.passed).map(|s| s.suite.as_str()).collect();
    if failed.is_empty() {
        format!("all {} suites passed (per-test level {:e})", r.suites.len(), r.significance)
    } else {
        format!("failed suites: {}", failed.join(", "))
    }
}
