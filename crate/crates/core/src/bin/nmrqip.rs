// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nmrqip::harness::{self, criteria, repro_suite, HarnessError, RunOptions, Tolerances, EXPERIMENTS};

const OUT_ENV: &str = "NMRQIP_OUT_DIR";

// println! panics when the reader closes the pipe early (`nmrqip repro | head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

/// NMR quantum information simulator: run one experiment or the reproduction suite.
#[derive(Parser, Debug)]
#[command(name = "nmrqip", version)]
struct Cli {
    /// Experiment name, or `repro` for the reproduction suite.
    experiment: Option<String>,
    /// JSON config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (else $NMRQIP_OUT_DIR, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Finite-readout shots for sampled experiments.
    #[arg(long)]
    shots: Option<u64>,
    /// List experiments, or criteria with `repro`, without running.
    #[arg(long)]
    list: bool,
    /// Tolerance file for `repro`.
    #[arg(long)]
    tolerances: Option<PathBuf>,
    /// Criterion ids for `repro` (all when omitted).
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

fn fail(e: HarnessError) -> ExitCode {
    say!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match cli.experiment.as_deref() {
        Some("repro") => repro(&cli, out_dir),
        None if cli.list => {
            for e in EXPERIMENTS {
                say!("{e}");
            }
            ExitCode::SUCCESS
        }
        None => fail(HarnessError::UnknownExperiment(String::new())),
        Some(_) if cli.list => {
            for e in EXPERIMENTS {
                say!("{e}");
            }
            ExitCode::SUCCESS
        }
        Some(name) => {
            let opts = RunOptions {
                experiment: name.to_string(),
                config: cli.config.clone(),
                seed: cli.seed,
                out_dir,
                shots: cli.shots,
            };
            match harness::run(&opts) {
                Ok(m) => {
                    say!("{}", serde_json::json!({ "ok": true, "outputs": m.outputs, "summary": m.summary }));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}

fn repro(cli: &Cli, out_dir: PathBuf) -> ExitCode {
    if cli.list {
        for c in criteria() {
            say!("{:>2}  {:<14} {}", c.id, c.name, c.description);
        }
        return ExitCode::SUCCESS;
    }
    let tol = match &cli.tolerances {
        Some(p) => match Tolerances::from_path(p) {
            Ok(t) => t,
            Err(e) => return fail(HarnessError::BadConfig(e.to_string())),
        },
        None => Tolerances::default(),
    };
    let results = repro_suite(cli.seed, &out_dir, &tol, &cli.only);
    for r in &results {
        say!(
            "{:>2} {:<14} {:<4} {:>7.2}s  {}  [expected {}]",
            r.id,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.seconds,
            r.measured,
            r.expected
        );
    }
    let _ = std::fs::create_dir_all(&out_dir);
    if let Ok(s) = serde_json::to_string_pretty(&results) {
        let _ = std::fs::write(out_dir.join("repro_summary.json"), s);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    say!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
