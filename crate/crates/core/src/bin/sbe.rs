use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sbe::harness::{exit_code, run, ExperimentConfig, Mode};
use sbe::Error;

/// Run one configured experiment and write its artifacts.
#[derive(Parser)]
#[command(name = "sbe", version)]
struct Cli {
    /// kernel-check, drift-check, simulate, rate, duhamel, decompose or inequalities
    mode: Mode,
    #[arg(long)]
    config: PathBuf,
    /// Output directory, `out/<mode>` by default.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write SVG plots where the mode has one.
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ExperimentConfig::load(&cli.config).and_then(|mut cfg| {
        cfg.mode = cli.mode;
        if let Some(s) = cli.seed {
            cfg.seed = s;
        }
        if let Some(t) = cli.threads {
            cfg.threads = t;
        }
        cfg.plot |= cli.plot;
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(cli.mode.tag()));
        run(&cfg, &out)
    });
    match &result {
        Ok(o) => {
            print!("{}", o.report);
            println!("{} {}", o.mode, if o.passed { "passed" } else { "FAILED" });
        }
        Err(Error::Io(e)) => eprintln!("sbe: i/o error: {e}"),
        Err(e) => eprintln!("sbe: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
