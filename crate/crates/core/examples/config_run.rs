// Drive an experiment from a config text, as the `sbe` tool does.

use sbe::harness::{exit_code, run, ExperimentConfig, Mode};

pub fn run_example() -> sbe::Result<()> {
    let text = "\
# Cauchy kernel checks
alpha = 1.0
sampler_draws = 20000
";
    let mut cfg = ExperimentConfig::parse(text)?;
    cfg.mode = Mode::KernelCheck;
    let out = std::env::temp_dir().join("sbe-config-example");
    let res = run(&cfg, &out);
    println!("exit code {}", exit_code(&res));
    let o = res?;
    print!("{}", o.report);
    for a in &o.artifacts {
        println!("wrote {}", a.display());
    }
    // every run records the full configuration it used
    assert_eq!(ExperimentConfig::load(&out.join("manifest.txt"))?, cfg);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
