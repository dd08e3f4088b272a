//! Runs two suites from code and writes the same files as the CLI.
use timeops::config::{parse_suites, RunConfig};
use timeops::suites::run_config;

fn main() -> timeops::Result<()> {
    let mut cfg = RunConfig { suites: parse_suites("coherent,timeop")?, ..RunConfig::default() };
    cfg.apply_file("branch = principal, positive\nN = 32\n")?;
    cfg.out = std::env::temp_dir().join("timeops-example");
    let summary = run_config(&cfg)?;
    println!("exit code {}", summary.exit_code);
    for s in &summary.suites {
        println!("{:<10} {} {:?}", s.name, s.status, s.failures);
    }
    println!("reports in {}", cfg.out.display());
    Ok(())
}
