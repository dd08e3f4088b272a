use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use timeops::config::RunConfig;
use timeops::report::dump_matrix;
use timeops::suites::{error_exit_code, run_config, run_sweep, EXIT_CONFIG, EXIT_OK};
use timeops::time_operator::{assemble_t_closed_form, assemble_t_quadrature, TimeOperatorConfig};
use timeops::{Error, Result};

#[derive(Parser)]
#[command(name = "timeops", version, about = "Check suites for the singular-oscillator time operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites and write reports
    Run(RunArgs),
    /// Assemble T and write it in the matrix text format
    DumpT {
        #[command(flatten)]
        run: RunArgs,
        /// assemble by cubature instead of the closed form
        #[arg(long)]
        quadrature: bool,
        /// output file, default <out>/t_<branch>.txt
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Repeat `run` over values of one key, one subdirectory per value
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// key = value file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    /// principal, positive or both comma separated
    #[arg(long)]
    branch: Option<String>,
    /// as-written or frequency-scaled
    #[arg(long)]
    prefactor: Option<String>,
    #[arg(long)]
    radial_nodes: Option<String>,
    #[arg(long)]
    angular_nodes: Option<String>,
    #[arg(long = "momentum-M")]
    momentum_m: Option<String>,
    #[arg(long = "momentum-L")]
    momentum_l: Option<String>,
    #[arg(long = "position-M")]
    position_m: Option<String>,
    #[arg(long = "position-L")]
    position_l: Option<String>,
    #[arg(long = "similarity-M")]
    similarity_m: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    parallel: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
            cfg.apply_file(&text)?;
        }
        let flags = [
            ("suite", &self.suite),
            ("omega", &self.omega),
            ("g", &self.g),
            ("N", &self.n),
            ("branch", &self.branch),
            ("prefactor", &self.prefactor),
            ("radial-nodes", &self.radial_nodes),
            ("angular-nodes", &self.angular_nodes),
            ("momentum-M", &self.momentum_m),
            ("momentum-L", &self.momentum_l),
            ("position-M", &self.position_m),
            ("position-L", &self.position_l),
            ("similarity-M", &self.similarity_m),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if self.parallel {
            cfg.parallel = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dump_t(cfg: &RunConfig, quadrature: bool, file: Option<PathBuf>) -> Result<i32> {
    let params = cfg.params()?;
    for &branch in &cfg.branches {
        let tc = TimeOperatorConfig::with_nodes(params, cfg.n, branch, cfg.prefactor, cfg.radial_nodes, cfg.angular_nodes)?;
        let t = if quadrature { assemble_t_quadrature(&tc)? } else { assemble_t_closed_form(&tc)? };
        let path = match (&file, cfg.branches.len()) {
            (Some(f), 1) => {
                if let Some(dir) = f.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                f.clone()
            }
            _ => {
                let tag = format!("{branch:?}").to_lowercase();
                std::fs::create_dir_all(&cfg.out)?;
                cfg.out.join(format!("t_{tag}.txt"))
            }
        };
        dump_matrix(&t, &params, &path)?;
        println!("{}", path.display());
    }
    Ok(EXIT_OK)
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let summary = run_config(&cfg)?;
            for s in &summary.suites {
                println!("{:<12} {}", s.name, s.status);
                for f in &s.failures {
                    println!("  fail: {f}");
                }
                if let Some(e) = &s.error {
                    println!("  error: {e}");
                }
            }
            Ok(summary.exit_code)
        }
        Command::DumpT { run, quadrature, file } => dump_t(&run.resolve()?, quadrature, file),
        Command::Sweep { run, param, values } => {
            let cfg = run.resolve()?;
            let (code, summaries) = run_sweep(&cfg, &param, &values)?;
            for (v, s) in values.iter().zip(&summaries) {
                println!("{param}={v}: exit {}", s.exit_code);
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match execute(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("timeops: {e}");
            error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
