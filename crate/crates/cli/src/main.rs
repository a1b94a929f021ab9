use std::io;
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use noisedisc::modelgen::EnsembleSpec;
use noisedisc::{Method, Width};
use noisedisc_cli::{bench_config, cmd_bench, cmd_check, cmd_discretize, cmd_gen, exit, BenchOverrides, GenSource};

/// Exact discretization of continuous-time linear stochastic systems.
///
/// Set DISCRETIZE_LOG (error, warn, info, debug, trace) for diagnostics on stderr.
#[derive(Parser)]
#[command(name = "noisedisc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct WidthFlags {
    /// Run in single precision.
    #[arg(long = "f32")]
    f32: bool,
    /// Run in double precision (default).
    #[arg(long = "f64")]
    f64: bool,
}

impl WidthFlags {
    fn width(self) -> Option<Width> {
        match (self.f32, self.f64) {
            (true, _) => Some(Width::F32),
            (_, true) => Some(Width::F64),
            _ => None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print F and Q for one method.
    Discretize {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// lyap-p, lyap-q, proposed, vanloan, naive-a, naive-b or oracle.
        #[arg(long, default_value = "proposed")]
        method: Method,
        #[command(flatten)]
        width: WidthFlags,
    },
    /// Tabulate both certificates for every method.
    Check {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Flag threshold [default: 1e-8 in f64, 1e-3 in f32].
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        width: WidthFlags,
    },
    /// Run the precision benchmark and write records.csv and summary.csv.
    Bench {
        /// TOML configuration; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Relative tolerance of the reference quadrature.
        #[arg(long)]
        tol: Option<f64>,
        /// Method to run; repeat for several.
        #[arg(long)]
        method: Vec<Method>,
        #[command(flatten)]
        width: WidthFlags,
    },
    /// Write a system file for a fixture or an ensemble member.
    Gen {
        /// Named fixture: constant-velocity.
        #[arg(long, conflicts_with_all = ["m", "p", "seed", "index"])]
        fixture: Option<String>,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ensemble member.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        name: Option<String>,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<i32, noisedisc_cli::CliError> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Discretize { file, t, method, width } => {
            cmd_discretize(&file, t, method, width.width().unwrap_or(Width::F64), &mut stdout)
        }
        Command::Check { file, t, tol, width } => {
            let w = width.width().unwrap_or(Width::F64);
            let tol = tol.unwrap_or(if w == Width::F64 { 1e-8 } else { 1e-3 });
            cmd_check(&file, t, w, tol, &mut stdout)
        }
        Command::Bench { config, out, runs, seed, tol, method, width } => {
            let overrides = BenchOverrides { runs, seed, width: width.width(), oracle_tol: tol, methods: method };
            let cfg = bench_config(config.as_deref(), &overrides)?;
            cmd_bench(&cfg, &out, &mut stdout)
        }
        Command::Gen { fixture, m, p, seed, index, name, out } => {
            let source = match fixture.as_deref() {
                Some("constant-velocity") => GenSource::ConstantVelocity,
                Some(other) => {
                    return Err(noisedisc_cli::CliError::Input(format!(
                        "unknown fixture `{other}` (available: constant-velocity)"
                    )))
                }
                None => GenSource::Ensemble { spec: EnsembleSpec::new(m, p, seed), index },
            };
            cmd_gen(&source, name, out.as_ref(), &mut stdout)
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DISCRETIZE_LOG")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.class());
            e.exit_code()
        }
    };
    debug_assert!(code == exit::OK || code != 0);
    process::exit(code);
}
