use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use noisedisc::bench::{median_or_inf, run_benchmark, summarize, write_records_csv, write_summary_csv, BenchConfig};
use noisedisc::discretize::{discretize, lemma2_residual, semigroup_residual};
use noisedisc::modelgen::{constant_velocity, gen_system, EnsembleSpec};
use noisedisc::{ContinuousModel, DiscretizeError, Matrix, Method, Real, Width};
use thiserror::Error;

use crate::config::BenchFile;
use crate::sysfile::{render_block, SystemFile};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// `check` found an exact method above tolerance.
    pub const FLAGGED: i32 = 1;
    /// Unreadable or malformed input, or unwritable output.
    pub const INPUT: i32 = 2;
    /// The requested method failed on a valid system.
    pub const METHOD: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Output(String),
    #[error("{0}")]
    Method(#[from] DiscretizeError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Output(_) => exit::INPUT,
            CliError::Method(_) => exit::METHOD,
        }
    }

    /// Short class name printed ahead of the message.
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Output(_) => "output",
            CliError::Method(e) if e.is_not_applicable() => "not-applicable",
            CliError::Method(e) if e.is_overflow() => "overflow",
            CliError::Method(_) => "method",
        }
    }
}

fn load(path: &Path) -> Result<ContinuousModel<f64>, CliError> {
    SystemFile::read(path).and_then(|f| f.model()).map_err(|e| CliError::Input(e.to_string()))
}

fn check_t(t: f64) -> Result<(), CliError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!("sampling time {t} must be finite and non-negative")))
    }
}

fn io_err(out: std::io::Error) -> CliError {
    CliError::Output(out.to_string())
}

fn discretize_at<T: Real>(
    m: &ContinuousModel<f64>,
    method: Method,
    t: f64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let r = discretize(&m.cast::<T>(), method, T::of(t))?;
    let f: Matrix<f64> = r.model.f().cast();
    let q: Matrix<f64> = r.model.q().cast();
    let text = format!(
        "method = {method}\nwidth = {}\nt = {t:.16e}\nf =\n{}q =\n{}diagnostics:\n{}",
        T::WIDTH,
        render_block(&f),
        render_block(&q),
        r.diagnostics.iter().map(|(k, v)| format!("  {k} = {v}\n")).collect::<String>()
    );
    out.write_all(text.as_bytes()).map_err(io_err)
}

/// Prints `F`, `Q` and the diagnostics of one method.
pub fn cmd_discretize(path: &Path, t: f64, method: Method, width: Width, out: &mut dyn Write) -> Result<i32, CliError> {
    check_t(t)?;
    let m = load(path)?;
    match width {
        Width::F32 => discretize_at::<f32>(&m, method, t, out)?,
        Width::F64 => discretize_at::<f64>(&m, method, t, out)?,
    }
    Ok(exit::OK)
}

/// Residual row of one method: `None` when the method did not run.
fn residuals<T: Real>(m: &ContinuousModel<T>, method: Method, t: T) -> Result<(f64, f64), DiscretizeError> {
    let r = discretize(m, method, t)?;
    let lemma2 = lemma2_residual(m, r.model.f(), r.model.q())?;
    let half = t / T::of(2.0);
    let split = semigroup_residual(m, method, half, half)?;
    Ok((lemma2, split))
}

fn check_at<T: Real>(m: &ContinuousModel<f64>, t: f64, tol: f64, out: &mut dyn Write) -> Result<bool, CliError> {
    let mw = m.cast::<T>();
    let mut flagged = false;
    let mut text = format!("{:<10} {:<16} {:>12} {:>12}  flag\n", "method", "status", "lemma2", "semigroup");
    for method in Method::ALL {
        match residuals(&mw, method, T::of(t)) {
            Ok((l2, sg)) => {
                let over = l2 > tol || sg > tol;
                let gate = over && !method.is_naive();
                flagged |= gate;
                let mark = match (over, method.is_naive()) {
                    (false, _) => "",
                    (true, true) => "above (naive)",
                    (true, false) => "FLAGGED",
                };
                text += &format!("{:<10} {:<16} {l2:>12.3e} {sg:>12.3e}  {mark}\n", method.name(), "ok");
            }
            Err(e) => {
                let status = if e.is_not_applicable() {
                    "not-applicable"
                } else if e.is_overflow() {
                    "overflow"
                } else {
                    "error"
                };
                log::info!("{method}: {e}");
                text += &format!("{:<10} {status:<16} {:>12} {:>12}\n", method.name(), "-", "-");
            }
        }
    }
    text += &format!("tolerance {tol:.1e} ({})\n", T::WIDTH);
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(flagged)
}

/// Runs every method and tabulates both certificates. Naive methods are
/// listed but never flag.
pub fn cmd_check(path: &Path, t: f64, width: Width, tol: f64, out: &mut dyn Write) -> Result<i32, CliError> {
    check_t(t)?;
    let m = load(path)?;
    let flagged = match width {
        Width::F32 => check_at::<f32>(&m, t, tol, out)?,
        Width::F64 => check_at::<f64>(&m, t, tol, out)?,
    };
    Ok(if flagged { exit::FLAGGED } else { exit::OK })
}

/// Command-line overrides for the benchmark configuration.
#[derive(Debug, Default, Clone)]
pub struct BenchOverrides {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub width: Option<Width>,
    pub oracle_tol: Option<f64>,
    pub methods: Vec<Method>,
}

pub fn bench_config(config: Option<&Path>, o: &BenchOverrides) -> Result<BenchConfig, CliError> {
    let file = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            BenchFile::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
        }
        None => BenchFile::default(),
    };
    let mut cfg = file.into_config().map_err(CliError::Input)?;
    if let Some(r) = o.runs {
        cfg.runs = r;
    }
    if let Some(s) = o.seed {
        cfg.ensemble.seed = s;
    }
    if let Some(w) = o.width {
        cfg.width = w;
    }
    if let Some(t) = o.oracle_tol {
        cfg.oracle_tol = t;
    }
    if !o.methods.is_empty() {
        cfg.methods = o.methods.clone();
    }
    cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes `records.csv` and `summary.csv` into `out_dir` and prints the
/// comparison at the largest sampling time.
pub fn cmd_bench(cfg: &BenchConfig, out_dir: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::Output(format!("{}: {e}", out_dir.display())))?;
    let records_path = out_dir.join("records.csv");
    let summary_path = out_dir.join("summary.csv");
    let mut records_file = create(&records_path)?;
    let mut summary_file = create(&summary_path)?;

    let records = run_benchmark(cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let summary = summarize(&records);
    write_records_csv(&mut records_file, &records).map_err(io_err)?;
    write_summary_csv(&mut summary_file, &summary).map_err(io_err)?;

    let mut text =
        format!("{} records -> {}\nsummary -> {}\n", records.len(), records_path.display(), summary_path.display());
    if let Some(&t_max) = cfg.t_grid.last() {
        let mut methods = cfg.methods.clone();
        methods.sort();
        methods.dedup();
        let cells: Vec<String> =
            methods.iter().filter_map(|&m| median_or_inf(&summary, m, t_max).map(|v| format!("{m} {v:.3e}"))).collect();
        if !cells.is_empty() {
            text += &format!("median eps at t = {t_max:.3e} ({}): {}\n", cfg.width, cells.join(", "));
        }
    }
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(exit::OK)
}

/// What `gen` should produce.
#[derive(Debug, Clone)]
pub enum GenSource {
    ConstantVelocity,
    Ensemble { spec: EnsembleSpec, index: u64 },
}

pub fn cmd_gen(
    source: &GenSource,
    name: Option<String>,
    dest: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let (default_name, model) = match source {
        GenSource::ConstantVelocity => ("constant-velocity".to_owned(), constant_velocity()),
        GenSource::Ensemble { spec, index } => (
            format!("ensemble-m{}-p{}-seed{}-{}", spec.m, spec.p, spec.seed, index),
            gen_system(spec, *index).map_err(|e| CliError::Input(e.to_string()))?,
        ),
    };
    let text = SystemFile::from_model(Some(name.unwrap_or(default_name)), &model).render();
    match dest {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(exit::OK)
}
