//! Precision experiment: methods run at a chosen width against a
//! double-precision quadrature reference, over a seeded random ensemble and
//! a grid of sampling times.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::discretize::{discretize, q_oracle, ContinuousModel, DiscretizeError, Method};
use crate::linalg::{spectral_norm, Matrix, Real, Width};
use crate::modelgen::{gen_system, EnsembleSpec, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `count` sampling times spaced evenly in `log10` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|k| {
            let x = a + (b - a) * k as f64 / (count - 1) as f64;
            10f64.powf(x)
        })
        .collect()
}

/// 21 points over `[1e-2, 1e2]`: four decades at five points each, so that
/// `t = 1` is a grid node.
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 21)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub ensemble: EnsembleSpec,
    pub t_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub oracle_tol: f64,
    pub runs: usize,
    /// Width the methods run in. The reference is always `f64`.
    pub width: Width,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            ensemble: EnsembleSpec::default(),
            t_grid: default_t_grid(),
            methods: vec![Method::Proposed, Method::VanLoan],
            oracle_tol: 1e-12,
            runs: 100,
            width: Width::F32,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        self.ensemble.validate()?;
        let bad = |m: &str| Err(BenchError::Config(m.to_owned()));
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.t_grid.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            return bad("sampling times must be finite and positive");
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sampling times must be strictly increasing");
        }
        if self.oracle_tol.is_nan() || self.oracle_tol <= 0.0 {
            return bad("oracle tolerance must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    Overflow,
    NotApplicable,
    Error,
}

impl Status {
    fn of(e: &DiscretizeError) -> Self {
        if e.is_overflow() {
            Status::Overflow
        } else if e.is_not_applicable() {
            Status::NotApplicable
        } else {
            Status::Error
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Overflow => "overflow",
            Status::NotApplicable => "not_applicable",
            Status::Error => "error",
        })
    }
}

/// One cell of the experiment. `epsilon = ‖Q̂ − Q‖₂ / ‖Q‖₂` is present
/// exactly when `status` is [`Status::Ok`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub system_id: u64,
    pub method: Method,
    pub t: f64,
    pub width: Width,
    pub epsilon: Option<f64>,
    pub status: Status,
}

fn relative_error(q_hat: &Matrix<f64>, q: &Matrix<f64>) -> f64 {
    let den = spectral_norm(q);
    let num = spectral_norm(&(q_hat - q));
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn run_cell<T: Real>(m: &ContinuousModel<f64>, method: Method, t: f64, truth: &Matrix<f64>) -> (Option<f64>, Status) {
    let mw: ContinuousModel<T> = m.cast();
    match discretize(&mw, method, T::of(t)) {
        Ok(r) => (Some(relative_error(&r.model.q().cast(), truth)), Status::Ok),
        Err(e) => {
            log::debug!("{method} at t = {t}: {e}");
            (None, Status::of(&e))
        }
    }
}

fn run_system(cfg: &BenchConfig, methods: &[Method], id: u64) -> Result<Vec<BenchRecord>, BenchError> {
    let m = gen_system(&cfg.ensemble, id)?;
    let mut out = Vec::with_capacity(cfg.t_grid.len() * methods.len());
    for &t in &cfg.t_grid {
        let truth = q_oracle(&m, t, cfg.oracle_tol);
        if let Err(e) = &truth {
            log::warn!("reference for system {id} at t = {t} failed: {e}");
        }
        for &method in methods {
            let (epsilon, status) = match &truth {
                Err(_) => (None, Status::Error),
                Ok(q) => match cfg.width {
                    Width::F32 => run_cell::<f32>(&m, method, t, q),
                    Width::F64 => run_cell::<f64>(&m, method, t, q),
                },
            };
            out.push(BenchRecord { system_id: id, method, t, width: cfg.width, epsilon, status });
        }
    }
    Ok(out)
}

/// Runs every (system, t, method) cell. Per-cell failures are recorded in
/// the status, never propagated. Records are ordered by system, then `t`,
/// then method, independent of scheduling.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    cfg.validate()?;
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Ok(Vec::new());
    }
    let per_system: Result<Vec<_>, _> =
        (0..cfg.runs as u64).into_par_iter().map(|id| run_system(cfg, &methods, id)).collect();
    Ok(per_system?.into_iter().flatten().collect())
}

/// Aggregate of one (method, t) cell over the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub t: f64,
    /// Median and quartiles over successful records; `None` when all failed.
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub fail_rate: f64,
    pub count: usize,
}

/// Quantile of sorted data with linear interpolation between order statistics.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Groups records by (method, t), in method then time order.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, f64)> = records.iter().map(|r| (r.method, r.t)).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.dedup_by(|a, b| a.0 == b.0 && a.1.to_bits() == b.1.to_bits());
    keys.into_iter()
        .map(|(method, t)| {
            let cell: Vec<&BenchRecord> =
                records.iter().filter(|r| r.method == method && r.t.to_bits() == t.to_bits()).collect();
            let mut eps: Vec<f64> = cell.iter().filter_map(|r| r.epsilon).collect();
            eps.sort_by(f64::total_cmp);
            let stat = |p: f64| (!eps.is_empty()).then(|| quantile(&eps, p));
            SummaryRow {
                method,
                t,
                median: stat(0.5),
                q1: stat(0.25),
                q3: stat(0.75),
                fail_rate: (cell.len() - eps.len()) as f64 / cell.len() as f64,
                count: cell.len(),
            }
        })
        .collect()
}

/// Median for a cell, counting an all-failed cell as `+∞`. `None` when the
/// cell does not exist.
pub fn median_or_inf(summary: &[SummaryRow], method: Method, t: f64) -> Option<f64> {
    summary
        .iter()
        .find(|r| r.method == method && r.t.to_bits() == t.to_bits())
        .map(|r| r.median.unwrap_or(f64::INFINITY))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

/// `system_id,method,t,epsilon,status`, LF-terminated; `epsilon` is empty
/// for failed cells.
pub fn write_records_csv<W: Write>(mut w: W, records: &[BenchRecord]) -> io::Result<()> {
    w.write_all(b"system_id,method,t,epsilon,status\n")?;
    for r in records {
        writeln!(w, "{},{},{:.16e},{},{}", r.system_id, r.method, r.t, opt(r.epsilon), r.status)?;
    }
    w.flush()
}

/// `method,t,median_eps,q1,q3,fail_rate`; statistics are empty for
/// all-failed cells.
pub fn write_summary_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> io::Result<()> {
    w.write_all(b"method,t,median_eps,q1,q3,fail_rate\n")?;
    for r in rows {
        writeln!(w, "{},{:.16e},{},{},{},{:.16e}", r.method, r.t, opt(r.median), opt(r.q1), opt(r.q3), r.fail_rate)?;
    }
    w.flush()
}
