//! TOML configuration for the `bench` command. Every field is optional;
//! missing ones take the library defaults.
//!
//! ```toml
//! runs = 100
//! seed = 0
//! m = 4
//! p = 2
//! pole_real_range = [-1.0, -0.05]
//! coupling_scale = 1.0
//! t_min = 0.01
//! t_max = 100.0
//! t_points = 21        # or an explicit list: t_grid = [0.1, 1.0, 10.0]
//! methods = ["proposed", "vanloan"]
//! width = "f32"
//! oracle_tol = 1e-12
//! ```

use noisedisc::bench::{log_grid, BenchConfig};
use noisedisc::modelgen::EnsembleSpec;
use noisedisc::{Method, Width};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchFile {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub pole_real_range: Option<(f64, f64)>,
    pub coupling_scale: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_points: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub width: Option<String>,
    pub oracle_tol: Option<f64>,
}

impl BenchFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn into_config(self) -> Result<BenchConfig, String> {
        let mut cfg = BenchConfig::default();
        let d = &cfg.ensemble;
        let (m, p) = (self.m.unwrap_or(d.m), self.p.unwrap_or(d.p));
        let mut ensemble = EnsembleSpec::new(m, p, self.seed.unwrap_or(d.seed));
        if let Some(r) = self.pole_real_range {
            ensemble.pole_real_range = r;
        }
        if let Some(c) = self.coupling_scale {
            ensemble.coupling_scale = c;
        }
        cfg.ensemble = ensemble;
        if let Some(r) = self.runs {
            cfg.runs = r;
        }
        match (self.t_grid, self.t_min, self.t_max, self.t_points) {
            (Some(g), None, None, None) => cfg.t_grid = g,
            (Some(_), ..) => return Err("give either t_grid or t_min/t_max/t_points, not both".into()),
            (None, lo, hi, k) if lo.is_some() || hi.is_some() || k.is_some() => {
                let (lo, hi, k) = (lo.unwrap_or(1e-2), hi.unwrap_or(1e2), k.unwrap_or(21));
                if !(lo > 0.0 && hi >= lo && k >= 1) {
                    return Err(format!("bad time range [{lo}, {hi}] with {k} points"));
                }
                cfg.t_grid = log_grid(lo, hi, k);
            }
            _ => {}
        }
        if let Some(ms) = self.methods {
            cfg.methods =
                ms.iter().map(|s| s.parse::<Method>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        }
        if let Some(w) = self.width {
            cfg.width = match w.as_str() {
                "f32" => Width::F32,
                "f64" => Width::F64,
                other => return Err(format!("unknown width `{other}` (expected f32 or f64)")),
            };
        }
        if let Some(t) = self.oracle_tol {
            cfg.oracle_tol = t;
        }
        Ok(cfg)
    }
}
