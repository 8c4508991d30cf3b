//! Convergence phase diagram of the Picard iteration over damping and data amplitude.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::Result;
use crate::field::CurrentField;
use crate::gl::march::DEFAULT_BLOWUP_CAP;
use crate::gl::nonlinearity::CurrentCoupling;
use crate::gl::picard::{picard_solve, PicardConfig, StopReason, DEFAULT_TOL};
use crate::grid::TorusGrid;
use crate::random;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
    pub window: f64,
    pub slices: usize,
    pub eps_list: Vec<f64>,
    /// Root-mean-square amplitudes of the initial data.
    pub amplitudes: Vec<f64>,
    /// Magnitudes of a constant current along the first axis.
    pub v_amps: Vec<f64>,
    pub band: (f64, f64),
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    pub coupling: CurrentCoupling,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dim: 3,
            n: 16,
            period: 2.0 * PI,
            window: 0.2,
            slices: 64,
            eps_list: vec![0.05, 0.1, 0.5],
            amplitudes: log_grid(1e-4, 1.0, 9),
            v_amps: vec![0.0],
            band: (0.5, 5.0),
            seed: 1,
            max_iters: 60,
            tol: DEFAULT_TOL,
            coupling: CurrentCoupling::default(),
        }
    }
}

/// `count` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count).map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub eps: f64,
    pub v_amp: f64,
    pub amplitude: f64,
    pub converged: bool,
    pub stop: StopReason,
    pub iterate_count: usize,
    /// Last successive-difference ratio of the iteration (`L^∞_t L²_x`).
    pub final_ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub eps: f64,
    pub v_amp: f64,
    /// Largest amplitude below which every cell converged (`None` if the smallest did not).
    pub threshold: Option<f64>,
    /// Index of that amplitude in the grid.
    pub index: Option<usize>,
    /// Whether the converged cells form a down-closed set in amplitude.
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub generator: String,
    pub cells: Vec<SweepCell>,
    pub thresholds: Vec<Threshold>,
}

impl SweepReport {
    pub fn any_diverged(&self) -> bool {
        self.cells.iter().any(|c| !c.converged)
    }

    pub fn all_monotone(&self) -> bool {
        self.thresholds.iter().all(|t| t.monotone)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Phase diagram: one row per `(eps, v)`, one column per amplitude, 1 = converged.
    pub fn phase_csv(&self) -> String {
        let mut out = String::from("eps,v_amp");
        for a in &self.config.amplitudes {
            out.push_str(&format!(",{a:e}"));
        }
        out.push('\n');
        for t in &self.thresholds {
            out.push_str(&format!("{},{}", t.eps, t.v_amp));
            for a in &self.config.amplitudes {
                let c = self.cells.iter().find(|c| c.eps == t.eps && c.v_amp == t.v_amp && c.amplitude == *a);
                out.push_str(if c.map(|c| c.converged).unwrap_or(false) { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }

    pub fn cells_csv(&self) -> String {
        let mut out = String::from("eps,v_amp,amplitude,converged,stop,iterate_count,final_ratio\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{:e},{},{:?},{},{}\n",
                c.eps,
                c.v_amp,
                c.amplitude,
                c.converged as u8,
                c.stop,
                c.iterate_count,
                c.final_ratio.map(|r| format!("{r:e}")).unwrap_or_default()
            ));
        }
        out
    }
}

fn threshold_of(cells: &[&SweepCell], eps: f64, v_amp: f64) -> Threshold {
    let mut index = None;
    for (i, c) in cells.iter().enumerate() {
        if c.converged {
            index = Some(i);
        } else {
            break;
        }
    }
    let first_fail = index.map(|i| i + 1).unwrap_or(0);
    let monotone = cells[first_fail.min(cells.len())..].iter().all(|c| !c.converged);
    Threshold { eps, v_amp, threshold: index.map(|i| cells[i].amplitude), index, monotone }
}

/// Runs `picard_solve` on every `(eps, v, amplitude)` cell. All cells share the data
/// shape drawn from `seed`, rescaled to each amplitude; failures are recorded in-cell.
pub fn smallness_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let grid = TorusGrid::new(cfg.dim, cfg.n, cfg.period)?;
    let shape = random::band_limited(grid, &mut random::rng(cfg.seed), cfg.band.0, cfg.band.1);
    let rms = shape.l2_norm() / grid.volume().sqrt();
    let mut amplitudes = cfg.amplitudes.clone();
    amplitudes.sort_by(f64::total_cmp);
    let mut jobs: Vec<(f64, f64, f64)> = Vec::new();
    for &e in &cfg.eps_list {
        for &v in &cfg.v_amps {
            jobs.extend(amplitudes.iter().map(|&a| (e, v, a)));
        }
    }
    let cells: Vec<SweepCell> = jobs
        .par_iter()
        .map(|&(eps, v_amp, amplitude)| {
            let run = || -> Result<SweepCell> {
                let u0 = if rms > 0.0 {
                    shape.scale(num_complex::Complex64::new(amplitude / rms, 0.0))
                } else {
                    shape.clone()
                };
                let v = CurrentField::constant(grid, &{
                    let mut e = vec![0.0; cfg.dim];
                    e[0] = v_amp;
                    e
                })?;
                let pc = PicardConfig {
                    eps,
                    dt: cfg.window / (cfg.slices - 1) as f64,
                    slices: cfg.slices,
                    max_iters: cfg.max_iters,
                    tol: cfg.tol,
                    coupling: cfg.coupling,
                    blowup_cap: DEFAULT_BLOWUP_CAP,
                    track_dyadic: false,
                };
                let (_, rep) = picard_solve(&u0, &v, &pc)?;
                Ok(SweepCell {
                    eps,
                    v_amp,
                    amplitude,
                    converged: rep.converged,
                    stop: rep.stop,
                    iterate_count: rep.iterate_count,
                    final_ratio: rep.ratios_linf_l2.last().copied(),
                    error: None,
                })
            };
            run().unwrap_or_else(|e| SweepCell {
                eps,
                v_amp,
                amplitude,
                converged: false,
                stop: StopReason::NonFinite,
                iterate_count: 0,
                final_ratio: None,
                error: Some(e.to_string()),
            })
        })
        .collect();
    let mut thresholds = Vec::new();
    for &eps in &cfg.eps_list {
        for &v_amp in &cfg.v_amps {
            let row: Vec<&SweepCell> = cells.iter().filter(|c| c.eps == eps && c.v_amp == v_amp).collect();
            thresholds.push(threshold_of(&row, eps, v_amp));
        }
    }
    Ok(SweepReport {
        config: SweepConfig { amplitudes, ..cfg.clone() },
        generator: random::GENERATOR.into(),
        cells,
        thresholds,
    })
}
