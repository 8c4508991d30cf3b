//! Empirical checks of the linear and nonlinear estimates, Picard contraction
//! measurements and the smallness phase diagram.

pub mod contraction;
pub mod linear;
pub mod nonlinear;
pub mod strichartz;
pub mod sweep;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::Result;
use crate::grid::TorusGrid;

pub use contraction::{measure_contraction, ContractionReport};
pub use linear::{check_linear_estimate, LinearConfig};
pub use nonlinear::{check_nonlinear_estimate, nonlinear_bound, NonlinearConfig};
pub use strichartz::{check_strichartz, StrichartzConfig};
pub use sweep::{smallness_sweep, SweepCell, SweepConfig, SweepReport, Threshold};

pub const DEFAULT_SPREAD_EPS: f64 = 10.0;
pub const DEFAULT_SPREAD_K: f64 = 100.0;

/// Grid and time window shared by the samples of one estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
    pub slices: usize,
    pub window: f64,
}

impl Setup {
    /// Three-dimensional grid whose shells cover `k = -1..=4`.
    pub fn standard() -> Self {
        Setup { dim: 3, n: 32, period: 4.0 * PI, slices: 64, window: 0.1 }
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dim, self.n, self.period)
    }

    pub fn dt(&self) -> f64 {
        self.window / (self.slices - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub k: Option<i32>,
    pub eps: f64,
    pub seed: u64,
    pub amplitude: Option<f64>,
    pub v_amp: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub max: f64,
    pub min: f64,
    /// Largest `max/min` across the damping list over samples sharing every other descriptor.
    pub spread_eps: f64,
    /// Largest `max/min` across shells and seeds at fixed damping; `None` without a shell sweep.
    pub spread_k: Option<f64>,
    pub all_finite: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub estimate: String,
    pub setup: Setup,
    pub generator: String,
    pub samples: Vec<RatioSample>,
    pub skipped: usize,
    pub stats: RatioStats,
    pub spread_eps_bound: f64,
    pub spread_k_bound: f64,
    pub eps_list: Vec<f64>,
    /// Additional named measurements (scaling exponents and the like).
    pub extras: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl RatioReport {
    pub fn within_bounds(&self) -> bool {
        self.stats.all_finite
            && !self.samples.is_empty()
            && self.stats.spread_eps <= self.spread_eps_bound
            && self.stats.spread_k.map(|s| s <= self.spread_k_bound).unwrap_or(true)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("estimate,k,eps,seed,amplitude,v_amp,lhs,rhs,ratio\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:e},{:e},{:e}\n",
                self.estimate,
                s.k.map(|k| k.to_string()).unwrap_or_default(),
                s.eps,
                s.seed,
                s.amplitude.map(|a| a.to_string()).unwrap_or_default(),
                s.v_amp,
                s.lhs,
                s.rhs,
                s.ratio
            ));
        }
        out
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > 0.0 && lo.is_finite() {
        hi / lo
    } else if hi == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn key(x: f64) -> u64 {
    x.to_bits()
}

/// Builds a sample, or `None` when the right-hand side vanishes or either side is not finite.
pub(crate) fn guarded_sample(
    k: Option<i32>,
    eps: f64,
    seed: u64,
    amplitude: Option<f64>,
    v_amp: f64,
    lhs: f64,
    rhs: f64,
) -> Option<RatioSample> {
    if !(rhs > 0.0) || !rhs.is_finite() || !lhs.is_finite() || lhs < 0.0 {
        return None;
    }
    Some(RatioSample { k, eps, seed, amplitude, v_amp, lhs, rhs, ratio: lhs / rhs })
}

pub(crate) fn compute_stats(samples: &[RatioSample], eps_list: &[f64], shell_sweep: bool) -> RatioStats {
    let in_list = |e: f64| eps_list.contains(&e);
    let mut by_rest: BTreeMap<(Option<i32>, u64, Option<u64>, u64), Vec<f64>> = BTreeMap::new();
    let mut by_eps: BTreeMap<(u64, Option<u64>, u64), Vec<f64>> = BTreeMap::new();
    for s in samples {
        if in_list(s.eps) {
            by_rest.entry((s.k, s.seed, s.amplitude.map(key), key(s.v_amp))).or_default().push(s.ratio);
        }
        by_eps.entry((key(s.eps), s.amplitude.map(key), key(s.v_amp))).or_default().push(s.ratio);
    }
    let spread_eps = by_rest.values().map(|v| spread(v.iter().copied())).fold(1.0, f64::max);
    let spread_k = shell_sweep.then(|| by_eps.values().map(|v| spread(v.iter().copied())).fold(1.0, f64::max));
    RatioStats {
        max: samples.iter().map(|s| s.ratio).fold(0.0, f64::max),
        min: samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min),
        spread_eps,
        spread_k,
        all_finite: samples.iter().all(|s| s.ratio.is_finite()),
    }
}
