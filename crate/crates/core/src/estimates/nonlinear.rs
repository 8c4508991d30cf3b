//! Ratios of `‖J(u)‖_{N^{n/2}}` to the cubic-type bound in `‖u‖_{F^{n/2}∩Z^{n/2}}` and `‖v‖_∞`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{compute_stats, guarded_sample, RatioReport, RatioSample, Setup, DEFAULT_SPREAD_EPS, DEFAULT_SPREAD_K};
use crate::dyadic::composite::{norm_spaces, Space};
use crate::error::{LabError, Result};
use crate::field::{CurrentField, SpaceTimeField};
use crate::gl::nonlinearity::{gl_nonlinear_parts, CurrentCoupling};
use crate::gl::picard::free_trajectory;
use crate::random;
use crate::spectral::{gradient_from_spectral, to_spectral};

/// Samples with `‖u‖²_{F∩Z}` at or above this value are skipped.
pub const VALIDITY_LIMIT: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearConfig {
    pub setup: Setup,
    pub eps_list: Vec<f64>,
    /// Target values of `‖u‖_{F^{n/2}∩Z^{n/2}}`.
    pub amplitudes: Vec<f64>,
    pub v_amps: Vec<f64>,
    pub seeds: Vec<u64>,
    pub band: (f64, f64),
    pub coupling: CurrentCoupling,
    /// Two `‖u‖` values a decade apart for the scaling exponents.
    pub scaling_pair: (f64, f64),
    /// Current magnitude used for the `J₁` exponent.
    pub scaling_v: f64,
    pub spread_eps_bound: f64,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        NonlinearConfig {
            setup: Setup { dim: 3, n: 16, period: 2.0 * PI, slices: 64, window: 0.1 },
            eps_list: vec![0.01, 0.1, 0.5],
            amplitudes: vec![0.05, 0.2, 0.5],
            v_amps: vec![0.0, 0.05],
            seeds: (1..=10).collect(),
            band: (0.5, 4.0),
            coupling: CurrentCoupling::default(),
            scaling_pair: (0.01, 0.1),
            scaling_v: 0.05,
            spread_eps_bound: DEFAULT_SPREAD_EPS,
        }
    }
}

/// Right-hand side of the nonlinear estimate with unit constant; `x = ‖u‖_{F∩Z}`, `v = ‖v‖_∞`.
pub fn nonlinear_bound(x: f64, v: f64) -> f64 {
    let d = 1.0 - x * x;
    v * x + (x.powi(3) + v * x + v * x.powi(3)) / d + v * x.powi(3) / (d * d)
}

fn fz_norm(u: &SpaceTimeField) -> Result<f64> {
    let r = norm_spaces(u, &[Space::F, Space::Z], u.grid().dim() as f64 / 2.0)?;
    Ok(r.entries["F"] + r.entries["Z"])
}

fn n_norm(u: &SpaceTimeField) -> Result<f64> {
    Ok(norm_spaces(u, &[Space::N], u.grid().dim() as f64 / 2.0)?.entries["N"])
}

/// `J`, `J₁` and `J₂` of a trajectory, slice by slice.
fn parts_of(u: &SpaceTimeField, v: &CurrentField, eps: f64, coupling: CurrentCoupling) -> Result<[SpaceTimeField; 3]> {
    let mut total = Vec::with_capacity(u.len());
    let mut j1 = Vec::with_capacity(u.len());
    let mut j2 = Vec::with_capacity(u.len());
    for (m, s) in u.slices().iter().enumerate() {
        let grad = gradient_from_spectral(&to_spectral(s));
        let p = gl_nonlinear_parts(s, &grad, v.at(m as f64 * u.dt()), eps, coupling)?;
        total.push(p.total());
        j1.push(p.j1);
        j2.push(p.j2);
    }
    let g = *u.grid();
    Ok([
        SpaceTimeField::new(g, u.dt(), total)?,
        SpaceTimeField::new(g, u.dt(), j1)?,
        SpaceTimeField::new(g, u.dt(), j2)?,
    ])
}

/// Samples the nonlinear-estimate ratio over damping, amplitude, current and seed, and
/// measures the amplitude exponents of `J₁` (with current) and `J₂` (without).
pub fn check_nonlinear_estimate(cfg: &NonlinearConfig) -> Result<RatioReport> {
    if cfg.setup.dim != 3 {
        return Err(LabError::UnsupportedExponent("F and Y norms need dimension 3".into()));
    }
    let grid = cfg.setup.grid()?;
    let dt = cfg.setup.dt();
    let jobs: Vec<(u64, f64)> = cfg.seeds.iter().flat_map(|&s| cfg.eps_list.iter().map(move |&e| (s, e))).collect();
    let results: Vec<Vec<Option<RatioSample>>> = jobs
        .par_iter()
        .map(|&(seed, eps)| {
            let u0 = random::band_limited(grid, &mut random::rng(seed), cfg.band.0, cfg.band.1);
            let w = free_trajectory(&u0, dt, cfg.setup.slices, eps)?;
            let unit = fz_norm(&w)?;
            let mut out = Vec::new();
            for &a in &cfg.amplitudes {
                if a * a >= VALIDITY_LIMIT || unit == 0.0 {
                    out.push(None);
                    continue;
                }
                let u = w.scale(Complex64::new(a / unit, 0.0));
                for &va in &cfg.v_amps {
                    let v = CurrentField::constant(grid, &[va, 0.0, 0.0])?;
                    let [j, _, _] = parts_of(&u, &v, eps, cfg.coupling)?;
                    out.push(guarded_sample(None, eps, seed, Some(a), va, n_norm(&j)?, nonlinear_bound(a, va)));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let skipped = results.iter().flatten().filter(|r| r.is_none()).count();
    let samples: Vec<RatioSample> = results.into_iter().flatten().flatten().collect();
    let stats = compute_stats(&samples, &cfg.eps_list, false);

    let (lo, hi) = cfg.scaling_pair;
    let seed = cfg.seeds.first().copied().unwrap_or(1);
    let eps = cfg.eps_list.first().copied().unwrap_or(0.1);
    let u0 = random::band_limited(grid, &mut random::rng(seed), cfg.band.0, cfg.band.1);
    let w = free_trajectory(&u0, dt, cfg.setup.slices, eps)?;
    let unit = fz_norm(&w)?;
    let zero = CurrentField::zero(grid);
    let with_v = CurrentField::constant(grid, &[cfg.scaling_v, 0.0, 0.0])?;
    let norms = |amp: f64| -> Result<(f64, f64)> {
        let u = w.scale(Complex64::new(amp / unit, 0.0));
        let [_, j1, _] = parts_of(&u, &with_v, eps, cfg.coupling)?;
        let [_, _, j2] = parts_of(&u, &zero, eps, cfg.coupling)?;
        Ok((n_norm(&j1)?, n_norm(&j2)?))
    };
    let (j1_lo, j2_lo) = norms(lo)?;
    let (j1_hi, j2_hi) = norms(hi)?;
    let decades = (hi / lo).ln();
    let mut extras = BTreeMap::new();
    extras.insert("j1_exponent".to_string(), (j1_hi / j1_lo).ln() / decades);
    extras.insert("j2_exponent".to_string(), (j2_hi / j2_lo).ln() / decades);

    Ok(RatioReport {
        estimate: "nonlinear".into(),
        setup: cfg.setup,
        generator: random::GENERATOR.into(),
        samples,
        skipped,
        stats,
        spread_eps_bound: cfg.spread_eps_bound,
        spread_k_bound: DEFAULT_SPREAD_K,
        eps_list: cfg.eps_list.clone(),
        extras,
        notes: vec![
            "u is the free evolution of band-limited data rescaled to the target F+Z norm".into(),
            "bound evaluated with unit constant".into(),
            format!("current coupling: {}", cfg.coupling.name()),
        ],
    })
}
