//! Duhamel map `Ψ_{u₀}` and its Picard iteration.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::march::{nonlinear_spectral, DEFAULT_BLOWUP_CAP};
use super::nonlinearity::CurrentCoupling;
use crate::dyadic::composite::{norm_spaces, Space};
use crate::dyadic::lebesgue::norm_mixed;
use crate::dyadic::modulation::ModulationShells;
use crate::error::{LabError, Result};
use crate::field::{ComplexField, CurrentField, Representation, SpaceTimeField};
use crate::spectral::{dealias_mask, semigroup_multiplier, to_physical, to_spectral};

/// Consecutive non-contracting steps after which the iteration is declared divergent.
pub const DIVERGENCE_RUN: usize = 3;
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub eps: f64,
    pub dt: f64,
    /// Number of stored time nodes, including `t = 0`.
    pub slices: usize,
    pub max_iters: usize,
    /// Relative tolerance on `‖u⁽ⁿ⁺¹⁾ − u⁽ⁿ⁾‖_{L^∞_t L²_x}`.
    pub tol: f64,
    pub coupling: CurrentCoupling,
    pub blowup_cap: f64,
    /// Also track differences in the dyadic `F^{n/2} + Z^{n/2}` norm (three dimensions only).
    pub track_dyadic: bool,
}

impl PicardConfig {
    pub fn new(eps: f64, window: f64, slices: usize) -> Self {
        PicardConfig {
            eps,
            dt: window / (slices.max(2) - 1) as f64,
            slices,
            max_iters: 40,
            tol: DEFAULT_TOL,
            coupling: CurrentCoupling::default(),
            blowup_cap: DEFAULT_BLOWUP_CAP,
            track_dyadic: true,
        }
    }

    pub fn window(&self) -> f64 {
        self.dt * (self.slices - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    Diverged,
    Blowup,
    NonFinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterate_count: usize,
    /// `‖u⁽ⁿ⁾ − u⁽ⁿ⁻¹⁾‖_{L^∞_t L²_x}` for `n = 1..=iterate_count`.
    pub diff_linf_l2: Vec<f64>,
    /// Same differences in `F^{n/2} + Z^{n/2}`; empty when not tracked.
    pub diff_dyadic: Vec<f64>,
    pub ratios_linf_l2: Vec<f64>,
    pub ratios_dyadic: Vec<f64>,
    pub converged: bool,
    pub stop: StopReason,
    pub final_sup: f64,
}

fn free_evolution(u0: &ComplexField, dt: f64, slices: usize, eps: f64) -> Result<SpaceTimeField> {
    let g = *u0.grid();
    let spec = to_spectral(u0);
    let out = (0..slices)
        .map(|m| {
            if m == 0 {
                return to_physical(u0);
            }
            let mult = semigroup_multiplier(&g, m as f64 * dt, eps);
            let v = spec.values().iter().zip(&mult).map(|(z, w)| z * w).collect();
            to_physical(&spec.with_values(v, Representation::Spectral))
        })
        .collect();
    SpaceTimeField::new(g, dt, out)
}

/// Free evolution `e^{(ε+i)tΔ}u₀` sampled like a Picard iterate.
pub fn free_trajectory(u0: &ComplexField, dt: f64, slices: usize, eps: f64) -> Result<SpaceTimeField> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(LabError::Contract(format!("damping must lie in [0, 1], got {eps}")));
    }
    free_evolution(u0, dt, slices, eps)
}

/// `e^{(ε+i)t_mΔ}u₀ + ∫₀^{t_m} e^{(ε+i)(t_m−s)Δ} J(s) ds` at `t_m = m·dt` for spectral
/// sources `J` given at every node; trapezoid rule in `s`, slice 0 is `u₀` itself.
pub fn duhamel(u0: &ComplexField, sources: &[Vec<Complex64>], dt: f64, eps: f64) -> Result<SpaceTimeField> {
    let g = *u0.grid();
    if sources.len() < 2 || sources.iter().any(|j| j.len() != g.len()) {
        return Err(LabError::Contract("Duhamel sources must cover at least two nodes of the grid".into()));
    }
    let step = semigroup_multiplier(&g, dt, eps);
    let u0_hat = to_spectral(u0);
    let mut acc = sources[0].clone();
    let mut out = Vec::with_capacity(sources.len());
    out.push(to_physical(u0));
    for (m, jm) in sources.iter().enumerate().skip(1) {
        // acc = Σ_{l<=m} S(t_m − t_l) J_l
        for ((b, s), j) in acc.iter_mut().zip(&step).zip(jm) {
            *b = *b * s + j;
        }
        let full = semigroup_multiplier(&g, m as f64 * dt, eps);
        let vals = (0..g.len())
            .map(|i| full[i] * u0_hat.values()[i] + dt * (acc[i] - 0.5 * full[i] * sources[0][i] - 0.5 * jm[i]))
            .collect();
        out.push(to_physical(&u0_hat.with_values(vals, Representation::Spectral)));
    }
    SpaceTimeField::new(g, dt, out)
}

/// `Ψ_{u₀}(u)(t_m) = e^{(ε+i)t_mΔ}u₀ + ∫₀^{t_m} e^{(ε+i)(t_m−s)Δ} J(u(s)) ds`, with the
/// integral taken by the trapezoid rule over the stored nodes. Slice 0 is `u₀` itself.
pub fn picard_map(
    u: &SpaceTimeField,
    u0: &ComplexField,
    v: &CurrentField,
    eps: f64,
    coupling: CurrentCoupling,
) -> Result<SpaceTimeField> {
    let g = *u.grid();
    g.same_as(u0.grid())?;
    g.same_as(v.grid())?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(LabError::Contract(format!("damping must lie in [0, 1], got {eps}")));
    }
    let dt = u.dt();
    let keep = dealias_mask(&g);
    let js: Vec<Vec<Complex64>> = u
        .slices()
        .par_iter()
        .enumerate()
        .map(|(m, s)| nonlinear_spectral(&to_spectral(s), v, m as f64 * dt, eps, coupling, &keep))
        .collect::<Result<_>>()?;
    duhamel(u0, &js, dt, eps)
}

/// `‖w‖_{F^{n/2}} + ‖w‖_{Z^{n/2}}`, or `None` when the grid or window cannot resolve it.
pub fn dyadic_difference_norm(w: &SpaceTimeField) -> Result<Option<f64>> {
    let g = w.grid();
    if g.dim() != 3 {
        return Ok(None);
    }
    match ModulationShells::new(w.len(), w.dt()).and_then(|m| m.require_resolved()) {
        Ok(()) => {}
        Err(_) => return Ok(None),
    }
    let r = norm_spaces(w, &[Space::F, Space::Z], g.dim() as f64 / 2.0)?;
    Ok(Some(r.entries["F"] + r.entries["Z"]))
}

/// Iterates `u⁽ⁿ⁺¹⁾ = Ψ_{u₀}(u⁽ⁿ⁾)` from the free evolution. Divergence is reported, not raised.
pub fn picard_solve(u0: &ComplexField, v: &CurrentField, cfg: &PicardConfig) -> Result<(SpaceTimeField, PicardReport)> {
    if cfg.slices < 2 {
        return Err(LabError::Contract("Picard iteration needs at least two time nodes".into()));
    }
    let mut current = free_trajectory(u0, cfg.dt, cfg.slices, cfg.eps)?;
    let mut rep = PicardReport {
        iterate_count: 0,
        diff_linf_l2: Vec::new(),
        diff_dyadic: Vec::new(),
        ratios_linf_l2: Vec::new(),
        ratios_dyadic: Vec::new(),
        converged: false,
        stop: StopReason::MaxIterations,
        final_sup: current.max_abs(),
    };
    let track =
        cfg.track_dyadic && dyadic_difference_norm(&SpaceTimeField::zeros(*u0.grid(), cfg.dt, cfg.slices)?)?.is_some();
    for _ in 0..cfg.max_iters {
        let next = picard_map(&current, u0, v, cfg.eps, cfg.coupling)?;
        rep.iterate_count += 1;
        if !next.is_finite() {
            rep.stop = StopReason::NonFinite;
            rep.final_sup = f64::INFINITY;
            return Ok((next, rep));
        }
        let sup = next.max_abs();
        rep.final_sup = sup;
        let diff = next.sub(&current)?;
        let d = norm_mixed(&diff, f64::INFINITY, 2.0)?;
        if let Some(&prev) = rep.diff_linf_l2.last() {
            rep.ratios_linf_l2.push(if prev > 0.0 { d / prev } else { 0.0 });
        }
        rep.diff_linf_l2.push(d);
        if track {
            let dz = dyadic_difference_norm(&diff)?.unwrap_or(0.0);
            if let Some(&prev) = rep.diff_dyadic.last() {
                rep.ratios_dyadic.push(if prev > 0.0 { dz / prev } else { 0.0 });
            }
            rep.diff_dyadic.push(dz);
        }
        current = next;
        if sup > cfg.blowup_cap {
            rep.stop = StopReason::Blowup;
            return Ok((current, rep));
        }
        let scale = norm_mixed(&current, f64::INFINITY, 2.0)?;
        if d <= cfg.tol * scale {
            rep.converged = true;
            rep.stop = StopReason::Converged;
            return Ok((current, rep));
        }
        let r = &rep.ratios_linf_l2;
        if r.len() >= DIVERGENCE_RUN && r[r.len() - DIVERGENCE_RUN..].iter().all(|&x| x >= 1.0) {
            rep.stop = StopReason::Diverged;
            return Ok((current, rep));
        }
    }
    Ok((current, rep))
}
