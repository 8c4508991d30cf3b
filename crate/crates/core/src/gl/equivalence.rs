//! Residual check that stereographically projected LLS trajectories solve the chart equation.

use serde::{Deserialize, Serialize};

use super::nonlinearity::CurrentCoupling;
use super::residual::{GlForm, ResidualAccumulator, ResidualReport};
use crate::error::Result;
use crate::field::{ComplexField, CurrentField, MagnetizationField};
use crate::lls::{lls_evolve_with, LlsConfig};
use crate::stereographic::project;

/// Residuals of one projected trajectory against three versions of the chart equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTriple {
    pub dt: f64,
    /// Equation as written before the time reversal, full nonlinearity.
    pub preflip: ResidualReport,
    /// Forward equation, full nonlinearity.
    pub postflip: ResidualReport,
    /// Forward equation without the `J₃` current term.
    pub postflip_omitted: ResidualReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub eps: f64,
    pub t_end: f64,
    pub v_sup: f64,
    pub pole_guard: f64,
    pub coupling: CurrentCoupling,
    pub runs: Vec<ResidualTriple>,
    /// `residual(dt) / residual(dt/2)` per form, when a halved run was made.
    pub halving_ratio_preflip: Option<f64>,
    pub halving_ratio_postflip: Option<f64>,
    pub halving_ratio_omitted: Option<f64>,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Evolves `m0` with the LLS integrator, projects every step and streams it through
/// the residual accumulators. Returns the residuals and the final chart field.
pub fn equivalence_residuals(
    m0: &MagnetizationField,
    v: &CurrentField,
    cfg: &LlsConfig,
    t_end: f64,
    pole_guard: f64,
    coupling: CurrentCoupling,
) -> Result<(ResidualTriple, ComplexField)> {
    let mut pre = ResidualAccumulator::new(cfg.eps, cfg.dt, GlForm::PreFlip, coupling);
    let mut post = ResidualAccumulator::new(cfg.eps, cfg.dt, GlForm::PostFlip, coupling);
    let mut omitted = ResidualAccumulator::new(cfg.eps, cfg.dt, GlForm::PostFlip, CurrentCoupling::Omitted);
    let mut last = None;
    lls_evolve_with(m0, v, cfg, t_end, |s| {
        let u = project(&s.m, pole_guard)?;
        pre.push(s.time, u.clone(), v)?;
        post.push(s.time, u.clone(), v)?;
        omitted.push(s.time, u.clone(), v)?;
        last = Some(u);
        Ok(())
    })?;
    let triple = ResidualTriple {
        dt: cfg.dt,
        preflip: pre.finish(),
        postflip: post.finish(),
        postflip_omitted: omitted.finish(),
    };
    Ok((triple, last.expect("observer sees the initial state")))
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b > 0.0).then(|| a / b)
}

/// Runs [`equivalence_residuals`] at `cfg.dt` and, if `halving`, again at `cfg.dt / 2`.
pub fn check_equivalence(
    m0: &MagnetizationField,
    v: &CurrentField,
    cfg: &LlsConfig,
    t_end: f64,
    pole_guard: f64,
    coupling: CurrentCoupling,
    halving: bool,
) -> Result<(EquivalenceReport, ComplexField)> {
    let (first, last) = equivalence_residuals(m0, v, cfg, t_end, pole_guard, coupling)?;
    let mut runs = vec![first];
    if halving {
        let half = LlsConfig { dt: cfg.dt / 2.0, ..*cfg };
        runs.push(equivalence_residuals(m0, v, &half, t_end, pole_guard, coupling)?.0);
    }
    let hr = |f: fn(&ResidualTriple) -> f64| runs.get(1).and_then(|r| ratio(f(&runs[0]), f(r)));
    let report = EquivalenceReport {
        eps: cfg.eps,
        t_end,
        v_sup: v.sup_norm(),
        pole_guard,
        coupling,
        halving_ratio_preflip: hr(|r| r.preflip.relative),
        halving_ratio_postflip: hr(|r| r.postflip.relative),
        halving_ratio_omitted: hr(|r| r.postflip_omitted.relative),
        runs,
    };
    Ok((report, last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::random;
    use crate::stereographic::DEFAULT_POLE_GUARD;
    use std::f64::consts::PI;

    #[test]
    fn unforced_projection_satisfies_the_forward_equation() {
        let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
        let m0 = random::sphere_field(g, &mut random::rng(3), 0.2, 2.0);
        let cfg = LlsConfig::new(0.1, 1e-3);
        let (rep, _) = check_equivalence(
            &m0,
            &CurrentField::zero(g),
            &cfg,
            0.02,
            DEFAULT_POLE_GUARD,
            CurrentCoupling::Direct,
            true,
        )
        .unwrap();
        let r = &rep.runs[0];
        assert!(r.postflip.relative < 1e-3, "{}", r.postflip.relative);
        assert!((r.preflip.relative - 2.0).abs() < 0.05, "{}", r.preflip.relative);
        assert_eq!(rep.runs.len(), 2);
        assert!(rep.halving_ratio_postflip.unwrap().is_finite());
    }
}
