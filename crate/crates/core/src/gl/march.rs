//! Exponential time differencing for `∂ₜu = (ε+i)Δu + J(u)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::nonlinearity::{gl_nonlinearity, CurrentCoupling};
use crate::error::{LabError, Result};
use crate::field::{ComplexField, CurrentField, Representation, SpaceTimeField};
use crate::grid::TorusGrid;
use crate::spectral::{dealias_mask, gradient_from_spectral, to_physical, to_spectral};

pub const DEFAULT_BLOWUP_CAP: f64 = 10.0;
/// Bound on `dt · √n · ‖v‖_∞ · |ξ|_max` for the explicit transport terms.
pub const TRANSPORT_CFL: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtdScheme {
    Etd1,
    #[default]
    EtdRk2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarchConfig {
    pub eps: f64,
    pub dt: f64,
    pub scheme: EtdScheme,
    pub coupling: CurrentCoupling,
    pub blowup_cap: f64,
    /// Store every `sample_every`-th step.
    pub sample_every: usize,
}

impl MarchConfig {
    pub fn new(eps: f64, dt: f64) -> Self {
        MarchConfig {
            eps,
            dt,
            scheme: EtdScheme::default(),
            coupling: CurrentCoupling::default(),
            blowup_cap: DEFAULT_BLOWUP_CAP,
            sample_every: 1,
        }
    }

    pub fn transport_bound(&self, grid: &TorusGrid, v: &CurrentField) -> f64 {
        let kmax = grid.fundamental() * (grid.n() / 2) as f64;
        let speed = v.sup_norm() * (grid.dim() as f64).sqrt() * kmax;
        if speed == 0.0 {
            f64::INFINITY
        } else {
            TRANSPORT_CFL / speed
        }
    }
}

/// `φ₁(z) = (e^z − 1)/z` and `φ₂(z) = (e^z − 1 − z)/z²`, by series near zero.
pub fn phi12(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.1 {
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut p2 = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        // term = z^k / k!
        for k in 0..16 {
            p1 += term / (k as f64 + 1.0);
            p2 += term / ((k as f64 + 1.0) * (k as f64 + 2.0));
            term *= z / (k as f64 + 1.0);
        }
        (p1, p2)
    } else {
        let e = z.exp();
        ((e - 1.0) / z, (e - 1.0 - z) / (z * z))
    }
}

/// Per-mode coefficients of one ETD step of size `h`.
pub(crate) struct EtdCoefficients {
    pub(crate) decay: Vec<Complex64>,
    pub(crate) phi1: Vec<Complex64>,
    pub(crate) phi2: Vec<Complex64>,
    pub(crate) keep: Vec<bool>,
}

impl EtdCoefficients {
    pub(crate) fn new(grid: &TorusGrid, eps: f64, h: f64) -> Self {
        let c = Complex64::new(eps, 1.0);
        let mut decay = Vec::with_capacity(grid.len());
        let mut phi1 = Vec::with_capacity(grid.len());
        let mut phi2 = Vec::with_capacity(grid.len());
        for k2 in grid.xi_squared() {
            let z = -c * k2 * h;
            let (p1, p2) = phi12(z);
            decay.push(z.exp());
            phi1.push(p1 * h);
            phi2.push(p2 * h);
        }
        EtdCoefficients { decay, phi1, phi2, keep: dealias_mask(grid) }
    }
}

/// Dealiased spectral nonlinearity `P_{2/3} Ĵ(u)` from spectral `u`.
pub(crate) fn nonlinear_spectral(
    spec: &ComplexField,
    v: &CurrentField,
    t: f64,
    eps: f64,
    coupling: CurrentCoupling,
    keep: &[bool],
) -> Result<Vec<Complex64>> {
    let grad = gradient_from_spectral(spec);
    let phys = to_physical(spec);
    let j = gl_nonlinearity(&phys, &grad, v.at(t), eps, coupling)?;
    let mut out = to_spectral(&j).into_values();
    for (z, &k) in out.iter_mut().zip(keep) {
        if !k {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

fn check_blowup(spec: &ComplexField, t: f64, cap: f64) -> Result<ComplexField> {
    let phys = to_physical(spec);
    let sup = phys.max_abs();
    if !sup.is_finite() || sup > cap {
        return Err(LabError::Blowup { time: t, sup, cap });
    }
    Ok(phys)
}

/// Integrates from `u0` to `t_end` and returns the sampled trajectory (first slice `u0`).
pub fn gl_march(u0: &ComplexField, v: &CurrentField, t_end: f64, cfg: &MarchConfig) -> Result<SpaceTimeField> {
    let g = *u0.grid();
    g.same_as(v.grid())?;
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(LabError::Contract(format!("time step must be positive, got {}", cfg.dt)));
    }
    if t_end < 0.0 {
        return Err(LabError::NegativeTime(t_end));
    }
    if !(0.0..=1.0).contains(&cfg.eps) {
        return Err(LabError::Contract(format!("damping must lie in [0, 1], got {}", cfg.eps)));
    }
    let bound = cfg.transport_bound(&g, v);
    if cfg.dt > bound {
        return Err(LabError::StepTooLarge { dt: cfg.dt, bound });
    }
    let steps = (t_end / cfg.dt).round() as usize;
    if (steps as f64 * cfg.dt - t_end).abs() > 1e-9 * t_end.max(cfg.dt) {
        return Err(LabError::Contract(format!("t_end {t_end} is not a multiple of dt {}", cfg.dt)));
    }
    if steps == 0 {
        return Err(LabError::Contract("march needs at least one step".into()));
    }
    let every = cfg.sample_every.max(1);
    if !steps.is_multiple_of(every) {
        return Err(LabError::Contract(format!("{steps} steps are not a multiple of sample_every {every}")));
    }
    let co = EtdCoefficients::new(&g, cfg.eps, cfg.dt);
    let mut spec = to_spectral(u0);
    let mut slices = vec![to_physical(u0)];
    let h = cfg.dt;
    for step in 0..steps {
        let t = step as f64 * h;
        let n0 = nonlinear_spectral(&spec, v, t, cfg.eps, cfg.coupling, &co.keep)?;
        let mut a: Vec<Complex64> =
            spec.values().iter().enumerate().map(|(i, z)| co.decay[i] * z + co.phi1[i] * n0[i]).collect();
        if cfg.scheme == EtdScheme::EtdRk2 {
            let a_field = spec.with_values(a.clone(), Representation::Spectral);
            let na = nonlinear_spectral(&a_field, v, t + h, cfg.eps, cfg.coupling, &co.keep)?;
            for (i, z) in a.iter_mut().enumerate() {
                *z += co.phi2[i] * (na[i] - n0[i]);
            }
        }
        spec = spec.with_values(a, Representation::Spectral);
        let phys = check_blowup(&spec, t + h, cfg.blowup_cap)?;
        if (step + 1) % every == 0 {
            slices.push(phys);
        }
    }
    SpaceTimeField::new(g, h * every as f64, slices)
}
