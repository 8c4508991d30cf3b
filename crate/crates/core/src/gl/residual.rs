//! Residuals of sampled trajectories against the Ginzburg–Landau equation in
//! both time orientations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use super::nonlinearity::{gl_nonlinearity, CurrentCoupling};
use crate::error::{LabError, Result};
use crate::field::{ComplexField, CurrentField, CurrentSlice, SpaceTimeField};
use crate::spectral::{gradient_from_spectral, to_physical, to_spectral};

/// Time orientation of the equation.
///
/// `PostFlip` is the forward equation `∂ₜu = (ε+i)Δu + J(u)` that the march
/// integrates; `PreFlip` is the same equation before the substitution `t → −t`,
/// whose right-hand side is the negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlForm {
    PreFlip,
    PostFlip,
}

/// Right-hand side of the chosen form at one time.
pub fn gl_rhs(
    u: &ComplexField,
    v: &CurrentSlice,
    eps: f64,
    form: GlForm,
    coupling: CurrentCoupling,
) -> Result<ComplexField> {
    let g = *u.grid();
    let spec = to_spectral(u);
    let grad = gradient_from_spectral(&spec);
    let phys = to_physical(u);
    let j = gl_nonlinearity(&phys, &grad, v, eps, coupling)?;
    let xi2 = g.xi_squared();
    let mut lap = spec.values().to_vec();
    for (i, z) in lap.iter_mut().enumerate() {
        *z *= if g.touches_nyquist(i) { 0.0 } else { -xi2[i] };
    }
    let lap = to_physical(&spec.with_values(lap, crate::field::Representation::Spectral));
    let c = Complex64::new(eps, 1.0);
    let sign = if form == GlForm::PostFlip { 1.0 } else { -1.0 };
    let out = lap.values().iter().zip(j.values()).map(|(l, jj)| (c * l + jj) * sign).collect();
    Ok(phys.with_values(out, crate::field::Representation::Physical))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `‖∂ₜu − RHS‖ / ‖∂ₜu‖` over interior slices (0 when both vanish).
    pub relative: f64,
    /// Space-time `L²` norm of the defect over the interior.
    pub absolute: f64,
    pub dudt_norm: f64,
    pub samples: usize,
}

/// Streams slices at uniform spacing and accumulates the centered-difference residual,
/// so long trajectories need only a three-slice window.
pub struct ResidualAccumulator {
    eps: f64,
    form: GlForm,
    coupling: CurrentCoupling,
    dt: f64,
    window: VecDeque<(f64, ComplexField)>,
    defect2: f64,
    dudt2: f64,
    samples: usize,
    weight: f64,
}

impl ResidualAccumulator {
    pub fn new(eps: f64, dt: f64, form: GlForm, coupling: CurrentCoupling) -> Self {
        ResidualAccumulator {
            eps,
            form,
            coupling,
            dt,
            window: VecDeque::with_capacity(3),
            defect2: 0.0,
            dudt2: 0.0,
            samples: 0,
            weight: 0.0,
        }
    }

    pub fn push(&mut self, t: f64, u: ComplexField, v: &CurrentField) -> Result<()> {
        if let Some((last, _)) = self.window.back() {
            if ((t - last) - self.dt).abs() > 1e-9 * self.dt.max(t.abs()) {
                return Err(LabError::Contract(format!(
                    "residual needs uniform spacing {}, got step {}",
                    self.dt,
                    t - last
                )));
            }
        }
        self.weight = u.grid().cell_volume() * self.dt;
        self.window.push_back((t, to_physical(&u)));
        if self.window.len() < 3 {
            return Ok(());
        }
        let (_, u0) = &self.window[0];
        let (t1, u1) = &self.window[1];
        let (_, u2) = &self.window[2];
        let rhs = gl_rhs(u1, v.at(*t1), self.eps, self.form, self.coupling)?;
        let inv = 1.0 / (2.0 * self.dt);
        for ((a, b), r) in u2.values().iter().zip(u0.values()).zip(rhs.values()) {
            let d = (a - b) * inv;
            self.dudt2 += d.norm_sqr();
            self.defect2 += (d - r).norm_sqr();
        }
        self.samples += 1;
        self.window.pop_front();
        Ok(())
    }

    pub fn finish(&self) -> ResidualReport {
        let relative = if self.dudt2 > 0.0 {
            (self.defect2 / self.dudt2).sqrt()
        } else if self.defect2 == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        ResidualReport {
            relative,
            absolute: (self.defect2 * self.weight).sqrt(),
            dudt_norm: (self.dudt2 * self.weight).sqrt(),
            samples: self.samples,
        }
    }
}

/// Residual of a stored trajectory against the chosen form.
pub fn gl_residual(
    u: &SpaceTimeField,
    v: &CurrentField,
    eps: f64,
    form: GlForm,
    coupling: CurrentCoupling,
) -> Result<ResidualReport> {
    if u.len() < 3 {
        return Err(LabError::Contract("residual needs at least three slices".into()));
    }
    u.grid().same_as(v.grid())?;
    let mut acc = ResidualAccumulator::new(eps, u.dt(), form, coupling);
    for (s, slice) in u.slices().iter().enumerate() {
        acc.push(s as f64 * u.dt(), slice.clone(), v)?;
    }
    Ok(acc.finish())
}

/// Relative residual against the equation before time reversal.
pub fn gl_residual_preflip(u: &SpaceTimeField, v: &CurrentField, eps: f64) -> Result<f64> {
    Ok(gl_residual(u, v, eps, GlForm::PreFlip, CurrentCoupling::default())?.relative)
}

/// Relative residual against the forward equation that the march integrates.
pub fn gl_residual_postflip(u: &SpaceTimeField, v: &CurrentField, eps: f64) -> Result<f64> {
    Ok(gl_residual(u, v, eps, GlForm::PostFlip, CurrentCoupling::default())?.relative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn zero_trajectory_has_zero_residual() {
        let g = TorusGrid::new(2, 8, 2.0 * PI).unwrap();
        let u = SpaceTimeField::zeros(g, 0.01, 5).unwrap();
        assert_eq!(gl_residual_preflip(&u, &CurrentField::zero(g), 0.1).unwrap(), 0.0);
    }

    #[test]
    fn small_linear_wave_fits_forward_equation() {
        let g = TorusGrid::new(1, 16, 2.0 * PI).unwrap();
        let eps = 0.1;
        let dt = 1e-3;
        let u = SpaceTimeField::from_fn(g, dt, 11, |t, x| {
            (Complex64::new(eps, 1.0) * (-t * 4.0)).exp() * Complex64::from_polar(1e-3, 2.0 * x[0])
        })
        .unwrap();
        let v = CurrentField::zero(g);
        assert!(gl_residual_postflip(&u, &v, eps).unwrap() < 1e-3);
        // the reversed-time equation has the opposite sign everywhere
        let pre = gl_residual_preflip(&u, &v, eps).unwrap();
        assert!((pre - 2.0).abs() < 1e-3);
    }

    #[test]
    fn uneven_spacing_is_rejected() {
        let g = TorusGrid::new(1, 8, 2.0 * PI).unwrap();
        let mut acc = ResidualAccumulator::new(0.1, 0.1, GlForm::PostFlip, CurrentCoupling::Direct);
        let v = CurrentField::zero(g);
        acc.push(0.0, ComplexField::zeros(g, crate::field::Representation::Physical), &v).unwrap();
        assert!(acc.push(0.3, ComplexField::zeros(g, crate::field::Representation::Physical), &v).is_err());
    }
}
