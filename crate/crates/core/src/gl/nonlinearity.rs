//! Nonlinearity `J = J₁ + J₂ + J₃` of the derivative Ginzburg–Landau equation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{ComplexField, CurrentSlice, Representation};
use crate::spectral::{gradient_from_spectral, to_spectral};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// How the current couples into the third-order term `J₃`.
///
/// `Conjugate` builds `F` from `(v·∇)ū`, `Direct` from `(v·∇)u`. `Omitted` drops
/// `J₃` entirely; it is the equation satisfied exactly by the chart image of an
/// LLS trajectory and serves as a diagnostic reference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurrentCoupling {
    Conjugate,
    #[default]
    Direct,
    Omitted,
}

impl CurrentCoupling {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "conjugate" => Ok(CurrentCoupling::Conjugate),
            "direct" => Ok(CurrentCoupling::Direct),
            "omitted" => Ok(CurrentCoupling::Omitted),
            other => Err(LabError::Contract(format!(
                "unknown current coupling {other:?} (expected conjugate, direct or omitted)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CurrentCoupling::Conjugate => "conjugate",
            CurrentCoupling::Direct => "direct",
            CurrentCoupling::Omitted => "omitted",
        }
    }
}

/// The three pieces of `J`, pointwise in physical space.
#[derive(Clone, Debug)]
pub struct NonlinearParts {
    pub j1: ComplexField,
    pub j2: ComplexField,
    pub j3: ComplexField,
}

impl NonlinearParts {
    pub fn total(&self) -> ComplexField {
        let v =
            self.j1.values().iter().zip(self.j2.values()).zip(self.j3.values()).map(|((a, b), c)| a + b + c).collect();
        self.j1.with_values(v, Representation::Physical)
    }
}

/// Pointwise values of `(J₁, J₂, J₃)` at one grid point.
///
/// `grad` holds `∂ᵢu`, `vel` holds `vᵢ`, both of length `dim`.
pub fn nonlinearity_point(
    u: Complex64,
    grad: &[Complex64],
    vel: &[f64],
    eps: f64,
    coupling: CurrentCoupling,
) -> (Complex64, Complex64, Complex64) {
    let ub = u.conj();
    let abs2 = u.norm_sqr();
    let a = 1.0 + abs2;
    let vgu: Complex64 = grad.iter().zip(vel).map(|(g, v)| g * v).sum();
    let grad2: Complex64 = grad.iter().map(|g| g * g).sum();
    let j1 = -(1.0 + I) * vgu;
    let j2 = -2.0 * Complex64::new(eps, 1.0) * ub * grad2 / a;
    let j3 = match coupling {
        CurrentCoupling::Omitted => Complex64::new(0.0, 0.0),
        _ => {
            let transported = if coupling == CurrentCoupling::Conjugate { vgu.conj() } else { vgu };
            let f = 2.0 * (1.0 + ub * ub) * (1.0 - abs2) * transported / a;
            let h = 4.0 * vgu * (ub * ub + abs2) / a;
            -(f.im - I * h.re) / a
        }
    };
    (j1, j2, j3)
}

fn check_inputs(u: &ComplexField, grad_u: &[ComplexField], v: &CurrentSlice) -> Result<()> {
    let g = u.grid();
    if u.repr() != Representation::Physical {
        return Err(LabError::Contract("nonlinearity expects u in physical space".into()));
    }
    if grad_u.len() != g.dim() || v.components.len() != g.dim() {
        return Err(LabError::Contract("gradient/current dimension does not match grid".into()));
    }
    for gr in grad_u {
        gr.grid().same_as(g)?;
        if gr.repr() != Representation::Physical {
            return Err(LabError::Contract("gradient components must be physical".into()));
        }
    }
    if v.components.iter().any(|c| c.len() != g.len()) {
        return Err(LabError::GridMismatch("current slice does not match grid".into()));
    }
    Ok(())
}

/// `(J₁, J₂, J₃)` from `u`, its gradient and one current slice.
pub fn gl_nonlinear_parts(
    u: &ComplexField,
    grad_u: &[ComplexField],
    v: &CurrentSlice,
    eps: f64,
    coupling: CurrentCoupling,
) -> Result<NonlinearParts> {
    check_inputs(u, grad_u, v)?;
    let dim = u.grid().dim();
    let len = u.grid().len();
    let mut j1 = Vec::with_capacity(len);
    let mut j2 = Vec::with_capacity(len);
    let mut j3 = Vec::with_capacity(len);
    let mut grad = vec![Complex64::new(0.0, 0.0); dim];
    let mut vel = vec![0.0; dim];
    for (p, &up) in u.values().iter().enumerate() {
        for a in 0..dim {
            grad[a] = grad_u[a].values()[p];
            vel[a] = v.components[a][p];
        }
        let (a1, a2, a3) = nonlinearity_point(up, &grad, &vel, eps, coupling);
        j1.push(a1);
        j2.push(a2);
        j3.push(a3);
    }
    Ok(NonlinearParts {
        j1: u.with_values(j1, Representation::Physical),
        j2: u.with_values(j2, Representation::Physical),
        j3: u.with_values(j3, Representation::Physical),
    })
}

/// `J(u)` given `u` and its gradient.
pub fn gl_nonlinearity(
    u: &ComplexField,
    grad_u: &[ComplexField],
    v: &CurrentSlice,
    eps: f64,
    coupling: CurrentCoupling,
) -> Result<ComplexField> {
    check_inputs(u, grad_u, v)?;
    let dim = u.grid().dim();
    let mut grad = vec![Complex64::new(0.0, 0.0); dim];
    let mut vel = vec![0.0; dim];
    let out = u
        .values()
        .iter()
        .enumerate()
        .map(|(p, &up)| {
            for a in 0..dim {
                grad[a] = grad_u[a].values()[p];
                vel[a] = v.components[a][p];
            }
            let (a1, a2, a3) = nonlinearity_point(up, &grad, &vel, eps, coupling);
            a1 + a2 + a3
        })
        .collect();
    Ok(u.with_values(out, Representation::Physical))
}

/// `J(u)` with the gradient computed spectrally; returns the physical field and `∇u`.
pub fn gl_nonlinearity_of(
    u: &ComplexField,
    v: &CurrentSlice,
    eps: f64,
    coupling: CurrentCoupling,
) -> Result<ComplexField> {
    let spec = to_spectral(u);
    let grad = gradient_from_spectral(&spec);
    let phys = crate::spectral::to_physical(u);
    gl_nonlinearity(&phys, &grad, v, eps, coupling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CurrentField;
    use crate::grid::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_fields_give_zero() {
        let g = TorusGrid::new(2, 8, 2.0 * PI).unwrap();
        let u = ComplexField::constant(g, Complex64::new(0.3, -0.2));
        for v in [CurrentField::zero(g), CurrentField::constant(g, &[0.4, -1.0]).unwrap()] {
            for c in [CurrentCoupling::Conjugate, CurrentCoupling::Direct] {
                let j = gl_nonlinearity_of(&u, v.at(0.0), 0.2, c).unwrap();
                assert!(j.max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn couplings_agree_when_transport_is_real() {
        // (v·∇)u real-valued makes the two F conventions coincide
        let u = Complex64::new(0.2, 0.1);
        let grad = [Complex64::new(0.5, 0.0)];
        let a = nonlinearity_point(u, &grad, &[0.3], 0.1, CurrentCoupling::Conjugate);
        let b = nonlinearity_point(u, &grad, &[0.3], 0.1, CurrentCoupling::Direct);
        assert!((a.2 - b.2).norm() < 1e-15);
        let c = nonlinearity_point(u, &grad, &[0.3], 0.1, CurrentCoupling::Omitted);
        assert_eq!(c.2, Complex64::new(0.0, 0.0));
        assert_eq!(a.0, c.0);
    }
}
