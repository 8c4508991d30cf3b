//! Stereographic chart `u = (m₁ + i m₂)/(1 + m₃)` from `S² \ {south pole}` to `C`.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::field::{norm3, ComplexField, MagnetizationField, Representation, SPHERE_TOL};
use crate::spectral::to_physical;

pub const DEFAULT_POLE_GUARD: f64 = 1e-3;

/// Projects a magnetization field to the complex chart variable.
///
/// Each vector is renormalized to unit length first. Fails if any point is
/// within `pole_guard` of the south pole or off the sphere by more than
/// [`SPHERE_TOL`].
pub fn project(m: &MagnetizationField, pole_guard: f64) -> Result<ComplexField> {
    project_with_tol(m, pole_guard, SPHERE_TOL)
}

pub fn project_with_tol(m: &MagnetizationField, pole_guard: f64, sphere_tol: f64) -> Result<ComplexField> {
    if !(pole_guard > 0.0) {
        return Err(LabError::Contract(format!("pole guard must be positive, got {pole_guard}")));
    }
    m.check_sphere(sphere_tol)?;
    let mut worst = (0usize, f64::INFINITY);
    let values: Vec<Complex64> = m
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let r = norm3(v);
            let (m1, m2, m3) = (v[0] / r, v[1] / r, v[2] / r);
            let denom = 1.0 + m3;
            if denom < worst.1 {
                worst = (i, denom);
            }
            Complex64::new(m1, m2) / denom
        })
        .collect();
    if worst.1 < pole_guard {
        return Err(LabError::PoleProximity { index: worst.0, value: worst.1, guard: pole_guard });
    }
    ComplexField::new(*m.grid(), values, Representation::Physical)
}

/// Pointwise inverse of [`project`]; total on `C`.
pub fn unproject(u: &ComplexField) -> MagnetizationField {
    let u = to_physical(u);
    let values = u.values().iter().map(|&z| unproject_point(z)).collect();
    MagnetizationField::new_unchecked(*u.grid(), values).expect("same grid")
}

pub fn unproject_point(z: Complex64) -> [f64; 3] {
    let a = z.norm_sqr();
    let d = 1.0 + a;
    [2.0 * z.re / d, 2.0 * z.im / d, (1.0 - a) / d]
}
