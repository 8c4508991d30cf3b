//! Mixed and anisotropic space-time Lebesgue norms on sampled fields.

use crate::error::{LabError, Result};
use crate::field::SpaceTimeField;

/// Validates a time exponent (`1`, `2` or `∞`).
pub fn check_time_exponent(p: f64) -> Result<()> {
    if p == 1.0 || p == 2.0 || p == f64::INFINITY {
        Ok(())
    } else {
        Err(LabError::UnsupportedExponent(format!("time exponent {p} not in {{1, 2, inf}}")))
    }
}

/// Validates a space exponent; `6` is the Strichartz endpoint and only exists in three dimensions.
pub fn check_space_exponent(q: f64, dim: usize) -> Result<()> {
    if q == 1.0 || q == 2.0 || q == f64::INFINITY || (q == 6.0 && dim == 3) {
        Ok(())
    } else {
        Err(LabError::UnsupportedExponent(format!("space exponent {q} unsupported in dimension {dim}")))
    }
}

/// Trapezoid weights for `count` samples spaced by `dt`.
pub fn trapezoid_weights(count: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; count];
    if count > 1 {
        w[0] *= 0.5;
        w[count - 1] *= 0.5;
    }
    w
}

/// `|a|^p` with the common integer exponents kept off the `powf` path.
#[inline]
fn abs_pow(a: f64, p: f64) -> f64 {
    let a = a.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 6.0 {
        let a2 = a * a;
        a2 * a2 * a2
    } else {
        a.powf(p)
    }
}

/// `(Σ w_i |a_i|^p)^{1/p}`, or `max |a_i|` when `p = ∞`.
fn weighted_norm(values: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    if p == f64::INFINITY {
        return values.map(|(_, a)| a.abs()).fold(0.0, f64::max);
    }
    let s: f64 = values.map(|(w, a)| w * abs_pow(a, p)).sum();
    s.powf(1.0 / p)
}

/// `‖u‖_{L^p_t L^q_x}`: Riemann sum in space, trapezoid rule in time.
pub fn norm_mixed(u: &SpaceTimeField, p: f64, q: f64) -> Result<f64> {
    check_time_exponent(p)?;
    check_space_exponent(q, u.grid().dim())?;
    let cell = u.grid().cell_volume();
    let inner: Vec<f64> =
        u.slices().iter().map(|s| weighted_norm(s.values().iter().map(|z| (cell, z.norm_sqr().sqrt())), q)).collect();
    let w = trapezoid_weights(u.len(), u.dt());
    Ok(weighted_norm(w.into_iter().zip(inner), p))
}

/// `‖u‖_{L^{p,q}_{e_i}}`: outer `L^p` along `x_i`, inner `L^q` over the remaining
/// space coordinates and time.
pub fn norm_anisotropic(u: &SpaceTimeField, p: f64, q: f64, axis: usize) -> Result<f64> {
    let g = *u.grid();
    if axis >= g.dim() {
        return Err(LabError::Contract(format!("axis {axis} out of range for dimension {}", g.dim())));
    }
    check_time_exponent(p)?;
    check_time_exponent(q)?;
    let n = g.n();
    let stride = g.stride(axis);
    let h = g.spacing();
    let transverse = g.cell_volume() / h;
    let tw = trapezoid_weights(u.len(), u.dt());
    let mut inner = vec![0.0f64; n];
    for (s, slice) in u.slices().iter().enumerate() {
        let w = tw[s] * transverse;
        for (f, z) in slice.values().iter().enumerate() {
            let j = (f / stride) % n;
            let a = z.norm_sqr().sqrt();
            if q == f64::INFINITY {
                inner[j] = inner[j].max(a);
            } else {
                inner[j] += w * abs_pow(a, q);
            }
        }
    }
    if q != f64::INFINITY {
        inner.iter_mut().for_each(|v| *v = v.powf(1.0 / q));
    }
    Ok(weighted_norm(inner.into_iter().map(|v| (h, v)), p))
}
