//! Fourier transforms and spectral differential operators on the torus.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::fft;
use crate::field::{ComplexField, Representation};
use crate::grid::TorusGrid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Unitary forward transform; the input must be in physical representation.
pub fn fft_forward(f: &ComplexField) -> Result<ComplexField> {
    if f.repr() != Representation::Physical {
        return Err(LabError::Contract("fft_forward expects a physical field".into()));
    }
    let g = *f.grid();
    let mut v = f.values().to_vec();
    fft::transform_nd(&mut v, g.dim(), g.n(), false);
    Ok(f.with_values(v, Representation::Spectral))
}

/// Unitary inverse transform; the input must be in spectral representation.
pub fn fft_inverse(f: &ComplexField) -> Result<ComplexField> {
    if f.repr() != Representation::Spectral {
        return Err(LabError::Contract("fft_inverse expects a spectral field".into()));
    }
    let g = *f.grid();
    let mut v = f.values().to_vec();
    fft::transform_nd(&mut v, g.dim(), g.n(), true);
    Ok(f.with_values(v, Representation::Physical))
}

pub fn to_spectral(f: &ComplexField) -> ComplexField {
    match f.repr() {
        Representation::Spectral => f.clone(),
        Representation::Physical => fft_forward(f).expect("physical input"),
    }
}

pub fn to_physical(f: &ComplexField) -> ComplexField {
    match f.repr() {
        Representation::Physical => f.clone(),
        Representation::Spectral => fft_inverse(f).expect("spectral input"),
    }
}

fn to_repr(f: ComplexField, repr: Representation) -> ComplexField {
    match repr {
        Representation::Physical => to_physical(&f),
        Representation::Spectral => to_spectral(&f),
    }
}

/// Pointwise product of spectral coefficients with `mult(flat_index)`.
pub fn apply_multiplier(f: &ComplexField, mult: impl Fn(usize) -> Complex64) -> ComplexField {
    let repr = f.repr();
    let mut s = to_spectral(f);
    for (i, z) in s.values_mut().iter_mut().enumerate() {
        *z *= mult(i);
    }
    to_repr(s, repr)
}

/// Zeroes every mode lying on a Nyquist plane (spectral input).
pub fn zero_nyquist(spec: &mut [Complex64], grid: &TorusGrid) {
    let n = grid.n();
    let half = n / 2;
    for (flat, z) in spec.iter_mut().enumerate() {
        let mut rem = flat;
        for _ in 0..grid.dim() {
            if rem % n == half {
                *z = Complex64::new(0.0, 0.0);
                break;
            }
            rem /= n;
        }
    }
}

/// Spectral gradient `(iξ_1 f̂, …, iξ_n f̂)`, returned in the input's representation.
pub fn gradient(f: &ComplexField) -> Vec<ComplexField> {
    let repr = f.repr();
    let spec = to_spectral(f);
    gradient_from_spectral(&spec).into_iter().map(|c| to_repr(c, repr)).collect()
}

/// Gradient components in physical space from spectral coefficients.
pub fn gradient_from_spectral(spec: &ComplexField) -> Vec<ComplexField> {
    let g = *spec.grid();
    let k = g.axis_wavenumbers();
    (0..g.dim())
        .map(|axis| {
            let stride = g.stride(axis);
            let n = g.n();
            let mut v: Vec<Complex64> =
                spec.values().iter().enumerate().map(|(flat, z)| z * I * k[(flat / stride) % n]).collect();
            zero_nyquist(&mut v, &g);
            fft::transform_nd(&mut v, g.dim(), n, true);
            spec.with_values(v, Representation::Physical)
        })
        .collect()
}

/// Spectral Laplacian (multiplier `-|ξ|²`), returned in the input's representation.
pub fn laplacian(f: &ComplexField) -> ComplexField {
    let repr = f.repr();
    let g = *f.grid();
    let xi2 = g.xi_squared();
    let mut s = to_spectral(f);
    for (z, &k2) in s.values_mut().iter_mut().zip(&xi2) {
        *z *= -k2;
    }
    zero_nyquist(s.values_mut(), &g);
    to_repr(s, repr)
}

/// Fourier multiplier of `e^{(ε+i)tΔ}`, i.e. `exp(-(ε+i) t |ξ|²)`.
pub fn semigroup_multiplier(grid: &TorusGrid, t: f64, eps: f64) -> Vec<Complex64> {
    let z = Complex64::new(eps, 1.0) * (-t);
    grid.xi_squared().into_iter().map(|k2| (z * k2).exp()).collect()
}

fn check_semigroup_args(t: f64, eps: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(LabError::NegativeTime(t));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(LabError::Contract(format!("damping must lie in [0, 1], got {eps}")));
    }
    Ok(())
}

/// Applies the dissipative Schrödinger semigroup `e^{(ε+i)tΔ}`.
///
/// `eps = 0` gives the unitary Schrödinger group. Backward times are rejected.
pub fn semigroup_apply(f: &ComplexField, t: f64, eps: f64) -> Result<ComplexField> {
    check_semigroup_args(t, eps)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let m = semigroup_multiplier(f.grid(), t, eps);
    Ok(apply_multiplier(f, |i| m[i]))
}

/// Whether a per-axis index survives the 2/3 truncation.
pub fn dealias_keeps(grid: &TorusGrid, i: usize) -> bool {
    3 * grid.mode(i).unsigned_abs() as usize <= grid.n()
}

/// Per-mode flags of the 2/3 truncation.
pub fn dealias_mask(grid: &TorusGrid) -> Vec<bool> {
    let keep: Vec<bool> = (0..grid.n()).map(|i| dealias_keeps(grid, i)).collect();
    (0..grid.len())
        .map(|flat| {
            let c = grid.coords(flat);
            (0..grid.dim()).all(|a| keep[c[a]])
        })
        .collect()
}

/// 2/3-rule truncation: keeps modes with `|m_a| <= N/3` on every axis.
pub fn dealias(f: &ComplexField) -> ComplexField {
    let repr = f.repr();
    let g = *f.grid();
    let keep = dealias_mask(&g);
    let mut s = to_spectral(f);
    for (z, k) in s.values_mut().iter_mut().zip(keep) {
        if !k {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    to_repr(s, repr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mode1(g: TorusGrid) -> ComplexField {
        let k = g.fundamental();
        ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, k * x[0]))
    }

    #[test]
    fn constant_field_has_single_dc_coefficient() {
        let g = TorusGrid::new(1, 8, 1.0).unwrap();
        let s = fft_forward(&ComplexField::constant(g, Complex64::new(1.0, 0.0))).unwrap();
        assert!((s.values()[0] - Complex64::new(8f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(s.values()[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn pure_mode_lands_on_index_one() {
        let g = TorusGrid::new(1, 16, 3.0).unwrap();
        let s = fft_forward(&mode1(g)).unwrap();
        for (i, z) in s.values().iter().enumerate() {
            if i == 1 {
                assert!((z.norm() - 4.0).abs() < 1e-12);
            } else {
                assert!(z.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn wrong_representation_is_rejected() {
        let g = TorusGrid::new(1, 8, 1.0).unwrap();
        let s = ComplexField::zeros(g, Representation::Spectral);
        assert!(fft_forward(&s).is_err());
        assert!(fft_inverse(&ComplexField::zeros(g, Representation::Physical)).is_err());
    }

    #[test]
    fn gradient_of_pure_mode() {
        let g = TorusGrid::new(2, 16, 2.0).unwrap();
        let f = mode1(g);
        let grad = gradient(&f);
        let k = g.fundamental();
        for (a, b) in grad[0].values().iter().zip(f.values()) {
            assert!((a - b * Complex64::new(0.0, k)).norm() < 1e-12);
        }
        assert!(grad[1].max_abs() < 1e-12);
    }

    #[test]
    fn gradient_and_laplacian_of_constant_vanish() {
        let g = TorusGrid::new(3, 8, 1.0).unwrap();
        let f = ComplexField::constant(g, Complex64::new(2.0, -1.0));
        assert!(gradient(&f).iter().all(|c| c.max_abs() < 1e-13));
        assert!(laplacian(&f).max_abs() < 1e-13);
    }

    #[test]
    fn sine_derivative_matches_cosine() {
        let g = TorusGrid::new(3, 16, 5.0).unwrap();
        let k = g.fundamental();
        let f = ComplexField::from_fn(g, |x| Complex64::new((k * x[0]).sin(), 0.0));
        let d = &gradient(&f)[0];
        for (i, z) in d.values().iter().enumerate() {
            let x = g.position(i);
            assert!((z - Complex64::new(k * (k * x[0]).cos(), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn laplacian_of_pure_mode() {
        let g = TorusGrid::new(1, 32, 2.0 * PI).unwrap();
        let f = mode1(g);
        let l = laplacian(&f);
        for (a, b) in l.values().iter().zip(f.values()) {
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn semigroup_single_mode_is_exact() {
        let g = TorusGrid::new(1, 32, 2.0 * PI).unwrap();
        let f = mode1(g);
        let out = semigroup_apply(&f, 1.0, 0.1).unwrap();
        let factor = Complex64::new(-0.1, -1.0).exp();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b * factor).norm() < 1e-10);
        }
    }

    #[test]
    fn semigroup_rejects_negative_time_and_is_identity_at_zero() {
        let g = TorusGrid::new(1, 8, 1.0).unwrap();
        let f = mode1(g);
        assert!(matches!(semigroup_apply(&f, -0.1, 0.1), Err(LabError::NegativeTime(_))));
        assert_eq!(semigroup_apply(&f, 0.0, 0.1).unwrap(), f);
    }

    #[test]
    fn dealias_removes_top_third() {
        let g = TorusGrid::new(1, 12usize.next_power_of_two(), 1.0).unwrap();
        let kept: Vec<i64> = (0..g.n()).filter(|&i| dealias_keeps(&g, i)).map(|i| g.mode(i)).collect();
        assert_eq!(kept, vec![0, 1, 2, 3, 4, 5, -5, -4, -3, -2, -1]);
    }
}
