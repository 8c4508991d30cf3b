//! Seeded random test data. All randomness comes from a ChaCha20 stream seeded by a `u64`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::dyadic::bump::chi;
use crate::error::Result;
use crate::field::{ComplexField, CurrentField, CurrentSlice, MagnetizationField, Representation};
use crate::grid::TorusGrid;
use crate::spectral::to_physical;
use crate::stereographic::unproject;

/// Name recorded in every report that consumed random data.
pub const GENERATOR: &str = "chacha20/rand_chacha-0.9/seed_from_u64";

pub type LabRng = ChaCha20Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `index` of a seeded run.
pub fn substream(seed: u64, index: u64) -> LabRng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(index + 1);
    r
}

fn gaussian(rng: &mut LabRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Gaussian field with spectral weights `weight(|ξ|)`; Nyquist planes are left empty.
pub fn gaussian_weighted(grid: TorusGrid, rng: &mut LabRng, weight: impl Fn(f64) -> f64) -> ComplexField {
    let norms = grid.xi_norms();
    let values = (0..grid.len())
        .map(|i| {
            let z = gaussian(rng);
            let w = if grid.touches_nyquist(i) { 0.0 } else { weight(norms[i]) };
            z * w
        })
        .collect();
    let spec = ComplexField::new(grid, values, Representation::Spectral).expect("layout matches grid");
    to_physical(&spec)
}

/// Flat-spectrum Gaussian field supported on `lo <= |ξ| <= hi`.
pub fn band_limited(grid: TorusGrid, rng: &mut LabRng, lo: f64, hi: f64) -> ComplexField {
    gaussian_weighted(grid, rng, |r| if r >= lo && r <= hi { 1.0 } else { 0.0 })
}

/// Gaussian field localized to shell `k` (spectral weight `χ_k`).
pub fn shell_localized(grid: TorusGrid, rng: &mut LabRng, k: i32) -> ComplexField {
    gaussian_weighted(grid, rng, |r| chi(k, r))
}

/// Real band-limited field (real part of a band-limited complex field).
pub fn real_band_limited(grid: TorusGrid, rng: &mut LabRng, lo: f64, hi: f64) -> Vec<f64> {
    band_limited(grid, rng, lo, hi).values().iter().map(|z| z.re).collect()
}

/// Rescales so that `max |f| = amplitude` (zero fields are returned unchanged).
pub fn with_sup(f: &ComplexField, amplitude: f64) -> ComplexField {
    let m = f.max_abs();
    if m == 0.0 {
        return f.clone();
    }
    f.scale(Complex64::new(amplitude / m, 0.0))
}

pub fn with_l2(f: &ComplexField, norm: f64) -> ComplexField {
    let m = f.l2_norm();
    if m == 0.0 {
        return f.clone();
    }
    f.scale(Complex64::new(norm / m, 0.0))
}

/// Uniformly distributed point on the unit sphere.
pub fn unit_vector(rng: &mut LabRng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Smooth sphere field obtained by unprojecting a band-limited chart field with
/// `max |u| = radius`; then `m₃ >= (1 − radius²)/(1 + radius²)`.
pub fn sphere_field(grid: TorusGrid, rng: &mut LabRng, radius: f64, band: f64) -> MagnetizationField {
    let u = with_sup(&band_limited(grid, rng, 0.0, band), radius);
    unproject(&u)
}

/// Perturbation of the north pole: `m = (w₁, w₂, 1 + w₃)/|·|` with `max |w| = amplitude`.
pub fn perturbed_north(grid: TorusGrid, rng: &mut LabRng, amplitude: f64, band: f64) -> Result<MagnetizationField> {
    let w: Vec<Vec<f64>> = (0..3).map(|_| real_band_limited(grid, rng, 0.0, band)).collect();
    let sup = (0..grid.len()).map(|i| (w[0][i].powi(2) + w[1][i].powi(2) + w[2][i].powi(2)).sqrt()).fold(0.0, f64::max);
    let s = if sup > 0.0 { amplitude / sup } else { 0.0 };
    let values = (0..grid.len())
        .map(|i| {
            let v = [s * w[0][i], s * w[1][i], 1.0 + s * w[2][i]];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        })
        .collect();
    MagnetizationField::new_unchecked(grid, values)
}

/// Time-independent smooth current with `sup |v| = amplitude`.
pub fn smooth_current(grid: TorusGrid, rng: &mut LabRng, amplitude: f64, band: f64) -> Result<CurrentField> {
    let comps: Vec<Vec<f64>> = (0..grid.dim()).map(|_| real_band_limited(grid, rng, 0.0, band)).collect();
    let sup = (0..grid.len()).map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let s = if sup > 0.0 { amplitude / sup } else { 0.0 };
    let components = comps.into_iter().map(|c| c.into_iter().map(|x| x * s).collect()).collect();
    CurrentField::from_slices(grid, vec![CurrentSlice { time: 0.0, components }])
}
