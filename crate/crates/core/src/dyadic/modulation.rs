//! Modulation (distance to the paraboloid `τ = −|ξ|²`) decomposition of sampled
//! space-time fields, and the Bourgain-type norms built on it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::bump::{chi, chi_leq};
use crate::error::{LabError, Result};
use crate::fft::{transform_nd, transform_strided};
use crate::field::{ComplexField, Representation, SpaceTimeField};
use crate::grid::TorusGrid;

/// Fraction of the window, at each end, covered by the cosine taper.
pub const TAPER_FRACTION: f64 = 0.1;
pub const MIN_SLICES: usize = 8;
pub const MIN_SHELLS: usize = 4;

/// Cosine taper: zero at both ends, one on the central 80% of the window.
pub fn taper_weights(count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![1.0; count];
    }
    let last = (count - 1) as f64;
    (0..count)
        .map(|s| {
            let r = (s as f64 / last).min(1.0 - s as f64 / last);
            if r >= TAPER_FRACTION {
                1.0
            } else {
                0.5 * (1.0 - (PI * r / TAPER_FRACTION).cos())
            }
        })
        .collect()
}

/// Resolvable modulation shells of a time window.
///
/// The lowest shell `j_min` is the low-pass piece `Q_{≤j_min}`; it sits at the
/// frequency-discretization floor `2Δτ`. Modulations are wrapped into the
/// Nyquist band `[−π/dt, π/dt)`, which the top shell `j_max` covers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulationShells {
    pub dt: f64,
    pub count: usize,
    pub dtau: f64,
    pub j_min: i32,
    pub j_max: i32,
}

impl ModulationShells {
    pub fn new(count: usize, dt: f64) -> Result<Self> {
        if count < MIN_SLICES {
            return Err(LabError::Resolution(format!(
                "modulation decomposition needs at least {MIN_SLICES} time slices, got {count}"
            )));
        }
        let dtau = 2.0 * PI / (count as f64 * dt);
        let j_min = (2.0 * dtau).log2().ceil() as i32;
        let j_max = ((PI / dt) / 1.25).log2().ceil() as i32;
        Ok(ModulationShells { dt, count, dtau, j_min, j_max: j_max.max(j_min) })
    }

    /// Errors unless at least `MIN_SHELLS` shells are resolvable.
    pub fn require_resolved(&self) -> Result<()> {
        if self.shell_count() < MIN_SHELLS {
            return Err(LabError::Resolution(format!(
                "only {} modulation shells resolvable, need {MIN_SHELLS}; lengthen the window or add slices",
                self.shell_count()
            )));
        }
        Ok(())
    }

    pub fn shell_count(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn tau(&self, m: usize) -> f64 {
        let c = self.count;
        let mode = if m <= (c - 1) / 2 { m as f64 } else { m as f64 - c as f64 };
        self.dtau * mode
    }

    /// `τ + |ξ|²` wrapped into `[−π/dt, π/dt)`.
    pub fn modulation(&self, tau: f64, xi2: f64) -> f64 {
        let period = 2.0 * PI / self.dt;
        let mu = tau + xi2;
        mu - period * (mu / period + 0.5).floor()
    }

    pub fn weight(&self, j: i32, mu: f64) -> f64 {
        if j < self.j_min || j > self.j_max {
            0.0
        } else if j == self.j_min {
            chi_leq(j, mu.abs())
        } else {
            chi(j, mu.abs())
        }
    }
}

/// Unitary space-time Fourier transform of a tapered field; layout `[τ-index][ξ-index]`.
#[derive(Clone, Debug)]
pub struct SpaceTimeSpectrum {
    grid: TorusGrid,
    shells: ModulationShells,
    data: Vec<Complex64>,
    xi2: Vec<f64>,
}

impl SpaceTimeSpectrum {
    pub fn new(u: &SpaceTimeField) -> Result<Self> {
        let grid = *u.grid();
        let spectra = u
            .slices()
            .iter()
            .map(|s| {
                let mut v = s.values().to_vec();
                transform_nd(&mut v, grid.dim(), grid.n(), false);
                v
            })
            .collect();
        Self::from_spatial_spectra(grid, u.dt(), spectra)
    }

    /// Builds the spectrum from per-slice spatial spectra (unitary, FFT order).
    pub fn from_spatial_spectra(grid: TorusGrid, dt: f64, spectra: Vec<Vec<Complex64>>) -> Result<Self> {
        let shells = ModulationShells::new(spectra.len(), dt)?;
        let len = grid.len();
        let taper = taper_weights(spectra.len());
        let mut data = Vec::with_capacity(len * spectra.len());
        for (s, spec) in spectra.into_iter().enumerate() {
            data.extend(spec.into_iter().map(|z| z * taper[s]));
        }
        transform_strided(&mut data, shells.count, len, false);
        Ok(SpaceTimeSpectrum { grid, shells, data, xi2: grid.xi_squared() })
    }

    pub fn shells(&self) -> &ModulationShells {
        &self.shells
    }

    /// `‖Q_j u‖²_{L²_{t,x}}` for every resolvable shell, in order `j_min..=j_max`.
    pub fn shell_energies(&self) -> Vec<f64> {
        let len = self.grid.len();
        let sh = &self.shells;
        let mut e = vec![0.0; sh.shell_count()];
        for m in 0..sh.count {
            let tau = sh.tau(m);
            for (f, z) in self.data[m * len..(m + 1) * len].iter().enumerate() {
                let a = z.norm_sqr();
                if a == 0.0 {
                    continue;
                }
                let mu = sh.modulation(tau, self.xi2[f]);
                for (i, j) in sh.iter().enumerate() {
                    let w = sh.weight(j, mu);
                    if w > 0.0 {
                        e[i] += w * w * a;
                    }
                }
            }
        }
        let cell = self.grid.cell_volume() * sh.dt;
        e.into_iter().map(|x| x * cell).collect()
    }

    /// Inverse transform of the spectrum multiplied by the modulation weight of shell `j`.
    pub fn project(&self, j: i32) -> Result<SpaceTimeField> {
        let len = self.grid.len();
        let sh = &self.shells;
        let mut data = self.data.clone();
        for m in 0..sh.count {
            let tau = sh.tau(m);
            for (f, z) in data[m * len..(m + 1) * len].iter_mut().enumerate() {
                *z *= sh.weight(j, sh.modulation(tau, self.xi2[f]));
            }
        }
        transform_strided(&mut data, sh.count, len, true);
        let slices = data
            .chunks(len)
            .map(|c| {
                let mut v = c.to_vec();
                transform_nd(&mut v, self.grid.dim(), self.grid.n(), true);
                ComplexField::new(self.grid, v, Representation::Physical)
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(self.grid, sh.dt, slices)
    }
}

/// `(Σ_j 2^{jbq} e_j^{q/2})^{1/q}` from shell energies `e_j = ‖Q_j u‖²`.
pub fn xsbq_from_energies(shells: &ModulationShells, energies: &[f64], b: f64, q: f64) -> Result<f64> {
    shells.require_resolved()?;
    if !(q == 1.0 || q == 2.0) {
        return Err(LabError::UnsupportedExponent(format!("summability exponent {q} not in {{1, 2}}")));
    }
    let s: f64 = shells.iter().zip(energies).map(|(j, e)| (2f64.powf(j as f64 * b) * e.sqrt()).powf(q)).sum();
    Ok(s.powf(1.0 / q))
}

/// `Q_j u` for the tapered field (`j = j_min` is the low-pass piece).
pub fn mod_project(u: &SpaceTimeField, j: i32) -> Result<SpaceTimeField> {
    SpaceTimeSpectrum::new(u)?.project(j)
}

/// `u` multiplied by the time taper; the modulation pieces sum to this field.
pub fn tapered(u: &SpaceTimeField) -> SpaceTimeField {
    let w = taper_weights(u.len());
    let slices = u.slices().iter().zip(w).map(|(s, w)| s.scale(Complex64::new(w, 0.0))).collect();
    SpaceTimeField::new(*u.grid(), u.dt(), slices).expect("taper preserves layout")
}

/// `‖u‖_{X^{0,b,q}}` of the tapered field.
pub fn norm_xsbq(u: &SpaceTimeField, b: f64, q: f64) -> Result<f64> {
    let spec = SpaceTimeSpectrum::new(u)?;
    xsbq_from_energies(spec.shells(), &spec.shell_energies(), b, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::lebesgue::norm_mixed;

    fn grid() -> TorusGrid {
        TorusGrid::new(1, 16, 2.0 * PI).unwrap()
    }

    #[test]
    fn taper_shape() {
        let w = taper_weights(64);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[63], 0.0);
        assert!(w[10..54].iter().all(|&x| x == 1.0));
        assert!(w.windows(2).take(7).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn shells_need_enough_slices() {
        assert!(matches!(ModulationShells::new(7, 0.1), Err(LabError::Resolution(_))));
        let sh = ModulationShells::new(64, 0.05 / 63.0).unwrap();
        assert!(sh.shell_count() >= MIN_SHELLS);
    }

    #[test]
    fn pieces_reconstruct_tapered_field() {
        let u = SpaceTimeField::from_fn(grid(), 0.01, 32, |t, x| {
            Complex64::from_polar(1.0, 3.0 * x[0] - 2.0 * t) + Complex64::new((x[0] + 5.0 * t).sin(), 0.0)
        })
        .unwrap();
        let spec = SpaceTimeSpectrum::new(&u).unwrap();
        let mut total = SpaceTimeField::zeros(grid(), 0.01, 32).unwrap();
        for j in spec.shells().iter() {
            total = total.add(&spec.project(j).unwrap()).unwrap();
        }
        assert!(total.sub(&tapered(&u)).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let u = SpaceTimeField::zeros(grid(), 0.001, 64).unwrap();
        assert_eq!(norm_xsbq(&u, 0.5, 1.0).unwrap(), 0.0);
        assert_eq!(mod_project(&u, 3).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn b_zero_q_two_is_plancherel() {
        let u = SpaceTimeField::from_fn(grid(), 0.01, 64, |t, x| {
            Complex64::new((2.0 * x[0]).cos() * (1.0 + t), (x[0] - 30.0 * t).sin())
        })
        .unwrap();
        let x = norm_xsbq(&u, 0.0, 2.0).unwrap();
        let l2 = norm_mixed(&tapered(&u), 2.0, 2.0).unwrap();
        assert!((x / l2 - 1.0).abs() < 0.05, "{x} vs {l2}");
    }
}
