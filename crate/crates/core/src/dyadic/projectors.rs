//! Littlewood–Paley projectors on the torus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bump::{chi, chi_leq, chi_tilde, INNER_RADIUS, OUTER_RADIUS};
use crate::field::ComplexField;
use crate::grid::TorusGrid;
use crate::spectral::apply_multiplier;

/// Range of dyadic shells `k` whose multipliers `χ_k` are nonzero on the grid.
///
/// The range is chosen so that `Σ_{k_min}^{k_max} χ_k(ξ) = 1` exactly at every
/// stored `ξ ≠ 0` off the Nyquist planes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellRange {
    pub k_min: i32,
    pub k_max: i32,
}

impl ShellRange {
    pub fn for_grid(grid: &TorusGrid) -> Self {
        let (lo, hi) = grid.resolved_band();
        // below k_min every χ vanishes because η(|ξ|/2^{k_min-1}) = 0 for |ξ| >= lo
        let k_min = (lo / OUTER_RADIUS).log2().floor() as i32 + 1;
        let k_max = (hi / INNER_RADIUS).log2().ceil() as i32;
        ShellRange { k_min, k_max }
    }

    pub fn contains(&self, k: i32) -> bool {
        (self.k_min..=self.k_max).contains(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.k_min..=self.k_max
    }

    /// Annulus on which the partition of unity is guaranteed.
    pub fn safe_annulus(&self) -> (f64, f64) {
        (2f64.powi(self.k_min + 1), 2f64.powi(self.k_max - 1))
    }
}

/// Result of a shell projection; `in_range` is false when `k` lies outside the
/// grid's resolvable shells (the field is then identically zero).
#[derive(Clone, Debug)]
pub struct ShellProjection {
    pub field: ComplexField,
    pub in_range: bool,
}

fn radial_multiplier(grid: &TorusGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let nyq: Vec<bool> = (0..grid.len()).map(|i| grid.touches_nyquist(i)).collect();
    grid.xi_norms().into_iter().zip(nyq).map(|(r, ny)| if ny { 0.0 } else { f(r) }).collect()
}

/// Values of `χ_k(|ξ|)` at every stored mode (zero on Nyquist planes).
pub fn shell_multiplier(grid: &TorusGrid, k: i32) -> Vec<f64> {
    radial_multiplier(grid, |r| chi(k, r))
}

pub fn low_pass_multiplier(grid: &TorusGrid, k: i32) -> Vec<f64> {
    radial_multiplier(grid, |r| chi_leq(k, r))
}

/// `P_k f`, the spectral product with `χ_k`.
pub fn lp_project(f: &ComplexField, k: i32) -> ShellProjection {
    let grid = *f.grid();
    let m = shell_multiplier(&grid, k);
    let field = apply_multiplier(f, |i| Complex64::new(m[i], 0.0));
    ShellProjection { field, in_range: ShellRange::for_grid(&grid).contains(k) }
}

/// `P_{≤k} f`, the spectral product with `η(|ξ|/2^k)`.
pub fn lp_project_leq(f: &ComplexField, k: i32) -> ComplexField {
    let m = low_pass_multiplier(f.grid(), k);
    apply_multiplier(f, |i| Complex64::new(m[i], 0.0))
}

/// Per-axis-index values of `χ̃_k(ξ_axis)` used by the directional projector.
pub fn directional_axis_multiplier(grid: &TorusGrid, k: i32) -> Vec<f64> {
    (0..grid.n())
        .map(|i| if grid.is_nyquist(i) { 0.0 } else { chi_tilde(k, grid.axis_wavenumber(i).abs(), grid.dim()) })
        .collect()
}

/// Expands a per-axis multiplier into a full-grid multiplier acting on `axis`.
pub fn expand_axis_multiplier(grid: &TorusGrid, axis: usize, per_axis: &[f64]) -> Vec<f64> {
    let stride = grid.stride(axis);
    (0..grid.len()).map(|f| per_axis[(f / stride) % grid.n()]).collect()
}

/// `P_{k,e_i} f`: the widened shell multiplier `χ̃_k` applied to the single coordinate `ξ_i`.
pub fn lp_project_directional(f: &ComplexField, k: i32, axis: usize) -> ComplexField {
    let grid = *f.grid();
    assert!(axis < grid.dim(), "axis {axis} out of range");
    let m = expand_axis_multiplier(&grid, axis, &directional_axis_multiplier(&grid, k));
    apply_multiplier(f, |i| Complex64::new(m[i], 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn shell_range_matches_grid() {
        let g = TorusGrid::new(3, 32, 4.0 * PI).unwrap();
        assert_eq!(ShellRange::for_grid(&g), ShellRange { k_min: -1, k_max: 4 });
        let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
        assert_eq!(ShellRange::for_grid(&g), ShellRange { k_min: 0, k_max: 4 });
    }

    #[test]
    fn partition_of_unity_on_every_resolved_mode() {
        for (dim, n, l) in [(1, 64, 2.0 * PI), (2, 32, 7.0), (3, 16, 4.0 * PI)] {
            let g = TorusGrid::new(dim, n, l).unwrap();
            let range = ShellRange::for_grid(&g);
            let mut total = vec![0.0; g.len()];
            for k in range.iter() {
                for (t, m) in total.iter_mut().zip(shell_multiplier(&g, k)) {
                    *t += m;
                }
            }
            for (i, t) in total.iter().enumerate() {
                if i == 0 || g.touches_nyquist(i) {
                    continue;
                }
                assert!((t - 1.0).abs() < 1e-10, "defect {t} at mode {i}");
            }
        }
    }

    #[test]
    fn out_of_range_shell_is_flagged_and_zero() {
        let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
        let f = ComplexField::from_fn(g, |x| Complex64::new(x[0].cos(), 0.0));
        let p = lp_project(&f, 12);
        assert!(!p.in_range);
        assert_eq!(p.field.max_abs(), 0.0);
    }

    #[test]
    fn directional_projector_pass_and_stop_bands() {
        let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
        let pass = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * x[0] + x[1]));
        let out = lp_project_directional(&pass, 1, 0);
        assert!(out.sub(&pass).unwrap().max_abs() < 1e-12);
        // no dependence on x_0 means ξ_0 = 0, outside every widened shell
        let stop = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x[1]));
        assert!(lp_project_directional(&stop, 20, 0).max_abs() < 1e-12);
        let twice = lp_project_directional(&out, 1, 0);
        assert!(twice.sub(&out).unwrap().max_abs() < 1e-12);
    }
}
