//! Per-shell composite norms `F_k, Y_k, Z_k, N_k`, their dyadic sums, and the Besov norm.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::lebesgue::{norm_anisotropic, norm_mixed};
use super::modulation::{xsbq_from_energies, ModulationShells, SpaceTimeSpectrum};
use super::projectors::{directional_axis_multiplier, expand_axis_multiplier, shell_multiplier, ShellRange};
use crate::error::{LabError, Result};
use crate::fft::transform_nd;
use crate::field::{ComplexField, Representation, SpaceTimeField};
use crate::grid::TorusGrid;
use crate::spectral::to_spectral;

/// Half-width of the `j` window in the local-smoothing term of `F_k`.
pub const SMOOTHING_WINDOW: i32 = 20;

const INF: f64 = f64::INFINITY;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    F,
    Y,
    Z,
    N,
}

impl Space {
    pub fn parse(s: &str) -> Result<Space> {
        match s.trim() {
            "F" | "f" => Ok(Space::F),
            "Y" | "y" => Ok(Space::Y),
            "Z" | "z" => Ok(Space::Z),
            "N" | "n" => Ok(Space::N),
            other => Err(LabError::Contract(format!("unknown space {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Space::F => "F",
            Space::Y => "Y",
            Space::Z => "Z",
            Space::N => "N",
        }
    }
}

/// Ingredient norms of one shell-localized field.
///
/// `l2_strichartz` is `None` outside three dimensions; the directional terms are
/// only computed when `F_k` is requested.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ShellIngredients {
    pub k: i32,
    pub linf_l2: f64,
    pub l1_l2: f64,
    pub l2: f64,
    pub l2_strichartz: Option<f64>,
    pub maximal: f64,
    pub aniso_l12: f64,
    pub smoothing: Option<f64>,
    pub x_half_1: f64,
    pub x_one_2: f64,
    pub x_mhalf_1: f64,
}

impl ShellIngredients {
    fn strichartz(&self) -> Result<f64> {
        self.l2_strichartz.ok_or_else(|| LabError::UnsupportedExponent("L^2_t L^{2n/(n-2)}_x needs dimension 3".into()))
    }

    fn dim_weight(&self, dim: usize) -> f64 {
        2f64.powf(-((dim as f64 - 1.0) * self.k as f64) / 2.0)
    }

    pub fn norm(&self, space: Space, dim: usize) -> Result<f64> {
        let k = self.k as f64;
        match space {
            Space::F => {
                let smoothing =
                    self.smoothing.ok_or_else(|| LabError::Contract("local-smoothing term was not computed".into()))?;
                Ok(self.x_half_1
                    + self.linf_l2
                    + self.strichartz()?
                    + self.dim_weight(dim) * self.maximal
                    + 2f64.powf(k / 2.0) * smoothing)
            }
            // pure assignment: the infimum over two summands is attained with one of them zero
            Space::Y => Ok(self.linf_l2
                + self.strichartz()?
                + self.dim_weight(dim) * self.maximal
                + 2f64.powf(-k) * self.x_one_2),
            Space::Z => Ok(2f64.powf(-k) * self.x_one_2),
            Space::N => {
                let a = self.l1_l2;
                let b = 2f64.powf(-k / 2.0) * self.aniso_l12;
                let c = self.x_mhalf_1;
                Ok(a.min(b).min(c) + 2f64.powf(-k) * self.l2)
            }
        }
    }
}

fn physical_slices(grid: TorusGrid, dt: f64, spectra: &[Vec<Complex64>], mult: &[f64]) -> Result<SpaceTimeField> {
    let slices = spectra
        .iter()
        .map(|s| {
            let mut v: Vec<Complex64> = s.iter().zip(mult).map(|(z, m)| z * m).collect();
            transform_nd(&mut v, grid.dim(), grid.n(), true);
            ComplexField::new(grid, v, Representation::Physical)
        })
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(grid, dt, slices)
}

/// Spatial spectra of every slice, computed once and reused across shells.
#[derive(Clone, Debug)]
pub struct SliceSpectra {
    grid: TorusGrid,
    dt: f64,
    spectra: Vec<Vec<Complex64>>,
}

impl SliceSpectra {
    pub fn new(u: &SpaceTimeField) -> Self {
        let grid = *u.grid();
        let spectra = u.slices().iter().map(|s| to_spectral(s).into_values()).collect();
        SliceSpectra { grid, dt: u.dt(), spectra }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Ingredient norms of `P_k u` (or of `u` itself when `localize` is false).
    /// Returns `None` when the shell carries no energy.
    pub fn ingredients(&self, k: i32, localize: bool, need_smoothing: bool) -> Result<Option<ShellIngredients>> {
        let g = self.grid;
        let mult = if localize { shell_multiplier(&g, k) } else { vec![1.0; g.len()] };
        let local: Vec<Vec<Complex64>> =
            self.spectra.iter().map(|s| s.iter().zip(&mult).map(|(z, m)| z * m).collect()).collect();
        let energy: f64 = local.iter().flatten().map(|z| z.norm_sqr()).sum();
        if energy == 0.0 {
            return Ok(None);
        }
        let ones = vec![1.0; g.len()];
        let u = physical_slices(g, self.dt, &local, &ones)?;
        let dim = g.dim();
        let mut out = ShellIngredients {
            k,
            linf_l2: norm_mixed(&u, INF, 2.0)?,
            l1_l2: norm_mixed(&u, 1.0, 2.0)?,
            l2: norm_mixed(&u, 2.0, 2.0)?,
            l2_strichartz: if dim == 3 { Some(norm_mixed(&u, 2.0, 6.0)?) } else { None },
            ..Default::default()
        };
        for axis in 0..dim {
            out.maximal = out.maximal.max(norm_anisotropic(&u, 2.0, INF, axis)?);
            out.aniso_l12 = out.aniso_l12.max(norm_anisotropic(&u, 1.0, 2.0, axis)?);
        }
        if need_smoothing {
            out.smoothing = Some(self.smoothing_term(&local, k)?);
        }
        let spec = SpaceTimeSpectrum::from_spatial_spectra(g, self.dt, local)?;
        let e = spec.shell_energies();
        out.x_half_1 = xsbq_from_energies(spec.shells(), &e, 0.5, 1.0)?;
        out.x_one_2 = xsbq_from_energies(spec.shells(), &e, 1.0, 2.0)?;
        out.x_mhalf_1 = xsbq_from_energies(spec.shells(), &e, -0.5, 1.0)?;
        Ok(Some(out))
    }

    /// `sup_{|j−k|≤20} sup_i ‖P_{j,e_i} u‖_{L^{∞,2}_{e_i}}`; identical multipliers are evaluated once.
    fn smoothing_term(&self, local: &[Vec<Complex64>], k: i32) -> Result<f64> {
        let g = self.grid;
        let mut best = 0.0f64;
        for axis in 0..g.dim() {
            let mut seen: Vec<Vec<f64>> = Vec::new();
            for j in k - SMOOTHING_WINDOW..=k + SMOOTHING_WINDOW {
                let per_axis = directional_axis_multiplier(&g, j);
                if seen.contains(&per_axis) {
                    continue;
                }
                let full = expand_axis_multiplier(&g, axis, &per_axis);
                seen.push(per_axis);
                let v = physical_slices(g, self.dt, local, &full)?;
                best = best.max(norm_anisotropic(&v, INF, 2.0, axis)?);
            }
        }
        Ok(best)
    }
}

fn check_space_dim(space: Space, dim: usize) -> Result<()> {
    if matches!(space, Space::F | Space::Y) && dim != 3 {
        return Err(LabError::UnsupportedExponent(format!(
            "{} norm needs the L^2_t L^6_x endpoint, available only in dimension 3 (got {dim})",
            space.name()
        )));
    }
    Ok(())
}

fn shell_norm(u: &SpaceTimeField, k: i32, space: Space, localize: bool) -> Result<f64> {
    check_space_dim(space, u.grid().dim())?;
    ModulationShells::new(u.len(), u.dt())?.require_resolved()?;
    let ing = SliceSpectra::new(u).ingredients(k, localize, space == Space::F)?;
    match ing {
        None => Ok(0.0),
        Some(i) => i.norm(space, u.grid().dim()),
    }
}

/// `‖P_k u‖_{F_k}`; `localize = false` skips the projection (diagnostics only).
pub fn norm_fk(u: &SpaceTimeField, k: i32, localize: bool) -> Result<f64> {
    shell_norm(u, k, Space::F, localize)
}

pub fn norm_yk(u: &SpaceTimeField, k: i32, localize: bool) -> Result<f64> {
    shell_norm(u, k, Space::Y, localize)
}

pub fn norm_zk(u: &SpaceTimeField, k: i32, localize: bool) -> Result<f64> {
    shell_norm(u, k, Space::Z, localize)
}

pub fn norm_nk(u: &SpaceTimeField, k: i32, localize: bool) -> Result<f64> {
    shell_norm(u, k, Space::N, localize)
}

/// `Σ_k 2^{ks} ‖P_k f‖_{L²}` over the grid's shell range.
pub fn norm_besov(f: &ComplexField, s: f64) -> f64 {
    let g = *f.grid();
    let spec = to_spectral(f);
    let cell = g.cell_volume();
    ShellRange::for_grid(&g)
        .iter()
        .map(|k| {
            let m = shell_multiplier(&g, k);
            let e: f64 = spec.values().iter().zip(&m).map(|(z, w)| w * w * z.norm_sqr()).sum();
            2f64.powf(k as f64 * s) * (e * cell).sqrt()
        })
        .sum()
}

/// One row of a shell-resolved breakdown.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellRow {
    pub k: i32,
    pub weight: f64,
    pub norms: BTreeMap<String, f64>,
    pub ingredients: Option<ShellIngredients>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormMetadata {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
    pub dt: f64,
    pub slices: usize,
    pub shell_range: ShellRange,
    pub modulation: ModulationShells,
    pub notes: Vec<String>,
}

/// Named norm values with a shell-resolved breakdown.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormReport {
    pub entries: BTreeMap<String, f64>,
    pub shells: Vec<ShellRow>,
    pub metadata: NormMetadata,
}

impl NormReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Shell table: one line per shell, one column per requested space.
    pub fn shells_csv(&self) -> String {
        let cols: Vec<String> = self.shells.first().map(|r| r.norms.keys().cloned().collect()).unwrap_or_default();
        let mut out = format!("k,weight{}\n", cols.iter().map(|c| format!(",{c}")).collect::<String>());
        for r in &self.shells {
            out.push_str(&format!("{},{:e}", r.k, r.weight));
            for c in &cols {
                out.push_str(&format!(",{:e}", r.norms.get(c).copied().unwrap_or(0.0)));
            }
            out.push('\n');
        }
        out
    }
}

/// Dyadic sums `Σ_k 2^{ks} ‖P_k u‖_{X_k}` for each requested space, with per-shell rows.
pub fn norm_spaces(u: &SpaceTimeField, spaces: &[Space], s: f64) -> Result<NormReport> {
    let g = *u.grid();
    for &sp in spaces {
        check_space_dim(sp, g.dim())?;
    }
    let modulation = ModulationShells::new(u.len(), u.dt())?;
    modulation.require_resolved()?;
    let range = ShellRange::for_grid(&g);
    let spectra = SliceSpectra::new(u);
    let need_smoothing = spaces.contains(&Space::F);
    let mut entries: BTreeMap<String, f64> = spaces.iter().map(|sp| (sp.name().to_string(), 0.0)).collect();
    let mut rows = Vec::new();
    for k in range.iter() {
        let weight = 2f64.powf(k as f64 * s);
        let ing = spectra.ingredients(k, true, need_smoothing)?;
        let mut norms = BTreeMap::new();
        for &sp in spaces {
            let v = match &ing {
                Some(i) => i.norm(sp, g.dim())?,
                None => 0.0,
            };
            *entries.get_mut(sp.name()).expect("inserted above") += weight * v;
            norms.insert(sp.name().to_string(), v);
        }
        rows.push(ShellRow { k, weight, norms, ingredients: ing });
    }
    let mut notes = vec![
        "X^{0,b,q} terms are evaluated on the time-tapered field".to_string(),
        "sup over directions restricted to coordinate axes".to_string(),
    ];
    if spaces.contains(&Space::Y) {
        notes.push("Y_k infimum replaced by the pure assignment (upper bound)".into());
    }
    if spaces.contains(&Space::N) {
        notes.push("N_k infimum replaced by the minimum over pure assignments (upper bound)".into());
    }
    Ok(NormReport {
        entries,
        shells: rows,
        metadata: NormMetadata {
            dim: g.dim(),
            n: g.n(),
            period: g.period(),
            dt: u.dt(),
            slices: u.len(),
            shell_range: range,
            modulation,
            notes,
        },
    })
}

/// `Σ_k 2^{ks} ‖P_k u‖_{X_k}` for a single space.
pub fn norm_space(u: &SpaceTimeField, space: Space, s: f64) -> Result<f64> {
    Ok(norm_spaces(u, &[space], s)?.entries[space.name()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn besov_of_single_mode() {
        let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
        // |ξ| = 2 sits in the flat core of χ_1 only
        let f = ComplexField::from_fn(g, |x| Complex64::from_polar(0.7, 2.0 * x[1]));
        let b = norm_besov(&f, 1.5);
        assert!((b - 2f64.powf(1.5) * f.l2_norm()).abs() < 1e-10 * b);
        let b2 = norm_besov(&f.scale(Complex64::new(0.0, -3.0)), 1.5);
        assert!((b2 - 3.0 * b).abs() < 1e-10 * b2);
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = TorusGrid::new(3, 8, 2.0 * PI).unwrap();
        let u = SpaceTimeField::zeros(g, 0.001, 64).unwrap();
        for sp in [Space::F, Space::Y, Space::Z, Space::N] {
            assert_eq!(norm_space(&u, sp, 1.5).unwrap(), 0.0);
            assert_eq!(shell_norm(&u, 1, sp, true).unwrap(), 0.0);
        }
    }

    #[test]
    fn strichartz_spaces_need_three_dimensions() {
        let g = TorusGrid::new(2, 8, 2.0 * PI).unwrap();
        let u = SpaceTimeField::zeros(g, 0.001, 64).unwrap();
        assert!(matches!(norm_space(&u, Space::F, 1.0), Err(LabError::UnsupportedExponent(_))));
        assert!(norm_space(&u, Space::Z, 1.0).is_ok());
    }
}
