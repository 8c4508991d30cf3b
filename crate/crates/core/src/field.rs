//! Field containers on a [`TorusGrid`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::TorusGrid;

/// Default tolerance for `||m| - 1|`.
pub const SPHERE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Spectral,
}

/// Complex scalar field, stored either as point values or as unitary
/// Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: TorusGrid,
    values: Vec<Complex64>,
    repr: Representation,
}

impl ComplexField {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::Contract(format!("field has {} values, grid needs {}", values.len(), grid.len())));
        }
        Ok(ComplexField { grid, values, repr })
    }

    pub fn zeros(grid: TorusGrid, repr: Representation) -> Self {
        ComplexField { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], repr }
    }

    pub fn constant(grid: TorusGrid, c: Complex64) -> Self {
        ComplexField { grid, values: vec![c; grid.len()], repr: Representation::Physical }
    }

    /// Samples `f` at the grid points (physical representation).
    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        ComplexField { grid, values, repr: Representation::Physical }
    }

    pub fn from_real(grid: TorusGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&x| Complex64::new(x, 0.0)).collect(), Representation::Physical)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn repr(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>, repr: Representation) -> Self {
        debug_assert_eq!(values.len(), self.grid.len());
        ComplexField { grid: self.grid, values, repr }
    }

    /// Plain coefficient norm `sqrt(Σ|f_i|²)`.
    pub fn ell2(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Quadrature `L²` norm over the torus. Identical in both representations.
    pub fn l2_norm(&self) -> f64 {
        self.ell2() * self.grid.cell_volume().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    fn check_compatible(&self, other: &ComplexField) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        if self.repr != other.repr {
            return Err(LabError::Contract("representation mismatch".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ComplexField) -> Result<ComplexField> {
        self.check_compatible(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(), self.repr))
    }

    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        self.check_compatible(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(), self.repr))
    }

    pub fn scale(&self, c: Complex64) -> ComplexField {
        self.with_values(self.values.iter().map(|z| z * c).collect(), self.repr)
    }

    pub fn conj(&self) -> ComplexField {
        assert_eq!(self.repr, Representation::Physical, "conjugation is pointwise");
        self.with_values(self.values.iter().map(|z| z.conj()).collect(), self.repr)
    }
}

/// Unit-vector field `m(x) ∈ S²`.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnetizationField {
    grid: TorusGrid,
    values: Vec<[f64; 3]>,
}

impl MagnetizationField {
    /// Builds a field, rejecting it if any point is off the sphere by more than `tol`.
    pub fn new(grid: TorusGrid, values: Vec<[f64; 3]>, tol: f64) -> Result<Self> {
        let m = Self::new_unchecked(grid, values)?;
        m.check_sphere(tol)?;
        Ok(m)
    }

    pub fn new_unchecked(grid: TorusGrid, values: Vec<[f64; 3]>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::Contract(format!(
                "magnetization has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(MagnetizationField { grid, values })
    }

    pub fn uniform(grid: TorusGrid, m: [f64; 3]) -> Result<Self> {
        Self::new(grid, vec![m; grid.len()], SPHERE_TOL)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn max_sphere_deviation(&self) -> f64 {
        self.values.iter().map(|m| (norm3(m) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn check_sphere(&self, tol: f64) -> Result<()> {
        let (index, deviation) = self
            .values
            .iter()
            .map(|m| (norm3(m) - 1.0).abs())
            .enumerate()
            .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
        if deviation > tol || deviation.is_nan() {
            return Err(LabError::SphereViolation { index, deviation });
        }
        Ok(())
    }

    pub fn component(&self, c: usize) -> ComplexField {
        let values = self.values.iter().map(|m| Complex64::new(m[c], 0.0)).collect();
        ComplexField { grid: self.grid, values, repr: Representation::Physical }
    }
}

pub(crate) fn norm3(m: &[f64; 3]) -> f64 {
    (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt()
}

/// One stored time sample of the current density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentSlice {
    pub time: f64,
    /// `dim` component arrays, each with one value per grid point.
    pub components: Vec<Vec<f64>>,
}

/// Spin-polarized current density `v(t, x) ∈ R^n`, held constant between slices.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentField {
    grid: TorusGrid,
    slices: Vec<CurrentSlice>,
    sup_norm: f64,
}

impl CurrentField {
    pub fn zero(grid: TorusGrid) -> Self {
        let components = vec![vec![0.0; grid.len()]; grid.dim()];
        CurrentField { grid, slices: vec![CurrentSlice { time: 0.0, components }], sup_norm: 0.0 }
    }

    pub fn constant(grid: TorusGrid, vector: &[f64]) -> Result<Self> {
        if vector.len() != grid.dim() {
            return Err(LabError::Contract(format!(
                "current vector has {} components on a {}-D grid",
                vector.len(),
                grid.dim()
            )));
        }
        let components = vector.iter().map(|&c| vec![c; grid.len()]).collect();
        Self::from_slices(grid, vec![CurrentSlice { time: 0.0, components }])
    }

    /// Time-dependent current; slices must be sorted by time.
    pub fn from_slices(grid: TorusGrid, slices: Vec<CurrentSlice>) -> Result<Self> {
        if slices.is_empty() {
            return Err(LabError::Contract("current needs at least one slice".into()));
        }
        let mut sup: f64 = 0.0;
        for (s, slice) in slices.iter().enumerate() {
            if s > 0 && !(slice.time > slices[s - 1].time) {
                return Err(LabError::Contract("current slices must have increasing times".into()));
            }
            if slice.components.len() != grid.dim() || slice.components.iter().any(|c| c.len() != grid.len()) {
                return Err(LabError::Contract("current slice shape does not match grid".into()));
            }
            for i in 0..grid.len() {
                let mag = slice.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt();
                sup = sup.max(mag);
            }
        }
        if !sup.is_finite() {
            return Err(LabError::Contract("current contains non-finite values".into()));
        }
        Ok(CurrentField { grid, slices, sup_norm: sup })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn slices(&self) -> &[CurrentSlice] {
        &self.slices
    }

    /// Cached `‖v‖_{L^∞_{t,x}}`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn is_zero(&self) -> bool {
        self.sup_norm == 0.0
    }

    /// Zero-order hold: the last slice at or before `t` (the first slice before it starts).
    pub fn at(&self, t: f64) -> &CurrentSlice {
        let idx = self.slices.partition_point(|s| s.time <= t);
        &self.slices[idx.saturating_sub(1)]
    }

    pub fn scaled(&self, c: f64) -> CurrentField {
        let slices = self
            .slices
            .iter()
            .map(|s| CurrentSlice {
                time: s.time,
                components: s.components.iter().map(|v| v.iter().map(|x| x * c).collect()).collect(),
            })
            .collect();
        CurrentField { grid: self.grid, slices, sup_norm: self.sup_norm * c.abs() }
    }

    /// The current seen by the time-reversed flow on `[0, t_end]`: `v(t_end - s)`.
    pub fn time_reversed(&self, t_end: f64) -> Result<CurrentField> {
        if self.slices.len() == 1 {
            return Ok(self.clone());
        }
        // slice k holds on [t_k, t_{k+1}); reversed it holds on (t_end - t_{k+1}, t_end - t_k]
        let mut slices = Vec::with_capacity(self.slices.len());
        for k in (0..self.slices.len()).rev() {
            if self.slices[k].time > t_end {
                continue;
            }
            let upper = self.slices.get(k + 1).map(|s| s.time).unwrap_or(f64::INFINITY);
            let start = (t_end - upper).max(0.0);
            if slices.last().map(|s: &CurrentSlice| s.time >= start).unwrap_or(false) {
                slices.pop();
            }
            slices.push(CurrentSlice { time: start, components: self.slices[k].components.clone() });
        }
        CurrentField::from_slices(self.grid, slices)
    }
}

/// Uniformly time-sampled complex field `u(t, x)`, slices in physical representation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    grid: TorusGrid,
    dt: f64,
    slices: Vec<ComplexField>,
}

impl SpaceTimeField {
    pub fn new(grid: TorusGrid, dt: f64, slices: Vec<ComplexField>) -> Result<Self> {
        if slices.len() < 2 {
            return Err(LabError::Contract("space-time field needs at least two slices".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(LabError::Contract(format!("time step must be positive, got {dt}")));
        }
        for s in &slices {
            s.grid().same_as(&grid)?;
            if s.repr() != Representation::Physical {
                return Err(LabError::Contract("space-time slices must be physical".into()));
            }
        }
        Ok(SpaceTimeField { grid, dt, slices })
    }

    pub fn from_fn(grid: TorusGrid, dt: f64, count: usize, f: impl Fn(f64, [f64; 3]) -> Complex64) -> Result<Self> {
        let slices = (0..count)
            .map(|s| {
                let t = s as f64 * dt;
                ComplexField::from_fn(grid, |x| f(t, x))
            })
            .collect();
        Self::new(grid, dt, slices)
    }

    pub fn zeros(grid: TorusGrid, dt: f64, count: usize) -> Result<Self> {
        Self::new(grid, dt, vec![ComplexField::zeros(grid, Representation::Physical); count])
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slices(&self) -> &[ComplexField] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<ComplexField> {
        self.slices
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.slices.len()).map(|s| s as f64 * self.dt).collect()
    }

    /// Elapsed time between first and last slice.
    pub fn duration(&self) -> f64 {
        (self.slices.len() - 1) as f64 * self.dt
    }

    pub fn map_slices(&self, f: impl Fn(&ComplexField) -> ComplexField) -> SpaceTimeField {
        SpaceTimeField { grid: self.grid, dt: self.dt, slices: self.slices.iter().map(f).collect() }
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.check_compatible(other)?;
        let slices = self.slices.iter().zip(&other.slices).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(SpaceTimeField { grid: self.grid, dt: self.dt, slices })
    }

    pub fn add(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.check_compatible(other)?;
        let slices = self.slices.iter().zip(&other.slices).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(SpaceTimeField { grid: self.grid, dt: self.dt, slices })
    }

    pub fn scale(&self, c: Complex64) -> SpaceTimeField {
        self.map_slices(|s| s.scale(c))
    }

    pub fn check_compatible(&self, other: &SpaceTimeField) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        if self.slices.len() != other.slices.len() || (self.dt - other.dt).abs() > 1e-15 * self.dt {
            return Err(LabError::GridMismatch("space-time sampling differs".into()));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().map(|s| s.max_abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.slices.iter().all(|s| s.values().iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Reverses the time axis: slice `s` becomes slice `len - 1 - s`.
    pub fn time_reversed(&self) -> SpaceTimeField {
        let mut slices = self.slices.clone();
        slices.reverse();
        SpaceTimeField { grid: self.grid, dt: self.dt, slices }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(2, 4, 1.0).unwrap()
    }

    #[test]
    fn magnetization_rejects_off_sphere() {
        let g = grid();
        let mut v = vec![[0.0, 0.0, 1.0]; g.len()];
        v[5] = [0.0, 0.0, 1.1];
        match MagnetizationField::new(g, v, SPHERE_TOL) {
            Err(LabError::SphereViolation { index, .. }) => assert_eq!(index, 5),
            other => panic!("expected sphere violation, got {other:?}"),
        }
    }

    #[test]
    fn current_zero_order_hold_and_sup_norm() {
        let g = grid();
        let s0 = CurrentSlice { time: 0.0, components: vec![vec![1.0; 16], vec![0.0; 16]] };
        let s1 = CurrentSlice { time: 0.5, components: vec![vec![3.0; 16], vec![4.0; 16]] };
        let v = CurrentField::from_slices(g, vec![s0, s1]).unwrap();
        assert_eq!(v.sup_norm(), 5.0);
        assert_eq!(v.at(0.2).time, 0.0);
        assert_eq!(v.at(0.5).time, 0.5);
        assert_eq!(v.at(7.0).time, 0.5);
        let r = v.time_reversed(1.0).unwrap();
        assert_eq!(r.at(0.1).components[0][0], 3.0);
        assert_eq!(r.at(0.7).components[0][0], 1.0);
    }

    #[test]
    fn space_time_needs_two_slices() {
        let g = grid();
        assert!(SpaceTimeField::zeros(g, 0.1, 1).is_err());
        let u = SpaceTimeField::zeros(g, 0.1, 5).unwrap();
        assert!((u.duration() - 0.4).abs() < 1e-15);
    }
}
