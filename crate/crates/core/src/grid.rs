use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Cubic periodic grid with `n` points per axis on a torus of side `period`.
///
/// Points are stored row-major with axis 0 slowest. Wavenumbers follow the
/// usual FFT ordering; the index `n/2` holds the (aliased) Nyquist mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    period: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(LabError::InvalidGrid(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(LabError::InvalidGrid(format!("points per axis must be a power of two >= 2, got {n}")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(LabError::InvalidGrid(format!("period must be positive, got {period}")));
        }
        Ok(TorusGrid { dim, n, period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Quadrature weight of one grid cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.period.powi(self.dim as i32)
    }

    /// Smallest nonzero wavenumber `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Signed integer mode of a per-axis index (FFT ordering).
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn axis_wavenumber(&self, i: usize) -> f64 {
        self.fundamental() * self.mode(i) as f64
    }

    /// Per-axis wavenumbers in storage order.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.axis_wavenumber(i)).collect()
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis indices of a flat index; unused trailing axes are zero.
    pub fn coords(&self, flat: usize) -> [usize; 3] {
        let mut c = [0usize; 3];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            c[a] = rem % self.n;
            rem /= self.n;
        }
        c
    }

    pub fn flat(&self, coords: [usize; 3]) -> usize {
        let mut f = 0;
        for &c in coords.iter().take(self.dim) {
            f = f * self.n + c;
        }
        f
    }

    /// Distance between consecutive points along `axis` in flat storage.
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        let c = self.coords(flat);
        let h = self.spacing();
        [c[0] as f64 * h, c[1] as f64 * h, c[2] as f64 * h]
    }

    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let c = self.coords(flat);
        let mut k = [0.0; 3];
        for a in 0..self.dim {
            k[a] = self.axis_wavenumber(c[a]);
        }
        k
    }

    /// Whether any axis index of this flat index sits on the Nyquist plane.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let c = self.coords(flat);
        (0..self.dim).any(|a| self.is_nyquist(c[a]))
    }

    /// `|ξ|²` for every stored mode.
    pub fn xi_squared(&self) -> Vec<f64> {
        (0..self.len()).map(|f| self.wavevector(f).iter().map(|k| k * k).sum()).collect()
    }

    pub fn xi_norms(&self) -> Vec<f64> {
        self.xi_squared().into_iter().map(f64::sqrt).collect()
    }

    /// Smallest and largest `|ξ|` over stored modes, excluding zero and Nyquist planes.
    pub fn resolved_band(&self) -> (f64, f64) {
        let kmax = self.fundamental() * ((self.n / 2 - 1) as f64) * (self.dim as f64).sqrt();
        (self.fundamental(), kmax.max(self.fundamental()))
    }

    pub fn same_as(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(LabError::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}
