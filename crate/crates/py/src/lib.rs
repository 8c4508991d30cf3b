//! Python module `lls_lab`: grids, fields, the LLS and chart solvers, dyadic norms
//! and the config-driven runner. Reports come back as plain dicts.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::path::PathBuf;

use lls_core::dyadic::composite::{norm_besov, norm_spaces, Space};
use lls_core::dyadic::lp_project;
use lls_core::gl::{self, CurrentCoupling, MarchConfig, PicardConfig};
use lls_core::lls::{self as core_lls, LlsConfig};
use lls_core::{io, random, spectral, stereographic};

create_exception!(lls_lab, LabError, PyException);

fn err(e: lls_core::LabError) -> PyErr {
    LabError::new_err(format!("[exit {}] {e}", e.exit_code()))
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Grid {
    inner: lls_core::TorusGrid,
}

#[pymethods]
impl Grid {
    #[new]
    fn new(dim: usize, n: usize, period: f64) -> PyResult<Self> {
        Ok(Grid { inner: lls_core::TorusGrid::new(dim, n, period).map_err(err)? })
    }
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }
    #[getter]
    fn period(&self) -> f64 {
        self.inner.period()
    }
    fn __len__(&self) -> usize {
        self.inner.len()
    }
    /// Physical coordinates of every grid point, row-major.
    fn positions(&self) -> Vec<Vec<f64>> {
        (0..self.inner.len()).map(|i| self.inner.position(i)[..self.inner.dim()].to_vec()).collect()
    }
    fn __repr__(&self) -> String {
        format!("Grid(dim={}, n={}, period={})", self.inner.dim(), self.inner.n(), self.inner.period())
    }
}

/// Complex scalar field in point values.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct ComplexField {
    inner: lls_core::ComplexField,
}

#[pymethods]
impl ComplexField {
    #[new]
    fn new(grid: Grid, values: Vec<Complex64>) -> PyResult<Self> {
        let inner = lls_core::ComplexField::new(grid.inner, values, lls_core::Representation::Physical).map_err(err)?;
        Ok(ComplexField { inner })
    }
    /// Band-limited Gaussian field with `max |u| = amplitude`.
    #[staticmethod]
    fn band_limited(grid: Grid, seed: u64, lo: f64, hi: f64, amplitude: f64) -> Self {
        let u = random::band_limited(grid.inner, &mut random::rng(seed), lo, hi);
        ComplexField { inner: random::with_sup(&u, amplitude) }
    }
    #[getter]
    fn grid(&self) -> Grid {
        Grid { inner: *self.inner.grid() }
    }
    fn values(&self) -> Vec<Complex64> {
        spectral::to_physical(&self.inner).into_values()
    }
    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }
    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }
    /// `e^{(ε+i)tΔ} u`.
    fn semigroup(&self, t: f64, eps: f64) -> PyResult<Self> {
        Ok(ComplexField { inner: spectral::semigroup_apply(&self.inner, t, eps).map_err(err)? })
    }
    /// Littlewood–Paley piece `P_k u`.
    fn lp_project(&self, k: i32) -> Self {
        ComplexField { inner: lp_project(&self.inner, k).field }
    }
    /// `Σ_k 2^{ks} ‖P_k u‖_{L²}`.
    fn besov_norm(&self, s: f64) -> f64 {
        norm_besov(&self.inner, s)
    }
    fn unproject(&self) -> Magnetization {
        Magnetization { inner: stereographic::unproject(&self.inner) }
    }
}

/// Unit-vector field.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Magnetization {
    inner: lls_core::MagnetizationField,
}

#[pymethods]
impl Magnetization {
    #[new]
    #[pyo3(signature = (grid, values, sphere_tol = lls_core::field::SPHERE_TOL))]
    fn new(grid: Grid, values: Vec<[f64; 3]>, sphere_tol: f64) -> PyResult<Self> {
        Ok(Magnetization { inner: lls_core::MagnetizationField::new(grid.inner, values, sphere_tol).map_err(err)? })
    }
    #[staticmethod]
    fn perturbed_north(grid: Grid, seed: u64, amplitude: f64, band: f64) -> PyResult<Self> {
        let m = random::perturbed_north(grid.inner, &mut random::rng(seed), amplitude, band).map_err(err)?;
        Ok(Magnetization { inner: m })
    }
    #[getter]
    fn grid(&self) -> Grid {
        Grid { inner: *self.inner.grid() }
    }
    fn values(&self) -> Vec<[f64; 3]> {
        self.inner.values().to_vec()
    }
    fn max_sphere_deviation(&self) -> f64 {
        self.inner.max_sphere_deviation()
    }
    fn exchange_energy(&self) -> f64 {
        core_lls::exchange_energy(&self.inner)
    }
    #[pyo3(signature = (pole_guard = stereographic::DEFAULT_POLE_GUARD))]
    fn project(&self, pole_guard: f64) -> PyResult<ComplexField> {
        Ok(ComplexField { inner: stereographic::project(&self.inner, pole_guard).map_err(err)? })
    }
}

fn current(grid: &lls_core::TorusGrid, v: Option<Vec<f64>>) -> PyResult<lls_core::CurrentField> {
    match v {
        None => Ok(lls_core::CurrentField::zero(*grid)),
        Some(vec) => lls_core::CurrentField::constant(*grid, &vec).map_err(err),
    }
}

/// Integrates the LLS equation to `t_end` with a constant current `v`.
#[pyfunction]
#[pyo3(signature = (m0, eps, dt, t_end, v = None))]
fn lls_evolve(m0: &Magnetization, eps: f64, dt: f64, t_end: f64, v: Option<Vec<f64>>) -> PyResult<Magnetization> {
    let v = current(m0.inner.grid(), v)?;
    let last = core_lls::lls_evolve_with(&m0.inner, &v, &LlsConfig::new(eps, dt), t_end, |_| Ok(())).map_err(err)?;
    Ok(Magnetization { inner: last.m })
}

/// Marches the chart equation; returns the stored slices.
#[pyfunction]
#[pyo3(signature = (u0, eps, dt, t_end, v = None, coupling = "direct", sample_every = 1))]
fn gl_march(
    u0: &ComplexField,
    eps: f64,
    dt: f64,
    t_end: f64,
    v: Option<Vec<f64>>,
    coupling: &str,
    sample_every: usize,
) -> PyResult<Vec<ComplexField>> {
    let v = current(u0.inner.grid(), v)?;
    let cfg = MarchConfig {
        coupling: CurrentCoupling::parse(coupling).map_err(err)?,
        sample_every,
        ..MarchConfig::new(eps, dt)
    };
    let u = gl::gl_march(&u0.inner, &v, t_end, &cfg).map_err(err)?;
    Ok(u.into_slices().into_iter().map(|inner| ComplexField { inner }).collect())
}

/// Picard iteration on `[0, window]`; returns `(slices, report)`.
#[pyfunction]
#[pyo3(signature = (u0, eps, window, slices = 64, v = None, track_dyadic = false))]
fn picard_solve<'py>(
    py: Python<'py>,
    u0: &ComplexField,
    eps: f64,
    window: f64,
    slices: usize,
    v: Option<Vec<f64>>,
    track_dyadic: bool,
) -> PyResult<(Vec<ComplexField>, Bound<'py, PyAny>)> {
    let v = current(u0.inner.grid(), v)?;
    let cfg = PicardConfig { track_dyadic, ..PicardConfig::new(eps, window, slices) };
    let (u, rep) = gl::picard_solve(&u0.inner, &v, &cfg).map_err(err)?;
    let rep = json_to_py(py, &serde_json::to_string(&rep).map_err(|e| LabError::new_err(e.to_string()))?)?;
    Ok((u.into_slices().into_iter().map(|inner| ComplexField { inner }).collect(), rep))
}

/// Dyadic norms (`"F"`, `"Y"`, `"Z"`, `"N"`) of the free evolution of `u0` over `[0, window]`.
#[pyfunction]
#[pyo3(signature = (u0, eps, window, slices = 64, spaces = vec!["F".to_string(), "Z".to_string()], s = None))]
fn free_wave_norms<'py>(
    py: Python<'py>,
    u0: &ComplexField,
    eps: f64,
    window: f64,
    slices: usize,
    spaces: Vec<String>,
    s: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spaces: Vec<Space> = spaces.iter().map(|n| Space::parse(n)).collect::<Result<_, _>>().map_err(err)?;
    let u = gl::free_trajectory(&u0.inner, window / (slices.max(2) - 1) as f64, slices, eps).map_err(err)?;
    let s = s.unwrap_or(u0.inner.grid().dim() as f64 / 2.0);
    let rep = norm_spaces(&u, &spaces, s).map_err(err)?;
    let d = PyDict::new(py);
    for (k, v) in rep.entries {
        d.set_item(k, v)?;
    }
    Ok(d)
}

/// Loads a TOML config (with optional `key=value` overrides), runs it into `out`
/// and returns the manifest as a dict.
#[pyfunction]
#[pyo3(signature = (config, out, overrides = Vec::new()))]
fn run_config<'py>(
    py: Python<'py>,
    config: PathBuf,
    out: PathBuf,
    overrides: Vec<String>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = io::load_config_with(&config, None, &overrides).map_err(err)?;
    let outcome = py.detach(|| io::run(&cfg, &out)).map_err(err)?;
    let text = std::fs::read_to_string(&outcome.manifest).map_err(|e| LabError::new_err(e.to_string()))?;
    json_to_py(py, &text)
}

#[pymodule]
fn lls_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LabError", m.py().get_type::<LabError>())?;
    m.add("GENERATOR", random::GENERATOR)?;
    m.add_class::<Grid>()?;
    m.add_class::<ComplexField>()?;
    m.add_class::<Magnetization>()?;
    m.add_function(wrap_pyfunction!(lls_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(gl_march, m)?)?;
    m.add_function(wrap_pyfunction!(picard_solve, m)?)?;
    m.add_function(wrap_pyfunction!(free_wave_norms, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
