//! TOML run configuration: loading, `--set` overrides and validation with key paths.
//!
//! The key schema, defaults and one annotated example per subcommand live in
//! `docs/config.md` and `configs/` at the repository root.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use toml::{Table, Value};

use crate::dyadic::composite::Space;
use crate::error::{LabError, Result};
use crate::estimates::{DEFAULT_SPREAD_EPS, DEFAULT_SPREAD_K};
use crate::field::SPHERE_TOL;
use crate::gl::march::{EtdScheme, DEFAULT_BLOWUP_CAP};
use crate::gl::nonlinearity::CurrentCoupling;
use crate::gl::picard::DEFAULT_TOL;
use crate::grid::TorusGrid;
use crate::lls::{LlsScheme, DEFAULT_C_STAB};
use crate::stereographic::DEFAULT_POLE_GUARD;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SimulateLls,
    SimulateGl,
    Picard,
    CheckEquivalence,
    Norms,
    VerifyStrichartz,
    VerifyLinear,
    VerifyNonlinear,
    VerifyContraction,
    Sweep,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::SimulateLls,
        Experiment::SimulateGl,
        Experiment::Picard,
        Experiment::CheckEquivalence,
        Experiment::Norms,
        Experiment::VerifyStrichartz,
        Experiment::VerifyLinear,
        Experiment::VerifyNonlinear,
        Experiment::VerifyContraction,
        Experiment::Sweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SimulateLls => "simulate-lls",
            Experiment::SimulateGl => "simulate-gl",
            Experiment::Picard => "picard",
            Experiment::CheckEquivalence => "check-equivalence",
            Experiment::Norms => "norms",
            Experiment::VerifyStrichartz => "verify-strichartz",
            Experiment::VerifyLinear => "verify-linear",
            Experiment::VerifyNonlinear => "verify-nonlinear",
            Experiment::VerifyContraction => "verify-contraction",
            Experiment::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Experiment> {
        Experiment::ALL.into_iter().find(|e| e.name() == s)
    }

    /// Experiments whose state is a magnetization rather than a chart field.
    pub fn is_sphere_valued(&self) -> bool {
        matches!(self, Experiment::SimulateLls | Experiment::CheckEquivalence)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
}

impl GridSpec {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dim, self.n, self.period)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    /// Step of the time-marching experiments.
    pub dt: f64,
    pub t_end: f64,
    /// Store every `sample_every`-th step.
    pub sample_every: usize,
    /// Length of the space-time window of Picard, norm and estimate experiments.
    pub window: f64,
    /// Number of time nodes in that window, including `t = 0`.
    pub slices: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurrentSpec {
    Zero,
    Constant {
        vector: Vec<f64>,
    },
    /// Smooth random field with `sup |v| = amplitude`, drawn from the run seed.
    Random {
        amplitude: f64,
        band: f64,
    },
    /// Snapshot with `dim` real components, held constant in time.
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    Sup,
    Rms,
    L2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    /// Snapshot: one complex component (chart) or three real ones (magnetization).
    File {
        path: PathBuf,
    },
    /// `u = amplitude · e^{iξ·x}` with `ξ = (2π/L)·mode`.
    SingleMode {
        amplitude: f64,
        mode: Vec<i64>,
    },
    /// Gaussian field with flat spectrum on `band[0] <= |ξ| <= band[1]`.
    BandLimited {
        amplitude: f64,
        band: [f64; 2],
        normalize: Normalize,
    },
    /// Gaussian field with spectral weight `χ_k`.
    ShellLocalized {
        amplitude: f64,
        k: i32,
        normalize: Normalize,
    },
    /// `(w₁, w₂, 1 + w₃)/|·|` with `sup |w| = amplitude` and `|ξ| <= band`.
    PerturbedNorth {
        amplitude: f64,
        band: f64,
    },
    Uniform {
        direction: [f64; 3],
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlsSection {
    pub scheme: LlsScheme,
    pub c_stab: f64,
    pub sphere_tol: f64,
    pub pole_guard: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlSection {
    pub scheme: EtdScheme,
    pub coupling: CurrentCoupling,
    pub blowup_cap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardSection {
    pub max_iters: usize,
    pub tol: f64,
    pub track_dyadic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSection {
    pub halving: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormsSection {
    /// Snapshot to measure; without it the initial-data generator is used.
    pub input: Option<PathBuf>,
    pub spaces: Vec<Space>,
    /// Regularity index; defaults to `dim/2`.
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySection {
    pub eps_list: Vec<f64>,
    /// Seeds `seed, seed+1, …` (this many).
    pub seeds: usize,
    pub k_min: i32,
    pub k_max: i32,
    pub include_undamped: bool,
    pub spread_eps: f64,
    pub spread_k: f64,
    pub amplitudes: Vec<f64>,
    pub v_amps: Vec<f64>,
    pub band: [f64; 2],
    pub source_weight: f64,
    /// Applications of the Duhamel map in the contraction measurement.
    pub iterations: usize,
    /// `L^∞` size of the difference between the two contraction data.
    pub perturbation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    pub eps_list: Vec<f64>,
    pub amplitude_min: f64,
    pub amplitude_max: f64,
    pub amplitude_count: usize,
    pub v_amps: Vec<f64>,
    pub band: [f64; 2],
    pub max_iters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub eps: f64,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub current: CurrentSpec,
    pub initial: InitialSpec,
    pub lls: LlsSection,
    pub gl: GlSection,
    pub picard: PicardSection,
    pub check: CheckSection,
    pub norms: NormsSection,
    pub verify: VerifySection,
    pub sweep: SweepSection,
}

impl RunConfig {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Loads a config whose `experiment` key names the subcommand.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    load_config_with(path, None, &[])
}

/// Loads `path`, applies `key=value` overrides and validates everything.
/// `experiment` (from the subcommand) takes the place of the `experiment` key.
pub fn load_config_with(path: &Path, experiment: Option<Experiment>, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::Config(vec![format!("cannot read config {}: {e}", path.display())]))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base, experiment, overrides)
}

/// Parses config text; relative file paths are resolved against `base`.
pub fn parse_config(
    text: &str,
    base: &Path,
    experiment: Option<Experiment>,
    overrides: &[String],
) -> Result<RunConfig> {
    let mut root: Table =
        toml::from_str(text).map_err(|e| LabError::Config(vec![format!("config is not valid TOML: {e}")]))?;
    let mut errors = Vec::new();
    for o in overrides {
        if let Err(e) = apply_override(&mut root, o) {
            errors.push(e);
        }
    }
    let mut r = Reader { root, used: BTreeSet::new(), errors, base: base.to_path_buf() };
    let cfg = r.run_config(experiment);
    r.check_unknown();
    match cfg {
        Some(cfg) if r.errors.is_empty() => Ok(cfg),
        _ => Err(LabError::Config(r.errors)),
    }
}

/// Applies one `key.path=value` override; the value is read as TOML, else as a bare string.
pub fn apply_override(root: &mut Table, assignment: &str) -> std::result::Result<(), String> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| format!("--set {assignment:?}: expected key=value"))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(|p| p.is_empty()) {
        return Err(format!("--set {assignment:?}: empty key segment"));
    }
    let raw = raw.trim();
    let value = toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut table = root;
    for (i, p) in parts[..parts.len() - 1].iter().enumerate() {
        let entry = table.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        table =
            entry.as_table_mut().ok_or_else(|| format!("--set {key}: `{}` is not a table", parts[..=i].join(".")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

struct Reader {
    root: Table,
    used: BTreeSet<String>,
    errors: Vec<String>,
    base: PathBuf,
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "string",
        Value::Integer(_) => "integer",
        Value::Float(_) => "float",
        Value::Boolean(_) => "boolean",
        Value::Datetime(_) => "datetime",
        Value::Array(_) => "array",
        Value::Table(_) => "table",
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

impl Reader {
    fn lookup(&self, path: &str) -> Option<&Value> {
        let mut parts = path.split('.');
        let mut cur = self.root.get(parts.next()?)?;
        for p in parts {
            cur = cur.as_table()?.get(p)?;
        }
        Some(cur)
    }

    fn raw(&mut self, path: &str) -> Option<Value> {
        self.used.insert(path.to_string());
        self.lookup(path).cloned()
    }

    fn error(&mut self, path: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("`{path}`: {msg}"));
    }

    fn mismatch(&mut self, path: &str, expected: &str, got: &Value) {
        self.error(path, format!("expected {expected}, found {}", type_name(got)));
    }

    fn f64(&mut self, path: &str, default: f64) -> f64 {
        match self.raw(path) {
            None => default,
            Some(v) => match as_f64(&v) {
                Some(x) if x.is_finite() => x,
                Some(_) => {
                    self.error(path, "must be finite");
                    default
                }
                None => {
                    self.mismatch(path, "a number", &v);
                    default
                }
            },
        }
    }

    fn int(&mut self, path: &str, default: i64) -> i64 {
        match self.raw(path) {
            None => default,
            Some(Value::Integer(i)) => i,
            Some(v) => {
                self.mismatch(path, "an integer", &v);
                default
            }
        }
    }

    fn count(&mut self, path: &str, default: usize) -> usize {
        let i = self.int(path, default as i64);
        if i < 0 {
            self.error(path, format!("must be non-negative, got {i}"));
            return default;
        }
        i as usize
    }

    fn bool(&mut self, path: &str, default: bool) -> bool {
        match self.raw(path) {
            None => default,
            Some(Value::Boolean(b)) => b,
            Some(v) => {
                self.mismatch(path, "a boolean", &v);
                default
            }
        }
    }

    fn f64_list(&mut self, path: &str, default: Vec<f64>) -> Vec<f64> {
        match self.raw(path) {
            None => default,
            Some(Value::Array(a)) => {
                let xs: Option<Vec<f64>> = a.iter().map(as_f64).collect();
                xs.unwrap_or_else(|| {
                    self.error(path, "expected an array of numbers");
                    default
                })
            }
            Some(v) => {
                self.mismatch(path, "an array of numbers", &v);
                default
            }
        }
    }

    fn int_list(&mut self, path: &str, default: Vec<i64>) -> Vec<i64> {
        match self.raw(path) {
            None => default,
            Some(Value::Array(a)) => {
                let xs: Option<Vec<i64>> = a.iter().map(|v| v.as_integer()).collect();
                xs.unwrap_or_else(|| {
                    self.error(path, "expected an array of integers");
                    default
                })
            }
            Some(v) => {
                self.mismatch(path, "an array of integers", &v);
                default
            }
        }
    }

    fn pair(&mut self, path: &str, default: [f64; 2]) -> [f64; 2] {
        let v = self.f64_list(path, default.to_vec());
        match v.as_slice() {
            [a, b] if a <= b => [*a, *b],
            _ => {
                self.error(path, "expected [lo, hi] with lo <= hi");
                default
            }
        }
    }

    fn string(&mut self, path: &str, default: &str) -> String {
        match self.raw(path) {
            None => default.to_string(),
            Some(Value::String(s)) => s,
            Some(v) => {
                self.mismatch(path, "a string", &v);
                default.to_string()
            }
        }
    }

    /// String-valued key deserialized into an enum; `choices` is listed on error.
    fn choice<T: DeserializeOwned>(&mut self, path: &str, default: T, choices: &[&str]) -> T {
        match self.raw(path) {
            None => default,
            Some(Value::String(s)) => match Value::String(s.clone()).try_into::<T>() {
                Ok(t) => t,
                Err(_) => {
                    self.error(path, format!("unknown value {s:?} (expected one of {})", choices.join(", ")));
                    default
                }
            },
            Some(v) => {
                self.mismatch(path, "a string", &v);
                default
            }
        }
    }

    fn file(&mut self, path: &str) -> Option<PathBuf> {
        match self.raw(path) {
            None => None,
            Some(Value::String(s)) => {
                let p = self.base.join(&s);
                if !p.is_file() {
                    self.error(path, format!("file not found: {}", p.display()));
                }
                Some(p)
            }
            Some(v) => {
                self.mismatch(path, "a file path", &v);
                None
            }
        }
    }

    fn required_file(&mut self, path: &str) -> PathBuf {
        self.file(path).unwrap_or_else(|| {
            if self.lookup(path).is_none() {
                self.error(path, "missing required key");
            }
            PathBuf::new()
        })
    }

    fn positive(&mut self, path: &str, x: f64) {
        if !(x > 0.0) {
            self.error(path, format!("must be positive, got {x}"));
        }
    }

    fn non_negative(&mut self, path: &str, x: f64) {
        if !(x >= 0.0) {
            self.error(path, format!("must be non-negative, got {x}"));
        }
    }

    fn damping(&mut self, path: &str, x: f64) {
        if !(x > 0.0 && x <= 1.0) {
            self.error(path, format!("damping must lie in (0, 1], got {x}"));
        }
    }

    fn leaf_paths(prefix: &str, t: &Table, out: &mut Vec<String>) {
        for (k, v) in t {
            let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match v {
                Value::Table(inner) => Reader::leaf_paths(&p, inner, out),
                _ => out.push(p),
            }
        }
    }

    fn check_unknown(&mut self) {
        let mut leaves = Vec::new();
        Reader::leaf_paths("", &self.root, &mut leaves);
        for p in leaves {
            if !self.used.contains(&p) {
                self.errors.push(format!("`{p}`: unknown key"));
            }
        }
    }

    fn run_config(&mut self, forced: Option<Experiment>) -> Option<RunConfig> {
        let experiment = self.experiment(forced)?;
        let d = Defaults::for_experiment(experiment);
        let seed = self.int("seed", 1);
        if seed < 0 {
            self.error("seed", "must be non-negative");
        }
        let eps = self.f64("eps", 0.1);
        self.damping("eps", eps);

        let grid = GridSpec {
            dim: self.count("grid.dim", d.grid.dim),
            n: self.count("grid.n", d.grid.n),
            period: self.f64("grid.period", d.grid.period),
        };
        if !(1..=3).contains(&grid.dim) {
            self.error("grid.dim", format!("must be 1, 2 or 3, got {}", grid.dim));
        }
        if grid.n < 2 || !grid.n.is_power_of_two() {
            self.error("grid.n", format!("must be a power of two >= 2, got {}", grid.n));
        }
        if !(grid.period.is_finite() && grid.period > 0.0) {
            self.error("grid.period", format!("must be positive, got {}", grid.period));
        }

        let time = TimeSpec {
            dt: self.f64("time.dt", d.time.dt),
            t_end: self.f64("time.t_end", d.time.t_end),
            sample_every: self.count("time.sample_every", d.time.sample_every),
            window: self.f64("time.window", d.time.window),
            slices: self.count("time.slices", d.time.slices),
        };
        self.positive("time.dt", time.dt);
        self.non_negative("time.t_end", time.t_end);
        self.positive("time.window", time.window);
        if time.sample_every == 0 {
            self.error("time.sample_every", "must be at least 1");
        }
        if time.slices < 3 {
            self.error("time.slices", format!("needs at least 3 time nodes, got {}", time.slices));
        }

        let current = self.current(grid.dim);
        let initial = self.initial(&d);

        let lls = LlsSection {
            scheme: self.choice("lls.scheme", LlsScheme::Rk4Renorm, &["rk4_renorm", "heun_renorm"]),
            c_stab: self.f64("lls.c_stab", DEFAULT_C_STAB),
            sphere_tol: self.f64("lls.sphere_tol", SPHERE_TOL),
            pole_guard: self.f64("lls.pole_guard", DEFAULT_POLE_GUARD),
        };
        self.positive("lls.c_stab", lls.c_stab);
        self.positive("lls.sphere_tol", lls.sphere_tol);
        self.positive("lls.pole_guard", lls.pole_guard);

        let gl = GlSection {
            scheme: self.choice("gl.scheme", EtdScheme::EtdRk2, &["etd1", "etd-rk2"]),
            coupling: self.choice("gl.coupling", CurrentCoupling::Direct, &["direct", "conjugate", "omitted"]),
            blowup_cap: self.f64("gl.blowup_cap", DEFAULT_BLOWUP_CAP),
        };
        self.positive("gl.blowup_cap", gl.blowup_cap);

        let picard = PicardSection {
            max_iters: self.count("picard.max_iters", 40),
            tol: self.f64("picard.tol", DEFAULT_TOL),
            track_dyadic: self.bool("picard.track_dyadic", true),
        };
        self.positive("picard.tol", picard.tol);

        let check = CheckSection { halving: self.bool("check.halving", true) };

        let input = self.file("norms.input");
        let names: Vec<String> = match self.raw("norms.spaces") {
            None => vec!["F".into(), "Z".into()],
            Some(Value::Array(a)) if a.iter().all(|v| v.is_str()) => {
                a.iter().map(|v| v.as_str().unwrap_or_default().to_string()).collect()
            }
            Some(v) => {
                self.mismatch("norms.spaces", "an array of strings", &v);
                Vec::new()
            }
        };
        let mut spaces = Vec::new();
        for n in &names {
            match Space::parse(n) {
                Ok(s) => spaces.push(s),
                Err(_) => self.error("norms.spaces", format!("unknown space {n:?} (expected F, Y, Z or N)")),
            }
        }
        let norms = NormsSection { input, spaces, s: self.f64("norms.s", grid.dim as f64 / 2.0) };

        let verify = VerifySection {
            eps_list: self.f64_list("verify.eps_list", vec![0.01, 0.1, 0.5]),
            seeds: self.count("verify.seeds", 10),
            k_min: self.int("verify.k_min", -1) as i32,
            k_max: self.int("verify.k_max", 4) as i32,
            include_undamped: self.bool("verify.include_undamped", true),
            spread_eps: self.f64("verify.spread_eps", DEFAULT_SPREAD_EPS),
            spread_k: self.f64("verify.spread_k", DEFAULT_SPREAD_K),
            amplitudes: self.f64_list("verify.amplitudes", vec![0.05, 0.2, 0.5]),
            v_amps: self.f64_list("verify.v_amps", vec![0.0, 0.05]),
            band: self.pair("verify.band", [0.5, 4.0]),
            source_weight: self.f64("verify.source_weight", 1.0),
            iterations: self.count("verify.iterations", 8),
            perturbation: self.f64("verify.perturbation", 1e-4),
        };
        for (i, &e) in verify.eps_list.clone().iter().enumerate() {
            self.damping(&format!("verify.eps_list[{i}]"), e);
        }
        if verify.seeds == 0 {
            self.error("verify.seeds", "must be at least 1");
        }
        if verify.k_min > verify.k_max {
            self.error("verify.k_min", "must not exceed verify.k_max");
        }
        for (i, &a) in verify.amplitudes.clone().iter().enumerate() {
            self.non_negative(&format!("verify.amplitudes[{i}]"), a);
        }
        for (i, &a) in verify.v_amps.clone().iter().enumerate() {
            self.non_negative(&format!("verify.v_amps[{i}]"), a);
        }
        self.non_negative("verify.perturbation", verify.perturbation);

        let sweep = SweepSection {
            eps_list: self.f64_list("sweep.eps_list", vec![0.05, 0.1, 0.5]),
            amplitude_min: self.f64("sweep.amplitude_min", 1e-4),
            amplitude_max: self.f64("sweep.amplitude_max", 1.0),
            amplitude_count: self.count("sweep.amplitude_count", 9),
            v_amps: self.f64_list("sweep.v_amps", vec![0.0]),
            band: self.pair("sweep.band", [0.5, 5.0]),
            max_iters: self.count("sweep.max_iters", 60),
        };
        for (i, &e) in sweep.eps_list.clone().iter().enumerate() {
            self.damping(&format!("sweep.eps_list[{i}]"), e);
        }
        self.positive("sweep.amplitude_min", sweep.amplitude_min);
        if !(sweep.amplitude_max >= sweep.amplitude_min) {
            self.error("sweep.amplitude_max", "must not be below sweep.amplitude_min");
        }
        if sweep.amplitude_count == 0 {
            self.error("sweep.amplitude_count", "must be at least 1");
        }
        for (i, &a) in sweep.v_amps.clone().iter().enumerate() {
            self.non_negative(&format!("sweep.v_amps[{i}]"), a);
        }

        Some(RunConfig {
            experiment,
            seed: seed.max(0) as u64,
            eps,
            grid,
            time,
            current,
            initial,
            lls,
            gl,
            picard,
            check,
            norms,
            verify,
            sweep,
        })
    }

    fn experiment(&mut self, forced: Option<Experiment>) -> Option<Experiment> {
        let named = match self.raw("experiment") {
            None => None,
            Some(Value::String(s)) => match Experiment::parse(&s) {
                Some(e) => Some(e),
                None => {
                    let all: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                    self.error("experiment", format!("unknown experiment {s:?} (expected one of {})", all.join(", ")));
                    return None;
                }
            },
            Some(v) => {
                self.mismatch("experiment", "a string", &v);
                return None;
            }
        };
        match (forced, named) {
            (Some(f), Some(n)) if f != n => {
                self.error("experiment", format!("config is for {} but the subcommand is {}", n.name(), f.name()));
                None
            }
            (Some(f), _) => Some(f),
            (None, Some(n)) => Some(n),
            (None, None) => {
                self.error("experiment", "missing required key (or pass a subcommand)");
                None
            }
        }
    }

    fn current(&mut self, dim: usize) -> CurrentSpec {
        let kind = self.string("current.kind", "zero");
        match kind.as_str() {
            "zero" => CurrentSpec::Zero,
            "constant" => {
                let vector = self.f64_list("current.vector", vec![0.0; dim]);
                if vector.len() != dim {
                    self.error("current.vector", format!("needs {dim} components, got {}", vector.len()));
                }
                CurrentSpec::Constant { vector }
            }
            "random" => {
                let amplitude = self.f64("current.amplitude", 0.05);
                self.non_negative("current.amplitude", amplitude);
                let band = self.f64("current.band", 2.0);
                self.non_negative("current.band", band);
                CurrentSpec::Random { amplitude, band }
            }
            "file" => CurrentSpec::File { path: self.required_file("current.path") },
            other => {
                self.error("current.kind", format!("unknown kind {other:?} (expected zero, constant, random or file)"));
                CurrentSpec::Zero
            }
        }
    }

    fn initial(&mut self, d: &Defaults) -> InitialSpec {
        let kind = self.string("initial.kind", d.initial_kind);
        let norm_choices = ["sup", "rms", "l2"];
        let spec = match kind.as_str() {
            "file" => InitialSpec::File { path: self.required_file("initial.path") },
            "single_mode" => {
                let amplitude = self.f64("initial.amplitude", d.amplitude);
                let mode = self.int_list("initial.mode", vec![1, 0, 0]);
                InitialSpec::SingleMode { amplitude, mode }
            }
            "band_limited" => InitialSpec::BandLimited {
                amplitude: self.f64("initial.amplitude", d.amplitude),
                band: self.pair("initial.band", [0.5, 4.0]),
                normalize: self.choice("initial.normalize", Normalize::Sup, &norm_choices),
            },
            "shell_localized" => InitialSpec::ShellLocalized {
                amplitude: self.f64("initial.amplitude", d.amplitude),
                k: self.int("initial.k", 0) as i32,
                normalize: self.choice("initial.normalize", Normalize::Sup, &norm_choices),
            },
            "perturbed_north" => InitialSpec::PerturbedNorth {
                amplitude: self.f64("initial.amplitude", d.amplitude),
                band: self.f64("initial.band", 2.0),
            },
            "uniform" => {
                let v = self.f64_list("initial.direction", vec![0.0, 0.0, 1.0]);
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if v.len() != 3 || n == 0.0 {
                    self.error("initial.direction", "expected a nonzero 3-vector");
                    InitialSpec::Uniform { direction: [0.0, 0.0, 1.0] }
                } else {
                    InitialSpec::Uniform { direction: [v[0] / n, v[1] / n, v[2] / n] }
                }
            }
            other => {
                self.error(
                    "initial.kind",
                    format!(
                        "unknown kind {other:?} (expected file, single_mode, band_limited, shell_localized, perturbed_north or uniform)"
                    ),
                );
                return InitialSpec::Uniform { direction: [0.0, 0.0, 1.0] };
            }
        };
        match &spec {
            InitialSpec::SingleMode { amplitude, .. }
            | InitialSpec::BandLimited { amplitude, .. }
            | InitialSpec::ShellLocalized { amplitude, .. }
            | InitialSpec::PerturbedNorth { amplitude, .. } => self.non_negative("initial.amplitude", *amplitude),
            _ => {}
        }
        if let InitialSpec::SingleMode { mode, .. } = &spec {
            if mode.len() != 3 {
                self.error("initial.mode", "expected 3 integers (unused axes ignored)");
            }
        }
        spec
    }
}

struct Defaults {
    grid: GridSpec,
    time: TimeSpec,
    initial_kind: &'static str,
    amplitude: f64,
}

impl Defaults {
    fn for_experiment(e: Experiment) -> Defaults {
        let small = GridSpec { dim: 3, n: 16, period: 2.0 * PI };
        let time = TimeSpec { dt: 1e-3, t_end: 0.1, sample_every: 10, window: 0.05, slices: 64 };
        let base = Defaults { grid: small, time, initial_kind: "band_limited", amplitude: 0.05 };
        match e {
            Experiment::SimulateLls => Defaults { initial_kind: "perturbed_north", amplitude: 0.1, ..base },
            Experiment::SimulateGl => base,
            Experiment::Picard | Experiment::VerifyContraction => {
                Defaults { initial_kind: "single_mode", amplitude: 1e-3, ..base }
            }
            Experiment::CheckEquivalence => Defaults {
                time: TimeSpec { dt: 1e-4, t_end: 0.01, sample_every: 1, ..time },
                initial_kind: "perturbed_north",
                amplitude: 0.1,
                ..base
            },
            Experiment::Norms => Defaults { time: TimeSpec { window: 0.1, ..time }, ..base },
            Experiment::VerifyStrichartz | Experiment::VerifyLinear => Defaults {
                grid: GridSpec { dim: 3, n: 32, period: 4.0 * PI },
                time: TimeSpec { window: 0.1, ..time },
                ..base
            },
            Experiment::VerifyNonlinear => Defaults { time: TimeSpec { window: 0.1, ..time }, ..base },
            Experiment::Sweep => Defaults { time: TimeSpec { window: 0.2, ..time }, ..base },
        }
    }
}
