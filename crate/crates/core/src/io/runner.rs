//! Dispatch of a validated [`RunConfig`] to the experiment modules, with every
//! artifact written through one [`ArtifactWriter`].

use num_complex::Complex64;
use serde::Serialize;
use std::path::{Path, PathBuf};

use super::config::{CurrentSpec, Experiment, InitialSpec, Normalize, RunConfig};
use super::snapshot::Snapshot;
use super::writer::{ArtifactWriter, Manifest};
use crate::dyadic::composite::{norm_besov, norm_spaces};
use crate::error::{LabError, Result};
use crate::estimates::{
    check_linear_estimate, check_nonlinear_estimate, check_strichartz, measure_contraction, smallness_sweep,
    sweep::log_grid, LinearConfig, NonlinearConfig, RatioReport, Setup, StrichartzConfig, SweepConfig,
};
use crate::field::{ComplexField, CurrentField, MagnetizationField, SpaceTimeField};
use crate::gl::{
    check_equivalence, free_trajectory, gl_march, gl_residual, picard_solve, GlForm, MarchConfig, PicardConfig,
};
use crate::grid::TorusGrid;
use crate::lls::{lls_evolve_with, LlsConfig};
use crate::random;
use crate::stereographic::{project_with_tol, unproject};

/// What a finished run reports back to the caller.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: PathBuf,
    /// Human-readable result lines.
    pub summary: Vec<String>,
}

/// Runs the experiment, writing artifacts and `manifest.json` below `out`.
///
/// The manifest is written even when the experiment fails, recording the error and
/// the exit status, so that every file left in `out` is accounted for.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let mut w = ArtifactWriter::new(out)?;
    let result = dispatch(cfg, &mut w);
    let (status, exit_code, error) = match &result {
        Ok(_) => ("ok".to_string(), 0, None),
        Err(e) => ("error".to_string(), e.exit_code(), Some(e.to_string())),
    };
    let manifest = Manifest {
        tool: "lls-lab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment.name().into(),
        seed: cfg.seed,
        generator: random::GENERATOR.into(),
        status,
        exit_code,
        error,
        config: cfg,
    };
    let path = w.finish(&manifest)?;
    result.map(|summary| RunOutcome { manifest: path, summary })
}

fn dispatch(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    match cfg.experiment {
        Experiment::SimulateLls => simulate_lls(cfg, w),
        Experiment::SimulateGl => simulate_gl(cfg, w),
        Experiment::Picard => picard(cfg, w),
        Experiment::CheckEquivalence => equivalence(cfg, w),
        Experiment::Norms => norms(cfg, w),
        Experiment::VerifyStrichartz => {
            let c = StrichartzConfig {
                setup: setup(cfg),
                k_min: cfg.verify.k_min,
                k_max: cfg.verify.k_max,
                eps_list: cfg.verify.eps_list.clone(),
                include_undamped: cfg.verify.include_undamped,
                seeds: seeds(cfg),
                spread_eps_bound: cfg.verify.spread_eps,
                spread_k_bound: cfg.verify.spread_k,
            };
            write_ratio_reports(w, &check_strichartz(&c)?)
        }
        Experiment::VerifyLinear => {
            let c = LinearConfig {
                setup: setup(cfg),
                k_min: cfg.verify.k_min,
                k_max: cfg.verify.k_max,
                eps_list: cfg.verify.eps_list.clone(),
                seeds: seeds(cfg),
                source_weight: cfg.verify.source_weight,
                spread_eps_bound: cfg.verify.spread_eps,
                spread_k_bound: cfg.verify.spread_k,
            };
            write_ratio_reports(w, &[check_linear_estimate(&c)?])
        }
        Experiment::VerifyNonlinear => {
            let c = NonlinearConfig {
                setup: setup(cfg),
                eps_list: cfg.verify.eps_list.clone(),
                amplitudes: cfg.verify.amplitudes.clone(),
                v_amps: cfg.verify.v_amps.clone(),
                seeds: seeds(cfg),
                band: (cfg.verify.band[0], cfg.verify.band[1]),
                coupling: cfg.gl.coupling,
                spread_eps_bound: cfg.verify.spread_eps,
                ..NonlinearConfig::default()
            };
            write_ratio_reports(w, &[check_nonlinear_estimate(&c)?])
        }
        Experiment::VerifyContraction => contraction(cfg, w),
        Experiment::Sweep => sweep(cfg, w),
    }
}

fn setup(cfg: &RunConfig) -> Setup {
    Setup {
        dim: cfg.grid.dim,
        n: cfg.grid.n,
        period: cfg.grid.period,
        slices: cfg.time.slices,
        window: cfg.time.window,
    }
}

fn seeds(cfg: &RunConfig) -> Vec<u64> {
    (0..cfg.verify.seeds as u64).map(|i| cfg.seed + i).collect()
}

fn picard_config(cfg: &RunConfig) -> PicardConfig {
    PicardConfig {
        max_iters: cfg.picard.max_iters,
        tol: cfg.picard.tol,
        coupling: cfg.gl.coupling,
        blowup_cap: cfg.gl.blowup_cap,
        track_dyadic: cfg.picard.track_dyadic,
        ..PicardConfig::new(cfg.eps, cfg.time.window, cfg.time.slices)
    }
}

fn current(cfg: &RunConfig, grid: TorusGrid) -> Result<CurrentField> {
    match &cfg.current {
        CurrentSpec::Zero => Ok(CurrentField::zero(grid)),
        CurrentSpec::Constant { vector } => CurrentField::constant(grid, vector),
        CurrentSpec::Random { amplitude, band } => {
            random::smooth_current(grid, &mut random::substream(cfg.seed, 1), *amplitude, *band)
        }
        CurrentSpec::File { path } => {
            let v = Snapshot::read(path)?.to_current()?;
            v.grid().same_as(&grid)?;
            Ok(v)
        }
    }
}

fn normalized(u: &ComplexField, amplitude: f64, how: Normalize) -> ComplexField {
    match how {
        Normalize::Sup => random::with_sup(u, amplitude),
        Normalize::L2 => random::with_l2(u, amplitude),
        Normalize::Rms => random::with_l2(u, amplitude * u.grid().volume().sqrt()),
    }
}

enum Initial {
    Chart(ComplexField),
    Sphere(MagnetizationField),
}

fn initial(cfg: &RunConfig, grid: TorusGrid) -> Result<Initial> {
    let mut rng = random::substream(cfg.seed, 0);
    Ok(match &cfg.initial {
        InitialSpec::File { path } => {
            let snap = Snapshot::read(path)?;
            grid.same_as(&snap.grid()?)?;
            if snap.components.len() == 3 {
                Initial::Sphere(snap.to_magnetization(cfg.lls.sphere_tol)?)
            } else {
                Initial::Chart(snap.to_complex()?)
            }
        }
        InitialSpec::SingleMode { amplitude, mode } => {
            let f = grid.fundamental();
            let xi: Vec<f64> = (0..grid.dim()).map(|a| f * mode.get(a).copied().unwrap_or(0) as f64).collect();
            Initial::Chart(ComplexField::from_fn(grid, |x| {
                let phase: f64 = xi.iter().zip(x).map(|(k, y)| k * y).sum();
                Complex64::from_polar(*amplitude, phase)
            }))
        }
        InitialSpec::BandLimited { amplitude, band, normalize } => {
            Initial::Chart(normalized(&random::band_limited(grid, &mut rng, band[0], band[1]), *amplitude, *normalize))
        }
        InitialSpec::ShellLocalized { amplitude, k, normalize } => {
            Initial::Chart(normalized(&random::shell_localized(grid, &mut rng, *k), *amplitude, *normalize))
        }
        InitialSpec::PerturbedNorth { amplitude, band } => {
            Initial::Sphere(random::perturbed_north(grid, &mut rng, *amplitude, *band)?)
        }
        InitialSpec::Uniform { direction } => Initial::Sphere(MagnetizationField::uniform(grid, *direction)?),
    })
}

fn initial_chart(cfg: &RunConfig, grid: TorusGrid) -> Result<ComplexField> {
    match initial(cfg, grid)? {
        Initial::Chart(u) => Ok(u),
        Initial::Sphere(m) => project_with_tol(&m, cfg.lls.pole_guard, cfg.lls.sphere_tol),
    }
}

fn initial_sphere(cfg: &RunConfig, grid: TorusGrid) -> Result<MagnetizationField> {
    match initial(cfg, grid)? {
        Initial::Chart(u) => Ok(unproject(&u)),
        Initial::Sphere(m) => Ok(m),
    }
}

#[derive(Serialize)]
struct TrajectoryEntry {
    file: String,
    time: f64,
}

#[derive(Serialize)]
struct Trajectory {
    grid: TorusGrid,
    sample_dt: f64,
    slices: Vec<TrajectoryEntry>,
}

fn write_trajectory(w: &mut ArtifactWriter, dir: &str, u: &SpaceTimeField) -> Result<()> {
    let mut slices = Vec::with_capacity(u.len());
    for (i, (s, t)) in u.slices().iter().zip(u.times()).enumerate() {
        let file = w.write_snapshot(&format!("{dir}/u_{i:05}"), &Snapshot::from_complex(s))?;
        slices.push(TrajectoryEntry { file, time: t });
    }
    w.write_json(&format!("{dir}/trajectory.json"), &Trajectory { grid: *u.grid(), sample_dt: u.dt(), slices })
}

/// `Σ_c ‖m_c − Ω_c‖_{Ḃ^{n/2}_{2,1}}` with `Ω` the north pole.
fn besov_deviation(m: &MagnetizationField) -> f64 {
    let s = m.grid().dim() as f64 / 2.0;
    (0..3)
        .map(|c| {
            let omega = if c == 2 { 1.0 } else { 0.0 };
            let f = m.component(c).values().iter().map(|z| z - omega).collect();
            norm_besov(
                &ComplexField::new(*m.grid(), f, crate::field::Representation::Physical).expect("grid layout"),
                s,
            )
        })
        .sum()
}

fn simulate_lls(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    let grid = cfg.grid.grid()?;
    let v = current(cfg, grid)?;
    let m0 = initial_sphere(cfg, grid)?;
    let lcfg = LlsConfig {
        eps: cfg.eps,
        dt: cfg.time.dt,
        scheme: cfg.lls.scheme,
        c_stab: cfg.lls.c_stab,
        sphere_tol: cfg.lls.sphere_tol,
    };
    let every = cfg.time.sample_every;
    let mut csv = String::from("time,exchange_energy,sphere_deviation,besov_deviation\n");
    let mut slices = Vec::new();
    let mut step = 0usize;
    let last = lls_evolve_with(&m0, &v, &lcfg, cfg.time.t_end, |s| {
        if step.is_multiple_of(every) {
            let file = w.write_snapshot(&format!("m/m_{:05}", slices.len()), &Snapshot::from_magnetization(&s.m))?;
            slices.push(TrajectoryEntry { file, time: s.time });
            csv.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                s.time,
                s.exchange_energy,
                s.sphere_deviation,
                besov_deviation(&s.m)
            ));
        }
        step += 1;
        Ok(())
    })?;
    w.write_text("lls.csv", &csv)?;
    w.write_json("m/trajectory.json", &Trajectory { grid, sample_dt: lcfg.dt * every as f64, slices })?;
    Ok(vec![
        format!("steps: {}", step.saturating_sub(1)),
        format!("final time: {}", last.time),
        format!("exchange energy: {:e}", last.exchange_energy),
        format!("sphere deviation: {:e}", last.sphere_deviation),
    ])
}

fn simulate_gl(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    let grid = cfg.grid.grid()?;
    let v = current(cfg, grid)?;
    let u0 = initial_chart(cfg, grid)?;
    let mcfg = MarchConfig {
        eps: cfg.eps,
        dt: cfg.time.dt,
        scheme: cfg.gl.scheme,
        coupling: cfg.gl.coupling,
        blowup_cap: cfg.gl.blowup_cap,
        sample_every: cfg.time.sample_every,
    };
    let u = gl_march(&u0, &v, cfg.time.t_end, &mcfg)?;
    write_trajectory(w, "u", &u)?;
    let mut csv = String::from("time,sup,l2\n");
    for (s, t) in u.slices().iter().zip(u.times()) {
        csv.push_str(&format!("{t},{:e},{:e}\n", s.max_abs(), s.l2_norm()));
    }
    w.write_text("gl.csv", &csv)?;
    let residual =
        if u.len() >= 3 { Some(gl_residual(&u, &v, cfg.eps, GlForm::PostFlip, cfg.gl.coupling)?) } else { None };
    #[derive(Serialize)]
    struct Report {
        samples: usize,
        final_sup: f64,
        residual_postflip: Option<crate::gl::ResidualReport>,
    }
    let final_sup = u.slices().last().map(|s| s.max_abs()).unwrap_or(0.0);
    w.write_json("report.json", &Report { samples: u.len(), final_sup, residual_postflip: residual })?;
    let mut out = vec![format!("samples: {}", u.len()), format!("final sup |u|: {final_sup:e}")];
    if let Some(r) = residual {
        out.push(format!("post-flip residual at sample spacing: {:e}", r.relative));
    }
    Ok(out)
}

fn picard(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    let grid = cfg.grid.grid()?;
    let v = current(cfg, grid)?;
    let u0 = initial_chart(cfg, grid)?;
    let pcfg = picard_config(cfg);
    let (u, rep) = picard_solve(&u0, &v, &pcfg)?;
    w.write_json("picard.json", &rep)?;
    write_trajectory(w, "u", &u)?;
    Ok(vec![
        format!("stop: {:?}", rep.stop),
        format!("iterates: {}", rep.iterate_count),
        format!("last difference: {:e}", rep.diff_linf_l2.last().copied().unwrap_or(0.0)),
        format!("last ratio: {:?}", rep.ratios_linf_l2.last()),
    ])
}

fn equivalence(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    let grid = cfg.grid.grid()?;
    let v = current(cfg, grid)?;
    let m0 = initial_sphere(cfg, grid)?;
    let lcfg = LlsConfig {
        eps: cfg.eps,
        dt: cfg.time.dt,
        scheme: cfg.lls.scheme,
        c_stab: cfg.lls.c_stab,
        sphere_tol: cfg.lls.sphere_tol,
    };
    let (rep, last) =
        check_equivalence(&m0, &v, &lcfg, cfg.time.t_end, cfg.lls.pole_guard, cfg.gl.coupling, cfg.check.halving)?;
    w.write_snapshot("m_initial", &Snapshot::from_magnetization(&m0))?;
    w.write_snapshot("u_final", &Snapshot::from_complex(&last))?;
    w.write_json("equivalence.json", &rep)?;
    let mut out = Vec::new();
    for r in &rep.runs {
        out.push(format!(
            "dt {:e}: pre-flip {:e}, post-flip {:e}, post-flip without J3 {:e}",
            r.dt, r.preflip.relative, r.postflip.relative, r.postflip_omitted.relative
        ));
    }
    if let Some(h) = rep.halving_ratio_preflip {
        out.push(format!("pre-flip halving ratio: {h:.3}"));
    }
    Ok(out)
}

fn norms(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    let u0 = match &cfg.norms.input {
        Some(path) => {
            let snap = Snapshot::read(path)?;
            if snap.components.len() == 3 {
                project_with_tol(&snap.to_magnetization(cfg.lls.sphere_tol)?, cfg.lls.pole_guard, cfg.lls.sphere_tol)?
            } else {
                snap.to_complex()?
            }
        }
        None => initial_chart(cfg, cfg.grid.grid()?)?,
    };
    if cfg.norms.spaces.is_empty() {
        return Err(LabError::Config(vec!["`norms.spaces`: at least one space is required".into()]));
    }
    let dt = cfg.time.window / (cfg.time.slices - 1) as f64;
    let u = free_trajectory(&u0, dt, cfg.time.slices, cfg.eps)?;
    let mut report = norm_spaces(&u, &cfg.norms.spaces, cfg.norms.s)?;
    report.entries.insert("besov_initial".into(), norm_besov(&u0, cfg.norms.s));
    report.metadata.notes.push("measured on the free evolution of the input over the configured window".into());
    w.write_text("norms.json", &(report.to_json()? + "\n"))?;
    w.write_text("norms_shells.csv", &report.shells_csv())?;
    Ok(report.entries.iter().map(|(k, v)| format!("{k}: {v:e}")).collect())
}

fn write_ratio_reports(w: &mut ArtifactWriter, reports: &[RatioReport]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for r in reports {
        w.write_text(&format!("{}.json", r.estimate), &(r.to_json()? + "\n"))?;
        w.write_text(&format!("{}.csv", r.estimate), &r.to_csv())?;
        out.push(format!(
            "{}: {} samples, spread over eps {:.3} (bound {}), spread over k {} (bound {}), {}",
            r.estimate,
            r.samples.len(),
            r.stats.spread_eps,
            r.spread_eps_bound,
            r.stats.spread_k.map(|s| format!("{s:.3}")).unwrap_or_else(|| "n/a".into()),
            r.spread_k_bound,
            if r.within_bounds() { "within bounds" } else { "OUT OF BOUNDS" }
        ));
        for (k, v) in &r.extras {
            out.push(format!("{}: {k} = {v:.4}", r.estimate));
        }
    }
    Ok(out)
}

fn contraction(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    let grid = cfg.grid.grid()?;
    let v = current(cfg, grid)?;
    let u0 = initial_chart(cfg, grid)?;
    let a = random::with_sup(
        &random::band_limited(grid, &mut random::substream(cfg.seed, 2), cfg.verify.band[0], cfg.verify.band[1]),
        cfg.verify.perturbation,
    );
    let pcfg = picard_config(cfg);
    let rep = measure_contraction(&a, &u0, &v, &pcfg, cfg.verify.iterations)?;
    w.write_json("contraction.json", &rep)?;
    Ok(vec![
        format!("ratios (Linf L2): {:?}", rep.ratios_linf_l2),
        format!("asymptotic ratio: {:?} ({})", rep.asymptotic, rep.asymptotic_norm),
    ])
}

fn sweep(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<Vec<String>> {
    let s = &cfg.sweep;
    let c = SweepConfig {
        dim: cfg.grid.dim,
        n: cfg.grid.n,
        period: cfg.grid.period,
        window: cfg.time.window,
        slices: cfg.time.slices,
        eps_list: s.eps_list.clone(),
        amplitudes: log_grid(s.amplitude_min, s.amplitude_max, s.amplitude_count),
        v_amps: s.v_amps.clone(),
        band: (s.band[0], s.band[1]),
        seed: cfg.seed,
        max_iters: s.max_iters,
        tol: cfg.picard.tol,
        coupling: cfg.gl.coupling,
    };
    let rep = smallness_sweep(&c)?;
    w.write_text("sweep.json", &(rep.to_json()? + "\n"))?;
    w.write_text("phase.csv", &rep.phase_csv())?;
    w.write_text("cells.csv", &rep.cells_csv())?;
    Ok(rep
        .thresholds
        .iter()
        .map(|t| {
            format!(
                "eps {} v {}: threshold {} ({})",
                t.eps,
                t.v_amp,
                t.threshold.map(|a| format!("{a:e}")).unwrap_or_else(|| "none".into()),
                if t.monotone { "monotone" } else { "not monotone" }
            )
        })
        .collect())
}
