//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! `cargo test --test acceptance` runs everything; trailing numbers
//! (`cargo test --test acceptance -- 3 5`) restrict the run to those criteria.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use lls_core::dyadic::projectors::shell_multiplier;
use lls_core::dyadic::{lp_project, ShellRange, SpaceTimeSpectrum};
use lls_core::estimates::{
    check_linear_estimate, check_nonlinear_estimate, check_strichartz, measure_contraction, smallness_sweep,
    LinearConfig, NonlinearConfig, RatioReport, StrichartzConfig, SweepConfig,
};
use lls_core::gl::{check_equivalence, picard_solve, CurrentCoupling, PicardConfig};
use lls_core::io::{parse_config, run, MANIFEST_NAME};
use lls_core::lls::{lls_evolve_with, lls_rhs, LlsConfig, LlsScheme};
use lls_core::spectral::semigroup_apply;
use lls_core::stereographic::{project, unproject, unproject_point};
use lls_core::{random, ComplexField, CurrentField, SpaceTimeField, TorusGrid};

const SPHERE_TOL: f64 = 1e-9;
const SPHERE_RUNTIME: Duration = Duration::from_secs(60);
const TANGENCY_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-12;
const UNPROJECT_TOL: f64 = 1e-14;
const PREFLIP_TOL: f64 = 5e-3;
const HALVING_FACTOR: f64 = 3.0;
const EQUIVALENCE_RUNTIME: Duration = Duration::from_secs(300);
const SEMIGROUP_EXACT_TOL: f64 = 1e-10;
const SEMIGROUP_LAW_TOL: f64 = 1e-12;
const PARTITION_TOL: f64 = 1e-10;
const FREE_WAVE_FRACTION: f64 = 0.99;
const CONTRACTION_BOUND: f64 = 0.35;
const PICARD_RUNTIME: Duration = Duration::from_secs(300);
const SWEEP_RUNTIME: Duration = Duration::from_secs(1800);
const EXPONENT_TOL: f64 = 0.2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sphere_conservation() -> Outcome {
    let start = Instant::now();
    let g = TorusGrid::new(3, 32, 2.0 * PI).unwrap();
    let m0 = random::perturbed_north(g, &mut random::rng(1), 0.2, 3.0).unwrap();
    let v = random::smooth_current(g, &mut random::substream(1, 1), 0.05, 2.0).unwrap();
    let cfg = LlsConfig::new(0.1, 1e-3).with_scheme(LlsScheme::Rk4Renorm);
    let mut worst = 0.0f64;
    let mut steps = 0usize;
    lls_evolve_with(&m0, &v, &cfg, 0.2, |s| {
        worst = worst.max(s.m.max_sphere_deviation());
        steps += 1;
        Ok(())
    })
    .unwrap();
    let elapsed = start.elapsed();
    // the callback also sees the initial state
    let pass = worst <= SPHERE_TOL && steps > 200 && elapsed < SPHERE_RUNTIME;
    outcome(pass, format!("{} steps, max ||m|-1| = {worst:.2e}, {elapsed:.1?}", steps - 1))
}

fn tangency() -> Outcome {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let m = random::sphere_field(g, &mut random::rng(100 + i), 0.1 + 3.0 * i as f64 / 49.0, 4.0);
        let v = random::smooth_current(g, &mut random::substream(100 + i, 1), 0.5 * (i % 5) as f64 / 4.0, 2.0).unwrap();
        let eps = i as f64 / 49.0;
        let rhs = lls_rhs(&m, &v, eps).unwrap();
        let sup = rhs.iter().map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()).fold(0.0, f64::max);
        let dot = m
            .values()
            .iter()
            .zip(&rhs)
            .map(|(a, r)| (a[0] * r[0] + a[1] * r[1] + a[2] * r[2]).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dot / sup);
    }
    outcome(worst <= TANGENCY_TOL, format!("50 triples, max |m.rhs| / |rhs|_inf = {worst:.2e}"))
}

fn round_trip() -> Outcome {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let mut worst = 0.0f64;
    let mut lowest_m3 = 1.0f64;
    for i in 0..50u64 {
        // m3 >= (1 - r^2)/(1 + r^2) > -0.9 for r < sqrt(19)
        let m = random::sphere_field(g, &mut random::rng(200 + i), 0.1 + 4.2 * i as f64 / 49.0, 4.0);
        lowest_m3 = m.values().iter().map(|x| x[2]).fold(lowest_m3, f64::min);
        let back = unproject(&project(&m, 1e-3).unwrap());
        for (a, b) in m.values().iter().zip(back.values()) {
            for c in 0..3 {
                worst = worst.max((a[c] - b[c]).abs());
            }
        }
    }
    let mut off_sphere = 0.0f64;
    for i in 0..50u64 {
        let u = random::with_sup(
            &random::band_limited(g, &mut random::rng(300 + i), 0.0, 8.0),
            10f64.powf(i as f64 / 4.0 - 6.0),
        );
        for z in u.values().iter().copied().chain([Complex64::new(1e150, -1e150), Complex64::new(0.0, 0.0)]) {
            let p = unproject_point(z);
            off_sphere = off_sphere.max(((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs());
        }
    }
    outcome(
        worst <= ROUND_TRIP_TOL && off_sphere <= UNPROJECT_TOL && lowest_m3 > -0.9,
        format!("round trip {worst:.2e} (min m3 {lowest_m3:.3}), unproject off-sphere {off_sphere:.2e}"),
    )
}

fn transform_equivalence() -> Outcome {
    let start = Instant::now();
    let g = TorusGrid::new(3, 32, 2.0 * PI).unwrap();
    let m0 = random::perturbed_north(g, &mut random::rng(1), 0.1, 2.0).unwrap();
    let cfg = LlsConfig::new(0.1, 1e-4);
    let mut pass = true;
    let mut parts = Vec::new();
    for v_amp in [0.0, 0.05] {
        let v = CurrentField::constant(g, &[v_amp, 0.0, 0.0]).unwrap();
        let (rep, _) = check_equivalence(&m0, &v, &cfg, 0.05, 1e-3, CurrentCoupling::default(), true).unwrap();
        let pre = rep.runs[0].preflip.relative;
        let ratio = rep.halving_ratio_preflip.unwrap_or(f64::NAN);
        pass &= pre < PREFLIP_TOL && ratio >= HALVING_FACTOR;
        parts.push(format!(
            "|v|={v_amp}: preflip {pre:.3e} (halving {ratio:.2}); diagnostics: postflip {:.3e} (halving {:.2}), \
             postflip without J3 {:.3e} (halving {:.2})",
            rep.runs[0].postflip.relative,
            rep.halving_ratio_postflip.unwrap_or(f64::NAN),
            rep.runs[0].postflip_omitted.relative,
            rep.halving_ratio_omitted.unwrap_or(f64::NAN),
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < EQUIVALENCE_RUNTIME;
    outcome(pass, format!("{}; {elapsed:.1?}", parts.join("; ")))
}

fn semigroup() -> Outcome {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let mut exact_err = 0.0f64;
    for (xi, t, eps) in [([1.0, 0.0, 0.0], 0.3, 0.1), ([2.0, -3.0, 1.0], 0.05, 0.0), ([7.0, 7.0, -7.0], 0.01, 1.0)] {
        let f = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]));
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let decay = (-Complex64::new(eps, 1.0) * t * xi2).exp();
        let got = semigroup_apply(&f, t, eps).unwrap();
        exact_err = exact_err.max(max_diff(&got, &f.scale(decay)));
    }
    let mut law_err = 0.0f64;
    for i in 0..20u64 {
        let f = random::with_sup(&random::band_limited(g, &mut random::rng(400 + i), 0.0, 8.0), 1.0);
        let (s, t, eps) = (0.013 * i as f64, 0.07, i as f64 / 19.0);
        let lhs = semigroup_apply(&semigroup_apply(&f, s, eps).unwrap(), t, eps).unwrap();
        law_err = law_err.max(max_diff(&lhs, &semigroup_apply(&f, s + t, eps).unwrap()));
    }
    outcome(
        exact_err < SEMIGROUP_EXACT_TOL && law_err < SEMIGROUP_LAW_TOL,
        format!("single-mode error {exact_err:.2e}, semigroup law {law_err:.2e}"),
    )
}

fn littlewood_paley() -> Outcome {
    let mut defect = 0.0f64;
    for (dim, n, l) in [(1, 128, 2.0 * PI), (2, 64, 10.0), (3, 32, 4.0 * PI)] {
        let g = TorusGrid::new(dim, n, l).unwrap();
        let range = ShellRange::for_grid(&g);
        let (lo, hi) = range.safe_annulus();
        let mut total = vec![0.0; g.len()];
        for k in range.iter() {
            for (t, m) in total.iter_mut().zip(shell_multiplier(&g, k)) {
                *t += m;
            }
        }
        for (i, r) in g.xi_norms().iter().enumerate() {
            if *r >= lo && *r <= hi && !g.touches_nyquist(i) {
                defect = defect.max((total[i] - 1.0).abs());
            }
        }
    }
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let range = ShellRange::for_grid(&g);
    let (lo, hi) = range.safe_annulus();
    let (mut lowest, mut highest) = (f64::INFINITY, 0.0f64);
    for i in 0..50u64 {
        let f = random::band_limited(g, &mut random::rng(500 + i), lo, hi);
        let total = f.l2_norm().powi(2);
        let pieces: f64 = range.iter().map(|k| lp_project(&f, k).field.l2_norm().powi(2)).sum();
        lowest = lowest.min(pieces / total);
        highest = highest.max(pieces / total);
    }
    outcome(
        defect < PARTITION_TOL && lowest >= 0.5 && highest <= 1.0 + 1e-12,
        format!("partition defect {defect:.2e}; sum |P_k f|^2 / |f|^2 in [{lowest:.4}, {highest:.4}] over 50 fields"),
    )
}

fn free_wave_localization() -> Outcome {
    let g = TorusGrid::new(3, 8, 2.0 * PI).unwrap();
    let (dt, slices) = (0.01, 256);
    let wave = |xi: [f64; 3], mu: f64| {
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        SpaceTimeField::from_fn(g, dt, slices, move |t, x| {
            Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2] - xi2 * t + mu * t)
        })
        .unwrap()
    };
    let mut worst_fraction = 1.0f64;
    for xi in [[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [3.0, -2.0, 1.0]] {
        let spec = SpaceTimeSpectrum::new(&wave(xi, 0.0)).unwrap();
        let e = spec.shell_energies();
        let total: f64 = e.iter().sum();
        worst_fraction = worst_fraction.min((e[0] + e[1]) / total);
    }
    let mut worst_offset = 0.0f64;
    let mut shells = 0;
    for (xi, mu) in
        [([1.0, 0.0, 0.0], 31.0), ([2.0, 1.0, 0.0], 60.0), ([1.0, 1.0, 1.0], -100.0), ([0.0, 2.0, 0.0], 200.0)]
    {
        let spec = SpaceTimeSpectrum::new(&wave(xi, mu)).unwrap();
        let sh = *spec.shells();
        shells = sh.shell_count();
        let e = spec.shell_energies();
        let (i, _) = e.iter().enumerate().fold((0, 0.0), |best, (i, &x)| if x > best.1 { (i, x) } else { best });
        // τ + |ξ|² = μ for this wave
        let j = sh.j_min + i as i32;
        worst_offset = worst_offset.max((j as f64 - mu.abs().log2()).abs());
    }
    outcome(
        worst_fraction >= FREE_WAVE_FRACTION && worst_offset <= 1.0,
        format!(
            "free-wave mass in two lowest of {shells} shells >= {worst_fraction:.6}; \
             modulated peak within {worst_offset:.2} shells of log2|mu|"
        ),
    )
}

fn picard_contraction() -> Outcome {
    let start = Instant::now();
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let u0 = ComplexField::from_fn(g, |x| Complex64::from_polar(1e-3, x[0]));
    let v = CurrentField::zero(g);
    let cfg = PicardConfig::new(0.1, 0.05, 64);
    let (_, rep) = picard_solve(&u0, &v, &cfg).unwrap();
    let monotone = rep.diff_linf_l2.windows(2).all(|w| w[1] < w[0]);
    let geometric = rep.ratios_linf_l2.iter().all(|&r| r < 1.0);
    let perturbation = random::with_sup(&random::band_limited(g, &mut random::substream(1, 2), 0.5, 4.0), 1e-4);
    let con = measure_contraction(&perturbation, &u0, &v, &cfg, 8).unwrap();
    let asymptotic = con.asymptotic.unwrap_or(f64::NAN);
    let elapsed = start.elapsed();
    outcome(
        rep.converged && monotone && geometric && asymptotic <= CONTRACTION_BOUND && elapsed < PICARD_RUNTIME,
        format!(
            "converged {} in {} iterates, differences {:?}; contraction ratio {asymptotic:.3e} ({}); {elapsed:.1?}",
            rep.converged,
            rep.iterate_count,
            rep.diff_linf_l2.iter().map(|d| format!("{d:.1e}")).collect::<Vec<_>>(),
            con.asymptotic_norm,
        ),
    )
}

fn smallness_phase_diagram() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut per_seed = Vec::new();
    let mut indices: Vec<Vec<Option<usize>>> = Vec::new();
    for seed in [1u64, 2, 3] {
        let rep = smallness_sweep(&SweepConfig { seed, ..SweepConfig::default() }).unwrap();
        pass &= rep.all_monotone() && rep.any_diverged() && rep.cells.iter().any(|c| c.converged);
        indices.push(rep.thresholds.iter().map(|t| t.index).collect());
        per_seed.push(format!(
            "seed {seed}: {}",
            rep.thresholds
                .iter()
                .map(|t| format!(
                    "eps {} -> {}",
                    t.eps,
                    t.threshold.map(|a| format!("{a:.0e}")).unwrap_or("none".into())
                ))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let stable = (0..indices[0].len()).all(|c| {
        let col: Vec<i64> = indices.iter().map(|s| s[c].map(|i| i as i64).unwrap_or(-1)).collect();
        col.iter().max().unwrap() - col.iter().min().unwrap() <= 1
    });
    let elapsed = start.elapsed();
    pass &= stable && elapsed < SWEEP_RUNTIME;
    outcome(pass, format!("{}; stable across seeds {stable}; {elapsed:.1?}", per_seed.join("; ")))
}

fn describe(r: &RatioReport) -> String {
    format!(
        "{} ({} samples, finite {}): spread eps {:.3} / {}, spread k {} / {}",
        r.estimate,
        r.samples.len(),
        r.stats.all_finite,
        r.stats.spread_eps,
        r.spread_eps_bound,
        r.stats.spread_k.map(|s| format!("{s:.3}")).unwrap_or("-".into()),
        r.spread_k_bound,
    )
}

fn estimate_uniformity() -> Outcome {
    let start = Instant::now();
    let mut reports = check_strichartz(&StrichartzConfig::default()).unwrap();
    reports.push(check_linear_estimate(&LinearConfig::default()).unwrap());
    let nonlinear = check_nonlinear_estimate(&NonlinearConfig::default()).unwrap();
    let j1 = nonlinear.extras.get("j1_exponent").copied().unwrap_or(f64::NAN);
    let j2 = nonlinear.extras.get("j2_exponent").copied().unwrap_or(f64::NAN);
    reports.push(nonlinear);
    let bounds = reports.iter().all(|r| r.within_bounds());
    let exponents = (j1 - 1.0).abs() <= EXPONENT_TOL * 1.0 && (j2 - 3.0).abs() <= EXPONENT_TOL * 3.0;
    let text: Vec<String> = reports.iter().map(describe).collect();
    outcome(
        bounds && exponents,
        format!("{}; J1 exponent {j1:.3}, J2 exponent {j2:.3}; {:.1?}", text.join("; "), start.elapsed()),
    )
}

fn determinism() -> Outcome {
    let configs = [
        "experiment = \"picard\"\nseed = 7\neps = 0.1\n[grid]\ndim = 3\nn = 16\n[time]\nwindow = 0.05\nslices = 64\n\
         [initial]\nkind = \"single_mode\"\namplitude = 1e-3\nmode = [1, 0, 0]\n",
        "experiment = \"verify-contraction\"\nseed = 7\neps = 0.1\n[grid]\ndim = 3\nn = 8\n[time]\nwindow = 0.05\nslices = 64\n",
        "experiment = \"sweep\"\nseed = 7\n[grid]\ndim = 3\nn = 8\n[sweep]\neps_list = [0.1, 0.5]\namplitude_count = 4\n",
    ];
    let mut pass = true;
    let mut names = Vec::new();
    for text in configs {
        let cfg = parse_config(text, std::path::Path::new("."), None, &[]).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run(&cfg, a.path()).unwrap();
        run(&cfg, b.path()).unwrap();
        let ma = std::fs::read(a.path().join(MANIFEST_NAME)).unwrap();
        let mb = std::fs::read(b.path().join(MANIFEST_NAME)).unwrap();
        pass &= ma == mb;
        names.push(format!("{} ({} bytes, identical {})", cfg.experiment.name(), ma.len(), ma == mb));
    }
    outcome(pass, names.join(", "))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "sphere conservation", sphere_conservation),
        (2, "tangency", tangency),
        (3, "stereographic round trip", round_trip),
        (4, "transform equivalence", transform_equivalence),
        (5, "semigroup exactness", semigroup),
        (6, "Littlewood-Paley suite", littlewood_paley),
        (7, "free-wave modulation localization", free_wave_localization),
        (8, "Picard convergence and contraction", picard_contraction),
        (9, "smallness phase diagram", smallness_phase_diagram),
        (10, "estimate-ratio uniformity", estimate_uniformity),
        (11, "determinism", determinism),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} {name}: {}", result.detail);
        if !result.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
