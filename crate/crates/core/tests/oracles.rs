//! Independent reimplementations, analytic solutions and
//! self-convergence checks for the solvers and norms.

use num_complex::Complex64;
use std::f64::consts::PI;

use lls_core::dyadic::composite::{norm_fk, norm_yk, norm_zk};
use lls_core::dyadic::lebesgue::{norm_anisotropic, norm_mixed, trapezoid_weights};
use lls_core::dyadic::{lp_project_directional, norm_xsbq, tapered};
use lls_core::gl::{
    free_trajectory, gl_march, gl_nonlinearity_of, picard_map, picard_solve, CurrentCoupling, EtdScheme, MarchConfig,
    PicardConfig,
};
use lls_core::lls::{exchange_energy, lls_evolve, lls_evolve_with, lls_rhs, LlsConfig, LlsScheme};
use lls_core::spectral::{laplacian, semigroup_apply, to_spectral};
use lls_core::stereographic::unproject;
use lls_core::{random, ComplexField, CurrentField, MagnetizationField, SpaceTimeField, TorusGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn mag_diff(a: &MagnetizationField, b: &MagnetizationField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

fn smooth_chart(g: TorusGrid, amp: f64) -> ComplexField {
    ComplexField::from_fn(g, |x| {
        Complex64::new(amp * x[0].cos(), 0.5 * amp * (x[1] + 0.3).sin()) + I * (0.3 * amp * (2.0 * x[0]).cos())
    })
}

#[test]
fn laplacian_matches_finite_differences_at_second_order() {
    let err = |n: usize| {
        let g = TorusGrid::new(2, n, 2.0 * PI).unwrap();
        let f = ComplexField::from_fn(g, |x| Complex64::new(x[0].sin() * (2.0 * x[1]).cos(), (x[0] + x[1]).cos()));
        let lap = laplacian(&f);
        let h = g.spacing();
        let mut e = 0.0f64;
        for i in 0..g.len() {
            let c = g.coords(i);
            let mut fd = -4.0 * f.values()[i];
            for axis in 0..2 {
                for s in [1, n - 1] {
                    let mut d = c;
                    d[axis] = (d[axis] + s) % n;
                    fd += f.values()[g.flat(d)];
                }
            }
            e = e.max((fd / (h * h) - lap.values()[i]).norm());
        }
        e
    };
    let (e16, e32, e64) = (err(16), err(32), err(64));
    assert!(e16 / e32 > 3.5 && e32 / e64 > 3.5, "{e16} {e32} {e64}");
}

#[test]
fn lls_rhs_matches_componentwise_expansion() {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let m = unproject(&smooth_chart(g, 0.4));
    let eps = 0.3;
    let rhs = lls_rhs(&m, &CurrentField::zero(g), eps).unwrap();
    let lap: Vec<Vec<f64>> =
        (0..3).map(|c| laplacian(&m.component(c)).values().iter().map(|z| z.re).collect()).collect();
    let mut worst = 0.0f64;
    for (i, mi) in m.values().iter().enumerate() {
        let (m1, m2, m3) = (mi[0], mi[1], mi[2]);
        let (l1, l2, l3) = (lap[0][i], lap[1][i], lap[2][i]);
        // m×Δm
        let a = [m2 * l3 - m3 * l2, m3 * l1 - m1 * l3, m1 * l2 - m2 * l1];
        // m×(m×Δm) = m (m·Δm) − |m|² Δm
        let mdl = m1 * l1 + m2 * l2 + m3 * l3;
        let mm = m1 * m1 + m2 * m2 + m3 * m3;
        let b = [m1 * mdl - mm * l1, m2 * mdl - mm * l2, m3 * mdl - mm * l3];
        for c in 0..3 {
            worst = worst.max((rhs[i][c] - (a[c] - eps * b[c])).abs());
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn undamped_precession_conserves_exchange_energy() {
    let g = TorusGrid::new(3, 32, 2.0 * PI).unwrap();
    let m0 = random::perturbed_north(g, &mut random::rng(11), 0.1, 2.0).unwrap();
    let cfg = LlsConfig::new(0.0, 1e-3);
    let e0 = exchange_energy(&m0);
    let mut worst = 0.0f64;
    lls_evolve_with(&m0, &CurrentField::zero(g), &cfg, 0.1, |s| {
        worst = worst.max((s.exchange_energy - e0).abs() / e0);
        Ok(())
    })
    .unwrap();
    assert!(worst < 1e-6, "relative drift {worst}");
}

#[test]
fn damping_dissipates_exchange_energy_monotonically() {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let m0 = random::perturbed_north(g, &mut random::rng(5), 0.2, 3.0).unwrap();
    let mut prev = f64::INFINITY;
    lls_evolve_with(&m0, &CurrentField::zero(g), &LlsConfig::new(0.1, 2e-3), 0.2, |s| {
        assert!(s.exchange_energy <= prev + 1e-10, "energy rose from {prev} to {}", s.exchange_energy);
        prev = s.exchange_energy;
        Ok(())
    })
    .unwrap();
}

#[test]
fn rk4_self_convergence() {
    let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
    let m0 = unproject(&smooth_chart(g, 0.5));
    let v = CurrentField::constant(g, &[0.2, -0.1]).unwrap();
    let run = |dt: f64| {
        let cfg = LlsConfig::new(0.1, dt).with_scheme(LlsScheme::Rk4Renorm);
        lls_evolve(&m0, &v, &cfg, 0.2, usize::MAX).unwrap().pop().unwrap().m
    };
    let reference = run(5e-4 / 4.0);
    let e1 = mag_diff(&run(8e-3), &reference);
    let e2 = mag_diff(&run(4e-3), &reference);
    assert!(e1 / e2 >= 12.0, "ratio {} ({e1:e} / {e2:e})", e1 / e2);
}

#[test]
fn j2_matches_scalar_expansion_for_a_single_mode() {
    let g = TorusGrid::new(3, 8, 2.0 * PI).unwrap();
    let a = 0.01;
    let eps = 0.2;
    let u = ComplexField::from_fn(g, |x| Complex64::from_polar(a, x[0]));
    let zero = CurrentField::zero(g);
    let j = gl_nonlinearity_of(&u, zero.at(0.0), eps, CurrentCoupling::Direct).unwrap();
    let mut worst = 0.0f64;
    for (i, ji) in j.values().iter().enumerate() {
        let x = g.position(i);
        let ui = Complex64::from_polar(a, x[0]);
        let du = I * ui;
        let expected = -2.0 * Complex64::new(eps, 1.0) * ui.conj() * du * du / (1.0 + ui.norm_sqr());
        worst = worst.max((ji - expected).norm());
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn tiny_single_mode_march_follows_the_semigroup() {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let u0 = ComplexField::from_fn(g, |x| Complex64::from_polar(1e-4, x[0] + 2.0 * x[1]));
    let u = gl_march(&u0, &CurrentField::zero(g), 0.05, &MarchConfig::new(0.1, 1e-3)).unwrap();
    let exact = semigroup_apply(&u0, 0.05, 0.1).unwrap();
    let last = u.slices().last().unwrap();
    let rel = max_diff(last, &exact) / exact.max_abs();
    assert!(rel < 1e-8, "{rel}");
}

#[test]
fn etd_rk2_self_convergence() {
    let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
    let u0 = smooth_chart(g, 0.4);
    let v = CurrentField::constant(g, &[0.3, 0.1]).unwrap();
    let run = |dt: f64, scheme: EtdScheme| {
        let cfg = MarchConfig { scheme, ..MarchConfig::new(0.1, dt) };
        gl_march(&u0, &v, 0.2, &cfg).unwrap().slices().last().unwrap().clone()
    };
    let reference = run(2.5e-4, EtdScheme::EtdRk2);
    let e1 = max_diff(&run(1e-2, EtdScheme::EtdRk2), &reference);
    let e2 = max_diff(&run(5e-3, EtdScheme::EtdRk2), &reference);
    assert!(e1 / e2 > 3.0, "ETD-RK2 ratio {}", e1 / e2);
    let f1 = max_diff(&run(1e-2, EtdScheme::Etd1), &reference);
    let f2 = max_diff(&run(5e-3, EtdScheme::Etd1), &reference);
    assert!(f1 / f2 > 1.6 && f1 / f2 < 2.5, "ETD1 ratio {}", f1 / f2);
}

#[test]
fn picard_map_nearly_fixes_march_output() {
    let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
    let u0 = smooth_chart(g, 0.3);
    let v = CurrentField::zero(g);
    let defect = |slices: usize| {
        let dt = 0.1 / (slices - 1) as f64;
        let u = gl_march(&u0, &v, 0.1, &MarchConfig::new(0.2, dt)).unwrap();
        let image = picard_map(&u, &u0, &v, 0.2, CurrentCoupling::Direct).unwrap();
        norm_mixed(&image.sub(&u).unwrap(), f64::INFINITY, 2.0).unwrap()
    };
    let (d1, d2) = (defect(21), defect(41));
    assert!(d1 / d2 > 3.0, "{d1:e} {d2:e}");
}

#[test]
fn large_data_is_outside_the_contraction_regime() {
    let g = TorusGrid::new(3, 8, 2.0 * PI).unwrap();
    let u0 = random::with_sup(&random::band_limited(g, &mut random::rng(1), 0.5, 3.0), 10.0);
    let cfg = PicardConfig { track_dyadic: false, ..PicardConfig::new(0.1, 0.05, 16) };
    let (_, rep) = picard_solve(&u0, &CurrentField::zero(g), &cfg).unwrap();
    assert!(!rep.converged, "{rep:?}");
}

#[test]
fn small_single_mode_contracts_geometrically() {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    let u0 = ComplexField::from_fn(g, |x| Complex64::from_polar(1e-3, x[0]));
    let (_, rep) = picard_solve(&u0, &CurrentField::zero(g), &PicardConfig::new(0.1, 0.05, 64)).unwrap();
    assert!(rep.converged);
    assert!(rep.ratios_linf_l2.iter().all(|&r| r < 1.0), "{rep:?}");
    assert!(rep.diff_linf_l2.windows(2).all(|w| w[1] < w[0]), "{rep:?}");
}

#[test]
fn directional_projection_is_idempotent_in_its_flat_region() {
    let g = TorusGrid::new(3, 16, 2.0 * PI).unwrap();
    // ξ₁ = 2 sits where the k = 1 directional multiplier is flat
    let f = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * x[0] + x[1]));
    let once = lp_project_directional(&f, 1, 0);
    let twice = lp_project_directional(&once, 1, 0);
    assert!(max_diff(&once, &f) < 1e-12);
    assert!(max_diff(&once, &twice) < 1e-12);
    let far = lp_project_directional(&ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, x[1])), 3, 0);
    assert!(far.max_abs() < 1e-14);
}

#[test]
fn mixed_l2_norm_is_plancherel() {
    let g = TorusGrid::new(3, 8, 2.0 * PI).unwrap();
    let u0 = random::band_limited(g, &mut random::rng(4), 0.0, 3.0);
    let u = free_trajectory(&u0, 0.01, 9, 0.3).unwrap();
    let w = trapezoid_weights(u.len(), u.dt());
    let spectral: f64 = u
        .slices()
        .iter()
        .zip(&w)
        .map(|(s, wt)| wt * g.cell_volume() * to_spectral(s).values().iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum();
    let direct = norm_mixed(&u, 2.0, 2.0).unwrap();
    assert!((direct - spectral.sqrt()).abs() < 1e-10 * direct);
}

#[test]
fn anisotropic_norm_factorizes_for_separable_fields() {
    let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
    let dt = 0.05;
    let count = 7;
    let a = |x: f64| 1.0 + 0.5 * x.cos();
    let b = |y: f64, t: f64| (-t).exp() * (2.0 + y.sin());
    let u = SpaceTimeField::from_fn(g, dt, count, |t, x| Complex64::new(a(x[0]) * b(x[1], t), 0.0)).unwrap();
    let h = g.spacing();
    let xs: Vec<f64> = (0..g.n()).map(|i| i as f64 * h).collect();
    let tw = trapezoid_weights(count, dt);
    for (p, q) in [(2.0, 2.0), (f64::INFINITY, 2.0), (2.0, f64::INFINITY), (1.0, 2.0)] {
        let na = if p == f64::INFINITY {
            xs.iter().map(|&x| a(x)).fold(0.0, f64::max)
        } else {
            xs.iter().map(|&x| h * a(x).powf(p)).sum::<f64>().powf(1.0 / p)
        };
        let nb = if q == f64::INFINITY {
            xs.iter().flat_map(|&y| (0..count).map(move |m| b(y, m as f64 * dt))).fold(0.0, f64::max)
        } else {
            let s: f64 =
                (0..count).map(|m| tw[m] * xs.iter().map(|&y| h * b(y, m as f64 * dt).powf(q)).sum::<f64>()).sum();
            s.powf(1.0 / q)
        };
        let got = norm_anisotropic(&u, p, q, 0).unwrap();
        assert!((got - na * nb).abs() < 1e-10 * got, "p={p} q={q}: {got} vs {}", na * nb);
    }
    // Hölder along the axis
    let l22 = norm_anisotropic(&u, 2.0, 2.0, 0).unwrap();
    assert!(norm_anisotropic(&u, f64::INFINITY, 2.0, 0).unwrap() >= l22 / g.period().sqrt() - 1e-12);
}

#[test]
fn single_modulation_norm_scales_with_its_shell() {
    let g = TorusGrid::new(1, 8, 2.0 * PI).unwrap();
    let dt = 0.01;
    let slices = 256;
    // τ + |ξ|² = 32 = 2⁵ for ξ = 1
    let u = SpaceTimeField::from_fn(g, dt, slices, |t, x| Complex64::from_polar(1.0, x[0] + 31.0 * t)).unwrap();
    let mass = norm_mixed(&tapered(&u), 2.0, 2.0).unwrap();
    for b in [0.5, 1.0] {
        let got = norm_xsbq(&u, b, 1.0).unwrap();
        let expected = 2f64.powf(5.0 * b) * mass;
        assert!((got / expected - 1.0).abs() < 0.15, "b={b}: {got} vs {expected}");
    }
    let plancherel = norm_xsbq(&u, 0.0, 2.0).unwrap();
    assert!((plancherel / mass - 1.0).abs() < 0.05);
}

#[test]
fn free_wave_packet_has_small_z_and_f_z_dominates_y() {
    // 256 slices at dt = 0.01 put the modulation floor at 2^3, well below 2^k
    let g = TorusGrid::new(3, 16, PI / 2.0).unwrap();
    for seed in 1..=20u64 {
        let k = 4 + (seed % 2) as i32;
        let u0 = random::shell_localized(g, &mut random::rng(seed), k);
        let u = free_trajectory(&u0, 0.01, 256, 0.0).unwrap();
        let f = norm_fk(&u, k, true).unwrap();
        let z = norm_zk(&u, k, true).unwrap();
        let y = norm_yk(&u, k, true).unwrap();
        eprintln!("seed {seed} k {k}: F {f:.4} Z {z:.4} Y {y:.4}");
        assert!(z < 0.2 * f, "seed {seed}: Z {z} vs F {f}");
        assert!(f + z >= y, "seed {seed}: F+Z {} < Y {y}", f + z);
    }
}
