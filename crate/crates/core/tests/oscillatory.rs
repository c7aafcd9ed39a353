use std::f64::consts::PI;

use fslab::oscillatory::*;
use fslab::{Complex64, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn annulus(n: usize, s: f64, k: i32) -> PhaseIntegralSpec {
    PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k })
}

#[test]
fn sphere_integral_trivial_values() {
    assert!((sphere_phase_integral(0.0, 2).unwrap().re - 2.0 * PI).abs() < 1e-12);
    assert!((sphere_phase_integral(0.0, 3).unwrap().re - 4.0 * PI).abs() < 1e-12);
    assert!(sphere_phase_integral(PI, 3).unwrap().norm() < 1e-8);
}

#[test]
fn sphere_integral_matches_elementary_form_in_three_dimensions() {
    for i in 1..=200 {
        let rho = 0.25 * i as f64;
        let q = sphere_phase_integral(rho, 3).unwrap();
        let closed = 4.0 * PI * rho.sin() / rho;
        assert!((q - closed).norm() < 1e-8, "ρ = {rho}");
    }
}

#[test]
fn sphere_integral_matches_bessel_form() {
    for n in 2..=4 {
        for i in 0..=1000 {
            let rho = 0.05 * i as f64;
            let q = sphere_phase_integral(rho, n).unwrap();
            let b = sphere_phase_bessel(rho, n).unwrap();
            assert!((q - Complex64::new(b, 0.0)).norm() < 1e-8, "n = {n}, ρ = {rho}");
        }
    }
}

#[test]
fn sphere_reduction_rejects_low_dimension() {
    assert!(sphere_phase_integral(1.0, 1).is_err());
    assert!(dispersive_integral(&annulus(1, 0.75, 0)).is_err());
}

#[test]
fn dispersive_at_origin_is_the_cutoff_mass() {
    let spec = annulus(2, 0.75, 0);
    let i0 = dispersive_integral(&spec).unwrap();
    assert!(i0.re > 0.0 && i0.im.abs() < 1e-12);
    // 2π ∫ φ(r) r dr by a fine midpoint rule
    let bumps = fslab::lp::BumpPair::default();
    let m = 200_000;
    let h = 2.0 / m as f64;
    let oracle: f64 = (0..m)
        .map(|i| {
            let r = (i as f64 + 0.5) * h;
            bumps.phi(r) * r
        })
        .sum::<f64>()
        * h
        * 2.0
        * PI;
    assert!((i0.re - oracle).abs() < 1e-8 * oracle);
    assert!((dispersive_mass(&spec).unwrap() - i0.re).abs() < 1e-10 * oracle);
}

#[test]
fn dispersive_matches_cartesian_quadrature() {
    // Independent 2-D tensor midpoint rule over the square containing the ball.
    let spec = PhaseIntegralSpec::radial(2, 0.75, Cutoff::Ball { l: 0 }).at(&[0.7, -1.1], 1.3);
    let bumps = fslab::lp::BumpPair::default();
    let m = 1200;
    let h = 4.0 / m as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..m {
        let a = -2.0 + (i as f64 + 0.5) * h;
        for j in 0..m {
            let b = -2.0 + (j as f64 + 0.5) * h;
            let r = (a * a + b * b).sqrt();
            let w = bumps.eta(r);
            if w > 0.0 {
                sum += Complex64::from_polar(w, 1.3 * r.powf(1.5) - (0.7 * a - 1.1 * b));
            }
        }
    }
    sum *= h * h;
    let q = dispersive_integral(&spec).unwrap();
    assert!((q - sum).norm() < 1e-6 * dispersive_mass(&spec).unwrap(), "{q} vs {sum}");
}

#[test]
fn shifted_phase_matches_cartesian_quadrature() {
    let shift = vec![0.5, 0.2];
    let spec = PhaseIntegralSpec {
        shift: shift.clone(),
        ..PhaseIntegralSpec::radial(2, 0.75, Cutoff::Ball { l: 0 })
    }
    .at(&[0.7, -0.3], 1.0);
    let bumps = fslab::lp::BumpPair::default();
    let m = 1600;
    let h = 4.0 / m as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..m {
        let a = -2.0 + (i as f64 + 0.5) * h;
        for j in 0..m {
            let b = -2.0 + (j as f64 + 0.5) * h;
            let w = bumps.eta((a * a + b * b).sqrt());
            if w > 0.0 {
                let d2 = (a - shift[0]).powi(2) + (b - shift[1]).powi(2);
                sum += Complex64::from_polar(w, d2.powf(0.75) - (0.7 * a - 0.3 * b));
            }
        }
    }
    sum *= h * h;
    let q = dispersive_integral(&spec).unwrap();
    assert!((q - sum).norm() < 1e-5 * dispersive_mass(&spec).unwrap(), "{q} vs {sum}");
}

#[test]
fn shifted_three_dimensional_phase_reduces_at_time_zero() {
    let base = PhaseIntegralSpec::radial(3, 0.75, Cutoff::Ball { l: 0 });
    let shifted = PhaseIntegralSpec {
        shift: vec![0.3, -0.4, 0.2],
        ..base.clone()
    };
    let x = [0.6, 0.8, 0.0];
    let a = dispersive_integral(&shifted.at(&x, 0.0)).unwrap();
    let b = dispersive_integral(&base.at(&x, 0.0)).unwrap();
    assert!((a - b).norm() < 1e-7 * dispersive_mass(&base).unwrap());
}

#[test]
fn dispersive_is_rotation_and_reflection_invariant() {
    let spec = annulus(2, 0.75, 0);
    let mass = dispersive_mass(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let r = rng.random_range(0.0..30.0);
        let t = rng.random_range(0.0..20.0);
        let (a, b) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
        let x = [r * a.cos(), r * a.sin()];
        let y = [r * b.cos(), r * b.sin()];
        let ix = dispersive_integral(&spec.at(&x, t)).unwrap();
        let iy = dispersive_integral(&spec.at(&y, t)).unwrap();
        let iminus = dispersive_integral(&spec.at(&[-x[0], -x[1]], t)).unwrap();
        assert!((ix - iy).norm() < 1e-8 * mass);
        assert!((ix - iminus).norm() < 1e-8 * mass);
    }
}

#[test]
fn dispersive_bounded_by_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, cutoff) in [
        (2, Cutoff::Annulus { k: 1 }),
        (3, Cutoff::Ball { l: 0 }),
        (2, Cutoff::Shell { lambda: 10.0 }),
    ] {
        let spec = PhaseIntegralSpec::radial(n, 0.75, cutoff);
        let mass = dispersive_mass(&spec).unwrap();
        for _ in 0..30 {
            let r = rng.random_range(0.0..50.0);
            let t = rng.random_range(-50.0..50.0);
            let v = dispersive_integral(&spec.at_radius(r, t)).unwrap().norm();
            assert!(v <= mass * (1.0 + 1e-10), "{cutoff:?}: {v} > {mass}");
        }
    }
}

#[test]
fn dispersive_at_origin_envelope_decreases_in_time() {
    // No stationary point at x = 0: decay is rapid but not pointwise monotone.
    let spec = annulus(2, 0.75, 0);
    let ts = LogRange::new(10.0, 1000.0, 17).points();
    let values: Vec<f64> = ts
        .iter()
        .map(|&t| dispersive_integral(&spec.at_radius(0.0, t)).unwrap().norm())
        .collect();
    let first = values[..9].iter().cloned().fold(0.0, f64::max);
    let second = values[8..].iter().cloned().fold(0.0, f64::max);
    assert!(second < 1e-2 * first, "{values:?}");
    let (slope, _, _) = loglog_fit(&ts, &values).unwrap();
    assert!(slope < -2.0, "slope {slope}");
}

#[test]
fn decay_fits_match_the_dimension() {
    for (n, s) in [(2, 0.75), (3, 0.75), (2, 0.9)] {
        let fit = fit_dispersive_decay(&annulus(n, s, 0), LogRange::new(10.0, 1000.0, 17)).unwrap();
        assert!((fit.slope - fit.target).abs() <= 0.10, "n = {n}, s = {s}: {}", fit.slope);
        assert!(fit.pass());
        assert!(fit.residual.is_finite());
    }
}

#[test]
fn decay_prefactor_scales_with_the_annulus() {
    let (n, s, t) = (2, 0.75, 200.0);
    for k in 1..=2 {
        let ratio = prefactor_ratio(&annulus(n, s, k), &annulus(n, s, 0), t).unwrap();
        let predicted = 2f64.powf(k as f64 * n as f64 * (1.0 - s));
        assert!(ratio / predicted < 2.0 && predicted / ratio < 2.0, "k = {k}: {ratio}");
    }
}

#[test]
fn decay_fit_rejects_short_ranges() {
    let spec = annulus(2, 0.75, 0);
    assert!(matches!(
        fit_dispersive_decay(&spec, LogRange::new(10.0, 100.0, 9)),
        Err(Error::DegenerateFit(_))
    ));
    assert!(matches!(
        fit_dispersive_decay(&spec, LogRange::new(10.0, 1000.0, 5)),
        Err(Error::DegenerateFit(_))
    ));
}

#[test]
fn quadrature_failure_carries_partial_value() {
    let options = QuadratureOptions {
        max_evaluations: 100,
        ..Default::default()
    };
    let err = integrate(|x| Complex64::from_polar(1.0, 1e4 * x * x), &[0.0, 1.0], &options).unwrap_err();
    assert!(matches!(err, Error::QuadratureFailure { evaluations, .. } if evaluations > 0));
}

#[test]
fn sup_profile_scales_with_the_ball() {
    let a = l1_sup_profile(&SupProfileSpec::unshifted(0, 0.75, 2, 64.0, 16, 64)).unwrap();
    let b = l1_sup_profile(&SupProfileSpec::unshifted(1, 0.75, 2, 64.0, 16, 64)).unwrap();
    let ratio = b.integral / a.integral;
    assert!((ratio - 2.0).abs() <= 1.0, "ratio {ratio}");
    assert!(a.sup[0].is_finite() && a.sup[0] > 0.0);
    assert_eq!(a.note, "approximate sup (lower bound)");
}

#[test]
fn sup_profile_tail_in_three_dimensions() {
    let p = l1_sup_profile(&SupProfileSpec::unshifted(0, 0.75, 3, 1024.0, 16, 32)).unwrap();
    let slope = p.tail_slope.unwrap();
    assert!(p.tail_pass(), "tail slope {slope}");
    assert!(slope <= -1.5 + 0.1, "tail slope {slope}");
    assert!(p.constant.is_finite());
}

#[test]
fn far_field_regime_has_finite_constant() {
    for n in [2, 3] {
        let (report, table) = far_field_sweep(0.75, n, 48, 21).unwrap();
        assert!(report.c_star.is_finite() && report.c_star > 0.0);
        assert_eq!(table.rows.len(), 48);
        assert!(table.rows.iter().all(|r| r.params[1] >= 1.0));
    }
}

#[test]
fn shell_measure_worked_example() {
    let j = 0.4f64.log2();
    let m = sigma_measure(1, j, 0.0, -4.0, 1.0, 1).unwrap();
    assert!((m - 0.0976).abs() < 1e-4);
    assert!((m - (4.4f64.sqrt() - 2.0)).abs() < 1e-3);
    assert_eq!(sigma_measure(1, 0.0, 0.0, 10.0, 0.75, 3).unwrap(), 0.0);
}

#[test]
fn shell_measure_grid_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let k = rng.random_range(0..=8);
        let j = rng.random_range(-2.0..(2.0 * k as f64 + 2.0));
        let lo = 2f64.powi(k);
        let tau = -rng.random_range(0.5 * lo..2.5 * lo).powi(2);
        let grid = sigma_measure(k, j, 0.0, tau, 1.0, 2).unwrap();
        assert!((grid - sigma_measure_s1(k, j, tau)).abs() < 1e-3, "k {k} j {j} τ {tau}");
    }
}

#[test]
fn shell_measure_sweep_is_bounded() {
    for s in [0.6, 0.75, 0.9] {
        let (report, table) = sigma_sweep(s, 8, 3, 17).unwrap();
        assert!(report.c_star.is_finite() && report.c_star < 8.0, "s = {s}: {}", report.c_star);
        let csv = table.to_csv().unwrap();
        assert!(csv.starts_with("k,j,xi_perp_normsq,tau,value,bound,ratio"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_closed_form_random(rho in 0.0f64..50.0, n in 2usize..=4) {
        let q = sphere_phase_integral(rho, n).unwrap();
        let b = sphere_phase_bessel(rho, n).unwrap();
        prop_assert!((q.re - b).abs() < 1e-8 && q.im.abs() < 1e-8);
    }

    #[test]
    fn shell_measure_monotone_in_j(
        k in 0i32..=8,
        j in 0.0f64..10.0,
        dj in 0.0f64..3.0,
        frac in 0.0f64..1.0,
        t in 0.5f64..2.5,
        s in prop::sample::select(vec![0.6, 0.75, 0.9, 1.0]),
    ) {
        let lo = 2f64.powi(k);
        let perp2 = (frac * lo).powi(2);
        let tau = -(t * lo).powf(2.0 * s);
        let a = sigma_measure(k, j, perp2, tau, s, 3).unwrap();
        let b = sigma_measure(k, j + dj, perp2, tau, s, 3).unwrap();
        prop_assert!(a <= b + 1e-9 * lo);
        prop_assert!(b <= 2.0 * lo + 2.0);
    }
}
