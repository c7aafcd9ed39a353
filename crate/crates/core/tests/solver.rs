use std::f64::consts::PI;

use fslab::solver::{
    apply_nonlinearity, continuous_dependence_probe, cutoff_weights, duhamel_map, free_evolution, gaussian_data,
    origin_frame, picard_solve, quadrature_check, residual_check, NonlinearitySpec, SolveConfig, SolveReport,
    SolveStatus, TimeRule,
};
use fslab::spectral::{dft_forward, homogeneous_sobolev_norm, Field, Grid, Trajectory, ZeroModePolicy};
use fslab::{Complex64, Error};
use proptest::prelude::*;

const S: f64 = 0.75;

fn config() -> SolveConfig {
    SolveConfig::small_data(2, 32, S)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

fn data(c: &SolveConfig, eps: f64, seed: u64) -> Field {
    gaussian_data(c.grid().unwrap(), c.data.width, seed, eps, c.critical_sigma())
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn nonlinearity_of_zero_is_zero() {
    let c = config();
    let f = apply_nonlinearity(&Field::zeros(c.grid().unwrap()), &NonlinearitySpec::model(S), S).unwrap();
    assert!(f.values().iter().all(|v| *v == c64(0.0, 0.0)));
}

#[test]
fn nonlinearity_is_cubic_under_real_scaling() {
    let c = config();
    let u = data(&c, 0.3, 1);
    let spec = NonlinearitySpec::model(S);
    let base = apply_nonlinearity(&u, &spec, S).unwrap();
    for lambda in [-2.0, 0.5, 3.0] {
        let scaled = apply_nonlinearity(&u.scale(c64(lambda, 0.0)), &spec, S).unwrap();
        let expected = base.scale(c64(lambda * lambda * lambda, 0.0));
        assert!(scaled.max_abs_diff(&expected) <= 1e-10 * expected.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
}

#[test]
fn plane_wave_has_no_nonlinear_response() {
    let grid = Grid::new(2, 16, 2.0 * PI).unwrap();
    let u = Field::from_fn(grid, |x| Complex64::from_polar(1.0, 3.0 * x[0] - 2.0 * x[1]));
    let f = apply_nonlinearity(&u, &NonlinearitySpec::model(S), S).unwrap();
    assert!(f.values().iter().all(|v| v.norm() < 1e-12));
}

#[test]
fn rejecting_the_zero_mode_errors_on_a_nonzero_mean() {
    let grid = Grid::new(2, 16, 2.0 * PI).unwrap();
    let u = Field::from_fn(grid, |x| Complex64::from_polar(1.0, x[0]));
    let mut spec = NonlinearitySpec::model(S);
    spec.zero_mode = ZeroModePolicy::Reject;
    assert!(matches!(apply_nonlinearity(&u, &spec, S), Err(Error::ZeroModeNegativeOrder { .. })));
}

#[test]
fn nonlinearity_rejects_orders_outside_the_range() {
    let mut spec = NonlinearitySpec::model(S);
    spec.terms[0].beta = 0.8;
    assert!(spec.validate(S).is_err());
    spec.terms[0].beta = -0.25;
    assert!(spec.validate(S).is_ok());
    spec.terms[0].beta = -0.3;
    assert!(spec.validate(S).is_err());
}

#[test]
fn duhamel_map_without_nonlinearity_is_free_evolution() {
    let c = config();
    let u0 = data(&c, 0.1, 2);
    let v = Trajectory::zeros(c.grid().unwrap(), c.t0(), c.dt(), c.time.frames).unwrap();
    let mapped = duhamel_map(&v, &u0, &NonlinearitySpec::empty(), &c).unwrap();
    assert_eq!(mapped, free_evolution(&u0, &c).unwrap());
    let zero = Field::zeros(c.grid().unwrap());
    let nothing = duhamel_map(&v, &zero, &NonlinearitySpec::model(S), &c).unwrap();
    assert!(nothing.values().iter().all(|x| *x == c64(0.0, 0.0)));
}

#[test]
fn duhamel_map_reproduces_the_data_at_the_origin() {
    let c = config();
    let u0 = data(&c, 0.5, 3);
    let v = free_evolution(&data(&c, 0.7, 4), &c).unwrap();
    let mapped = duhamel_map(&v, &u0, &NonlinearitySpec::model(S), &c).unwrap();
    let origin = origin_frame(&mapped).unwrap();
    assert_eq!(mapped.frame(origin), u0.values());
    let grid = c.grid().unwrap();
    assert_eq!(
        dft_forward(&mapped.frame_field(origin)).values(),
        dft_forward(&u0).values()
    );
    assert_eq!(grid, *mapped.grid());
}

#[test]
fn duhamel_map_rejects_a_foreign_trajectory() {
    let c = config();
    let u0 = data(&c, 0.1, 2);
    let v = Trajectory::zeros(c.grid().unwrap(), 0.0, c.dt(), c.time.frames).unwrap();
    assert!(duhamel_map(&v, &u0, &NonlinearitySpec::model(S), &c).is_err());
}

/// Four plane waves `a_j e^{i(ξ_j·x + ω_j t)}`; the cubic response is a finite
/// sum of modes, each integrated as `c′ = iω_η c − iF̂_η(t)` by fine RK4.
#[test]
fn one_picard_step_matches_a_four_mode_ode() {
    let grid = Grid::new(2, 16, 4.0 * PI).unwrap();
    let modes: [([f64; 2], Complex64); 4] = [
        ([0.5, 0.0], c64(0.8, 0.1)),
        ([0.0, 1.0], c64(-0.3, 0.5)),
        ([-0.5, 0.5], c64(0.2, -0.6)),
        ([1.0, -0.5], c64(0.4, 0.4)),
    ];
    let beta = 2.0 * S - 1.0;
    let norm = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let omega = |v: [f64; 2]| norm(v).powf(2.0 * S);
    // (η, amplitude, Ω) for every term of F(v).
    let mut terms: Vec<([f64; 2], Complex64, f64)> = Vec::new();
    for (xj, aj) in &modes {
        for (xl, al) in &modes {
            if xj == xl {
                continue;
            }
            let d = [xj[0] - xl[0], xj[1] - xl[1]];
            for (xk, ak) in &modes {
                let eta = [d[0] + xk[0], d[1] + xk[1]];
                let amp = aj * al.conj() * ak * norm(d).powf(-beta) * norm(*xk).powf(beta);
                terms.push((eta, amp, omega(*xj) - omega(*xl) + omega(*xk)));
            }
        }
    }
    let mut outputs: Vec<[f64; 2]> = Vec::new();
    for (eta, _, _) in &terms {
        if !outputs.iter().any(|o| (o[0] - eta[0]).abs() + (o[1] - eta[1]).abs() < 1e-12) {
            outputs.push(*eta);
        }
    }
    let coefficient = |eta: [f64; 2], t: f64| -> Complex64 {
        // c(t) = −i∫₀ᵗ e^{i(t−t′)ω_η} F̂_η(t′) dt′ by RK4 on the ODE.
        let w = omega(eta);
        let forcing = |tp: f64| -> Complex64 {
            terms
                .iter()
                .filter(|(e, _, _)| (e[0] - eta[0]).abs() + (e[1] - eta[1]).abs() < 1e-12)
                .map(|(_, a, big)| a * Complex64::from_polar(1.0, big * tp))
                .sum()
        };
        let rhs = |tp: f64, c: Complex64| Complex64::i() * w * c - Complex64::i() * forcing(tp);
        let steps = 4000;
        let h = t / steps as f64;
        let mut c = c64(0.0, 0.0);
        for i in 0..steps {
            let tp = i as f64 * h;
            let k1 = rhs(tp, c);
            let k2 = rhs(tp + h / 2.0, c + k1 * (h / 2.0));
            let k3 = rhs(tp + h / 2.0, c + k2 * (h / 2.0));
            let k4 = rhs(tp + h, c + k3 * h);
            c += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        }
        c
    };
    let u0 = Field::from_fn(grid, |x| modes.iter().map(|(xi, a)| a * Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1])).sum());
    for (rule, frames) in [(TimeRule::Simpson, 256), (TimeRule::Trapezoid, 1024)] {
        let mut c = SolveConfig::small_data(2, 16, S);
        c.grid.box_length = 4.0 * PI;
        c.time.frames = frames;
        c.time.rule = rule;
        let free = free_evolution(&u0, &c).unwrap();
        let mapped = duhamel_map(&free, &u0, &NonlinearitySpec::model(S), &c).unwrap();
        let psi = cutoff_weights(&c);
        let (mut worst, mut size) = (0.0f64, 0.0f64);
        for i in (0..frames).step_by(frames / 16) {
            let t = mapped.time(i);
            let coeffs: Vec<([f64; 2], Complex64)> = outputs.iter().map(|e| (*e, coefficient(*e, t))).collect();
            let correction = Field::from_fn(grid, |x| {
                coeffs.iter().map(|(e, a)| a * Complex64::from_polar(1.0, e[0] * x[0] + e[1] * x[1])).sum::<Complex64>()
                    * psi[i]
            });
            let oracle = free.frame_field(i).add(&correction).unwrap();
            worst = worst.max(mapped.frame_field(i).sub(&oracle).unwrap().l2_norm());
            size = size.max(correction.l2_norm());
        }
        assert!(size > 0.1);
        assert!(worst <= 1e-4 * size, "{rule:?}: {worst:.3e} against {size:.3e}");
    }
}

#[test]
fn zero_data_converges_at_once() {
    let c = config();
    let r = picard_solve(&Field::zeros(c.grid().unwrap()), &c.nonlinearity(), &c).unwrap();
    assert_eq!(r.report.status, SolveStatus::Converged);
    assert_eq!(r.report.iterations.len(), 1);
    assert!(r.solution.values().iter().all(|v| *v == c64(0.0, 0.0)));
    assert_eq!(r.report.residual, 0.0);
}

#[test]
fn empty_nonlinearity_converges_to_free_evolution() {
    let c = config();
    let u0 = data(&c, 0.2, 5);
    let r = picard_solve(&u0, &NonlinearitySpec::empty(), &c).unwrap();
    assert_eq!(r.report.iterations.len(), 1);
    assert!(r.report.converged());
    assert_eq!(r.solution, free_evolution(&u0, &c).unwrap());
    assert!(r.report.residual < 1e-10);
}

#[test]
fn free_evolution_conserves_mass() {
    let c = config();
    let u0 = data(&c, 1.0, 6);
    let u = free_evolution(&u0, &c).unwrap();
    let mass = u0.l2_norm();
    for i in 0..u.frame_count() {
        assert!(close(u.frame_field(i).l2_norm(), mass, 1e-13));
    }
}

#[test]
fn small_data_solve_contracts_with_a_small_residual() {
    let c = config();
    let u0 = c.initial_data().unwrap();
    assert!(close(homogeneous_sobolev_norm(&u0, c.critical_sigma()), c.data.epsilon, 1e-12));
    let r = picard_solve(&u0, &c.nonlinearity(), &c).unwrap();
    let rep = &r.report;
    assert!(rep.converged());
    assert!(rep.ratios().iter().all(|q| q.is_finite() && *q < 0.5), "{:?}", rep.ratios());
    assert!(rep.residual < 10.0 * c.picard.tolerance);
    assert!(rep.iterations.iter().all(|it| it.f_sigma.is_some_and(f64::is_finite)));
    assert!(rep.notes.iter().any(|n| n.contains("n >= 4")));

    let mut half = c.clone();
    half.data.epsilon /= 2.0;
    let h = picard_solve(&half.initial_data().unwrap(), &half.nonlinearity(), &half).unwrap();
    assert!(close(h.report.apriori_ratio, rep.apriori_ratio, 0.1));
}

#[test]
fn picard_differences_decay_geometrically() {
    let mut c = config();
    c.data.epsilon = 3.0;
    c.picard.track_f_sigma = false;
    let r = picard_solve(&c.initial_data().unwrap(), &c.nonlinearity(), &c).unwrap();
    let rep = &r.report;
    assert!(rep.converged());
    assert!(rep.iterations.len() >= 4, "{} iterations", rep.iterations.len());
    let corr = rep.log_linear_correlation().unwrap();
    assert!(corr <= -0.95, "correlation {corr}");
}

#[test]
fn large_data_is_reported_as_divergent() {
    let mut c = config();
    c.data.epsilon = 60.0;
    c.picard.track_f_sigma = false;
    let r = picard_solve(&c.initial_data().unwrap(), &c.nonlinearity(), &c).unwrap();
    assert_eq!(r.report.status, SolveStatus::Diverged);
    assert!(matches!(r.ensure_converged(), Err(Error::Divergence { .. })));
    assert!(!r.report.residual.is_nan());
}

#[test]
fn residual_detects_a_perturbation() {
    let c = config();
    let u0 = c.initial_data().unwrap();
    let spec = c.nonlinearity();
    let r = picard_solve(&u0, &spec, &c).unwrap();
    let noise = data(&c, 1.0, 99);
    let scaled = noise.scale(c64(1e-3 * u0.l2_norm() / noise.l2_norm(), 0.0));
    let frames: Vec<Field> = (0..r.solution.frame_count())
        .map(|i| r.solution.frame_field(i).add(&scaled).unwrap())
        .collect();
    let perturbed = Trajectory::new(*r.solution.grid(), r.solution.t0(), r.solution.dt(), frames).unwrap();
    assert!(residual_check(&perturbed, &u0, &spec, &c).unwrap() >= 1e-4);
    assert!(residual_check(&free_evolution(&u0, &c).unwrap(), &u0, &NonlinearitySpec::empty(), &c).unwrap() < 1e-10);
}

#[test]
fn phase_rotation_commutes_with_the_solve() {
    let c = config();
    let u0 = c.initial_data().unwrap();
    let spec = c.nonlinearity();
    let base = picard_solve(&u0, &spec, &c).unwrap();
    let theta = Complex64::from_polar(1.0, 2.1);
    let rotated = picard_solve(&u0.scale(theta), &spec, &c).unwrap();
    let gap = rotated.solution.sub(&base.solution.scale(theta)).unwrap().linf_l2_norm();
    assert!(gap <= 1e-8 * u0.l2_norm());
}

#[test]
fn dependence_on_data_is_linear_for_small_perturbations() {
    let c = config();
    let u0 = c.initial_data().unwrap();
    let spec = c.nonlinearity();
    let same = continuous_dependence_probe(&u0, &u0, &spec, &c).unwrap();
    assert!(same.identical && same.l2_ratio == 0.0);
    let g = data(&c, c.data.epsilon, 17);
    let probe = |delta: f64| continuous_dependence_probe(&u0, &u0.add(&g.scale(c64(delta, 0.0))).unwrap(), &spec, &c).unwrap();
    let (a, b) = (probe(1e-4), probe(1e-5));
    assert!(!a.identical);
    assert!(close(a.l2_ratio, b.l2_ratio, 0.2) && close(a.sobolev_ratio, b.sobolev_ratio, 0.2));
    let double = continuous_dependence_probe(&u0, &u0.scale(c64(2.0, 0.0)), &spec, &c).unwrap();
    assert!(double.l2_ratio.is_finite() && double.sobolev_ratio.is_finite());
}

#[test]
fn quadrature_refinement_is_second_order() {
    let mut c = config();
    c.data.epsilon = 1.0;
    c.picard.track_f_sigma = false;
    let q = quadrature_check(&c.initial_data().unwrap(), &c.nonlinearity(), &c).unwrap();
    assert!(q.passes(), "{q:?}");
    assert!((q.observed_order - 2.0).abs() < 0.3, "{q:?}");
}

#[test]
fn config_roundtrips_through_toml() {
    let mut c = config();
    c.nonlinearity = Some(NonlinearitySpec::model(S));
    c.time.rule = TimeRule::Simpson;
    let back = SolveConfig::from_toml_str(&c.to_toml()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn config_errors_are_reported() {
    assert!(matches!(SolveConfig::from_path(std::path::Path::new("missing.cfg")), Err(Error::Io { .. })));
    let mut c = config();
    c.time.frames = 48;
    assert!(SolveConfig::from_toml_str(&c.to_toml()).is_err());
    let mut c = config();
    c.picard.tolerance = 0.0;
    assert!(matches!(SolveConfig::from_toml_str(&c.to_toml()), Err(Error::Config(_))));
    assert!(SolveConfig::from_toml_str("[grid]\ndim = 2").is_err());
}

#[test]
fn config_reads_a_hand_written_file() {
    let text = r#"
[grid]
dim = 1
points = 64
box_length = 20.0

[time]
window = 2.0
frames = 32
rule = "simpson"

[equation]
s = 0.9

[[nonlinearity.terms]]
beta = -0.2
pattern = ["plain", "plain", "conjugate"]
coefficient = [0.5, 0.0]

[picard]
max_iter = 10
tolerance = 1e-10

[data]
epsilon = 0.05
seed = 3
"#;
    let c = SolveConfig::from_toml_str(text).unwrap();
    assert_eq!(c.time.rule, TimeRule::Simpson);
    assert_eq!(c.nonlinearity().terms[0].coefficient, c64(0.5, 0.0));
    let r = picard_solve(&c.initial_data().unwrap(), &c.nonlinearity(), &c).unwrap();
    assert!(r.report.converged());
    assert!(r.report.iterations.iter().all(|it| it.f_sigma.is_none()));
    assert_eq!(SolveReport::from_json(&r.report.to_json()).unwrap(), r.report);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solutions_are_phase_covariant(seed in 0u64..500, theta in 0.0f64..(2.0 * PI)) {
        let mut c = SolveConfig::small_data(2, 16, S);
        c.data.epsilon = 0.5;
        c.data.seed = seed;
        c.picard.track_f_sigma = false;
        let u0 = c.initial_data().unwrap();
        let spec = c.nonlinearity();
        let rot = Complex64::from_polar(1.0, theta);
        let a = picard_solve(&u0, &spec, &c).unwrap();
        let b = picard_solve(&u0.scale(rot), &spec, &c).unwrap();
        prop_assert!(b.solution.sub(&a.solution.scale(rot)).unwrap().linf_l2_norm() <= 1e-8 * u0.l2_norm());
    }

    #[test]
    fn linear_flow_is_unitary(seed in 0u64..500, width in 0.3f64..3.0) {
        let c = SolveConfig::small_data(2, 16, S);
        let u0 = gaussian_data(c.grid().unwrap(), width, seed, 1.0, c.critical_sigma());
        let u = free_evolution(&u0, &c).unwrap();
        let mass = u0.l2_norm();
        for i in 0..u.frame_count() {
            prop_assert!(close(u.frame_field(i).l2_norm(), mass, 1e-13));
        }
    }

    #[test]
    fn nonlinearity_scales_cubically(seed in 0u64..500, lambda in -3.0f64..3.0) {
        prop_assume!(lambda.abs() > 1e-2);
        let c = SolveConfig::small_data(2, 16, S);
        let u = data(&c, 1.0, seed);
        let spec = NonlinearitySpec::model(S);
        let base = apply_nonlinearity(&u, &spec, S).unwrap();
        let scaled = apply_nonlinearity(&u.scale(c64(lambda, 0.0)), &spec, S).unwrap();
        let expected = base.scale(c64(lambda.powi(3), 0.0));
        let peak = expected.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(scaled.max_abs_diff(&expected) <= 1e-10 * peak);
    }
}
