//! Verification suites: each runs a family of measurements and compares them
//! with fixed thresholds, producing a machine-readable [`SuiteReport`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cone::{factorization_sweep, s1_factorization_check, sample_admissible, verify_n_properties, ConeParams};
use crate::error::{Error, Result};
use crate::lp::{build_cone_atlas, default_cone_margin};
use crate::norms::{
    f_sigma_norm, n_sigma_norm, schrodinger_operator, verify_estimate, xk_norm, zk_upper, EstimateKind, FamilySpec,
    InputFamily, STABILITY_TOLERANCE,
};
use crate::oscillatory::{
    fit_dispersive_decay, prefactor_ratio, sigma_measure, sigma_measure_s1, sigma_sweep, sphere_phase_bessel,
    sphere_phase_integral, Cutoff, LogRange, PhaseIntegralSpec, SweepTable,
};
use crate::report::RatioReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Nprops,
    Factorization,
    Norms,
    Estimates,
    Dispersive,
    Measure,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Nprops,
        Suite::Factorization,
        Suite::Norms,
        Suite::Estimates,
        Suite::Dispersive,
        Suite::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Nprops => "nprops",
            Suite::Factorization => "factorization",
            Suite::Norms => "norms",
            Suite::Estimates => "estimates",
            Suite::Dispersive => "dispersive",
            Suite::Measure => "measure",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s}")))
    }
}

/// Overrides for the suite defaults.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub s: Option<f64>,
    pub k: Option<i32>,
    pub samples: Option<usize>,
    pub draws: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, passed: value <= threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub elapsed_s: f64,
    pub checks: Vec<Check>,
    pub reports: Vec<RatioReport>,
    #[serde(skip)]
    pub tables: Vec<(String, SweepTable)>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let clock = Instant::now();
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut tables = Vec::new();
    match suite {
        Suite::Nprops => nprops(opts, &mut checks, &mut reports)?,
        Suite::Factorization => factorization(opts, &mut checks, &mut reports)?,
        Suite::Norms => norms(opts, &mut checks)?,
        Suite::Estimates => estimates(opts, &mut checks, &mut reports)?,
        Suite::Dispersive => dispersive(opts, &mut checks)?,
        Suite::Measure => measure(opts, &mut checks, &mut reports, &mut tables)?,
    }
    Ok(SuiteReport {
        suite,
        passed: checks.iter().all(|c| c.passed),
        elapsed_s: clock.elapsed().as_secs_f64(),
        checks,
        reports,
        tables,
    })
}

fn orders(opts: &VerifyOptions) -> Vec<f64> {
    opts.s.map_or(vec![0.6, 0.75, 0.9], |s| vec![s])
}

fn relative_spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo - 1.0
}

fn nprops(opts: &VerifyOptions, checks: &mut Vec<Check>, reports: &mut Vec<RatioReport>) -> Result<()> {
    let samples = opts.samples.unwrap_or(10_000);
    let scales = opts.k.map_or(vec![4, 8], |k| vec![k]);
    for s in orders(opts) {
        for &k in &scales {
            let a = verify_n_properties(&ConeParams::new(k, s, 3), samples, opts.seed)?;
            let b = verify_n_properties(&ConeParams::new(k + 1, s, 3), samples, opts.seed)?;
            checks.push(Check::at_most(format!("s={s} k={k} bracket finite"), a.c_star, f64::MAX));
            checks.push(Check::at_most(format!("s={s} k={k} rescaling drift"), relative_spread(&[a.c_star, b.c_star]), 5e-4));
            reports.push(a);
        }
    }
    Ok(())
}

fn factorization(opts: &VerifyOptions, checks: &mut Vec<Check>, reports: &mut Vec<RatioReport>) -> Result<()> {
    let samples = opts.samples.unwrap_or(10_000);
    let params = ConeParams::new(6, 1.0, 3);
    let mut worst = 0.0f64;
    for p in sample_admissible(&params, 1000, opts.seed)? {
        let scale = 1.0 + p.tau.abs() + p.xi_norm().powi(2);
        worst = worst.max(s1_factorization_check(&p.xi, p.tau, &p.e)? / scale);
    }
    checks.push(Check::at_most("s=1 scaled residual", worst, 1e-10));
    let s = opts.s.unwrap_or(0.75);
    let mut constants = Vec::new();
    for k in [4, 6, 8] {
        let r = factorization_sweep(&ConeParams::new(k, s, 2), samples, opts.seed + 11)?;
        constants.push(r.c_star);
        reports.push(r);
    }
    checks.push(Check::at_most("error envelope spread over k", relative_spread(&constants), 0.25));
    Ok(())
}

fn norms(opts: &VerifyOptions, checks: &mut Vec<Check>) -> Result<()> {
    let s = opts.s.unwrap_or(0.75);
    let draws = opts.draws.unwrap_or(4);
    for n in opts.dims.clone().unwrap_or(vec![2, 3]) {
        let atlas = build_cone_atlas(n, default_cone_margin(n))?;
        let mut spec = FamilySpec::standard(n, 1, s, InputFamily::Free);
        spec.seed = opts.seed;
        let (mut excess, mut gap) = (0.0f64, 0.0f64);
        let sigma = (n as f64 - 2.0 * s) / 2.0;
        for i in 0..draws {
            let g = spec.draw(i, s, None)?;
            let x = xk_norm(&g, 1, s)?.value;
            let z = zk_upper(&g, 1, s, &atlas)?.value;
            excess = excess.max(z / x - 1.0);
            let f = f_sigma_norm(&g, sigma, s, &atlas)?;
            let back = n_sigma_norm(&schrodinger_operator(&g, s)?, sigma, s, &atlas)?;
            gap = gap.max((back / f - 1.0).abs());
        }
        checks.push(Check::at_most(format!("n={n} Z exceeds X by"), excess, 0.0));
        checks.push(Check::at_most(format!("n={n} N(Lg)/F(g) - 1"), gap, 1e-8));
    }
    Ok(())
}

/// Kinds entering the estimate-ratio acceptance suite.
pub const ESTIMATE_SUITE: [EstimateKind; 7] = [
    EstimateKind::Embedding,
    EstimateKind::LinftyL2,
    EstimateKind::Smoothing,
    EstimateKind::Maximal,
    EstimateKind::Homogeneous,
    EstimateKind::Inhomogeneous,
    EstimateKind::Trilinear,
];

/// Family layout used by the estimate suite at dimension `n`.
pub fn estimate_family(kind: EstimateKind, n: usize, s: f64, draws: usize, seed: u64) -> FamilySpec {
    let (family, headroom) = match kind {
        EstimateKind::Trilinear => (InputFamily::Free, 3.0),
        EstimateKind::Inhomogeneous => (InputFamily::Shell, 1.0),
        _ => (InputFamily::Free, 1.0),
    };
    let points = if n == 2 { 32 } else { 16 };
    let mut spec = FamilySpec::with_layout(n, points, 1, s, family, headroom);
    spec.draws = draws;
    spec.seed = seed;
    spec
}

fn estimates(opts: &VerifyOptions, checks: &mut Vec<Check>, reports: &mut Vec<RatioReport>) -> Result<()> {
    let s = opts.s.unwrap_or(0.75);
    let draws = opts.draws.unwrap_or(64);
    for n in opts.dims.clone().unwrap_or(vec![2, 3]) {
        let atlas = build_cone_atlas(n, default_cone_margin(n))?;
        for kind in ESTIMATE_SUITE {
            let r = verify_estimate(kind, &estimate_family(kind, n, s, draws, opts.seed), s, &atlas)?;
            let finite = if r.c_star.is_finite() { r.c_star } else { f64::INFINITY };
            checks.push(Check::at_most(format!("n={n} {} C* finite", kind.name()), finite, f64::MAX));
            let drift = if r.stable == Some(true) { 0.0 } else { 1.0 };
            checks.push(Check::at_most(format!("n={n} {} stable under doubling", kind.name()), drift, 0.0));
            if kind == EstimateKind::Smoothing {
                let f = r.item("f").map_or(f64::NAN, |i| i.max);
                let c = r.item("conjugate").map_or(f64::NAN, |i| i.max);
                checks.push(Check::at_most(format!("n={n} smoothing f vs conjugate"), (f / c - 1.0).abs(), STABILITY_TOLERANCE));
            }
            reports.push(r);
        }
    }
    Ok(())
}

fn dispersive(opts: &VerifyOptions, checks: &mut Vec<Check>) -> Result<()> {
    let mut worst = 0.0f64;
    for n in 2..=4 {
        for i in 0..=500 {
            let rho = 0.1 * i as f64;
            let q = sphere_phase_integral(rho, n)?;
            worst = worst.max((q.re - sphere_phase_bessel(rho, n)?).abs().max(q.im.abs()));
        }
    }
    checks.push(Check::at_most("sphere integral vs Bessel form", worst, 1e-8));
    let cases = match opts.s {
        Some(s) => vec![(2, s), (3, s)],
        None => vec![(2, 0.75), (3, 0.75), (2, 0.9)],
    };
    for (n, s) in cases {
        let fit = fit_dispersive_decay(&PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k: 0 }), LogRange::new(10.0, 1000.0, 17))?;
        checks.push(Check::at_most(format!("n={n} s={s} decay slope vs -n/2"), (fit.slope - fit.target).abs(), 0.15));
    }
    let (n, s) = (2, opts.s.unwrap_or(0.75));
    for k in 1..=2 {
        let ratio = prefactor_ratio(
            &PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k }),
            &PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k: 0 }),
            200.0,
        )?;
        let predicted = 2f64.powf(k as f64 * n as f64 * (1.0 - s));
        checks.push(Check::at_most(format!("k={k} prefactor ratio off by"), (ratio / predicted).max(predicted / ratio), 2.0));
    }
    Ok(())
}

fn measure(
    opts: &VerifyOptions,
    checks: &mut Vec<Check>,
    reports: &mut Vec<RatioReport>,
    tables: &mut Vec<(String, SweepTable)>,
) -> Result<()> {
    let draws = opts.draws.unwrap_or(4);
    for s in orders(opts) {
        let (r, table) = sigma_sweep(s, 8, draws, opts.seed + 5)?;
        checks.push(Check::at_most(format!("s={s} shell measure C* finite"), r.c_star, f64::MAX));
        reports.push(r);
        tables.push((format!("measure_s{s}"), table));
    }
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let k = i % 9;
        let lo = 2f64.powi(k);
        let j = (i % 7) as f64 * (2.0 * k as f64 + 2.0) / 6.0;
        let tau = -(lo * (1.0 + (i as f64 * 0.618_033_988_75).fract())).powi(2);
        let grid = sigma_measure(k, j, 0.0, tau, 1.0, 2)?;
        worst = worst.max((grid - sigma_measure_s1(k, j, tau)).abs());
    }
    checks.push(Check::at_most("s=1 closed form vs grid", worst, 1e-3));
    Ok(())
}
