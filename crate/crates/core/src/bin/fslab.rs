use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fslab::lp::{build_cone_atlas, default_cone_margin};
use fslab::norms::{
    f_sigma_norm, n_sigma_norm, sigma_report, xk_norm, yk_norm, zk_upper, NormKind, NormReport,
};
use fslab::oscillatory::{fit_dispersive_decay, Cutoff, LogRange, PhaseIntegralSpec, SweepTable};
use fslab::report::write_atomic;
use fslab::solver::{picard_solve, SolveConfig};
use fslab::spectral::fslb;
use fslab::verify::{run_suite, Suite, VerifyOptions};
use fslab::Error;

#[derive(Parser)]
#[command(name = "fslab", version, about = "Fractional Schrödinger laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Picard solve from a TOML config; writes the solution and a report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "fslab-out")]
        out: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        suite: SuiteArg,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "fslab-out")]
        out: PathBuf,
    },
    /// Adapted norm of a stored trajectory.
    Norms {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i32>,
        #[arg(long, default_value_t = 0.75)]
        s: f64,
        /// Regularity of `f`/`n`; defaults to (n − 2s)/2.
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        /// Direction for `yk`, comma separated; defaults to e₁.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        e: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay table of `sup_x |I(x, t)|` over log-spaced `t`.
    Dispersive {
        /// TOML or JSON phase-integral spec; overrides `--n/--s/--k`.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.75)]
        s: f64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k: i32,
        #[arg(long, default_value_t = 10.0)]
        t_start: f64,
        #[arg(long, default_value_t = 1000.0)]
        t_end: f64,
        #[arg(long, default_value_t = 17)]
        count: usize,
        #[arg(long, default_value = "fslab-out")]
        out: PathBuf,
    },
    /// Summarize the JSON reports in a directory.
    Report {
        #[arg(long = "in", default_value = "fslab-out")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Nprops,
    Factorization,
    Norms,
    Estimates,
    Dispersive,
    Measure,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Xk,
    Yk,
    Zk,
    F,
    N,
}

enum Failure {
    Check(String),
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io { .. } | Error::Format(_) | Error::InvalidArgument(_) | Error::InvalidGrid(_) => {
                Failure::Usage(e.to_string())
            }
            Error::Divergence { .. } => Failure::Check(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Solve { config, out } => solve(&config, &out),
        Command::Verify { suite, s, k, samples, draws, dims, seed, out } => {
            let opts = VerifyOptions { s, k, samples, draws, dims, seed };
            verify(suite, &opts, &out)
        }
        Command::Norms { input, kind, k, s, sigma, e, out } => norms(&input, kind, k, s, sigma, e, out.as_deref()),
        Command::Dispersive { spec, n, s, k, t_start, t_end, count, out } => {
            dispersive(spec.as_deref(), n, s, k, LogRange::new(t_start, t_end, count), &out)
        }
        Command::Report { input, out } => report(&input, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("FSLB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| format!("FSLB_THREADS must be a count, got {value:?}"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

fn solve(config_path: &Path, out: &Path) -> Outcome {
    let mut config = SolveConfig::from_path(config_path)?;
    let dir = config.output.dir.take().unwrap_or_else(|| out.to_path_buf());
    let prefix = config.output.prefix.clone().unwrap_or_else(|| "solution".into());
    let u0 = config.initial_data()?;
    let result = picard_solve(&u0, &config.nonlinearity(), &config)?;
    let r = &result.report;
    fslb::write_trajectory(&dir.join(format!("{prefix}.fslb")), &result.solution)?;
    fslb::write_field(&dir.join(format!("{prefix}_u0.fslb")), &u0)?;
    write_atomic(&dir.join(format!("{prefix}_report.json")), r.to_json().as_bytes())?;
    println!("status      {:?}", r.status);
    for it in &r.iterations {
        println!(
            "  step {:>3}  diff {:.3e}  ratio {}",
            it.iteration,
            it.linf_l2,
            it.ratio.map_or("-".to_string(), |q| format!("{q:.3e}"))
        );
    }
    println!("residual    {:.3e}", r.residual);
    println!("a-priori    {:.6}", r.apriori_ratio);
    for note in &r.notes {
        println!("note: {note}");
    }
    result.ensure_converged()?;
    Ok(())
}

fn verify(suite: SuiteArg, opts: &VerifyOptions, out: &Path) -> Outcome {
    let suites: Vec<Suite> = match suite {
        SuiteArg::Nprops => vec![Suite::Nprops],
        SuiteArg::Factorization => vec![Suite::Factorization],
        SuiteArg::Norms => vec![Suite::Norms],
        SuiteArg::Estimates => vec![Suite::Estimates],
        SuiteArg::Dispersive => vec![Suite::Dispersive],
        SuiteArg::Measure => vec![Suite::Measure],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut failed = Vec::new();
    for suite in suites {
        let report = run_suite(suite, opts)?;
        for c in &report.checks {
            println!(
                "{} {suite}: {} = {:.4e} (limit {:.4e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
        }
        write_atomic(&out.join(format!("verify_{suite}.json")), report.to_json().as_bytes())?;
        for (name, table) in &report.tables {
            table.write_csv(&out.join(format!("{name}.csv")))?;
        }
        println!("{suite}: {:.1} s", report.elapsed_s);
        if !report.passed {
            failed.push(suite.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("suites with failing checks: {}", failed.join(", "))))
    }
}

fn norms(
    input: &Path,
    kind: KindArg,
    k: Option<i32>,
    s: f64,
    sigma: Option<f64>,
    e: Option<Vec<f64>>,
    out: Option<&Path>,
) -> Outcome {
    let u = fslb::read_trajectory(input)?;
    let n = u.grid().dim();
    let sigma = sigma.unwrap_or((n as f64 - 2.0 * s) / 2.0);
    let need_k = || k.ok_or_else(|| Failure::Usage("--k is required for xk, yk and zk".into()));
    let atlas = || build_cone_atlas(n, default_cone_margin(n));
    let report: NormReport = match kind {
        KindArg::Xk => xk_norm(&u, need_k()?, s)?,
        KindArg::Yk => {
            let e = e.unwrap_or_else(|| {
                let mut v = vec![0.0; n];
                v[0] = 1.0;
                v
            });
            yk_norm(&u, need_k()?, &e, s)?
        }
        KindArg::Zk => zk_upper(&u, need_k()?, s, &atlas()?)?,
        KindArg::F => sigma_report(NormKind::FSigma, f_sigma_norm(&u, sigma, s, &atlas()?)?, sigma, s),
        KindArg::N => sigma_report(NormKind::NSigma, n_sigma_norm(&u, sigma, s, &atlas()?)?, sigma, s),
    };
    match out {
        Some(path) => write_atomic(path, report.to_json().as_bytes())?,
        None => println!("{}", report.to_json()),
    }
    Ok(())
}

fn read_spec(path: &Path) -> Result<PhaseIntegralSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = if path.extension().is_some_and(|x| x == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn dispersive(spec: Option<&Path>, n: usize, s: f64, k: i32, range: LogRange, out: &Path) -> Outcome {
    let spec = match spec {
        Some(path) => read_spec(path)?,
        None => PhaseIntegralSpec::radial(n, s, Cutoff::Annulus { k }),
    };
    let fit = fit_dispersive_decay(&spec, range)?;
    let mut table = SweepTable::new(&["t"]);
    for (t, v) in fit.abscissae.iter().zip(&fit.values) {
        table.push(vec![*t], *v, fit.prefactor() * t.powf(fit.target));
    }
    table.write_csv(&out.join("dispersive.csv"))?;
    write_json(&out.join("dispersive_fit.json"), &json!({ "spec": spec, "fit": fit, "pass": fit.pass() }))?;
    println!(
        "n = {}, s = {}: slope {:.4} (target {:.2}), {}",
        spec.n,
        spec.s,
        fit.slope,
        fit.target,
        if fit.pass() { "PASS" } else { "FAIL" }
    );
    if fit.pass() {
        Ok(())
    } else {
        Err(Failure::Check(format!("decay slope {:.3} above {:.3} + 0.15", fit.slope, fit.target)))
    }
}

/// Headline and verdict of one stored document, recognized by its keys.
fn summarize(doc: &Value) -> Option<(String, &'static str, bool)> {
    let num = |k: &str| doc.get(k).and_then(Value::as_f64);
    if let Some(status) = doc.get("status").and_then(Value::as_str) {
        let line = format!("solve {status}, residual {:.2e}", num("residual").unwrap_or(f64::NAN));
        return Some((line, "solve", status == "converged"));
    }
    if let Some(suite) = doc.get("suite").and_then(Value::as_str) {
        let passed = doc.get("passed").and_then(Value::as_bool).unwrap_or(false);
        let n = doc.get("checks").and_then(Value::as_array).map_or(0, Vec::len);
        return Some((format!("suite {suite}, {n} checks"), "verify", passed));
    }
    if let Some(lemma) = doc.get("lemma").and_then(Value::as_str) {
        let stable = doc.get("stable").and_then(Value::as_bool).unwrap_or(true);
        return Some((format!("{lemma} C* = {:.4}", num("c_star").unwrap_or(f64::NAN)), "ratio", stable));
    }
    if let Some(fit) = doc.get("fit") {
        let slope = fit.get("slope").and_then(Value::as_f64).unwrap_or(f64::NAN);
        let pass = doc.get("pass").and_then(Value::as_bool).unwrap_or(false);
        return Some((format!("decay slope {slope:.3}"), "dispersive", pass));
    }
    if let Some(kind) = doc.get("kind").and_then(Value::as_str) {
        let value = doc.get("value").map(Value::to_string).unwrap_or_default();
        return Some((format!("{kind} = {value}"), "norm", true));
    }
    None
}

fn report(input: &Path, out: Option<&Path>) -> Outcome {
    let entries = fs::read_dir(input).map_err(|e| Error::io(input, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.to_string_lossy().ends_with(".fslb.json"))
        .filter(|p| p.file_name().is_some_and(|n| n != "summary.json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for path in &paths {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let Ok(doc) = serde_json::from_str::<Value>(&text) else { continue };
        let Some((headline, kind, ok)) = summarize(&doc) else { continue };
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        println!("{:<4} {name:<32} {headline}", if ok { "ok" } else { "FAIL" });
        all_ok &= ok;
        rows.push(json!({ "file": name, "type": kind, "ok": ok, "headline": headline }));
    }
    let summary = json!({ "documents": rows.len(), "all_ok": all_ok, "entries": rows });
    let target = out.map(Path::to_path_buf).unwrap_or_else(|| input.join("summary.json"));
    write_json(&target, &summary)?;
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Check("some documents report failures".into()))
    }
}
