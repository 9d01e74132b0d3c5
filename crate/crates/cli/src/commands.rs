use std::fmt::Write as _;
use std::fs;

use scalefisher::estimator::{estimate_with, SplitOptions};
use scalefisher::fisher::{fisher_report, rate_scan, FisherReport, RateScan};
use scalefisher::montecarlo::{run_study, Sampler};
use scalefisher::{AutocovarianceSpec, ModelSpec, Preset, SlowlyVaryingSpec};
use serde::Serialize;

use crate::args::{
    Command, EstimateArgs, FisherArgs, Format, McStudyArgs, ModelArgs, RateScanArgs, SimulateArgs, SimulateFormat,
};
use crate::error::{CliError, CliResult};
use crate::io::{csv_float, csv_opt, emit, read_observations, to_json};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Fisher(a) => cmd_fisher(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::McStudy(a) => cmd_mc_study(a),
        Command::RateScan(a) => cmd_rate_scan(a),
    }
}

fn required<T>(value: Option<T>, flag: &str, preset: Preset) -> CliResult<T> {
    value.ok_or_else(|| CliError::Validation(format!("--{flag} is required for preset {preset}")))
}

/// Build and validate the model described by the flags.
pub fn build_spec(m: &ModelArgs, n: usize) -> CliResult<ModelSpec> {
    let mut spec = if let Some(path) = &m.spec_file {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        let mut spec: ModelSpec = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: invalid model: {e}", path.display())))?;
        spec.n = n;
        spec
    } else {
        match m.preset {
            Preset::FbmWn => ModelSpec::fbm_wn(required(m.hurst, "H", m.preset)?, m.sigma, m.tau, n)?,
            Preset::LargeError => {
                ModelSpec::large_error(required(m.hurst, "H", m.preset)?, m.sigma, m.tau, n, m.beta)?
            }
            Preset::IntegratedFbm => {
                ModelSpec::integrated_fbm(required(m.hurst, "H", m.preset)?, m.sigma, m.tau, n)?
            }
            Preset::User => {
                let gammas = required(m.gammas.clone(), "gammas", m.preset)?;
                let mut spec = ModelSpec::fbm_wn(0.5, m.sigma, m.tau, n)?;
                spec.x_cov = AutocovarianceSpec::user(gammas);
                spec.beta = required(m.beta, "beta", m.preset)?;
                spec.alpha = required(m.alpha, "alpha", m.preset)?;
                spec.ell = SlowlyVaryingSpec::Constant { c: required(m.ell, "ell", m.preset)? };
                spec
            }
        }
    };
    if m.spec_file.is_some() {
        spec.sigma = m.sigma;
        spec.tau = m.tau;
    }
    if let Some(b) = m.beta {
        spec.beta = b;
    }
    if let Some(k) = m.k {
        spec.k = k;
    }
    if let Some(a) = m.alpha {
        spec.alpha = a;
    }
    match (m.ell, m.ell_rho) {
        (Some(c), Some(rho)) => spec.ell = SlowlyVaryingSpec::LogPower { c, rho },
        (Some(c), None) => spec.ell = SlowlyVaryingSpec::Constant { c },
        (None, Some(rho)) => {
            let (c, _) = spec.ell.coefficients();
            spec.ell = SlowlyVaryingSpec::LogPower { c, rho };
        }
        (None, None) => {}
    }
    if let Some(c) = m.noise_convention {
        spec.noise_convention = c;
    }
    if let Some(k) = m.k_max {
        spec.k_max = k;
    }
    spec.validate()?;
    Ok(spec)
}

fn write_json<T: Serialize>(out: Option<&std::path::Path>, value: &T) -> CliResult<()> {
    emit(out, &to_json(value)?)
}

fn cmd_fisher(a: FisherArgs) -> CliResult<()> {
    let spec = build_spec(&a.model, a.n)?;
    let report = fisher_report(&spec, a.method)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match a.out.format {
        Format::Json => write_json(a.out.output.as_deref(), &report),
        Format::Csv => emit(a.out.output.as_deref(), fisher_csv(&report).as_bytes()),
    }
}

fn fisher_csv(r: &FisherReport) -> String {
    let mut s = String::from("n,exact,integral,closed_form,diamond,regime,rate_exponent\n");
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{}",
        r.n,
        csv_opt(r.exact),
        csv_opt(r.integral),
        csv_opt(r.closed_form),
        csv_float(r.diamond),
        r.regime,
        csv_float(r.rate_exponent)
    );
    s
}

fn cmd_estimate(a: EstimateArgs) -> CliResult<()> {
    let z = read_observations(&a.input)?;
    if let Some(n) = a.n {
        if n != z.len() {
            return Err(CliError::Validation(format!(
                "{}: expected {n} observations, found {}",
                a.input.display(),
                z.len()
            )));
        }
    }
    let spec = build_spec(&a.model, z.len())?;
    let mut opts = SplitOptions { delta: a.delta, ..Default::default() };
    if let Some(m) = a.min_information {
        opts.min_information = m;
    }
    let result = estimate_with(&z, &spec, &opts)?;
    match a.out.format {
        Format::Json => write_json(a.out.output.as_deref(), &result),
        Format::Csv => {
            let mut s = String::from("preliminary_v,sigma2_tilde,sigma2_hat,plugin_fisher,k_star,n,i1_an,i1_n,delta_n\n");
            let p = &result.split;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                csv_float(result.preliminary_v),
                csv_float(result.sigma2_tilde),
                csv_float(result.sigma2_hat),
                csv_float(result.plugin_fisher),
                p.k_star,
                p.n,
                csv_float(p.i1_an),
                csv_float(p.i1_n),
                csv_float(p.delta_n)
            );
            emit(a.out.output.as_deref(), s.as_bytes())
        }
    }
}

#[derive(Serialize)]
struct Simulation<'a> {
    spec: &'a ModelSpec,
    seed: u64,
    samples: Vec<Vec<f64>>,
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    if a.reps == 0 {
        return Err(CliError::Validation("--reps must be at least 1".into()));
    }
    if a.format == SimulateFormat::Text && a.reps != 1 {
        return Err(CliError::Validation("text output holds a single replicate; use --reps 1".into()));
    }
    let spec = build_spec(&a.model, a.n)?;
    let sampler = Sampler::new(&spec)?;
    let samples: Vec<Vec<f64>> = (0..a.reps as u64).map(|r| sampler.sample(a.seed, r)).collect();
    let bytes = match a.format {
        SimulateFormat::Json => to_json(&Simulation { spec: &spec, seed: a.seed, samples })?,
        SimulateFormat::Csv => {
            let mut s = String::from("rep,i,z\n");
            for (r, z) in samples.iter().enumerate() {
                for (i, v) in z.iter().enumerate() {
                    let _ = writeln!(s, "{r},{},{}", i + 1, csv_float(*v));
                }
            }
            s.into_bytes()
        }
        SimulateFormat::Text => {
            let mut s = String::new();
            for v in &samples[0] {
                let _ = writeln!(s, "{}", csv_float(*v));
            }
            s.into_bytes()
        }
    };
    emit(a.output.as_deref(), &bytes)
}

fn cmd_mc_study(a: McStudyArgs) -> CliResult<()> {
    let spec = build_spec(&a.model, a.n)?;
    let study = run_study(&spec, a.reps, a.seed, a.estimator)?;
    match a.out.format {
        Format::Json => write_json(a.out.output.as_deref(), &study),
        Format::Csv => {
            let mut buf = Vec::new();
            study.write_csv(&mut buf).map_err(|e| CliError::io("formatting CSV", e))?;
            emit(a.out.output.as_deref(), &buf)
        }
    }
}

fn cmd_rate_scan(a: RateScanArgs) -> CliResult<()> {
    let grid = a.n_grid.0;
    let spec = build_spec(&a.model, grid[0])?;
    let scan = rate_scan(&spec, &grid)?;
    match a.out.format {
        Format::Json => write_json(a.out.output.as_deref(), &scan),
        Format::Csv => emit(a.out.output.as_deref(), scan_csv(&scan).as_bytes()),
    }
}

/// One row per n; the fitted and predicted slopes repeat on every row so the
/// file is self-contained.
fn scan_csv(scan: &RateScan) -> String {
    let mut s = String::from("n,integral,closed_form,fitted_slope,predicted_slope\n");
    for r in &scan.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.n,
            csv_float(r.integral),
            csv_opt(r.closed_form),
            csv_opt(scan.fitted_slope),
            csv_float(scan.predicted_slope)
        );
    }
    s
}
