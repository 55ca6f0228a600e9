//! `certify`: compare an experimental fidelity dataset against the quantum
//! limit and the classical (measure-and-prepare) baseline, or generate a
//! synthetic dataset for end-to-end validation.
//!
//! Records carry per-input fidelity estimates for prior-distributed input
//! amplitudes; estimation of fidelities from raw measurement records is out
//! of scope. Uncertainty uses the normal approximation at a declared z,
//! with an optional bootstrap cross-check.

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use fidelim::channels::{per_input_fidelity, ChannelSpec, TaskSpec};
use fidelim::limits::{
    amplification_bound, best_gaussian_amplifier, best_mp_conjugator, best_mp_direct,
    conjugation_bound, BoundResult,
};
use num_complex::Complex;

use crate::util::{emit, fmt_f, parse_channel, usage, ChannelChoice, CliError, TaskKind};
use crate::Cli;

pub const RECORD_CSV_HEADER: &str = "alpha_re,alpha_im,fidelity_estimate,n_trials";

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// CSV of experiment records (alpha_re,alpha_im,fidelity_estimate,n_trials).
    #[arg(long, conflicts_with = "generate")]
    pub data: Option<PathBuf>,
    /// Generate a synthetic dataset instead of certifying one.
    #[arg(long)]
    pub generate: bool,
    /// Task family the records target.
    #[arg(long, value_enum, default_value_t = TaskKind::Amp)]
    pub kind: TaskKind,
    /// Target energy gain (amp tasks).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Input energy N of the unit-amplitude reference state.
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
    /// Prior inverse width lambda the amplitudes were drawn from.
    #[arg(long)]
    pub lambda: f64,
    /// z-score for intervals, moment validation, and the verdict.
    #[arg(long, default_value_t = 3.0)]
    pub z: f64,
    /// Bootstrap resamples for an alternative standard error (0 disables).
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    /// Records to generate (with --generate).
    #[arg(long, default_value_t = 10_000)]
    pub records: usize,
    /// Bernoulli trials behind each generated fidelity estimate.
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Channel to generate from: amplifier:G, attenuator:T, mp:C, identity,
    /// or `opt` for the family optimum of the task.
    #[arg(long, default_value = "opt")]
    pub channel: String,
}

struct Record {
    alpha_re: f64,
    alpha_im: f64,
    fidelity_estimate: f64,
    n_trials: u64,
}

#[derive(Serialize)]
struct CertReport {
    kind: &'static str,
    n_in: f64,
    eta: f64,
    lambda: f64,
    z: f64,
    n_records: usize,
    total_trials: u64,
    empirical_mean: f64,
    std_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap_std_err: Option<f64>,
    bound: BoundResult<f64>,
    classical_baseline: Option<f64>,
    verdict: &'static str,
    warnings: Vec<String>,
    notes: Vec<String>,
}

pub fn run(cli: &Cli, args: &CertifyArgs) -> Result<ExitCode, CliError> {
    if !(args.lambda.is_finite() && args.lambda > 0.0) {
        return Err(usage("certify requires a finite --lambda > 0"));
    }
    if !(args.z.is_finite() && args.z > 0.0) {
        return Err(usage("--z must be a finite positive number"));
    }
    let task = build_task(args)?;
    if args.generate {
        generate(cli, args, &task)
    } else {
        certify(cli, args, &task)
    }
}

fn build_task(args: &CertifyArgs) -> Result<TaskSpec<f64>, CliError> {
    let eta = match args.kind {
        TaskKind::Amp => args
            .eta
            .ok_or_else(|| usage("amp certification requires --eta"))?,
        TaskKind::Conj => {
            if args.eta.is_some_and(|eta| eta != 1.0) {
                return Err(usage(
                    "conjugation certification is defined at unit target gain; drop --eta",
                ));
            }
            1.0
        }
    };
    Ok(TaskSpec::new(
        args.n,
        eta,
        args.lambda,
        args.kind == TaskKind::Conj,
    )?)
}

fn resolve_generating_channel(
    args: &CertifyArgs,
    task: &TaskSpec<f64>,
) -> Result<ChannelSpec<f64>, CliError> {
    let choice = if args.channel == "opt" {
        match args.kind {
            TaskKind::Amp => ChannelChoice::OptAmplifier,
            TaskKind::Conj => ChannelChoice::OptMp,
        }
    } else {
        parse_channel(&args.channel, args.kind)?
    };
    Ok(match choice {
        ChannelChoice::Fixed(c) => c,
        ChannelChoice::OptAmplifier => {
            let (gain, _) = best_gaussian_amplifier(
                task.eta() / task.n_in(),
                task.lambda() / task.n_in(),
            )?;
            ChannelSpec::amplifier(gain)?
        }
        ChannelChoice::OptMp => match args.kind {
            TaskKind::Amp => {
                let (scale, _) = best_mp_direct(task.n_in(), task.eta(), task.lambda())?;
                ChannelSpec::mp_direct(scale)?
            }
            TaskKind::Conj => {
                let (scale, _) = best_mp_conjugator(task.n_in(), task.lambda())?;
                ChannelSpec::mp_conjugator(scale)?
            }
        },
    })
}

/// Draw amplitudes from the prior, evaluate the channel's per-input
/// fidelity, and report a binomial estimate of it per record.
fn generate(cli: &Cli, args: &CertifyArgs, task: &TaskSpec<f64>) -> Result<ExitCode, CliError> {
    if args.records == 0 {
        return Err(usage("--records must be at least 1"));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let chan = resolve_generating_channel(args, task)?;
    let sigma = (0.5 / args.lambda).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut content = String::with_capacity(args.records * 72 + 64);
    content.push_str(RECORD_CSV_HEADER);
    content.push('\n');
    for _ in 0..args.records {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let alpha = Complex::new(re * sigma, im * sigma);
        let f = per_input_fidelity(&chan, alpha, task)?.clamp(0.0, 1.0);
        let hits = Binomial::new(args.trials, f)
            .map_err(|e| usage(format!("binomial sampling failed: {e}")))?
            .sample(&mut rng);
        let estimate = hits as f64 / args.trials as f64;
        content.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f(alpha.re),
            fmt_f(alpha.im),
            fmt_f(estimate),
            args.trials
        ));
    }
    emit(&cli.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn read_records(path: &PathBuf) -> Result<Vec<Record>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    {
        let headers = reader
            .headers()
            .map_err(|e| usage(format!("{}: cannot read header: {e}", path.display())))?;
        let expected: Vec<&str> = RECORD_CSV_HEADER.split(',').collect();
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(usage(format!(
                "{}: line 1: expected header {RECORD_CSV_HEADER:?}, got {:?}",
                path.display(),
                got.join(",")
            )));
        }
    }
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2; // 1-based, after the header
        let at = |msg: String| usage(format!("{}: line {line}: {msg}", path.display()));
        let row = row.map_err(|e| at(format!("malformed row: {e}")))?;
        if row.len() != 4 {
            return Err(at(format!("expected 4 fields, got {}", row.len())));
        }
        let num = |i: usize, name: &str| -> Result<f64, CliError> {
            let v: f64 = row[i]
                .parse()
                .map_err(|_| at(format!("{name} is not a number: {:?}", &row[i])))?;
            if !v.is_finite() {
                return Err(at(format!("{name} must be finite")));
            }
            Ok(v)
        };
        let record = Record {
            alpha_re: num(0, "alpha_re")?,
            alpha_im: num(1, "alpha_im")?,
            fidelity_estimate: num(2, "fidelity_estimate")?,
            n_trials: row[3]
                .parse()
                .map_err(|_| at(format!("n_trials is not a positive integer: {:?}", &row[3])))?,
        };
        if !(0.0..=1.0).contains(&record.fidelity_estimate) {
            return Err(at(format!(
                "fidelity_estimate {} outside [0, 1]",
                record.fidelity_estimate
            )));
        }
        if record.n_trials == 0 {
            return Err(at("n_trials must be at least 1".to_string()));
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(usage(format!("{}: no data rows", path.display())));
    }
    Ok(records)
}

fn weighted_mean_se(records: &[Record]) -> (f64, f64, u64) {
    let total: u64 = records.iter().map(|r| r.n_trials).sum();
    let w_sum = total as f64;
    let mean = records
        .iter()
        .map(|r| r.n_trials as f64 * r.fidelity_estimate)
        .sum::<f64>()
        / w_sum;
    let var_sum = records
        .iter()
        .map(|r| {
            let w = r.n_trials as f64;
            let d = r.fidelity_estimate - mean;
            w * w * d * d
        })
        .sum::<f64>();
    (mean, var_sum.sqrt() / w_sum, total)
}

fn bootstrap_se(records: &[Record], resamples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x626f_6f74); // "boot"
    let n = records.len();
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut w_sum = 0.0;
        let mut acc = 0.0;
        for _ in 0..n {
            let r = &records[rng.random_range(0..n)];
            w_sum += r.n_trials as f64;
            acc += r.n_trials as f64 * r.fidelity_estimate;
        }
        means.push(acc / w_sum);
    }
    let m = means.iter().sum::<f64>() / resamples as f64;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (resamples - 1).max(1) as f64;
    var.sqrt()
}

/// First/second-moment validation of the amplitude sample against the
/// declared prior; mismatches warn but never fail the run.
fn moment_warnings(records: &[Record], lambda: f64, z: f64) -> Vec<String> {
    let n = records.len() as f64;
    let mean_re = records.iter().map(|r| r.alpha_re).sum::<f64>() / n;
    let mean_im = records.iter().map(|r| r.alpha_im).sum::<f64>() / n;
    let mean_abs2 = records
        .iter()
        .map(|r| r.alpha_re * r.alpha_re + r.alpha_im * r.alpha_im)
        .sum::<f64>()
        / n;
    let se_component = (0.5 / lambda / n).sqrt();
    let se_abs2 = 1.0 / lambda / n.sqrt();
    let mut warnings = Vec::new();
    if mean_re.abs() > z * se_component {
        warnings.push(format!(
            "amplitude sample mean_re = {mean_re:.4e} deviates from 0 beyond z={z} \
             (se {se_component:.4e}); the declared prior may not match the data"
        ));
    }
    if mean_im.abs() > z * se_component {
        warnings.push(format!(
            "amplitude sample mean_im = {mean_im:.4e} deviates from 0 beyond z={z} \
             (se {se_component:.4e}); the declared prior may not match the data"
        ));
    }
    let expected_abs2 = 1.0 / lambda;
    if (mean_abs2 - expected_abs2).abs() > z * se_abs2 {
        warnings.push(format!(
            "amplitude sample mean |alpha|^2 = {mean_abs2:.4e} deviates from 1/lambda = \
             {expected_abs2:.4e} beyond z={z} (se {se_abs2:.4e}); the declared prior may \
             not match the data"
        ));
    }
    warnings
}

fn certify(cli: &Cli, args: &CertifyArgs, task: &TaskSpec<f64>) -> Result<ExitCode, CliError> {
    let path = args
        .data
        .as_ref()
        .ok_or_else(|| usage("certify requires --data <records.csv> or --generate"))?;
    let records = read_records(path)?;
    let (mean, se, total_trials) = weighted_mean_se(&records);
    let bootstrap_std_err = if args.bootstrap > 0 {
        Some(bootstrap_se(&records, args.bootstrap, cli.seed))
    } else {
        None
    };
    let warnings = moment_warnings(&records, args.lambda, args.z);

    let (bound, baseline) = match args.kind {
        TaskKind::Amp => (
            amplification_bound(task.eta() / task.n_in(), task.lambda() / task.n_in())?,
            Some(best_mp_direct(task.n_in(), task.eta(), task.lambda())?.1),
        ),
        TaskKind::Conj => (
            conjugation_bound(task.n_in(), task.lambda())?,
            Some(best_mp_conjugator(task.n_in(), task.lambda())?.1),
        ),
    };

    let mut notes = Vec::new();
    if let Some(b) = baseline {
        if (b - bound.value).abs() <= 1e-12 {
            notes.push(
                "the classical measure-and-prepare baseline coincides with the quantum limit \
                 for this task; no gap exists to certify into"
                    .to_string(),
            );
        }
    }

    let verdict = if mean - args.z * se > bound.value {
        "exceeds_quantum_limit_flagged"
    } else if baseline.is_some_and(|b| mean + args.z * se < b) {
        "below_classical"
    } else {
        "between"
    };

    let report = CertReport {
        kind: args.kind.label(),
        n_in: task.n_in(),
        eta: task.eta(),
        lambda: task.lambda(),
        z: args.z,
        n_records: records.len(),
        total_trials,
        empirical_mean: mean,
        std_err: se,
        bootstrap_std_err,
        bound,
        classical_baseline: baseline,
        verdict,
        warnings: warnings.clone(),
        notes,
    };

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    let content = match cli.format {
        crate::OutputFormat::Csv => {
            let mut s = String::from(
                "kind,n_in,eta,lambda,z,n_records,total_trials,empirical_mean,std_err,\
                 bound,classical_baseline,verdict\n",
            );
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                report.kind,
                fmt_f(report.n_in),
                fmt_f(report.eta),
                fmt_f(report.lambda),
                fmt_f(report.z),
                report.n_records,
                report.total_trials,
                fmt_f(report.empirical_mean),
                fmt_f(report.std_err),
                fmt_f(report.bound.value),
                report.classical_baseline.map(fmt_f).unwrap_or_default(),
                report.verdict,
            ));
            s
        }
        crate::OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| usage(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
    };
    emit(&cli.out, &content)?;

    Ok(if verdict == "exceeds_quantum_limit_flagged" {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
