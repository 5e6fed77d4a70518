//! Command line for heavy-tailed exceedance prediction: simulate series,
//! fit models, tabulate optimal precisions, predict, and backtest.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use tailcast::backtest::{run_backtest, BacktestConfig, BacktestReport};
use tailcast::error::{Error, Result};
use tailcast::evt::{estimate_d, extreme_quantile, fit_gev};
use tailcast::io::{format_float, ingest, write_series_csv, IngestOptions};
use tailcast::linear::{
    ar_to_ma, farima_ma_coeffs, fit_ar_lad, fit_ar_ols, ArLoss, MaCoefficients,
};
use tailcast::metrics::{pr_points, roc_points, sample_metrics, tally, ConfusionCounts};
use tailcast::predict::{
    ar_predictor, baseline_predictor, farima_predictor, predict_path, CalibratedPredictor,
    PredictionRecord,
};
use tailcast::series::{EmpiricalDistribution, Series};
use tailcast::sim::{simulate_ar, simulate_ma, InnovationSpec, SimConfig, GENERATOR_NAME};
use tailcast::tail::{lambda_opt_ar1, lambda_opt_ma, RegVarSpec};

/// Seed override honored by `simulate` and `backtest`.
const SEED_ENV: &str = "TAILCAST_SEED";

#[derive(Parser)]
#[command(name = "tailcast", version, about = "Threshold-exceedance prediction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantileMethodArg {
    /// Left-continuous empirical quantile.
    Empirical,
    /// Generalized-Pareto tail extrapolation.
    Gp,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Ols,
    Lad,
}

impl From<LossArg> for ArLoss {
    fn from(loss: LossArg) -> Self {
        match loss {
            LossArg::Ols => ArLoss::Ols,
            LossArg::Lad => ArLoss::Lad,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictModelArg {
    Baseline,
    Ar,
    Farima,
}

#[derive(Clone, Copy, ValueEnum)]
enum LambdaModelArg {
    Ar1,
    Ar,
    Farima,
    Ma,
}

#[derive(clap::Args, Clone, Copy)]
struct IngestArgs {
    /// Aggregate each block of this many raw rows to its maximum.
    #[arg(long)]
    block_max: Option<usize>,
    /// Missing-fraction ceiling after aggregation (default 0.5).
    #[arg(long)]
    max_missing_fraction: Option<f64>,
}

impl From<IngestArgs> for IngestOptions {
    fn from(args: IngestArgs) -> Self {
        IngestOptions {
            block_max: args.block_max,
            max_missing_fraction: args.max_missing_fraction,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a linear series and write CSV plus a JSON sidecar.
    Simulate {
        /// Simulation config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; the sidecar is written next to it as `<out>.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit an autoregression to a centered series and write model JSON.
    FitAr {
        #[arg(long)]
        input: PathBuf,
        /// Autoregression order.
        #[arg(long, default_value_t = 5)]
        order: usize,
        #[arg(long, value_enum, default_value_t = LossArg::Lad)]
        loss: LossArg,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        ingest: IngestArgs,
    },
    /// Estimate tail index and memory parameter and write model JSON.
    FitFarima {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        ingest: IngestArgs,
    },
    /// Marginal quantile of a series.
    Quantile {
        #[arg(long)]
        input: PathBuf,
        /// Quantile level in (0, 1).
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = QuantileMethodArg::Empirical)]
        method: QuantileMethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        ingest: IngestArgs,
    },
    /// Best attainable asymptotic precision for one model.
    LambdaOpt {
        #[arg(long, value_enum)]
        model: LambdaModelArg,
        /// AR coefficients, comma separated (model ar1 takes exactly one).
        #[arg(long, value_delimiter = ',')]
        phi: Vec<f64>,
        /// Memory parameter (model farima).
        #[arg(long)]
        d: Option<f64>,
        /// Moving-average coefficients, comma separated (model ma).
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<f64>,
        /// Innovation tail index.
        #[arg(long)]
        alpha: f64,
        /// Innovation extremal skewness.
        #[arg(long, default_value_t = 0.5)]
        p_eps: f64,
        /// Prediction horizon.
        #[arg(long = "h", default_value_t = 1)]
        horizon: usize,
        /// Series-expansion truncation for ar and farima models.
        #[arg(long, default_value_t = 100_000)]
        truncation: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV table `d,alpha,lambda` of best precisions over a parameter grid.
    LambdaOptGrid {
        /// Memory parameters, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
        /// Tail indices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        p_eps: f64,
        #[arg(long = "h", default_value_t = 1)]
        horizon: usize,
        #[arg(long, default_value_t = 100_000)]
        truncation: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a predictor and emit per-step scores, alarms, and outcomes.
    Predict {
        /// Training series CSV.
        #[arg(long)]
        train: PathBuf,
        /// Series to score; the training series when absent.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, value_enum)]
        model: PredictModelArg,
        /// Autoregression order (model ar).
        #[arg(long, default_value_t = 5)]
        order: usize,
        #[arg(long, value_enum, default_value_t = LossArg::Lad)]
        loss: LossArg,
        /// Prediction filter length (model farima).
        #[arg(long, default_value_t = 168)]
        ell: usize,
        /// Prediction horizon.
        #[arg(long = "h", default_value_t = 1)]
        horizon: usize,
        /// Event and calibration level in (0, 1).
        #[arg(long)]
        p: f64,
        #[arg(long = "quantile", value_enum, default_value_t = QuantileMethodArg::Empirical)]
        quantile_method: QuantileMethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        ingest: IngestArgs,
    },
    /// Rolling-window backtest over a series.
    Backtest {
        #[arg(long)]
        input: PathBuf,
        /// Backtest config JSON; library defaults when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for report.json, confusion.csv, diagnostics.csv,
        /// and figure_data/.
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        ingest: IngestArgs,
    },
    /// Pool prediction CSVs into a skill report and optional curve data.
    Report {
        /// Prediction CSVs in `t,score,alarm,outcome` form.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for roc.csv and pr.csv.
        #[arg(long)]
        figure_data: Option<PathBuf>,
    },
}

/// Simulated process: an autoregression, a finite moving average, or a
/// fractionally integrated filter truncated at `k` coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SimModel {
    Ar { phi: Vec<f64> },
    Ma { coeffs: Vec<f64> },
    Farima { d: f64, #[serde(default = "default_farima_k")] k: usize },
}

fn default_farima_k() -> usize {
    2000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    model: SimModel,
    innovations: InnovationSpec,
    n: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    burn_in: Option<usize>,
    #[serde(default)]
    truncation: Option<usize>,
}

/// Sidecar written next to simulated CSV: the effective config and the
/// random generator identity.
#[derive(Serialize)]
struct SimulateSidecar<'a> {
    config: &'a SimulateConfig,
    generator: &'a str,
}

#[derive(Serialize)]
struct ArModelOut {
    phi: Vec<f64>,
    order: usize,
    loss: ArLoss,
    n: usize,
}

#[derive(Serialize)]
struct FarimaModelOut {
    alpha_hat: f64,
    xi_hat: f64,
    d_hat: f64,
    n: usize,
}

#[derive(Serialize)]
struct QuantileOut {
    p: f64,
    method: String,
    quantile: f64,
}

#[derive(Serialize)]
struct LambdaOptOut {
    model: String,
    h: usize,
    alpha: f64,
    p_eps: f64,
    truncation: Option<usize>,
    lambda: f64,
    degenerate: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 rejects the request, 3 rejects the data, 4 reports an estimation
/// failure on valid input.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Config(_) | Error::Json(_) => 2,
        Error::Data(_) | Error::Io(_) | Error::Csv(_) => 3,
        Error::Fit(_) | Error::NotConverged { .. } | Error::SingularDesign { .. } => 4,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
        Command::FitAr { input, order, loss, out, ingest } => {
            cmd_fit_ar(&input, order, loss.into(), out.as_deref(), ingest.into())
        }
        Command::FitFarima { input, out, ingest } => {
            cmd_fit_farima(&input, out.as_deref(), ingest.into())
        }
        Command::Quantile { input, p, method, out, ingest } => {
            cmd_quantile(&input, p, method, out.as_deref(), ingest.into())
        }
        Command::LambdaOpt {
            model,
            phi,
            d,
            coeffs,
            alpha,
            p_eps,
            horizon,
            truncation,
            out,
        } => cmd_lambda_opt(model, &phi, d, coeffs, alpha, p_eps, horizon, truncation, out.as_deref()),
        Command::LambdaOptGrid { d, alpha, p_eps, horizon, truncation, out } => {
            cmd_lambda_opt_grid(&d, &alpha, p_eps, horizon, truncation, out.as_deref())
        }
        Command::Predict {
            train,
            test,
            model,
            order,
            loss,
            ell,
            horizon,
            p,
            quantile_method,
            out,
            ingest,
        } => cmd_predict(
            &train,
            test.as_deref(),
            model,
            order,
            loss.into(),
            ell,
            horizon,
            p,
            quantile_method,
            out.as_deref(),
            ingest.into(),
        ),
        Command::Backtest { input, config, out_dir, ingest } => {
            cmd_backtest(&input, config.as_deref(), &out_dir, ingest.into())
        }
        Command::Report { input, out, figure_data } => {
            cmd_report(&input, out.as_deref(), figure_data.as_deref())
        }
    }
}

/// Environment seed override, when set.
fn seed_override() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(raw) => {
            let seed = raw.trim().parse::<u64>().map_err(|_| {
                Error::config(format!("{SEED_ENV}={raw} is not an unsigned 64-bit seed"))
            })?;
            Ok(Some(seed))
        }
        Err(_) => Ok(None),
    }
}

fn read_json_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes pretty JSON with a trailing newline to `out`, or stdout when
/// `out` is absent.
fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_simulate(config_path: &Path, out: &Path) -> Result<()> {
    let mut cfg: SimulateConfig = read_json_config(config_path)?;
    if let Some(seed) = seed_override()? {
        cfg.seed = seed;
    }
    let sim_cfg = SimConfig {
        n: cfg.n,
        burn_in: cfg.burn_in,
        seed: cfg.seed,
        truncation: cfg.truncation,
    };
    let series = match &cfg.model {
        SimModel::Ar { phi } => simulate_ar(phi, &cfg.innovations, &sim_cfg)?,
        SimModel::Ma { coeffs } => {
            simulate_ma(&MaCoefficients::new(coeffs.clone())?, &cfg.innovations, &sim_cfg)?
        }
        SimModel::Farima { d, k } => {
            simulate_ma(&farima_ma_coeffs(*d, *k)?, &cfg.innovations, &sim_cfg)?
        }
    };
    write_series_csv(out, &series)?;
    let sidecar_path = sidecar_path(out);
    emit_json(
        &SimulateSidecar { config: &cfg, generator: GENERATOR_NAME },
        Some(&sidecar_path),
    )
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Mean-centered complete values of an ingested series.
fn centered_values(input: &Path, options: IngestOptions) -> Result<(Series, Vec<f64>, f64)> {
    let series = ingest(input, options)?;
    let raw = series.complete_values()?;
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    Ok((series, centered, mean))
}

fn cmd_fit_ar(
    input: &Path,
    order: usize,
    loss: ArLoss,
    out: Option<&Path>,
    options: IngestOptions,
) -> Result<()> {
    let (_, centered, _) = centered_values(input, options)?;
    let fitted = match loss {
        ArLoss::Ols => fit_ar_ols(&centered, order)?,
        ArLoss::Lad => fit_ar_lad(&centered, order)?,
    };
    emit_json(
        &ArModelOut {
            phi: fitted.phi.clone(),
            order,
            loss: fitted.loss,
            n: fitted.n_obs,
        },
        out,
    )
}

fn cmd_fit_farima(input: &Path, out: Option<&Path>, options: IngestOptions) -> Result<()> {
    let (_, centered, _) = centered_values(input, options)?;
    let gev = fit_gev(&centered)?;
    let alpha = gev.tail_index()?;
    if !(1.0 < alpha && alpha < 2.0) {
        return Err(Error::fit(format!("tail index {alpha:.3} outside (1, 2)")));
    }
    let n = centered.len();
    let d = estimate_d(&Series::from_values(centered)?, alpha)?;
    emit_json(
        &FarimaModelOut { alpha_hat: alpha, xi_hat: gev.xi, d_hat: d, n },
        out,
    )
}

fn cmd_quantile(
    input: &Path,
    p: f64,
    method: QuantileMethodArg,
    out: Option<&Path>,
    options: IngestOptions,
) -> Result<()> {
    let series = ingest(input, options)?;
    let raw = series.complete_values()?;
    let (name, quantile) = match method {
        QuantileMethodArg::Empirical => (
            "empirical",
            EmpiricalDistribution::from_sample(raw)?.generalized_inverse(p)?,
        ),
        QuantileMethodArg::Gp => ("gp", extreme_quantile(raw, p)?),
    };
    emit_json(&QuantileOut { p, method: name.to_string(), quantile }, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_lambda_opt(
    model: LambdaModelArg,
    phi: &[f64],
    d: Option<f64>,
    coeffs: Vec<f64>,
    alpha: f64,
    p_eps: f64,
    h: usize,
    truncation: usize,
    out: Option<&Path>,
) -> Result<()> {
    let spec = RegVarSpec { alpha, p_eps };
    let (name, used_truncation, lambda, degenerate) = match model {
        LambdaModelArg::Ar1 => {
            let [phi1] = phi else {
                return Err(Error::config(format!(
                    "model ar1 takes exactly one --phi coefficient, got {}",
                    phi.len()
                )));
            };
            let lambda = lambda_opt_ar1(*phi1, &spec, h)?;
            ("ar1", None, lambda, lambda == 0.0)
        }
        LambdaModelArg::Ar => {
            if phi.is_empty() {
                return Err(Error::config("model ar needs --phi coefficients"));
            }
            let a = ar_to_ma(phi, truncation)?;
            let opt = lambda_opt_ma(&spec, &a, h)?;
            ("ar", Some(truncation), opt.lambda, opt.degenerate)
        }
        LambdaModelArg::Farima => {
            let d = d.ok_or_else(|| Error::config("model farima needs --d"))?;
            let a = farima_ma_coeffs(d, truncation)?;
            let opt = lambda_opt_ma(&spec, &a, h)?;
            ("farima", Some(truncation), opt.lambda, opt.degenerate)
        }
        LambdaModelArg::Ma => {
            let a = MaCoefficients::new(coeffs)?;
            let opt = lambda_opt_ma(&spec, &a, h)?;
            ("ma", None, opt.lambda, opt.degenerate)
        }
    };
    emit_json(
        &LambdaOptOut {
            model: name.to_string(),
            h,
            alpha,
            p_eps,
            truncation: used_truncation,
            lambda,
            degenerate,
        },
        out,
    )
}

/// Writes CSV rows through one writer, to a file or stdout.
fn write_csv_rows(
    out: Option<&Path>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let sink: Box<dyn std::io::Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn cmd_lambda_opt_grid(
    ds: &[f64],
    alphas: &[f64],
    p_eps: f64,
    h: usize,
    truncation: usize,
    out: Option<&Path>,
) -> Result<()> {
    let mut rows = Vec::with_capacity(ds.len() * alphas.len());
    for &d in ds {
        let a = farima_ma_coeffs(d, truncation)?;
        for &alpha in alphas {
            let spec = RegVarSpec { alpha, p_eps };
            let opt = lambda_opt_ma(&spec, &a, h)?;
            rows.push(vec![format_float(d), format_float(alpha), format_float(opt.lambda)]);
        }
    }
    write_csv_rows(out, &["d", "alpha", "lambda"], &rows)
}

#[allow(clippy::too_many_arguments)]
fn cmd_predict(
    train_path: &Path,
    test_path: Option<&Path>,
    model: PredictModelArg,
    order: usize,
    loss: ArLoss,
    ell: usize,
    h: usize,
    p: f64,
    quantile_method: QuantileMethodArg,
    out: Option<&Path>,
    options: IngestOptions,
) -> Result<()> {
    let (train, centered, _) = centered_values(train_path, options)?;
    let raw = train.complete_values()?;
    let tau = match quantile_method {
        QuantileMethodArg::Empirical => {
            EmpiricalDistribution::from_sample(raw)?.generalized_inverse(p)?
        }
        QuantileMethodArg::Gp => extreme_quantile(raw, p)?,
    };
    let predictor: CalibratedPredictor = match model {
        PredictModelArg::Baseline => baseline_predictor(tau, h)?,
        PredictModelArg::Ar => {
            let fitted = match loss {
                ArLoss::Ols => fit_ar_ols(&centered, order)?,
                ArLoss::Lad => fit_ar_lad(&centered, order)?,
            };
            let mut pred = ar_predictor(&fitted, h, &train, p)?;
            pred.event_threshold = tau;
            pred
        }
        PredictModelArg::Farima => {
            let gev = fit_gev(&centered)?;
            let alpha = gev.tail_index()?;
            if !(1.0 < alpha && alpha < 2.0) {
                return Err(Error::fit(format!("tail index {alpha:.3} outside (1, 2)")));
            }
            let d = estimate_d(&Series::from_values(centered.clone())?, alpha)?;
            let mut pred = farima_predictor(d, alpha, h, ell, &train, p)?;
            pred.event_threshold = tau;
            pred
        }
    };
    let eval = match test_path {
        Some(path) => ingest(path, options)?,
        None => train,
    };
    let records = predict_path(&predictor, &eval)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.t.to_string(),
                format_float(r.score),
                (r.alarm as u8).to_string(),
                r.outcome.map(|o| (o as u8).to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv_rows(out, &["t", "score", "alarm", "outcome"], &rows)
}

fn cmd_backtest(
    input: &Path,
    config_path: Option<&Path>,
    out_dir: &Path,
    options: IngestOptions,
) -> Result<()> {
    let mut cfg: BacktestConfig = match config_path {
        Some(path) => read_json_config(path)?,
        None => BacktestConfig::default(),
    };
    if let Some(seed) = seed_override()? {
        cfg.seed = seed;
    }
    let series = ingest(input, options)?;
    let report = run_backtest(&series, &cfg)?;
    std::fs::create_dir_all(out_dir)?;
    emit_json(&report, Some(&out_dir.join("report.json")))?;
    write_confusion_csv(&out_dir.join("confusion.csv"), &report)?;
    write_diagnostics_csv(&out_dir.join("diagnostics.csv"), &report)?;
    let figures = out_dir.join("figure_data");
    std::fs::create_dir_all(&figures)?;
    write_backtest_curves(&figures, &report)
}

fn write_confusion_csv(path: &Path, report: &BacktestReport) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|cell| {
            vec![
                cell.model.clone(),
                cell.h.to_string(),
                format_float(cell.p),
                cell.counts.tp.to_string(),
                cell.counts.fp.to_string(),
                cell.counts.fn_.to_string(),
                cell.counts.tn.to_string(),
            ]
        })
        .collect();
    write_csv_rows(Some(path), &["model", "h", "p", "tp", "fp", "fn", "tn"], &rows)
}

fn write_diagnostics_csv(path: &Path, report: &BacktestReport) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .diagnostics
        .iter()
        .map(|diag| {
            vec![
                diag.window_start.to_string(),
                diag.alpha_hat.map(format_float).unwrap_or_default(),
                diag.d_hat.map(format_float).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv_rows(Some(path), &["window_start", "alpha_hat", "d_hat"], &rows)
}

/// Pooled per-cell curves over window-end predictions. Scores from different
/// windows are compared through their margin over the window's own alarm
/// threshold; cells with a single outcome class yield no rows.
fn write_backtest_curves(dir: &Path, report: &BacktestReport) -> Result<()> {
    let mut roc_rows: Vec<Vec<String>> = Vec::new();
    let mut pr_rows: Vec<Vec<String>> = Vec::new();
    for cell in &report.cells {
        let mut margins = Vec::new();
        let mut outcomes = Vec::new();
        for r in &report.records {
            if r.model == cell.model && r.h == cell.h && r.p == cell.p {
                margins.push(r.score - r.threshold);
                outcomes.push(r.event);
            }
        }
        let head = [cell.model.clone(), cell.h.to_string(), format_float(cell.p)];
        if outcomes.iter().any(|&o| o) && outcomes.iter().any(|&o| !o) {
            for (fpr, tpr) in roc_points(&margins, &outcomes)? {
                let mut row = head.to_vec();
                row.extend([format_float(fpr), format_float(tpr)]);
                roc_rows.push(row);
            }
        }
        if outcomes.iter().any(|&o| o) {
            for (recall, precision) in pr_points(&margins, &outcomes)? {
                let mut row = head.to_vec();
                row.extend([format_float(recall), format_float(precision)]);
                pr_rows.push(row);
            }
        }
    }
    write_csv_rows(
        Some(&dir.join("roc.csv")),
        &["model", "h", "p", "fpr", "tpr"],
        &roc_rows,
    )?;
    write_csv_rows(
        Some(&dir.join("pr.csv")),
        &["model", "h", "p", "recall", "precision"],
        &pr_rows,
    )
}

/// Parses one prediction CSV written by `predict`: rows `t,score,alarm,outcome`
/// with outcome empty while unresolved.
fn read_prediction_csv(path: &Path) -> Result<Vec<PredictionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut records = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 4 {
            return Err(Error::data(format!(
                "{}: row {}: expected 4 columns, found {}",
                path.display(),
                row + 1,
                record.len()
            )));
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let t: usize = field(0)
            .parse()
            .map_err(|_| Error::data(format!("{}: row {}: bad t `{}`", path.display(), row + 1, field(0))))?;
        let score: f64 = field(1)
            .parse()
            .map_err(|_| Error::data(format!("{}: row {}: bad score `{}`", path.display(), row + 1, field(1))))?;
        let alarm = parse_flag(field(2)).ok_or_else(|| {
            Error::data(format!("{}: row {}: bad alarm `{}`", path.display(), row + 1, field(2)))
        })?;
        let outcome = if field(3).is_empty() {
            None
        } else {
            Some(parse_flag(field(3)).ok_or_else(|| {
                Error::data(format!("{}: row {}: bad outcome `{}`", path.display(), row + 1, field(3)))
            })?)
        };
        records.push(PredictionRecord { t, score, alarm, outcome });
    }
    Ok(records)
}

fn parse_flag(field: &str) -> Option<bool> {
    match field {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

fn cmd_report(inputs: &[PathBuf], out: Option<&Path>, figure_data: Option<&Path>) -> Result<()> {
    let mut resolved: Vec<PredictionRecord> = Vec::new();
    let mut unresolved = 0usize;
    for path in inputs {
        for record in read_prediction_csv(path)? {
            if record.outcome.is_some() {
                resolved.push(record);
            } else {
                unresolved += 1;
            }
        }
    }
    if unresolved > 0 {
        eprintln!("note: dropped {unresolved} unresolved records");
    }
    let counts: ConfusionCounts = tally(&resolved)?;
    let metrics = sample_metrics(&counts)?;
    emit_json(&metrics, out)?;
    if let Some(dir) = figure_data {
        std::fs::create_dir_all(dir)?;
        let scores: Vec<f64> = resolved.iter().map(|r| r.score).collect();
        let outcomes: Vec<bool> = resolved.iter().map(|r| r.outcome.unwrap_or(false)).collect();
        let roc_rows: Vec<Vec<String>> = roc_points(&scores, &outcomes)?
            .into_iter()
            .map(|(fpr, tpr)| vec![format_float(fpr), format_float(tpr)])
            .collect();
        write_csv_rows(Some(&dir.join("roc.csv")), &["fpr", "tpr"], &roc_rows)?;
        let pr_rows: Vec<Vec<String>> = pr_points(&scores, &outcomes)?
            .into_iter()
            .map(|(recall, precision)| vec![format_float(recall), format_float(precision)])
            .collect();
        write_csv_rows(Some(&dir.join("pr.csv")), &["recall", "precision"], &pr_rows)?;
    }
    Ok(())
}
