//! Rolling-window backtesting: window enumeration, per-window fitting and
//! calibration, pooled confusion counts, and deterministic report assembly.
//!
//! Each window is an independent job: the window is centered, every
//! configured model is fitted on it, thresholds are calibrated at each level
//! from the window's own training scores and raw values, and one prediction
//! per (model, horizon, level) is issued at the window end. Outcomes are
//! pooled across windows into per-cell counts. Windows whose fits fail are
//! skipped with a logged reason; a run fails when the skipped fraction
//! exceeds the configured ceiling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{estimate_d, extreme_quantile, fit_gev};
use crate::linear::{fit_ar_lad, fit_ar_ols, ArLoss};
use crate::metrics::{sample_metrics, ConfusionCounts, SkillReport};
use crate::predict::{ar_predictor, baseline_predictor, farima_predictor};
use crate::series::{EmpiricalDistribution, Series};

pub const DEFAULT_WINDOW_LEN: usize = 4320;
pub const DEFAULT_STRIDE: usize = 12;
pub const DEFAULT_MAX_SKIP_FRACTION: f64 = 0.2;

/// One predictor family entry in a backtest configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Last observation compared against the marginal threshold.
    Baseline,
    /// Autoregressive plug-in refitted per window.
    Ar { order: usize, loss: ArLoss },
    /// Long-memory filter over `ell` past values; the memory and tail
    /// parameters are re-estimated per window.
    Farima { ell: usize },
}

impl ModelSpec {
    /// Stable label keying report rows and output columns.
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Baseline => "baseline".to_string(),
            ModelSpec::Ar { order, loss } => {
                let loss = match loss {
                    ArLoss::Ols => "ols",
                    ArLoss::Lad => "lad",
                };
                format!("ar{order}_{loss}")
            }
            ModelSpec::Farima { ell } => format!("farima{ell}"),
        }
    }
}

/// How the marginal event threshold at level p is estimated from a window's
/// raw values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileMethod {
    /// Left-continuous empirical quantile.
    Empirical,
    /// Peaks-over-threshold tail fit extrapolation.
    Gp,
}

/// Whether a window must accommodate every configured horizon, or may keep
/// only the horizons whose target time still falls inside the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowInclusion {
    Strict,
    Truncate,
}

/// Rolling-window experiment parameters. The JSON form mirrors the struct
/// field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestConfig {
    pub window_len: usize,
    pub stride: usize,
    pub horizons: Vec<usize>,
    pub levels: Vec<f64>,
    pub models: Vec<ModelSpec>,
    pub quantile_method: QuantileMethod,
    pub window_inclusion: WindowInclusion,
    pub max_skip_fraction: f64,
    pub seed: u64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            window_len: DEFAULT_WINDOW_LEN,
            stride: DEFAULT_STRIDE,
            horizons: vec![1, 6, 12, 18],
            levels: vec![0.90, 0.95, 0.99],
            models: vec![
                ModelSpec::Baseline,
                ModelSpec::Ar {
                    order: 5,
                    loss: ArLoss::Lad,
                },
                ModelSpec::Farima { ell: 168 },
            ],
            quantile_method: QuantileMethod::Empirical,
            window_inclusion: WindowInclusion::Strict,
            max_skip_fraction: DEFAULT_MAX_SKIP_FRACTION,
            seed: 0,
        }
    }
}

impl BacktestConfig {
    /// Checks the structural invariants; every violation is a config error.
    pub fn validate(&self) -> Result<()> {
        if self.stride < 1 {
            return Err(Error::config("stride must be at least 1"));
        }
        if self.window_len < self.stride {
            return Err(Error::config(format!(
                "window_len {} is smaller than stride {}",
                self.window_len, self.stride
            )));
        }
        if self.horizons.is_empty() {
            return Err(Error::config("at least one horizon is required"));
        }
        for (i, &h) in self.horizons.iter().enumerate() {
            if h < 1 {
                return Err(Error::config("every horizon must be at least 1"));
            }
            if self.horizons[..i].contains(&h) {
                return Err(Error::config(format!("duplicate horizon {h}")));
            }
        }
        if self.levels.is_empty() {
            return Err(Error::config("at least one level is required"));
        }
        for (i, &p) in self.levels.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::config(format!("level {p} outside (0, 1)")));
            }
            if self.levels[..i].contains(&p) {
                return Err(Error::config(format!("duplicate level {p}")));
            }
        }
        if self.models.is_empty() {
            return Err(Error::config("at least one model is required"));
        }
        for (i, model) in self.models.iter().enumerate() {
            match *model {
                ModelSpec::Baseline => {}
                ModelSpec::Ar { order, .. } => {
                    if order < 1 {
                        return Err(Error::config("ar order must be at least 1"));
                    }
                    if order >= self.window_len {
                        return Err(Error::config(format!(
                            "ar order {order} does not fit in window_len {}",
                            self.window_len
                        )));
                    }
                }
                ModelSpec::Farima { ell } => {
                    if ell < 1 {
                        return Err(Error::config("farima history length must be at least 1"));
                    }
                    if ell > self.window_len {
                        return Err(Error::config(format!(
                            "farima history length {ell} exceeds window_len {}",
                            self.window_len
                        )));
                    }
                }
            }
            let label = model.label();
            if self.models[..i].iter().any(|m| m.label() == label) {
                return Err(Error::config(format!("duplicate model entry {label}")));
            }
        }
        if !(0.0..=1.0).contains(&self.max_skip_fraction) {
            return Err(Error::config(format!(
                "max_skip_fraction {} outside [0, 1]",
                self.max_skip_fraction
            )));
        }
        Ok(())
    }
}

/// One training window and the horizons it can resolve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    /// Position in enumeration order.
    pub index: usize,
    /// First training index.
    pub start: usize,
    /// One past the last training index.
    pub end: usize,
    /// Configured horizons whose target `end - 1 + h` lies inside the series.
    pub horizons: Vec<usize>,
}

/// Enumerates training windows over a series of `series_len` observations.
///
/// Windows start at 0 and advance by the stride. Under strict inclusion a
/// window is kept only when every configured horizon resolves; under
/// truncating inclusion it is kept when at least one does, and the
/// out-of-range horizons are dropped from that window. A pure function of
/// its arguments.
pub fn enumerate_windows(series_len: usize, cfg: &BacktestConfig) -> Result<Vec<Window>> {
    cfg.validate()?;
    let min_h = *cfg.horizons.iter().min().expect("validated nonempty");
    let max_h = *cfg.horizons.iter().max().expect("validated nonempty");
    let needed = cfg.window_len
        + match cfg.window_inclusion {
            WindowInclusion::Strict => max_h,
            WindowInclusion::Truncate => min_h,
        };
    if series_len < needed {
        return Err(Error::data(format!(
            "series length {series_len} is below the {needed} required for one window"
        )));
    }
    let mut windows = Vec::new();
    let mut start = 0;
    loop {
        let end = start + cfg.window_len;
        if end > series_len {
            break;
        }
        let horizons: Vec<usize> = cfg
            .horizons
            .iter()
            .copied()
            .filter(|&h| end - 1 + h < series_len)
            .collect();
        let keep = match cfg.window_inclusion {
            WindowInclusion::Strict => horizons.len() == cfg.horizons.len(),
            WindowInclusion::Truncate => !horizons.is_empty(),
        };
        if !keep {
            break;
        }
        windows.push(Window {
            index: windows.len(),
            start,
            end,
            horizons,
        });
        start += cfg.stride;
    }
    Ok(windows)
}

/// One window-end prediction with its resolved outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPrediction {
    pub model: String,
    pub h: usize,
    pub p: f64,
    pub window_start: usize,
    /// Raw score at the window end.
    pub score: f64,
    /// Alarm threshold the score was compared against.
    pub threshold: f64,
    pub alarm: bool,
    pub event: bool,
}

/// Per-window parameter estimates kept for diagnostic output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowDiagnostics {
    pub window_start: usize,
    pub alpha_hat: Option<f64>,
    pub d_hat: Option<f64>,
}

/// A window that produced no predictions, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSkip {
    pub window_start: usize,
    pub reason: String,
}

/// Pooled results for one (model, horizon, level) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub model: String,
    pub h: usize,
    pub p: f64,
    pub counts: ConfusionCounts,
    pub metrics: SkillReport,
    pub alarm_rate: f64,
}

/// Coordinate-wise spread of fitted AR coefficients across windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiSummary {
    pub model: String,
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub windows: usize,
}

/// Configuration, seed, and input fingerprints of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub data_hash: String,
    pub seed: u64,
    pub series_len: usize,
}

/// Full output of a backtest run. Cells hold pooled counts; `records` keeps
/// the individual window-end predictions for curve construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub config: BacktestConfig,
    pub provenance: Provenance,
    pub windows_total: usize,
    pub windows_used: usize,
    pub skips: Vec<WindowSkip>,
    pub cells: Vec<ReportCell>,
    pub phi: Vec<PhiSummary>,
    pub diagnostics: Vec<WindowDiagnostics>,
    pub records: Vec<ScoredPrediction>,
}

/// FNV-1a 64-bit hash rendered as fixed-width hex.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// Fingerprint of a series: value bit patterns plus the presence mask.
pub fn series_hash(y: &Series) -> String {
    let mut bytes = Vec::with_capacity(y.len() * 9);
    for (v, &present) in y.values().iter().zip(y.mask()) {
        bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        bytes.push(present as u8);
    }
    fnv1a_hex(&bytes)
}

struct WindowSuccess {
    diagnostics: WindowDiagnostics,
    phi: Vec<(String, Vec<f64>)>,
    predictions: Vec<ScoredPrediction>,
}

struct WindowOutcome {
    window_start: usize,
    result: std::result::Result<WindowSuccess, String>,
}

fn window_predictions(values: &[f64], w: &Window, cfg: &BacktestConfig) -> Result<WindowSuccess> {
    let raw = &values[w.start..w.end];
    let train = Series::from_values(raw.to_vec())?;
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let marginal = EmpiricalDistribution::from_sample(raw)?;
    let mut event_thresholds = Vec::with_capacity(cfg.levels.len());
    for &p in &cfg.levels {
        let tau = match cfg.quantile_method {
            QuantileMethod::Empirical => marginal.generalized_inverse(p)?,
            QuantileMethod::Gp => extreme_quantile(raw, p)?,
        };
        event_thresholds.push(tau);
    }
    let t_end = w.end - 1;
    let t_local = raw.len() - 1;
    let mut predictions = Vec::new();
    let mut phi = Vec::new();
    let mut alpha_hat = None;
    let mut d_hat = None;
    for model in &cfg.models {
        let label = model.label();
        let mut predictors: Vec<(usize, usize, crate::predict::CalibratedPredictor)> = Vec::new();
        match *model {
            ModelSpec::Baseline => {
                for &h in &w.horizons {
                    for (pi, &tau) in event_thresholds.iter().enumerate() {
                        predictors.push((h, pi, baseline_predictor(tau, h)?));
                    }
                }
            }
            ModelSpec::Ar { order, loss } => {
                let fitted = match loss {
                    ArLoss::Ols => fit_ar_ols(&centered, order)?,
                    ArLoss::Lad => fit_ar_lad(&centered, order)?,
                };
                phi.push((label.clone(), fitted.phi.clone()));
                for &h in &w.horizons {
                    for (pi, &tau) in event_thresholds.iter().enumerate() {
                        let mut pred = ar_predictor(&fitted, h, &train, cfg.levels[pi])?;
                        pred.event_threshold = tau;
                        predictors.push((h, pi, pred));
                    }
                }
            }
            ModelSpec::Farima { ell } => {
                let gev = fit_gev(&centered)?;
                let alpha = gev.tail_index()?;
                if !(1.0 < alpha && alpha < 2.0) {
                    return Err(Error::fit(format!("tail index {alpha:.3} outside (1, 2)")));
                }
                let d = estimate_d(&Series::from_values(centered.clone())?, alpha)?;
                alpha_hat = Some(alpha);
                d_hat = Some(d);
                for &h in &w.horizons {
                    for (pi, &tau) in event_thresholds.iter().enumerate() {
                        let mut pred = farima_predictor(d, alpha, h, ell, &train, cfg.levels[pi])?;
                        pred.event_threshold = tau;
                        predictors.push((h, pi, pred));
                    }
                }
            }
        }
        for (h, pi, pred) in predictors {
            let score = pred.score_at(raw, t_local)?;
            let alarm = pred.comparison.alarms(score, pred.threshold);
            let event = values[t_end + h] > pred.event_threshold;
            predictions.push(ScoredPrediction {
                model: label.clone(),
                h,
                p: cfg.levels[pi],
                window_start: w.start,
                score,
                threshold: pred.threshold,
                alarm,
                event,
            });
        }
    }
    Ok(WindowSuccess {
        diagnostics: WindowDiagnostics {
            window_start: w.start,
            alpha_hat,
            d_hat,
        },
        phi,
        predictions,
    })
}

/// Runs the rolling-window protocol over a complete series.
///
/// Windows are processed in parallel; assembly sorts by window order, so the
/// report does not depend on scheduling. Fit failures skip the whole window
/// (all models) with the reason logged; the run fails when the skipped
/// fraction exceeds `max_skip_fraction`.
pub fn run_backtest(y: &Series, cfg: &BacktestConfig) -> Result<BacktestReport> {
    cfg.validate()?;
    let values = y.complete_values()?;
    let windows = enumerate_windows(values.len(), cfg)?;
    let outcomes: Vec<WindowOutcome> = windows
        .par_iter()
        .map(|w| match window_predictions(values, w, cfg) {
            Ok(s) => WindowOutcome {
                window_start: w.start,
                result: Ok(s),
            },
            Err(e) => WindowOutcome {
                window_start: w.start,
                result: Err(e.to_string()),
            },
        })
        .collect();

    let windows_total = windows.len();
    let mut skips = Vec::new();
    let mut diagnostics = Vec::new();
    let mut records = Vec::new();
    let mut phi_acc: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for outcome in outcomes {
        match outcome.result {
            Ok(s) => {
                diagnostics.push(s.diagnostics);
                for (label, coeffs) in s.phi {
                    phi_acc.entry(label).or_default().push(coeffs);
                }
                records.extend(s.predictions);
            }
            Err(reason) => skips.push(WindowSkip {
                window_start: outcome.window_start,
                reason,
            }),
        }
    }
    let windows_used = windows_total - skips.len();
    let skipped_fraction = skips.len() as f64 / windows_total as f64;
    if skipped_fraction > cfg.max_skip_fraction {
        let first = skips.first().expect("nonempty when fraction positive");
        return Err(Error::fit(format!(
            "{} of {windows_total} windows skipped ({:.1}%), above the {:.1}% ceiling; \
             first reason: {}",
            skips.len(),
            100.0 * skipped_fraction,
            100.0 * cfg.max_skip_fraction,
            first.reason
        )));
    }

    let mut cells = Vec::new();
    for model in &cfg.models {
        let label = model.label();
        for &h in &cfg.horizons {
            for &p in &cfg.levels {
                let mut counts = ConfusionCounts::default();
                for r in records
                    .iter()
                    .filter(|r| r.model == label && r.h == h && r.p == p)
                {
                    match (r.alarm, r.event) {
                        (true, true) => counts.tp += 1,
                        (true, false) => counts.fp += 1,
                        (false, true) => counts.fn_ += 1,
                        (false, false) => counts.tn += 1,
                    }
                }
                if counts.total() == 0 {
                    continue;
                }
                let metrics = sample_metrics(&counts)?;
                let alarm_rate = counts.alarms() as f64 / counts.total() as f64;
                cells.push(ReportCell {
                    model: label.clone(),
                    h,
                    p,
                    counts,
                    metrics,
                    alarm_rate,
                });
            }
        }
    }

    let phi = phi_acc
        .into_iter()
        .map(|(model, fits)| {
            let dim = fits[0].len();
            let mut mean = vec![0.0; dim];
            let mut min = vec![f64::INFINITY; dim];
            let mut max = vec![f64::NEG_INFINITY; dim];
            for fit in &fits {
                for (j, &c) in fit.iter().enumerate() {
                    mean[j] += c;
                    min[j] = min[j].min(c);
                    max[j] = max[j].max(c);
                }
            }
            for m in &mut mean {
                *m /= fits.len() as f64;
            }
            PhiSummary {
                model,
                mean,
                min,
                max,
                windows: fits.len(),
            }
        })
        .collect();

    let provenance = Provenance {
        config_hash: fnv1a_hex(&serde_json::to_vec(cfg)?),
        data_hash: series_hash(y),
        seed: cfg.seed,
        series_len: y.len(),
    };

    Ok(BacktestReport {
        config: cfg.clone(),
        provenance,
        windows_total,
        windows_used,
        skips,
        cells,
        phi,
        diagnostics,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::linear::ArModel;
    use crate::metrics::tally;
    use crate::predict::{predict_path, PredictionRecord};
    use crate::sim::{simulate_ar, InnovationSpec, SimConfig};

    fn small_cfg() -> BacktestConfig {
        BacktestConfig {
            window_len: 16,
            stride: 4,
            horizons: vec![1, 2],
            levels: vec![0.5],
            models: vec![
                ModelSpec::Baseline,
                ModelSpec::Ar {
                    order: 1,
                    loss: ArLoss::Lad,
                },
            ],
            ..BacktestConfig::default()
        }
    }

    #[test]
    fn config_round_trips_and_rejects_unknown_fields() {
        let cfg = BacktestConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: BacktestConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.window_len, 4320);
        assert_eq!(cfg.stride, 12);
        assert_eq!(cfg.horizons, vec![1, 6, 12, 18]);
        assert_eq!(cfg.levels, vec![0.90, 0.95, 0.99]);

        let partial: BacktestConfig =
            serde_json::from_str(r#"{"window_len": 100, "stride": 10}"#).unwrap();
        assert_eq!(partial.window_len, 100);
        assert_eq!(partial.horizons, vec![1, 6, 12, 18]);

        assert!(serde_json::from_str::<BacktestConfig>(r#"{"window": 3}"#).is_err());
        let with_models: BacktestConfig = serde_json::from_str(
            r#"{"models": [{"kind": "baseline"}, {"kind": "ar", "order": 2, "loss": "ols"}, {"kind": "farima", "ell": 24}]}"#,
        )
        .unwrap();
        assert_eq!(with_models.models.len(), 3);
        assert_eq!(with_models.models[1].label(), "ar2_ols");
        assert_eq!(with_models.models[2].label(), "farima24");
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        let bad: Vec<BacktestConfig> = vec![
            BacktestConfig {
                stride: 0,
                ..BacktestConfig::default()
            },
            BacktestConfig {
                window_len: 5,
                stride: 10,
                ..BacktestConfig::default()
            },
            BacktestConfig {
                horizons: vec![],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                horizons: vec![1, 0],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                horizons: vec![6, 6],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                levels: vec![0.9, 1.0],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                levels: vec![0.9, 0.9],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                models: vec![],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                models: vec![
                    ModelSpec::Baseline,
                    ModelSpec::Baseline,
                ],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                models: vec![ModelSpec::Ar {
                    order: 0,
                    loss: ArLoss::Lad,
                }],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                models: vec![ModelSpec::Farima { ell: 5000 }],
                ..BacktestConfig::default()
            },
            BacktestConfig {
                max_skip_fraction: 1.5,
                ..BacktestConfig::default()
            },
        ];
        for cfg in bad {
            let err = cfg.validate().unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{err}");
        }
        BacktestConfig::default().validate().unwrap();
    }

    #[test]
    fn window_enumeration_matches_hand_counts() {
        let cfg = BacktestConfig::default();
        let strict = enumerate_windows(50_400, &cfg).unwrap();
        assert_eq!(strict.len(), 3_839);
        assert!(strict.iter().all(|w| w.horizons == vec![1, 6, 12, 18]));
        assert_eq!(strict.last().unwrap().start, 46_056);

        let cfg_truncate = BacktestConfig {
            window_inclusion: WindowInclusion::Truncate,
            ..cfg.clone()
        };
        let truncated = enumerate_windows(50_400, &cfg_truncate).unwrap();
        assert_eq!(truncated.len(), 3_840);
        assert_eq!(truncated.last().unwrap().start, 46_068);
        assert_eq!(truncated.last().unwrap().horizons, vec![1, 6, 12]);

        let one = BacktestConfig {
            window_len: 30,
            stride: 12,
            horizons: vec![1],
            models: vec![ModelSpec::Baseline],
            ..cfg.clone()
        };
        assert_eq!(enumerate_windows(31, &one).unwrap().len(), 1);
        // The stride steps past the observations remaining after the first
        // window, so that window is the only one.
        let wide_stride = BacktestConfig {
            stride: 30,
            ..one.clone()
        };
        assert_eq!(enumerate_windows(40, &wide_stride).unwrap().len(), 1);

        let err = enumerate_windows(4_330, &cfg).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");

        let again = enumerate_windows(50_400, &cfg).unwrap();
        assert_eq!(again, strict);
    }

    #[test]
    fn baseline_alarm_is_the_thresholded_last_value() {
        let values: Vec<f64> = (0..40)
            .map(|i| ((i * 7 + 3) % 11) as f64 + 0.1 * i as f64)
            .collect();
        let y = Series::from_values(values.clone()).unwrap();
        let cfg = small_cfg();
        let report = run_backtest(&y, &cfg).unwrap();
        assert!(report.skips.is_empty());
        let mut checked = 0;
        for r in report.records.iter().filter(|r| r.model == "baseline") {
            let raw = &values[r.window_start..r.window_start + cfg.window_len];
            let marginal = EmpiricalDistribution::from_sample(raw).unwrap();
            let tau = marginal.generalized_inverse(r.p).unwrap();
            assert_eq!(r.alarm, *raw.last().unwrap() > tau);
            assert_eq!(r.threshold, tau);
            assert_eq!(
                r.event,
                values[r.window_start + cfg.window_len - 1 + r.h] > tau
            );
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn pooled_counts_are_the_per_window_sums() {
        let y = simulate_ar(
            &[0.5],
            &InnovationSpec::Pareto {
                alpha: 1.5,
                scale: 1.0,
            },
            &SimConfig {
                n: 600,
                burn_in: None,
                seed: 130,
                truncation: None,
            },
        )
        .unwrap();
        let cfg = small_cfg();
        let report = run_backtest(&y, &cfg).unwrap();
        assert_eq!(report.windows_used + report.skips.len(), report.windows_total);
        for cell in &report.cells {
            let mut counts = ConfusionCounts::default();
            for r in report
                .records
                .iter()
                .filter(|r| r.model == cell.model && r.h == cell.h && r.p == cell.p)
            {
                let single = ConfusionCounts {
                    tp: (r.alarm && r.event) as u64,
                    fp: (r.alarm && !r.event) as u64,
                    fn_: (!r.alarm && r.event) as u64,
                    tn: (!r.alarm && !r.event) as u64,
                };
                counts = counts.merge(&single);
            }
            assert_eq!(counts, cell.counts);
            assert_eq!(cell.counts.total(), report.windows_used as u64);
            assert_eq!(
                cell.alarm_rate,
                cell.counts.alarms() as f64 / cell.counts.total() as f64
            );
            assert_eq!(cell.metrics.alarm_rate, cell.alarm_rate);
        }
        assert_eq!(report.cells.len(), 2 * 2);
    }

    #[test]
    fn ar_alarm_rate_is_calibrated_across_windows() {
        // Non-overlapping windows, weak dependence: the pooled window-end
        // alarm rate behaves like a binomial fraction at 1 - p.
        let windows = 400;
        let y = simulate_ar(
            &[0.3],
            &InnovationSpec::Gaussian { scale: 1.0 },
            &SimConfig {
                n: windows * 1_000 + 1,
                burn_in: None,
                seed: 131,
                truncation: None,
            },
        )
        .unwrap();
        let cfg = BacktestConfig {
            window_len: 1_000,
            stride: 1_000,
            horizons: vec![1],
            levels: vec![0.9],
            models: vec![ModelSpec::Ar {
                order: 1,
                loss: ArLoss::Lad,
            }],
            ..BacktestConfig::default()
        };
        let report = run_backtest(&y, &cfg).unwrap();
        // A few windows may skip on solver stalls; the calibration read
        // uses whatever pooled.
        assert!(report.skips.len() * 20 < report.windows_total);
        let cell = &report.cells[0];
        assert_eq!(cell.counts.total(), report.windows_used as u64);
        let band = 3.0 * (0.9 * 0.1 / cell.counts.total() as f64).sqrt();
        assert!(
            (cell.alarm_rate - 0.1).abs() < band,
            "alarm rate {} outside 0.1 +- {band}",
            cell.alarm_rate
        );
    }

    #[test]
    fn pooled_precision_tracks_a_dual_run_oracle() {
        // The same heavy-tailed autoregression drives both routes: the
        // rolling harness pools window-end predictions from per-window
        // refits, while the oracle uses the true coefficients with
        // thresholds calibrated on a long independent run. The pooled
        // precision of the plug-in must land near the oracle's.
        let phi = [0.4, 0.15, 0.1, 0.05, 0.05];
        let innovations = InnovationSpec::Cauchy { scale: 1.0 };
        let sim = |seed: u64, n: usize| {
            simulate_ar(
                &phi,
                &innovations,
                &SimConfig {
                    n,
                    burn_in: None,
                    seed,
                    truncation: None,
                },
            )
            .unwrap()
        };
        let backtest_data = sim(132, 64_000);
        let cfg = BacktestConfig {
            window_len: 500,
            stride: 24,
            horizons: vec![1],
            levels: vec![0.9],
            models: vec![ModelSpec::Ar {
                order: 5,
                loss: ArLoss::Lad,
            }],
            ..BacktestConfig::default()
        };
        let report = run_backtest(&backtest_data, &cfg).unwrap();
        assert!(report.skips.len() * 5 < report.windows_total);
        let pooled = report.cells[0].metrics.precision.unwrap();

        let oracle_model = ArModel {
            phi: phi.to_vec(),
            loss: ArLoss::Lad,
            n_obs: 0,
            residual_scale: None,
        };
        let calibration = sim(133, 1_000_000);
        let oracle = ar_predictor(&oracle_model, 1, &calibration, 0.9).unwrap();
        let fresh = sim(134, 2_000_000);
        let resolved: Vec<PredictionRecord> = predict_path(&oracle, &fresh)
            .unwrap()
            .into_iter()
            .filter(|r| r.outcome.is_some())
            .collect();
        let oracle_precision = sample_metrics(&tally(&resolved).unwrap())
            .unwrap()
            .precision
            .unwrap();
        println!("pooled {pooled:.4} oracle {oracle_precision:.4}");
        assert!(
            (pooled - oracle_precision).abs() < 0.05,
            "pooled {pooled} vs oracle {oracle_precision}"
        );
    }

    #[test]
    fn identical_runs_serialize_identically() {
        let y = simulate_ar(
            &[0.5],
            &InnovationSpec::Pareto {
                alpha: 1.5,
                scale: 1.0,
            },
            &SimConfig {
                n: 800,
                burn_in: None,
                seed: 135,
                truncation: None,
            },
        )
        .unwrap();
        let cfg = small_cfg();
        let a = serde_json::to_string(&run_backtest(&y, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_backtest(&y, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let report: BacktestReport = serde_json::from_str(&a).unwrap();
        assert_eq!(report.provenance.data_hash, series_hash(&y));
        assert_eq!(report.provenance.config_hash.len(), 16);
    }

    #[test]
    fn fit_failures_skip_windows_and_trip_the_ceiling() {
        // A window far too short for a tail fit fails every window's
        // long-memory fit; with the default ceiling the run fails, with the
        // ceiling lifted it reports the skips instead.
        let y = simulate_ar(
            &[0.5],
            &InnovationSpec::Pareto {
                alpha: 1.5,
                scale: 1.0,
            },
            &SimConfig {
                n: 200,
                burn_in: None,
                seed: 136,
                truncation: None,
            },
        )
        .unwrap();
        let cfg = BacktestConfig {
            window_len: 40,
            stride: 40,
            horizons: vec![1],
            levels: vec![0.9],
            models: vec![ModelSpec::Baseline, ModelSpec::Farima { ell: 24 }],
            ..BacktestConfig::default()
        };
        let err = run_backtest(&y, &cfg).unwrap_err();
        assert!(matches!(err, Error::Fit(_)), "{err}");
        assert!(err.to_string().contains("ceiling"), "{err}");

        let lifted = BacktestConfig {
            max_skip_fraction: 1.0,
            ..cfg
        };
        let report = run_backtest(&y, &lifted).unwrap();
        assert_eq!(report.windows_used, 0);
        assert_eq!(report.windows_total, report.skips.len());
        assert!(report.cells.is_empty());
        assert!(!report.skips[0].reason.is_empty());
    }
}
