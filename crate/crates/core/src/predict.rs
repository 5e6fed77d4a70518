//! Calibrated exceedance predictors.
//!
//! A predictor pairs a scoring rule with an alarm threshold calibrated on a
//! training range, and predicts the event `y_{t+h} > event_threshold` from
//! the alarm `comparison(score_t, threshold)`. Scoring rules cover the
//! generic density-ratio form, the additive-model form, a Gaussian-copula
//! linear score, a last-observation baseline, and linear filters derived
//! from fitted autoregressive or long-memory models.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linear::{farima_ma_coeffs, finite_history_coeffs, invert_coeffs, ArModel};
use crate::series::{EmpiricalDistribution, Series};

/// Filter weights whose magnitudes all sit below this are treated as a
/// vanished scoring rule.
pub const DEGENERATE_COEFF_TOL: f64 = 1e-12;

/// One scored time step. `outcome` stays `None` until the target step
/// `t + h` has been observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub t: usize,
    pub score: f64,
    pub alarm: bool,
    pub outcome: Option<bool>,
}

/// Alarm comparison between score and threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Alarm on `score > threshold`: the form the density-ratio optimality
    /// argument uses.
    Greater,
    /// Alarm on `score >= threshold`: the form empirical-quantile
    /// calibration uses, so threshold ties on the training grid alarm.
    GreaterOrEqual,
}

impl Comparison {
    pub fn alarms(self, score: f64, threshold: f64) -> bool {
        match self {
            Comparison::Greater => score > threshold,
            Comparison::GreaterOrEqual => score >= threshold,
        }
    }
}

/// Serializable scoring rule of a calibrated predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScoreRule {
    /// The most recent observation, in raw units.
    LastObservation,
    /// `sum_r coeffs[r] * (y_{t-r} - center)` over the filter length.
    LinearFilter { coeffs: Vec<f64> },
}

/// An alarm rule predicting the exceedance `y_{t+h} > event_threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedPredictor {
    pub score: ScoreRule,
    /// Alarm threshold on the score scale.
    pub threshold: f64,
    /// Quantile level of the calibration, when the threshold came from one.
    pub level_q: Option<f64>,
    /// Steps ahead being predicted, at least 1.
    pub horizon_h: usize,
    pub comparison: Comparison,
    /// Raw-units level whose exceedance is the predicted event.
    pub event_threshold: f64,
    /// Training mean subtracted before scoring; score-scale quantities map
    /// back to raw units through it.
    pub center: f64,
    /// True when every filter weight is numerically negligible, as in the
    /// no-memory limit where the optimal long-memory filter vanishes.
    pub degenerate: bool,
}

impl CalibratedPredictor {
    /// Observations needed for one score.
    pub fn history_len(&self) -> usize {
        match &self.score {
            ScoreRule::LastObservation => 1,
            ScoreRule::LinearFilter { coeffs } => coeffs.len(),
        }
    }

    /// Score at index `t`, which must have a full history behind it.
    pub fn score_at(&self, values: &[f64], t: usize) -> Result<f64> {
        if t + 1 < self.history_len() || t >= values.len() {
            return Err(Error::domain(format!("index {t} lacks a full history")));
        }
        Ok(match &self.score {
            ScoreRule::LastObservation => values[t],
            ScoreRule::LinearFilter { coeffs } => linear_score(coeffs, self.center, values, t),
        })
    }
}

fn linear_score(coeffs: &[f64], center: f64, values: &[f64], t: usize) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(r, c)| c * (values[t - r] - center))
        .sum()
}

/// Likelihood-ratio score between two density evaluators, extended to the
/// support boundary: positive target mass where the reference vanishes
/// scores `+inf`, and points outside both supports score 0.
pub fn density_ratio_score<F0, F1>(f0: F0, f1: F1, x: &[f64]) -> Result<f64>
where
    F0: Fn(&[f64]) -> f64,
    F1: Fn(&[f64]) -> f64,
{
    let d0 = f0(x);
    let d1 = f1(x);
    for (name, value) in [("f0", d0), ("f1", d1)] {
        if value.is_nan() || value < 0.0 {
            return Err(Error::domain(format!(
                "{name}(x) = {value} is not a valid density value"
            )));
        }
    }
    Ok(if d0 == 0.0 {
        if d1 > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        d1 / d0
    })
}

/// Standardized margin `(g - y0) / sigma` of an additive-noise model with
/// location `g` and scale `sigma` at the event level `y0`.
pub fn additive_model_score(g_value: f64, sigma_value: f64, y0: f64) -> Result<f64> {
    if !sigma_value.is_finite() || sigma_value <= 0.0 {
        return Err(Error::domain(format!("scale {sigma_value} must be positive")));
    }
    Ok((g_value - y0) / sigma_value)
}

/// Linear score on normal-transformed margins:
/// `sum_i a_i Phi^{-1}(F_i(x_i))`, with each empirical CDF value clamped to
/// `[1/(n+1), n/(n+1)]` to keep the normal quantile finite.
pub fn gaussian_copula_score(
    margins: &[EmpiricalDistribution],
    a: &[f64],
    x: &[f64],
) -> Result<f64> {
    if margins.len() != a.len() || a.len() != x.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} margins, {} coefficients, {} coordinates",
            margins.len(),
            a.len(),
            x.len()
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut score = 0.0;
    for ((margin, weight), value) in margins.iter().zip(a).zip(x) {
        let n = margin.n() as f64;
        let u = margin.ecdf(*value).clamp(1.0 / (n + 1.0), n / (n + 1.0));
        score += weight * normal.inverse_cdf(u);
    }
    Ok(score)
}

/// Alarms when the latest observation already exceeds the event level.
pub fn baseline_predictor(y0: f64, h: usize) -> Result<CalibratedPredictor> {
    if h < 1 {
        return Err(Error::domain("horizon must be at least 1"));
    }
    if !y0.is_finite() {
        return Err(Error::domain(format!("event level {y0} must be finite")));
    }
    Ok(CalibratedPredictor {
        score: ScoreRule::LastObservation,
        threshold: y0,
        level_q: None,
        horizon_h: h,
        comparison: Comparison::Greater,
        event_threshold: y0,
        center: 0.0,
        degenerate: false,
    })
}

/// Plug-in linear predictor from a fitted AR model: the score applies the
/// direct h-step coefficients to the most recent observations.
pub fn ar_predictor(
    model: &ArModel,
    h: usize,
    train: &Series,
    p: f64,
) -> Result<CalibratedPredictor> {
    let horizon = model.horizon_coeffs(h)?;
    calibrate_linear_filter(horizon.phi_h, h, train, p)
}

/// Truncated linear predictor for a long-memory series with memory `d_hat`
/// and innovation tail index `alpha_hat`: h-step weights over the last
/// `ell` observations, calibrated like the AR predictor.
pub fn farima_predictor(
    d_hat: f64,
    alpha_hat: f64,
    h: usize,
    ell: usize,
    train: &Series,
    p: f64,
) -> Result<CalibratedPredictor> {
    if !alpha_hat.is_finite() || alpha_hat <= 1.0 {
        return Err(Error::domain(format!("tail index {alpha_hat} must exceed 1")));
    }
    if !(d_hat < 1.0 - 1.0 / alpha_hat) {
        return Err(Error::domain(format!(
            "memory {d_hat} must lie below 1 - 1/alpha = {}",
            1.0 - 1.0 / alpha_hat
        )));
    }
    let a = farima_ma_coeffs(d_hat, ell + h)?;
    let b = invert_coeffs(&a, ell)?;
    let coeffs = finite_history_coeffs(&a, &b, h, ell)?;
    calibrate_linear_filter(coeffs, h, train, p)
}

/// Calibrates a linear-filter rule on its training range: the alarm
/// threshold is the p-th left-continuous quantile of every computable
/// training score, and the event threshold is the same quantile of the raw
/// training values.
fn calibrate_linear_filter(
    coeffs: Vec<f64>,
    h: usize,
    train: &Series,
    p: f64,
) -> Result<CalibratedPredictor> {
    if !p.is_finite() || !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("level {p} must lie in (0, 1)")));
    }
    let raw = train.complete_values()?;
    let m = coeffs.len();
    if raw.len() < m {
        return Err(Error::data(format!(
            "training length {} is shorter than the score history {m}",
            raw.len()
        )));
    }
    let (_, center) = train.center()?;
    let scores: Vec<f64> = ((m - 1)..raw.len())
        .map(|t| linear_score(&coeffs, center, raw, t))
        .collect();
    let threshold = EmpiricalDistribution::from_sample(&scores)?.generalized_inverse(p)?;
    let event_threshold = EmpiricalDistribution::from_sample(raw)?.generalized_inverse(p)?;
    let degenerate = coeffs.iter().all(|c| c.abs() < DEGENERATE_COEFF_TOL);
    Ok(CalibratedPredictor {
        score: ScoreRule::LinearFilter { coeffs },
        threshold,
        level_q: Some(p),
        horizon_h: h,
        comparison: Comparison::GreaterOrEqual,
        event_threshold,
        center,
        degenerate,
    })
}

/// Scores every index with a full history and resolves each outcome that is
/// already observable; the trailing `h` records stay pending.
pub fn predict_path(pred: &CalibratedPredictor, y: &Series) -> Result<Vec<PredictionRecord>> {
    let values = y.complete_values()?;
    let m = pred.history_len();
    let n = values.len();
    let mut records = Vec::new();
    if n < m {
        return Ok(records);
    }
    records.reserve(n - m + 1);
    for t in (m - 1)..n {
        let score = pred.score_at(values, t)?;
        let alarm = pred.comparison.alarms(score, pred.threshold);
        let outcome = if t + pred.horizon_h < n {
            Some(values[t + pred.horizon_h] > pred.event_threshold)
        } else {
            None
        };
        records.push(PredictionRecord {
            t,
            score,
            alarm,
            outcome,
        });
    }
    Ok(records)
}
