//! Confusion tallies and binary skill scores for exceedance alarms.
//!
//! Two routes produce a [`SkillReport`]. The sample route tallies resolved
//! prediction records into integer counts and applies the ratio algebra to
//! them. The population route evaluates closed forms in the event level `p`,
//! the calibration level `q`, and the precision `lambda` of a calibrated
//! predictor. Both describe the same four-cell joint law, exposed by
//! [`confusion_mass`], so each route checks the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predict::PredictionRecord;

/// Outcome tallies over resolved predictions.
///
/// `fn_` holds the false negatives; the natural name is reserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn alarms(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn events(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Cell-wise sum, used to pool counts across evaluation windows.
    pub fn merge(&self, other: &ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
            tn: self.tn + other.tn,
        }
    }

    /// Cells as real mass in the order `[tp, fp, fn, tn]`.
    pub fn as_mass(&self) -> [f64; 4] {
        [
            self.tp as f64,
            self.fp as f64,
            self.fn_ as f64,
            self.tn as f64,
        ]
    }
}

/// Binary-forecast skill summary.
///
/// `None` marks a score whose defining ratio has a zero denominator. It
/// serializes as `null` and must never be collapsed to `0`, which is a
/// legitimate score value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkillReport {
    pub precision: Option<f64>,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub tss: Option<f64>,
    pub hss: Option<f64>,
    pub f1: Option<f64>,
    pub edi: Option<f64>,
    pub alarm_rate: f64,
    pub event_rate: f64,
}

/// Counts alarms against resolved outcomes.
pub fn tally(records: &[PredictionRecord]) -> Result<ConfusionCounts> {
    let mut counts = ConfusionCounts::default();
    for record in records {
        let outcome = record
            .outcome
            .ok_or_else(|| Error::domain(format!("unresolved outcome at t={}", record.t)))?;
        match (record.alarm, outcome) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, true) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    Ok(counts)
}

/// Skill scores from nonnegative confusion mass in the order
/// `[tp, fp, fn, tn]`. Accepts counts, rates, or probabilities; every score
/// is a ratio, so the overall scale cancels.
pub fn mass_metrics(mass: &[f64; 4]) -> Result<SkillReport> {
    if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::domain("confusion mass must be finite and nonnegative"));
    }
    let [tp, fp, fn_, tn] = *mass;
    let total = tp + fp + fn_ + tn;
    if total <= 0.0 {
        return Err(Error::domain("confusion mass must have a positive total"));
    }
    let tpr = ratio(tp, tp + fn_);
    let fpr = ratio(fp, fp + tn);
    let tss = match (tpr, fpr) {
        (Some(t), Some(f)) => Some(t - f),
        _ => None,
    };
    let edi = match (tpr, fpr) {
        (Some(t), Some(f)) => extremal_dependence_index(t, f),
        _ => None,
    };
    Ok(SkillReport {
        precision: ratio(tp, tp + fp),
        tpr,
        fpr,
        tss,
        hss: ratio(
            2.0 * (tp * tn - fp * fn_),
            (tp + fn_) * (fn_ + tn) + (tp + fp) * (fp + tn),
        ),
        f1: ratio(2.0 * tp, 2.0 * tp + fp + fn_),
        edi,
        alarm_rate: (tp + fp) / total,
        event_rate: (tp + fn_) / total,
    })
}

/// Skill scores from integer confusion counts.
pub fn sample_metrics(counts: &ConfusionCounts) -> Result<SkillReport> {
    if counts.total() == 0 {
        return Err(Error::domain("sample_metrics needs at least one resolved record"));
    }
    mass_metrics(&counts.as_mass())
}

/// Feasible precision interval for a predictor calibrated at level `q`
/// against events at level `p`: alarms cannot catch more events than exist,
/// nor miss more non-events than exist.
pub fn precision_bounds(p: f64, q: f64) -> (f64, f64) {
    let lo = ((1.0 - p - q) / (1.0 - q)).max(0.0);
    let hi = ((1.0 - p) / (1.0 - q)).min(1.0);
    (lo, hi)
}

/// Joint cell mass `[tp, fp, fn, tn]` of the (alarm, event) pair for a
/// predictor calibrated at level `q` with precision `lambda` against events
/// at level `p`. The cells sum to one.
pub fn confusion_mass(p: f64, q: f64, lambda: f64) -> Result<[f64; 4]> {
    check_population_inputs(p, q, lambda)?;
    let tp = (1.0 - q) * lambda;
    let fp = (1.0 - q) * (1.0 - lambda);
    Ok([tp, fp, (1.0 - p) - tp, p - fp])
}

/// Closed-form skill scores for a predictor calibrated at level `q` with
/// precision `lambda` against events at level `p`.
pub fn population_metrics(p: f64, q: f64, lambda: f64) -> Result<SkillReport> {
    check_population_inputs(p, q, lambda)?;
    let tpr = (1.0 - q) * lambda / (1.0 - p);
    let fpr = (1.0 - q) * (1.0 - lambda) / p;
    let tss = (1.0 - q) * (lambda + p - 1.0) / (p * (1.0 - p));
    let hss = 2.0 * (1.0 - q) * (lambda + p - 1.0) / (p + q - 2.0 * p * q);
    let f1 = 2.0 * (1.0 - q) * lambda / (2.0 - p - q);
    Ok(SkillReport {
        precision: Some(lambda),
        tpr: Some(tpr),
        fpr: Some(fpr),
        tss: Some(tss),
        hss: Some(hss),
        f1: Some(f1),
        edi: extremal_dependence_index(tpr, fpr),
        alarm_rate: 1.0 - q,
        event_rate: 1.0 - p,
    })
}

/// Receiver operating characteristic: (false positive rate, true positive
/// rate) pairs swept from all-quiet to all-alarm. Tied scores share one
/// point; both endpoints are included.
pub fn roc_points(scores: &[f64], outcomes: &[bool]) -> Result<Vec<(f64, f64)>> {
    let (cumulative, positives, negatives) = descending_cumulative(scores, outcomes)?;
    if positives == 0 || negatives == 0 {
        return Err(Error::domain("roc_points needs both outcome classes"));
    }
    let mut curve = Vec::with_capacity(cumulative.len() + 1);
    curve.push((0.0, 0.0));
    for (tp, fp) in cumulative {
        curve.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    Ok(curve)
}

/// Precision-recall curve: (recall, precision) pairs by the same threshold
/// sweep as [`roc_points`]. The zero-alarm point is omitted because
/// precision is undefined there, and the sweep stops once every positive is
/// recalled: lower thresholds only add false alarms.
pub fn pr_points(scores: &[f64], outcomes: &[bool]) -> Result<Vec<(f64, f64)>> {
    let (cumulative, positives, _) = descending_cumulative(scores, outcomes)?;
    if positives == 0 {
        return Err(Error::domain("pr_points needs at least one positive outcome"));
    }
    let mut curve = Vec::with_capacity(cumulative.len());
    for (tp, fp) in cumulative {
        curve.push((tp as f64 / positives as f64, tp as f64 / (tp + fp) as f64));
        if tp == positives {
            break;
        }
    }
    Ok(curve)
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else {
        None
    }
}

/// Discrimination index `(ln fpr - ln tpr) / (ln fpr + ln tpr)`, taken
/// through its one-sided limits when either rate is zero. Undefined when no
/// alarm fires (both rates zero) and when both rates are one.
fn extremal_dependence_index(tpr: f64, fpr: f64) -> Option<f64> {
    if tpr == 0.0 && fpr == 0.0 {
        return None;
    }
    if tpr == 1.0 && fpr == 1.0 {
        return None;
    }
    if fpr == 0.0 {
        return Some(1.0);
    }
    if tpr == 0.0 {
        return Some(-1.0);
    }
    let u = -fpr.ln();
    let v = -tpr.ln();
    Some((u - v) / (u + v))
}

fn check_population_inputs(p: f64, q: f64, lambda: f64) -> Result<()> {
    for (name, value) in [("p", p), ("q", q)] {
        if !value.is_finite() || value <= 0.0 || value >= 1.0 {
            return Err(Error::domain(format!("{name}={value} must lie in (0, 1)")));
        }
    }
    let (lo, hi) = precision_bounds(p, q);
    if !lambda.is_finite() || lambda < lo || lambda > hi {
        return Err(Error::domain(format!(
            "precision {lambda} outside the feasible range [{lo}, {hi}] for p={p}, q={q}"
        )));
    }
    Ok(())
}

/// Cumulative (tp, fp) counts after each distinct score value, scanned from
/// the highest score down. Tied scores are grouped into one entry.
fn descending_cumulative(scores: &[f64], outcomes: &[bool]) -> Result<(Vec<(u64, u64)>, u64, u64)> {
    if scores.len() != outcomes.len() {
        return Err(Error::domain("scores and outcomes must have equal length"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::data("non-finite score in curve input"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap());
    let positives = outcomes.iter().filter(|&&o| o).count() as u64;
    let negatives = outcomes.len() as u64 - positives;
    let mut points = Vec::new();
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut idx = 0;
    while idx < order.len() {
        let value = scores[order[idx]];
        while idx < order.len() && scores[order[idx]] == value {
            if outcomes[order[idx]] {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        points.push((tp, fp));
    }
    Ok((points, positives, negatives))
}
