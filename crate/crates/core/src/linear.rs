//! Autoregressive and fractionally integrated linear-model machinery.
//!
//! Covers AR(d) estimation by least squares and least absolute deviations,
//! the companion-matrix construction that turns a one-step coefficient vector
//! into direct h-step coefficients, the expansion of a causal AR filter into
//! moving-average coefficients, and the coefficient recursions of the
//! FARIMA(0,d,0) family: the MA weights `a_j`, their inverse `b_j`, and the
//! finite-history prediction weights `c_r`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modulus bound for companion eigenvalues: accepts a filter only when every
/// root of the characteristic polynomial has modulus at least `1 + 1e-6`.
const CAUSALITY_MARGIN: f64 = 1e-6;

const LAD_MAX_ITERATIONS: usize = 500;
const LAD_STEP_TOLERANCE: f64 = 1e-8;
/// Secondary stopping rule: converged when the exact absolute-deviation
/// objective improves by less than this relative amount over a trailing
/// window of [`LAD_PLATEAU_WINDOW`] iterations. The smoothed loss is convex,
/// so a plateau identifies the optimum even when the coefficient step stalls
/// marginally above [`LAD_STEP_TOLERANCE`] near kink residuals.
const LAD_PLATEAU_RELATIVE: f64 = 1e-9;
const LAD_PLATEAU_WINDOW: usize = 25;

/// Loss function used to fit an AR model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArLoss {
    Ols,
    Lad,
}

/// A fitted (or specified) AR(d) model without intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    /// Lag coefficients, index 0 = lag 1.
    pub phi: Vec<f64>,
    /// Loss the coefficients minimize.
    pub loss: ArLoss,
    /// Number of observations the fit consumed.
    pub n_obs: usize,
    /// Median absolute residual of the fit, as an innovation-scale summary.
    pub residual_scale: Option<f64>,
}

impl ArModel {
    /// Model order d.
    pub fn order(&self) -> usize {
        self.phi.len()
    }

    /// True when all characteristic roots are outside the closed unit disk.
    pub fn is_causal(&self) -> bool {
        check_causal(&self.phi)
    }

    /// Direct h-step coefficients for this model.
    pub fn horizon_coeffs(&self, h: usize) -> Result<HorizonCoefficients> {
        companion_power(&self.phi, h)
    }
}

/// Truncated moving-average coefficient sequence `a_0..a_{K-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaCoefficients {
    a: Vec<f64>,
}

impl MaCoefficients {
    /// Wraps a non-empty, finite coefficient sequence.
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::domain("coefficient sequence must be non-empty"));
        }
        if let Some(v) = a.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite coefficient {v}")));
        }
        Ok(MaCoefficients { a })
    }

    /// Truncation length K.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    /// Always false: construction rejects empty sequences.
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// The stored coefficients.
    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    /// Coefficient `a_j`, or 0 beyond the truncation.
    pub fn get(&self, j: usize) -> f64 {
        self.a.get(j).copied().unwrap_or(0.0)
    }
}

/// Direct h-step prediction coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonCoefficients {
    /// Coefficient vector applied to the most recent d observations.
    pub phi_h: Vec<f64>,
    /// Prediction horizon, at least 1.
    pub h: usize,
}

impl HorizonCoefficients {
    /// Score `phi_h . (y_t, y_{t-1}, ..., y_{t-d+1})`; `recent` is ordered
    /// newest first.
    pub fn score(&self, recent: &[f64]) -> Result<f64> {
        if recent.len() < self.phi_h.len() {
            return Err(Error::domain(format!(
                "need {} recent values, got {}",
                self.phi_h.len(),
                recent.len()
            )));
        }
        Ok(self.phi_h.iter().zip(recent).map(|(c, y)| c * y).sum())
    }
}

/// Companion matrix with the coefficient vector as its first column and ones
/// on the superdiagonal; its h-th power applied to the first basis vector
/// yields the h-step coefficients.
pub fn companion_matrix(phi: &[f64]) -> DMatrix<f64> {
    let d = phi.len();
    let mut m = DMatrix::zeros(d, d);
    for (i, p) in phi.iter().enumerate() {
        m[(i, 0)] = *p;
    }
    for j in 1..d {
        m[(j - 1, j)] = 1.0;
    }
    m
}

/// True iff every root of `1 - phi_1 z - ... - phi_d z^d` lies strictly
/// outside the closed unit disk, with a `1e-6` modulus margin.
///
/// Roots are located through the eigenvalues of the reversed-polynomial
/// companion matrix; an eigenvalue is the reciprocal of a root.
pub fn check_causal(phi: &[f64]) -> bool {
    let effective = phi.len() - phi.iter().rev().take_while(|p| **p == 0.0).count();
    if effective == 0 {
        return true;
    }
    let phi = &phi[..effective];
    if phi.iter().any(|p| !p.is_finite()) {
        return false;
    }
    let d = phi.len();
    let mut m = DMatrix::zeros(d, d);
    for (j, p) in phi.iter().enumerate() {
        m[(0, j)] = *p;
    }
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    let max_modulus = m
        .complex_eigenvalues()
        .iter()
        .map(|ev| ev.norm())
        .fold(0.0f64, f64::max);
    max_modulus <= 1.0 / (1.0 + CAUSALITY_MARGIN)
}

/// h-step coefficients `phi(h)` via the h-th companion power applied to the
/// first basis vector; `phi(1)` equals the input.
pub fn companion_power(phi: &[f64], h: usize) -> Result<HorizonCoefficients> {
    if h < 1 {
        return Err(Error::domain("horizon must be at least 1"));
    }
    if phi.is_empty() {
        return Err(Error::domain("coefficient vector must be non-empty"));
    }
    let m = companion_matrix(phi);
    let mut v = DVector::zeros(phi.len());
    v[0] = 1.0;
    for _ in 0..h {
        v = &m * v;
    }
    Ok(HorizonCoefficients {
        phi_h: v.iter().copied().collect(),
        h,
    })
}

/// Moving-average expansion of a causal AR filter: `a_0 = 1`,
/// `a_k = sum_{i=1}^{min(k,d)} phi_i a_{k-i}` (power-series division).
pub fn ar_to_ma(phi: &[f64], k: usize) -> Result<MaCoefficients> {
    if k < 1 {
        return Err(Error::domain("truncation must be at least 1"));
    }
    if !check_causal(phi) {
        return Err(Error::domain("AR coefficients are not causal"));
    }
    let d = phi.len();
    let mut a = vec![0.0; k];
    a[0] = 1.0;
    for j in 1..k {
        a[j] = (1..=j.min(d)).map(|i| phi[i - 1] * a[j - i]).sum();
    }
    MaCoefficients::new(a)
}

/// Moving-average coefficients of the FARIMA(0,d,0) filter via the ratio
/// recursion `a_j = a_{j-1} (j-1+d)/j`, which stays finite for any truncation
/// where direct Gamma-function evaluation would overflow.
pub fn farima_ma_coeffs(d: f64, k: usize) -> Result<MaCoefficients> {
    if k < 1 {
        return Err(Error::domain("truncation must be at least 1"));
    }
    if !d.is_finite() || d <= -0.5 {
        return Err(Error::domain(format!("memory parameter {d} must exceed -1/2")));
    }
    if d == d.trunc() {
        return Err(Error::domain(format!("memory parameter {d} must be non-integral")));
    }
    let mut a = vec![0.0; k];
    a[0] = 1.0;
    for j in 1..k {
        a[j] = a[j - 1] * (j as f64 - 1.0 + d) / j as f64;
    }
    MaCoefficients::new(a)
}

/// Inverse filter of an MA sequence with `a_0 = 1`: `b_0 = 1`,
/// `b_j = -sum_{k=1}^{j} a_k b_{j-k}`.
pub fn invert_coeffs(a: &MaCoefficients, l: usize) -> Result<Vec<f64>> {
    if l < 1 {
        return Err(Error::domain("truncation must be at least 1"));
    }
    if (a.get(0) - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("leading coefficient {} must be 1", a.get(0))));
    }
    let mut b = vec![0.0; l];
    b[0] = 1.0;
    for j in 1..l {
        b[j] = -(1..=j).map(|k| a.get(k) * b[j - k]).sum::<f64>();
    }
    Ok(b)
}

/// Finite-history h-step prediction weights
/// `c_r = sum_{s=0}^{r} a_{s+h} b_{r-s}` for `r = 0..ell-1`.
pub fn finite_history_coeffs(
    a: &MaCoefficients,
    b: &[f64],
    h: usize,
    ell: usize,
) -> Result<Vec<f64>> {
    if ell < 1 {
        return Err(Error::domain("history length must be at least 1"));
    }
    if h < 1 {
        return Err(Error::domain("horizon must be at least 1"));
    }
    if a.len() < ell + h {
        return Err(Error::domain(format!(
            "need {} MA coefficients, got {}",
            ell + h,
            a.len()
        )));
    }
    if b.len() < ell {
        return Err(Error::domain(format!(
            "need {} inverse coefficients, got {}",
            ell,
            b.len()
        )));
    }
    let c = (0..ell)
        .map(|r| (0..=r).map(|s| a.get(s + h) * b[r - s]).sum())
        .collect();
    Ok(c)
}

/// Lagged design matrix and response for an AR(d) regression: row `s` holds
/// `(y_{s+d-1}, ..., y_s)` and the response is `y_{s+d}`.
fn lagged_design(y: &[f64], d: usize) -> (DMatrix<f64>, DVector<f64>) {
    let rows = y.len() - d;
    let design = DMatrix::from_fn(rows, d, |s, j| y[s + d - 1 - j]);
    let response = DVector::from_fn(rows, |s, _| y[s + d]);
    (design, response)
}

fn validate_fit_input(y: &[f64], d: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::domain("order must be at least 1"));
    }
    if y.len() < 10 * d {
        return Err(Error::data(format!(
            "series length {} below 10x order {d}",
            y.len()
        )));
    }
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::data(format!("non-finite value {v} in series")));
    }
    Ok(())
}

/// Least-squares solve with explicit rank detection.
fn solve_least_squares(design: &DMatrix<f64>, response: &DVector<f64>) -> Result<DVector<f64>> {
    let cols = design.ncols();
    let svd = design.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s));
    let tol = max_sv * design.nrows().max(cols) as f64 * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    if rank < cols || max_sv == 0.0 {
        return Err(Error::SingularDesign { rank, cols });
    }
    svd.solve(response, tol).map_err(Error::fit)
}

fn median_abs(values: &[f64]) -> f64 {
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_unstable_by(f64::total_cmp);
    let n = abs.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        abs[n / 2]
    } else {
        0.5 * (abs[n / 2 - 1] + abs[n / 2])
    }
}

/// Least-squares AR(d) fit without intercept.
pub fn fit_ar_ols(y: &[f64], d: usize) -> Result<ArModel> {
    validate_fit_input(y, d)?;
    let (design, response) = lagged_design(y, d);
    let phi = solve_least_squares(&design, &response)?;
    let residuals = &response - &design * &phi;
    Ok(ArModel {
        phi: phi.iter().copied().collect(),
        loss: ArLoss::Ols,
        n_obs: y.len(),
        residual_scale: Some(median_abs(residuals.as_slice())),
    })
}

/// Least-absolute-deviations AR(d) fit without intercept.
///
/// Minimizes the absolute-residual sum through iteratively reweighted least
/// squares on the smoothed loss `sqrt(r^2 + eta^2)`, `eta = 1e-8 * scale`
/// with `scale` the median absolute response (fallback 1 when that median is
/// 0). Starts from the least-squares solution; stops when the coefficient
/// step drops below 1e-8 in sup norm. After 200 iterations without
/// convergence the error carries the best iterate seen, judged by the exact
/// absolute-deviation objective.
pub fn fit_ar_lad(y: &[f64], d: usize) -> Result<ArModel> {
    validate_fit_input(y, d)?;
    let (design, response) = lagged_design(y, d);
    let mut phi = solve_least_squares(&design, &response)?;
    let scale = {
        let m = median_abs(response.as_slice());
        if m > 0.0 {
            m
        } else {
            1.0
        }
    };
    let eta2 = (1e-8 * scale).powi(2);
    let objective = |phi: &DVector<f64>| -> f64 {
        (&response - &design * phi).iter().map(|r| r.abs()).sum()
    };
    let mut best_phi = phi.clone();
    let mut best_objective = objective(&phi);
    let mut last_step = f64::INFINITY;
    let mut objective_history = vec![best_objective];
    for iteration in 1..=LAD_MAX_ITERATIONS {
        let residuals = &response - &design * &phi;
        let mut weighted_design = design.clone();
        let mut weighted_response = response.clone();
        for (i, r) in residuals.iter().enumerate() {
            let w = (r * r + eta2).powf(-0.25);
            weighted_design.row_mut(i).scale_mut(w);
            weighted_response[i] *= w;
        }
        let next = solve_least_squares(&weighted_design, &weighted_response)?;
        last_step = (&next - &phi).amax();
        phi = next;
        let obj = objective(&phi);
        if obj < best_objective {
            best_objective = obj;
            best_phi = phi.clone();
        }
        objective_history.push(obj);
        let plateaued = iteration >= LAD_PLATEAU_WINDOW && {
            let before = objective_history[iteration - LAD_PLATEAU_WINDOW];
            before - obj <= LAD_PLATEAU_RELATIVE * (1.0 + obj.abs())
        };
        if last_step < LAD_STEP_TOLERANCE || plateaued {
            let residuals = &response - &design * &best_phi;
            return Ok(ArModel {
                phi: best_phi.iter().copied().collect(),
                loss: ArLoss::Lad,
                n_obs: y.len(),
                residual_scale: Some(median_abs(residuals.as_slice())),
            });
        }
    }
    Err(Error::NotConverged {
        iterations: LAD_MAX_ITERATIONS,
        last_step,
        best: best_phi.iter().copied().collect(),
    })
}
