//! Extreme-value estimators: generalized extreme-value and generalized
//! Pareto fits, intervals declustering, a declustered-excess extreme
//! quantile estimator, the periodogram, and a long-memory estimator built
//! on it.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::series::{EmpiricalDistribution, Series};

/// Euler-Mascheroni constant, the mean of the standard Gumbel law.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Shape magnitude below which the Gumbel limit branch is used.
const GUMBEL_EPS: f64 = 1e-9;

/// Parameters of the generalized extreme-value law
/// `G(z) = exp(-(1 + xi (z - mu) / sigma)^(-1/xi))` on the set where the
/// base is positive, with the Gumbel limit at `xi = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl GevParams {
    /// Tail index `1 / xi` of the implied power-law tail; requires a
    /// heavy-tailed (positive-shape) fit.
    pub fn tail_index(&self) -> Result<f64> {
        if self.xi <= 0.0 {
            return Err(Error::domain(format!(
                "shape {} is not positive: no power-law tail index",
                self.xi
            )));
        }
        Ok(1.0 / self.xi)
    }
}

/// Parameters of the generalized Pareto law for excesses over a threshold;
/// `mu` is the threshold and is 0 for data already given as excesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpParams {
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl GpParams {
    /// Distribution function of the excess law at excess `x >= 0`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if self.xi.abs() < GUMBEL_EPS {
            return 1.0 - (-x / self.sigma).exp();
        }
        let base = 1.0 + self.xi * x / self.sigma;
        if base <= 0.0 {
            // Beyond the upper endpoint of a bounded-tail law.
            return 1.0;
        }
        1.0 - base.powf(-1.0 / self.xi)
    }

    /// Quantile function of the excess law at probability `q` in [0, 1).
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::domain(format!("probability {q} outside [0, 1)")));
        }
        if self.xi.abs() < GUMBEL_EPS {
            return Ok(-self.sigma * (1.0 - q).ln());
        }
        Ok(self.sigma * ((1.0 - q).powf(-self.xi) - 1.0) / self.xi)
    }
}

/// Squared-modulus Fourier power of a series on a frequency grid in (0, pi].
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
}

fn check_sample(data: &[f64], min_len: usize, what: &str) -> Result<()> {
    if data.len() < min_len {
        return Err(Error::data(format!(
            "{what} needs at least {min_len} observations, got {}",
            data.len()
        )));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::data(format!("{what} contains non-finite values")));
    }
    let first = data[0];
    if data.iter().all(|&v| v == first) {
        return Err(Error::fit(format!(
            "{what} is a single repeated value: degenerate likelihood"
        )));
    }
    Ok(())
}

/// Probability-weighted moments b_0, b_1, b_2 of a sample.
fn pwm_moments(data: &[f64]) -> [f64; 3] {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut b = [0.0f64; 3];
    for (idx, &x) in sorted.iter().enumerate() {
        let j = (idx + 1) as f64;
        b[0] += x;
        b[1] += x * (j - 1.0) / (n - 1.0);
        b[2] += x * (j - 1.0) * (j - 2.0) / ((n - 1.0) * (n - 2.0));
    }
    b.map(|v| v / n)
}

/// Moment-based starting point for the generalized extreme-value fit.
fn gev_pwm_init(data: &[f64]) -> GevParams {
    let [b0, b1, b2] = pwm_moments(data);
    let c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::f64::consts::LN_2 / 3f64.ln();
    let k = 7.8590 * c + 2.9554 * c * c;
    if k.abs() < 1e-6 {
        let sigma = (2.0 * b1 - b0) / std::f64::consts::LN_2;
        return GevParams {
            mu: b0 - EULER_GAMMA * sigma,
            sigma: sigma.max(1e-12),
            xi: 0.0,
        };
    }
    let sigma = (2.0 * b1 - b0) * k / (gamma(1.0 + k) * (1.0 - 2.0f64.powf(-k)));
    let mu = b0 + sigma * (gamma(1.0 + k) - 1.0) / k;
    GevParams {
        mu,
        sigma: sigma.max(1e-12),
        xi: -k,
    }
}

/// Moment-based starting point for the generalized Pareto fit on excesses.
fn gp_pwm_init(excesses: &[f64]) -> GpParams {
    let [b0, b1, _] = pwm_moments(excesses);
    let denom = b0 - 2.0 * b1;
    if denom.abs() < 1e-12 {
        return GpParams {
            mu: 0.0,
            sigma: b0.max(1e-12),
            xi: 0.0,
        };
    }
    GpParams {
        mu: 0.0,
        sigma: (2.0 * b0 * b1 / denom).max(1e-12),
        xi: 2.0 - b0 / denom,
    }
}

fn gev_nll(data: &[f64], p: &GevParams) -> f64 {
    if p.sigma <= 0.0 {
        return f64::INFINITY;
    }
    let n = data.len() as f64;
    let mut nll = n * p.sigma.ln();
    if p.xi.abs() < GUMBEL_EPS {
        for &x in data {
            let z = (x - p.mu) / p.sigma;
            nll += z + (-z).exp();
        }
    } else {
        for &x in data {
            let t = 1.0 + p.xi * (x - p.mu) / p.sigma;
            if t <= 0.0 {
                return f64::INFINITY;
            }
            nll += (1.0 + 1.0 / p.xi) * t.ln() + t.powf(-1.0 / p.xi);
        }
    }
    nll
}

fn gp_nll(excesses: &[f64], p: &GpParams) -> f64 {
    if p.sigma <= 0.0 {
        return f64::INFINITY;
    }
    let n = excesses.len() as f64;
    let mut nll = n * p.sigma.ln();
    if p.xi.abs() < GUMBEL_EPS {
        for &x in excesses {
            nll += x / p.sigma;
        }
    } else {
        for &x in excesses {
            let t = 1.0 + p.xi * x / p.sigma;
            if t <= 0.0 {
                return f64::INFINITY;
            }
            nll += (1.0 + 1.0 / p.xi) * t.ln();
        }
    }
    nll
}

const NM_MAX_ITERATIONS: usize = 2000;
const NM_VALUE_TOLERANCE: f64 = 1e-10;
const NM_SIZE_TOLERANCE: f64 = 1e-9;

/// Derivative-free simplex minimizer with standard reflection, expansion,
/// contraction, and shrink moves.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64]) -> Result<Vec<f64>> {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += if x[i].abs() > 1e-8 { 0.1 * x[i].abs() } else { 0.1 };
        let fx = f(&x);
        simplex.push((x, fx));
    }
    for iteration in 0..NM_MAX_ITERATIONS {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let size: f64 = (0..dim)
            .map(|i| {
                simplex
                    .iter()
                    .map(|(x, _)| (x[i] - simplex[0].0[i]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= NM_VALUE_TOLERANCE * (1.0 + best.abs())
            && size <= NM_SIZE_TOLERANCE * (1.0 + simplex[0].0.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
        {
            return Ok(simplex[0].0.clone());
        }
        let _ = iteration;
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
            .collect();
        let blend = |t: f64| -> Vec<f64> {
            (0..dim)
                .map(|i| centroid[i] + t * (simplex[dim].0[i] - centroid[i]))
                .collect()
        };
        let reflected = blend(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(-2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let contracted = if fr < simplex[dim].1 { blend(-0.5) } else { blend(0.5) };
        let fc = f(&contracted);
        if fc < simplex[dim].1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        for i in 1..=dim {
            let shrunk: Vec<f64> = (0..dim)
                .map(|j| simplex[0].0[j] + 0.5 * (simplex[i].0[j] - simplex[0].0[j]))
                .collect();
            let fs = f(&shrunk);
            simplex[i] = (shrunk, fs);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Err(Error::fit(format!(
        "simplex search did not converge in {NM_MAX_ITERATIONS} iterations: best value {} at {:?}",
        simplex[0].1, simplex[0].0
    )))
}

/// Maximum-likelihood generalized extreme-value fit to block maxima.
///
/// Optimizes over (mu, log sigma, xi) from a probability-weighted-moments
/// start; the returned parameters never have lower likelihood than the
/// start.
pub fn fit_gev(block_maxima: &[f64]) -> Result<GevParams> {
    check_sample(block_maxima, 50, "block-maxima sample")?;
    let mut init = gev_pwm_init(block_maxima);
    if !gev_nll(block_maxima, &init).is_finite() {
        // Fall back to a Gumbel moment start, which has full support.
        let n = block_maxima.len() as f64;
        let mean = block_maxima.iter().sum::<f64>() / n;
        let var = block_maxima.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sigma = (var.sqrt() * 6f64.sqrt() / std::f64::consts::PI).max(1e-12);
        init = GevParams {
            mu: mean - EULER_GAMMA * sigma,
            sigma,
            xi: 0.0,
        };
    }
    let objective = |x: &[f64]| {
        gev_nll(
            block_maxima,
            &GevParams {
                mu: x[0],
                sigma: x[1].exp(),
                xi: x[2],
            },
        )
    };
    let solution = nelder_mead(objective, &[init.mu, init.sigma.ln(), init.xi])?;
    let fitted = GevParams {
        mu: solution[0],
        sigma: solution[1].exp(),
        xi: solution[2],
    };
    let best = if gev_nll(block_maxima, &fitted) <= gev_nll(block_maxima, &init) {
        fitted
    } else {
        init
    };
    if !gev_nll(block_maxima, &best).is_finite() {
        return Err(Error::fit("support violation at the fitted parameters"));
    }
    Ok(best)
}

/// Maximum-likelihood generalized Pareto fit to nonnegative excesses, with
/// the threshold fixed at 0.
pub fn fit_gp(excesses: &[f64]) -> Result<GpParams> {
    check_sample(excesses, 20, "excess sample")?;
    if excesses.iter().any(|&v| v < 0.0) {
        return Err(Error::data("excesses must be nonnegative"));
    }
    let init = gp_pwm_init(excesses);
    let objective = |x: &[f64]| {
        gp_nll(
            excesses,
            &GpParams {
                mu: 0.0,
                sigma: x[0].exp(),
                xi: x[1],
            },
        )
    };
    let start = if gp_nll(excesses, &init).is_finite() {
        [init.sigma.ln(), init.xi]
    } else {
        let mean = excesses.iter().sum::<f64>() / excesses.len() as f64;
        [mean.max(1e-12).ln(), 0.0]
    };
    let solution = nelder_mead(objective, &start)?;
    let fitted = GpParams {
        mu: 0.0,
        sigma: solution[0].exp(),
        xi: solution[1],
    };
    let best = if gp_nll(excesses, &fitted) <= gp_nll(excesses, &init) {
        fitted
    } else {
        init
    };
    if !gp_nll(excesses, &best).is_finite() {
        return Err(Error::fit("support violation at the fitted parameters"));
    }
    Ok(best)
}

/// Clusters of exceedance times produced by the intervals method.
#[derive(Debug, Clone, PartialEq)]
pub struct Declustering {
    /// Estimated extremal index, capped at 1.
    pub theta_hat: f64,
    /// Exceedance times grouped into clusters, in time order.
    pub clusters: Vec<Vec<usize>>,
}

/// Intervals-method declustering of exceedance times.
///
/// The extremal index is estimated from the interexceedance times T_i as
/// `min(1, 2 (sum T_i)^2 / ((N-1) sum T_i^2))` when every T_i is at most 2,
/// and with T_i replaced by T_i - 1 (and products (T_i-1)(T_i-2)) otherwise.
/// The times are then split into C = ceil(theta N) clusters at the C - 1
/// largest interexceedance gaps. A gap of exactly 1 joins consecutive time
/// indices and carries no between-cluster information (the bias-corrected
/// estimator assigns it weight zero), so such gaps are never split points;
/// ties among equal gaps break toward the earliest.
pub fn decluster_intervals(exceedance_times: &[usize], n_total: usize) -> Result<Declustering> {
    if exceedance_times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::data("exceedance times must be strictly increasing"));
    }
    if exceedance_times.last().is_some_and(|&t| t >= n_total) {
        return Err(Error::data(format!(
            "exceedance time {} outside series of length {n_total}",
            exceedance_times.last().unwrap()
        )));
    }
    let n = exceedance_times.len();
    if n < 2 {
        return Ok(Declustering {
            theta_hat: 1.0,
            clusters: vec![exceedance_times.to_vec()],
        });
    }
    let gaps: Vec<f64> = exceedance_times
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64)
        .collect();
    let count = gaps.len() as f64;
    let theta_hat = if gaps.iter().all(|&t| t <= 2.0) {
        let sum: f64 = gaps.iter().sum();
        let sum_sq: f64 = gaps.iter().map(|t| t * t).sum();
        (2.0 * sum * sum / (count * sum_sq)).min(1.0)
    } else {
        let sum: f64 = gaps.iter().map(|t| t - 1.0).sum();
        let sum_prod: f64 = gaps.iter().map(|t| (t - 1.0) * (t - 2.0)).sum();
        (2.0 * sum * sum / (count * sum_prod)).min(1.0)
    };
    let n_clusters = (theta_hat * n as f64).ceil().max(1.0) as usize;
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by(|&i, &j| gaps[j].total_cmp(&gaps[i]).then(i.cmp(&j)));
    let mut split_after: Vec<bool> = vec![false; gaps.len()];
    for &i in order.iter().take(n_clusters.saturating_sub(1)) {
        if gaps[i] > 1.0 {
            split_after[i] = true;
        }
    }
    let mut clusters = vec![Vec::new()];
    for (idx, &t) in exceedance_times.iter().enumerate() {
        clusters.last_mut().unwrap().push(t);
        if idx < split_after.len() && split_after[idx] {
            clusters.push(Vec::new());
        }
    }
    Ok(Declustering { theta_hat, clusters })
}

/// Kolmogorov-Smirnov distance between sorted data and a fitted excess law.
fn ks_statistic(sorted_excesses: &[f64], params: &GpParams) -> f64 {
    let m = sorted_excesses.len() as f64;
    let mut d = 0.0f64;
    for (idx, &x) in sorted_excesses.iter().enumerate() {
        let cdf = params.cdf(x);
        let hi = (idx + 1) as f64 / m - cdf;
        let lo = cdf - idx as f64 / m;
        d = d.max(hi).max(lo);
    }
    d
}

/// Extreme quantile of a score sample at probability `p` via a
/// threshold-excess model.
///
/// Ten candidate thresholds are spaced between the third quartile and the
/// tenth-largest value. For each, exceedance times are declustered, a
/// generalized Pareto law is fitted to the cluster-peak excesses, and its
/// Kolmogorov-Smirnov distance is recorded; the candidate with the smallest
/// distance wins, ties toward the lower threshold. With `tau` the winning
/// threshold, `p0` its subthreshold mass, and `G` the fitted excess law,
/// the estimate is `tau + G^{-1}((p - p0) / (1 - p0))`; when `p <= p0` the
/// empirical quantile is returned instead.
///
/// Because `G` is fitted to cluster peaks, the matching exceedance rate is
/// the cluster rate: `p0 = 1 - C/n` with `C` the cluster count. When
/// declustering is trivial (every exceedance its own cluster) this is
/// exactly the fraction of the sample at or below `tau`; when exceedances
/// cluster, it is the correction that keeps the tail identity
/// `P(X > tau + y) = (C/n)(1 - G(y))` consistent with peak fitting.
pub fn extreme_quantile(scores: &[f64], p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::domain(format!("probability {p} outside (0, 1)")));
    }
    if scores.len() < 200 {
        return Err(Error::data(format!(
            "extreme quantile needs at least 200 scores, got {}",
            scores.len()
        )));
    }
    let empirical = EmpiricalDistribution::from_sample(scores)?;
    let sorted = empirical.sorted_values();
    let low = empirical.generalized_inverse(0.75)?;
    let high = sorted[sorted.len() - 10];
    let mut best: Option<(f64, f64, usize, GpParams)> = None;
    for i in 0..10 {
        let tau = low + (high - low) * i as f64 / 9.0;
        let times: Vec<usize> = scores
            .iter()
            .enumerate()
            .filter_map(|(t, &v)| (v > tau).then_some(t))
            .collect();
        if times.len() < 2 {
            continue;
        }
        let declustered = match decluster_intervals(&times, scores.len()) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let mut excesses: Vec<f64> = declustered
            .clusters
            .iter()
            .map(|cluster| {
                cluster
                    .iter()
                    .map(|&t| scores[t] - tau)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        excesses.sort_by(f64::total_cmp);
        let params = match fit_gp(&excesses) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let ks = ks_statistic(&excesses, &params);
        if best.as_ref().is_none_or(|(best_ks, ..)| ks < *best_ks) {
            best = Some((ks, tau, excesses.len(), params));
        }
    }
    let Some((_, tau, n_clusters, params)) = best else {
        return Err(Error::fit(
            "excess-model fit failed at every candidate threshold",
        ));
    };
    let p0 = 1.0 - n_clusters as f64 / scores.len() as f64;
    if p <= p0 {
        return empirical.generalized_inverse(p);
    }
    Ok(tau + params.quantile((p - p0) / (1.0 - p0))?)
}

/// Squared modulus of the discrete Fourier sum of the series on the grid
/// `lambda_k = pi k / (8n)`, `k = 1..8n`.
///
/// The defining sum carries a global phase factor from the time origin;
/// the modulus is unaffected, so the sum is evaluated from index 0.
pub fn periodogram(y: &Series) -> Result<Periodogram> {
    if y.is_empty() {
        return Err(Error::data("empty series"));
    }
    if y.missing_count() > 0 {
        return Err(Error::data("periodogram requires a complete series"));
    }
    let n = y.len();
    let m = 8 * n;
    let size = 2 * m;
    let mut buf: Vec<num_complex::Complex<f64>> = y
        .values()
        .iter()
        .map(|&v| num_complex::Complex::new(v, 0.0))
        .collect();
    buf.resize(size, num_complex::Complex::new(0.0, 0.0));
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    let freqs: Vec<f64> = (1..=m).map(|k| std::f64::consts::PI * k as f64 / m as f64).collect();
    let power: Vec<f64> = (1..=m).map(|k| buf[k].norm_sqr()).collect();
    Ok(Periodogram { freqs, power })
}

/// Spectral power `|sum_j y_j e^{-i lambda j}|^2` evaluated directly at
/// arbitrary frequencies.
fn power_at(values: &[f64], freqs: &[f64]) -> Vec<f64> {
    freqs
        .iter()
        .map(|&lambda| {
            let rot = num_complex::Complex::from_polar(1.0, -lambda);
            let mut phase = num_complex::Complex::new(1.0, 0.0);
            let mut acc = num_complex::Complex::new(0.0, 0.0);
            for &v in values {
                acc += phase * v;
                phase *= rot;
            }
            acc.norm_sqr()
        })
        .collect()
}

const D_SEARCH_NODES: usize = 2048;
const D_SEARCH_GRID: usize = 400;
const D_SEARCH_TOLERANCE: f64 = 1e-4;

/// Long-memory parameter estimate: minimizes the trapezoid approximation of
/// `integral of (2 - 2 cos lambda)^d I(lambda) d lambda` over
/// `d in (-1/2, 1 - 1/alpha_hat - 1e-3)`, with the integral taken on
/// `[1/n, pi]`.
///
/// The objective is scanned on a 400-point grid and the best bracket is
/// refined by golden-section search to width 1e-4, which also guards
/// against any departure from unimodality.
pub fn estimate_d(y: &Series, alpha_hat: f64) -> Result<f64> {
    if !(1.0 < alpha_hat && alpha_hat < 2.0) {
        return Err(Error::domain(format!(
            "tail index {alpha_hat} outside (1, 2)"
        )));
    }
    if y.missing_count() > 0 {
        return Err(Error::data("memory estimation requires a complete series"));
    }
    if y.len() < 16 {
        return Err(Error::data("series too short for memory estimation"));
    }
    let n = y.len() as f64;
    let lo_freq = 1.0 / n;
    let hi_freq = std::f64::consts::PI;
    let freqs: Vec<f64> = (0..D_SEARCH_NODES)
        .map(|i| lo_freq + (hi_freq - lo_freq) * i as f64 / (D_SEARCH_NODES - 1) as f64)
        .collect();
    let power = power_at(y.values(), &freqs);
    if power.iter().all(|&p| p <= 0.0) {
        return Err(Error::data("degenerate periodogram: zero power everywhere"));
    }
    let log_kernel: Vec<f64> = freqs.iter().map(|&l| (2.0 - 2.0 * l.cos()).ln()).collect();
    let step = (hi_freq - lo_freq) / (D_SEARCH_NODES - 1) as f64;
    let objective = |d: f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..D_SEARCH_NODES {
            let w = if i == 0 || i == D_SEARCH_NODES - 1 { 0.5 } else { 1.0 };
            acc += w * (d * log_kernel[i]).exp() * power[i];
        }
        acc * step
    };
    let d_lo = -0.5 + 1e-6;
    let d_hi = 1.0 - 1.0 / alpha_hat - 1e-3;
    if d_hi <= d_lo {
        return Err(Error::domain("empty search interval for the memory parameter"));
    }
    let grid_step = (d_hi - d_lo) / (D_SEARCH_GRID - 1) as f64;
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..D_SEARCH_GRID {
        let v = objective(d_lo + grid_step * i as f64);
        if v < best_val {
            best_val = v;
            best_idx = i;
        }
    }
    let mut a = d_lo + grid_step * best_idx.saturating_sub(1) as f64;
    let mut b = (d_lo + grid_step * (best_idx + 1) as f64).min(d_hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    while b - a > D_SEARCH_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    Ok(0.5 * (a + b))
}
