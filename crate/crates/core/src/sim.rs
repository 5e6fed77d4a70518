//! Seeded simulation of heavy-tailed innovations and linear sample paths.
//!
//! Innovation families: symmetric alpha-stable (characteristic function
//! `exp(-|scale u|^alpha)`), Pareto (survival `(x/scale)^-alpha` on
//! `(scale, inf)`), standard Cauchy, and Gaussian. Paths come from the AR(d)
//! recursion or from finite moving-average convolution. All draws go through
//! one named generator seeded from a 64-bit integer, so identical
//! configurations produce bitwise-identical output.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{check_causal, MaCoefficients};
use crate::series::Series;

/// Name of the random generator, recorded in simulation metadata.
pub const GENERATOR_NAME: &str = "chacha12";

/// Innovation distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InnovationSpec {
    /// Symmetric alpha-stable with characteristic function
    /// `exp(-|scale u|^alpha)`; `alpha = 2` is Gaussian with variance
    /// `2 scale^2`, `alpha = 1` is Cauchy.
    SymmetricAlphaStable {
        alpha: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Pareto on `(scale, inf)` with survival function `(x/scale)^-alpha`.
    Pareto {
        alpha: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Standard Cauchy scaled by `scale`; identical in law to a
    /// t-distribution with one degree of freedom.
    Cauchy {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Centered Gaussian with standard deviation `scale`.
    Gaussian {
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

fn default_scale() -> f64 {
    1.0
}

impl InnovationSpec {
    /// Validates family parameters.
    pub fn validate(&self) -> Result<()> {
        let scale = self.scale();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("scale {scale} must be positive")));
        }
        match *self {
            InnovationSpec::SymmetricAlphaStable { alpha, .. } => {
                // The boundary alpha = 2 is admitted: the sampler is exact
                // there and yields the Gaussian member of the family.
                if !(alpha > 0.0 && alpha <= 2.0) {
                    return Err(Error::domain(format!("stable index {alpha} outside (0, 2]")));
                }
            }
            InnovationSpec::Pareto { alpha, .. } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::domain(format!("pareto index {alpha} must be positive")));
                }
            }
            InnovationSpec::Cauchy { .. } | InnovationSpec::Gaussian { .. } => {}
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        match *self {
            InnovationSpec::SymmetricAlphaStable { scale, .. }
            | InnovationSpec::Pareto { scale, .. }
            | InnovationSpec::Cauchy { scale }
            | InnovationSpec::Gaussian { scale } => scale,
        }
    }

    /// Tail exponent of regular variation, when the family has one.
    pub fn tail_index(&self) -> Option<f64> {
        match *self {
            InnovationSpec::SymmetricAlphaStable { alpha, .. } if alpha < 2.0 => Some(alpha),
            InnovationSpec::SymmetricAlphaStable { .. } => None,
            InnovationSpec::Pareto { alpha, .. } => Some(alpha),
            InnovationSpec::Cauchy { .. } => Some(1.0),
            InnovationSpec::Gaussian { .. } => None,
        }
    }
}

/// Simulation size, seed, and truncation choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Output length, at least 1.
    pub n: usize,
    /// Discarded warm-up prefix; `None` picks 10x the filter memory with a
    /// floor of 1000 for the AR recursion and 0 for the already-stationary
    /// moving-average convolution.
    #[serde(default)]
    pub burn_in: Option<usize>,
    /// Generator seed.
    pub seed: u64,
    /// Number of moving-average coefficients retained; `None` keeps all
    /// provided coefficients.
    #[serde(default)]
    pub truncation: Option<usize>,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("output length must be at least 1"));
        }
        Ok(())
    }
}

/// Default warm-up for a recursion with the given memory.
pub fn default_burn_in(memory: usize) -> usize {
    (10 * memory).max(1000)
}

fn rng_for(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn draw(spec: &InnovationSpec, rng: &mut ChaCha12Rng) -> f64 {
    match *spec {
        InnovationSpec::Gaussian { scale } => {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            scale * z
        }
        InnovationSpec::Cauchy { scale } => {
            let u: f64 = rng.gen();
            scale * (std::f64::consts::PI * (u - 0.5)).tan()
        }
        InnovationSpec::Pareto { alpha, scale } => {
            let u: f64 = rng.gen();
            scale * (1.0 - u).powf(-1.0 / alpha)
        }
        InnovationSpec::SymmetricAlphaStable { alpha, scale } => {
            let u: f64 = rng.gen();
            let v = std::f64::consts::PI * (u - 0.5);
            if alpha == 1.0 {
                return scale * v.tan();
            }
            let w: f64 = rng.sample(rand_distr::Exp1);
            let x = (alpha * v).sin() / v.cos().powf(1.0 / alpha)
                * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
            scale * x
        }
    }
}

/// Draws `cfg.n` independent innovations. Burn-in does not apply to
/// independent draws and is ignored here.
pub fn sample_innovations(spec: &InnovationSpec, cfg: &SimConfig) -> Result<Vec<f64>> {
    spec.validate()?;
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed);
    Ok((0..cfg.n).map(|_| draw(spec, &mut rng)).collect())
}

/// Applies the AR recursion `y_t = sum_i phi_i y_{t-i} + eps_t` from zero
/// initial state; output has the length of `eps`.
pub fn ar_filter(phi: &[f64], eps: &[f64]) -> Vec<f64> {
    let d = phi.len();
    let mut y = Vec::with_capacity(eps.len());
    for (t, e) in eps.iter().enumerate() {
        let mut v = *e;
        for (i, p) in phi.iter().enumerate().take(d.min(t)) {
            v += p * y[t - 1 - i];
        }
        y.push(v);
    }
    y
}

/// Applies the finite moving-average filter `y_t = sum_j kernel_j eps_{t-j}`
/// with `eps_{<0} = 0`; output has the length of `eps`.
pub fn ma_filter(kernel: &[f64], eps: &[f64]) -> Vec<f64> {
    if kernel.len() <= 64 || eps.len() < 2 * kernel.len() {
        let mut y = vec![0.0; eps.len()];
        for (t, slot) in y.iter_mut().enumerate() {
            *slot = kernel
                .iter()
                .take(t + 1)
                .enumerate()
                .map(|(j, k)| k * eps[t - j])
                .sum();
        }
        return y;
    }
    fft_convolve_prefix(kernel, eps)
}

/// Linear convolution of `kernel` with `eps`, truncated to the length of
/// `eps`, via zero-padded FFTs.
fn fft_convolve_prefix(kernel: &[f64], eps: &[f64]) -> Vec<f64> {
    let out_len = eps.len();
    let full = eps.len() + kernel.len() - 1;
    let size = full.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let mut a: Vec<Complex<f64>> = eps
        .iter()
        .map(|v| Complex::new(*v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut b: Vec<Complex<f64>> = kernel
        .iter()
        .map(|v| Complex::new(*v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    fft.process(&mut a);
    fft.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    ifft.process(&mut a);
    let scale = 1.0 / size as f64;
    a.iter().take(out_len).map(|c| c.re * scale).collect()
}

/// Simulates an AR(d) path driven by the given innovations, discarding the
/// warm-up prefix.
pub fn simulate_ar(phi: &[f64], spec: &InnovationSpec, cfg: &SimConfig) -> Result<Series> {
    spec.validate()?;
    cfg.validate()?;
    if !check_causal(phi) {
        return Err(Error::domain("AR coefficients are not causal"));
    }
    let burn = cfg.burn_in.unwrap_or_else(|| default_burn_in(phi.len()));
    let mut rng = rng_for(cfg.seed);
    let eps: Vec<f64> = (0..burn + cfg.n).map(|_| draw(spec, &mut rng)).collect();
    let mut y = ar_filter(phi, &eps);
    y.drain(..burn);
    Series::from_values(y)
}

/// Simulates a finite moving-average path `y_t = sum_{j<K} a_j eps_{t-j}`.
///
/// `K - 1` extra leading innovations are drawn so that every emitted value is
/// a complete K-term convolution; the process is then exactly stationary and
/// the default extra warm-up is 0.
pub fn simulate_ma(a: &MaCoefficients, spec: &InnovationSpec, cfg: &SimConfig) -> Result<Series> {
    spec.validate()?;
    cfg.validate()?;
    let k = cfg.truncation.unwrap_or(a.len());
    if k < 1 {
        return Err(Error::domain("truncation must be at least 1"));
    }
    if k > a.len() {
        return Err(Error::domain(format!(
            "truncation {k} exceeds {} available coefficients",
            a.len()
        )));
    }
    let kernel = &a.as_slice()[..k];
    let burn = cfg.burn_in.unwrap_or(0);
    let m = burn + cfg.n + k - 1;
    let mut rng = rng_for(cfg.seed);
    let eps: Vec<f64> = (0..m).map(|_| draw(spec, &mut rng)).collect();
    let mut y = ma_filter(kernel, &eps);
    y.drain(..burn + k - 1);
    Series::from_values(y)
}
