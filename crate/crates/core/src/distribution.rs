//! The two-parameter log-logistic law LL(α, β).
//!
//! With `w = β (ln t − ln α)` the cdf is the logistic sigmoid of `w`, so every
//! evaluation here goes through `w` and stays finite for very large shapes.

use crate::error::{domain, Result};
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Scale `alpha` and shape `beta` of a log-logistic distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct LLParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for LLParams {
    type Error = crate::Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        LLParams::new(raw.alpha, raw.beta)
    }
}

impl LLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(domain(format!("scale alpha must be finite and > 0, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(domain(format!("shape beta must be finite and > 0, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Logistic location `ln α` of `ln T`.
    pub fn log_alpha(&self) -> f64 {
        self.alpha.ln()
    }

    fn standardized(&self, t: f64) -> f64 {
        self.beta * (t.ln() - self.alpha.ln())
    }
}

/// A non-empty set of strictly positive observations with cached logarithms.
///
/// Values are kept in the order they were supplied; [`Sample::sorted`] gives
/// the order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    log_values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("sample must contain at least one observation"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(domain(format!("observation {i} is not a finite positive value: {v}")));
        }
        let log_values = values.iter().map(|v| v.ln()).collect();
        Ok(Self { values, log_values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// Order statistics, ascending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Logarithms of the order statistics, ascending.
    pub fn sorted_logs(&self) -> Vec<f64> {
        let mut v = self.log_values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Numerically stable logistic sigmoid.
pub(crate) fn sigmoid(w: f64) -> f64 {
    if w >= 0.0 {
        1.0 / (1.0 + (-w).exp())
    } else {
        let e = w.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^w)` without overflow.
pub(crate) fn softplus(w: f64) -> f64 {
    w.max(0.0) + (-w.abs()).exp().ln_1p()
}

fn check_support(t: f64) -> Result<()> {
    if t > 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(domain(format!("log-logistic support is t > 0, got {t}")))
    }
}

pub fn cdf(t: f64, p: &LLParams) -> Result<f64> {
    check_support(t)?;
    if t.is_infinite() {
        return Ok(1.0);
    }
    Ok(sigmoid(p.standardized(t)))
}

pub fn pdf(t: f64, p: &LLParams) -> Result<f64> {
    Ok(log_pdf(t, p)?.exp())
}

/// Log density `ln β − ln t + w − 2 ln(1 + e^w)`.
pub fn log_pdf(t: f64, p: &LLParams) -> Result<f64> {
    check_support(t)?;
    if t.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    let w = p.standardized(t);
    Ok(p.beta.ln() - t.ln() + w - 2.0 * softplus(w))
}

pub fn quantile(u: f64, p: &LLParams) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(domain(format!("quantile level must lie in (0, 1), got {u}")));
    }
    let logit = u.ln() - (-u).ln_1p();
    Ok((p.log_alpha() + logit / p.beta).exp())
}

/// Hazard rate `f(t) / (1 − F(t))`, which simplifies to `(β / t) σ(w)`.
pub fn hazard(t: f64, p: &LLParams) -> Result<f64> {
    check_support(t)?;
    if t.is_infinite() {
        return Ok(0.0);
    }
    Ok(p.beta / t * sigmoid(p.standardized(t)))
}

/// Draws `n` observations by inverse transform of open-interval uniforms.
pub fn sample<R: Rng + ?Sized>(p: &LLParams, n: usize, rng: &mut R) -> Result<Sample> {
    if n == 0 {
        return Err(domain("sample size must be at least 1"));
    }
    from_uniforms(p, (0..n).map(|_| rng.sample::<f64, _>(Open01)))
}

/// Maps each uniform level through [`quantile`].
pub fn from_uniforms(p: &LLParams, us: impl IntoIterator<Item = f64>) -> Result<Sample> {
    let values = us.into_iter().map(|u| quantile(u, p)).collect::<Result<Vec<_>>>()?;
    Sample::new(values)
}

/// `Σ ln f(t_i)`.
pub fn log_likelihood(s: &Sample, p: &LLParams) -> f64 {
    let lb = p.beta.ln();
    let la = p.log_alpha();
    s.log_values
        .iter()
        .map(|&z| {
            let w = p.beta * (z - la);
            lb - z + w - 2.0 * softplus(w)
        })
        .sum()
}

/// Left-hand sides of the two likelihood equations,
/// `2 Σ r/(1+r) − n` and `2β Σ r ln(t/α)/(1+r) − β Σ ln(t/α) − n`
/// with `r = (t/α)^β`.
///
/// In logistic coordinates `μ = ln α`, `v = ln β` these relate to the gradient
/// of the log-likelihood by `∂/∂μ = β · s₀` and `∂/∂v = −s₁`.
pub fn score(s: &Sample, p: &LLParams) -> (f64, f64) {
    let n = s.len() as f64;
    let la = p.log_alpha();
    let (mut sum_sig, mut sum_sig_w, mut sum_w) = (0.0, 0.0, 0.0);
    for &z in &s.log_values {
        let w = p.beta * (z - la);
        let sg = sigmoid(w);
        sum_sig += sg;
        sum_sig_w += sg * w;
        sum_w += w;
    }
    (2.0 * sum_sig - n, 2.0 * sum_sig_w - sum_w - n)
}
