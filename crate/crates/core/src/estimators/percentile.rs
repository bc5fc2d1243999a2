use super::{Diagnostics, EstimateResult, Method};
use crate::distribution::{LLParams, Sample};
use crate::error::{domain, Error, Result};
use crate::robust::quantile_sorted;
use serde::{Deserialize, Serialize};

/// Low and high probability levels `0 < l < h < 1` of a percentile estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentilePair {
    l: f64,
    h: f64,
}

impl PercentilePair {
    pub const PE1: PercentilePair = PercentilePair { l: 0.05, h: 0.95 };
    pub const PE2: PercentilePair = PercentilePair { l: 0.10, h: 0.90 };
    pub const PE3: PercentilePair = PercentilePair { l: 0.33, h: 0.67 };

    pub fn new(l: f64, h: f64) -> Result<Self> {
        if 0.0 < l && l < h && h < 1.0 {
            Ok(Self { l, h })
        } else {
            Err(domain(format!("percentile levels must satisfy 0 < l < h < 1, got l={l}, h={h}")))
        }
    }

    pub fn low(&self) -> f64 {
        self.l
    }

    pub fn high(&self) -> f64 {
        self.h
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Inverts the quantile function at the two sample percentiles:
/// `β̂ = [logit h − logit l] / ln(t_h / t_l)` and `α̂ = t_l (l/(1−l))^(−1/β̂)`.
///
/// For symmetric pairs the numerator equals `2 [ln h − ln l]`. Pairs other
/// than the presets are tagged [`Method::Pe3`]; the diagnostics carry the
/// levels actually used.
pub fn fit_percentile(s: &Sample, pair: PercentilePair) -> Result<EstimateResult> {
    if s.len() < 2 {
        return Err(domain("percentile estimator needs at least two observations"));
    }
    let sorted = s.sorted();
    let t_low = quantile_sorted(&sorted, pair.l);
    let t_high = quantile_sorted(&sorted, pair.h);
    if t_high <= t_low {
        return Err(Error::Explosion { value: t_low });
    }
    let beta = (logit(pair.h) - logit(pair.l)) / (t_high / t_low).ln();
    let alpha = (t_low.ln() - logit(pair.l) / beta).exp();
    let method = if pair == PercentilePair::PE1 {
        Method::Pe1
    } else if pair == PercentilePair::PE2 {
        Method::Pe2
    } else {
        Method::Pe3
    };
    Ok(EstimateResult {
        params: LLParams::new(alpha, beta)?,
        method,
        diagnostics: Diagnostics::Percentile { pair, t_low, t_high },
    })
}

/// Asymptotic breakdown points of the percentile estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakdownReport {
    pub kappa_alpha: f64,
    pub kappa_beta: f64,
}

/// `κ_β = min(1−l, h−l, 1−h)` and `κ_α = min(h, 1−l)`.
pub fn percentile_breakdown(pair: PercentilePair) -> BreakdownReport {
    let PercentilePair { l, h } = pair;
    BreakdownReport { kappa_alpha: h.min(1.0 - l), kappa_beta: (1.0 - l).min(h - l).min(1.0 - h) }
}
