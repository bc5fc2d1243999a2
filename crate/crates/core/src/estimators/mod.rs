//! Estimators mapping a [`Sample`] to fitted log-logistic parameters.
//!
//! All closed-form methods run on `z = ln t`, where LL(α, β) becomes a
//! logistic law with location `ln α` and scale `1/β`.

mod location_scale;
mod mle;
mod percentile;
mod regression;

pub use location_scale::{fit_hl_shamos, fit_sm_mad};
pub use mle::{fit_mle, fit_mle_with, MleOptions, MleSolver};
pub use percentile::{fit_percentile, percentile_breakdown, BreakdownReport, PercentilePair};
pub use regression::{
    fit_least_squares, fit_least_squares_with, fit_repeated_median, fit_repeated_median_with, plotting_positions,
};

use crate::distribution::{LLParams, Sample};
use crate::error::{domain, Error, Result};
use crate::robust::{HlVariant, LineFit, RmOptions};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Estimation method tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mle,
    Pe1,
    Pe2,
    Pe3,
    Rm,
    SmMad,
    HlShamos,
    /// Least-squares regression on the same linearization as `Rm`.
    Ls,
}

impl Method {
    /// The seven methods compared in the published tables, in column order.
    pub const TABLE: [Method; 7] =
        [Method::Mle, Method::Pe1, Method::Pe2, Method::Pe3, Method::Rm, Method::SmMad, Method::HlShamos];

    /// The five methods fitted to the insulating-fluid data.
    pub const REAL_DATA: [Method; 5] = [Method::Mle, Method::Pe3, Method::Rm, Method::SmMad, Method::HlShamos];

    pub const ALL: [Method; 8] =
        [Method::Mle, Method::Pe1, Method::Pe2, Method::Pe3, Method::Rm, Method::SmMad, Method::HlShamos, Method::Ls];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::Mle => "mle",
            Method::Pe1 => "pe1",
            Method::Pe2 => "pe2",
            Method::Pe3 => "pe3",
            Method::Rm => "rm",
            Method::SmMad => "sm-mad",
            Method::HlShamos => "hl-shamos",
            Method::Ls => "ls",
        }
    }

    /// Column label as printed in the result tables.
    pub fn label(&self) -> &'static str {
        match self {
            Method::Mle => "MLE",
            Method::Pe1 => "PE1",
            Method::Pe2 => "PE2",
            Method::Pe3 => "PE3",
            Method::Rm => "RM",
            Method::SmMad => "SM/MAD",
            Method::HlShamos => "HL/Shamos",
            Method::Ls => "LS",
        }
    }

    pub fn percentile_pair(&self) -> Option<PercentilePair> {
        match self {
            Method::Pe1 => Some(PercentilePair::PE1),
            Method::Pe2 => Some(PercentilePair::PE2),
            Method::Pe3 => Some(PercentilePair::PE3),
            _ => None,
        }
    }

    /// Parses a comma-separated list; `all` expands to [`Method::TABLE`].
    pub fn parse_list(list: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(Method::TABLE);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(domain("no estimation methods given"));
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|m| seen.insert(*m));
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Method::ALL.into_iter().find(|m| m.tag() == lower).ok_or_else(|| domain(format!("unknown method '{s}'")))
    }
}

/// Knobs shared by every estimator that has a variant choice.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitOptions {
    pub rm: RmOptions,
    pub hl_variant: HlVariant,
    pub shamos_correction: bool,
    pub mle: MleOptions,
}

/// Method-specific details of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostics {
    Mle { iterations: usize, score_norm: f64, solver: MleSolver },
    Percentile { pair: PercentilePair, t_low: f64, t_high: f64 },
    Regression { line: LineFit },
    LocationScale { location: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub params: LLParams,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl EstimateResult {
    pub fn alpha(&self) -> f64 {
        self.params.alpha()
    }

    pub fn beta(&self) -> f64 {
        self.params.beta()
    }
}

/// Fits `method` to `s` under `opts`.
pub fn fit(s: &Sample, method: Method, opts: &FitOptions) -> Result<EstimateResult> {
    match method {
        Method::Mle => fit_mle_with(s, None, opts),
        Method::Pe1 | Method::Pe2 | Method::Pe3 => {
            let mut r = fit_percentile(s, method.percentile_pair().expect("percentile method"))?;
            r.method = method;
            Ok(r)
        }
        Method::Rm => fit_repeated_median_with(s, opts.rm),
        Method::SmMad => fit_sm_mad(s),
        Method::HlShamos => fit_hl_shamos(s, opts.hl_variant, opts.shamos_correction),
        Method::Ls => fit_least_squares_with(s, opts.rm.ties),
    }
}

pub(crate) fn shape_from_scale(scale: f64, estimator: &'static str) -> Result<f64> {
    if scale > 0.0 && scale.is_finite() {
        Ok(1.0 / scale)
    } else {
        Err(Error::DegenerateScale { estimator })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.tag().parse::<Method>().unwrap(), m);
        }
        assert!("foo".parse::<Method>().is_err());
    }

    #[test]
    fn all_expands_to_table_methods() {
        assert_eq!(Method::parse_list("all").unwrap(), Method::TABLE.to_vec());
        assert_eq!(Method::parse_list("rm, ls,rm").unwrap(), vec![Method::Rm, Method::Ls]);
        assert!(Method::parse_list(" , ").is_err());
        assert!(!Method::parse_list("all").unwrap().contains(&Method::Ls));
    }
}
