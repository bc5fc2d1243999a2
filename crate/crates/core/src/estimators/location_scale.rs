use super::{shape_from_scale, Diagnostics, EstimateResult, Method};
use crate::distribution::{LLParams, Sample};
use crate::error::{domain, Result};
use crate::robust::{hodges_lehmann, mad_scale, median, shamos_scale, HlVariant};

fn build(location: f64, scale: f64, estimator: &'static str, method: Method) -> Result<EstimateResult> {
    let beta = shape_from_scale(scale, estimator)?;
    Ok(EstimateResult {
        params: LLParams::new(location.exp(), beta)?,
        method,
        diagnostics: Diagnostics::LocationScale { location, scale },
    })
}

/// `α̂ = exp(med z)`, `β̂ = 1 / MAD(z)`.
pub fn fit_sm_mad(s: &Sample) -> Result<EstimateResult> {
    if s.len() < 2 {
        return Err(domain("SM/MAD needs at least two observations"));
    }
    let z = s.log_values();
    build(median(z)?, mad_scale(z)?, "MAD", Method::SmMad)
}

/// `α̂ = exp(HL(z))`, `β̂ = 1 / Shamos(z)`.
pub fn fit_hl_shamos(s: &Sample, variant: HlVariant, shamos_correction: bool) -> Result<EstimateResult> {
    if s.len() < 2 {
        return Err(domain("HL/Shamos needs at least two observations"));
    }
    let z = s.log_values();
    build(hodges_lehmann(z, variant)?, shamos_scale(z, shamos_correction)?, "Shamos", Method::HlShamos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::f64::consts::E;

    #[test]
    fn sm_mad_scale_equivariance() {
        let s = Sample::new(vec![0.4, 1.2, 2.5, 3.3, 8.0, 9.1]).unwrap();
        let base = fit_sm_mad(&s).unwrap();
        let scaled = Sample::new(s.values().iter().map(|v| v * 7.3).collect()).unwrap();
        let r = fit_sm_mad(&scaled).unwrap();
        assert!((r.alpha() - 7.3 * base.alpha()).abs() < 1e-12);
        assert!((r.beta() - base.beta()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_scale() {
        let s = Sample::new(vec![2.0; 5]).unwrap();
        assert!(matches!(fit_sm_mad(&s), Err(Error::DegenerateScale { .. })));
        assert!(matches!(fit_hl_shamos(&s, HlVariant::WithSelf, false), Err(Error::DegenerateScale { .. })));
    }

    #[test]
    fn two_point_hand_evaluation() {
        let s = Sample::new(vec![1.0, E * E]).unwrap();
        let r = fit_hl_shamos(&s, HlVariant::StrictPairs, false).unwrap();
        assert!((r.alpha() - E).abs() < 1e-12);
        let expected = 1.0 / shamos_scale(&[0.0, 2.0], false).unwrap();
        assert!((r.beta() - expected).abs() < 1e-12);
    }

    #[test]
    fn power_transform() {
        let s = Sample::new(vec![0.4, 1.2, 2.5, 3.3, 8.0, 9.1, 12.0]).unwrap();
        let base = fit_hl_shamos(&s, HlVariant::WithSelf, false).unwrap();
        let c = 2.5;
        let powered = Sample::new(s.values().iter().map(|v| v.powf(c)).collect()).unwrap();
        let r = fit_hl_shamos(&powered, HlVariant::WithSelf, false).unwrap();
        assert!((r.beta() - base.beta() / c).abs() < 1e-12);
        assert!((r.alpha() - base.alpha().powf(c)).abs() < 1e-9 * r.alpha());
    }
}
