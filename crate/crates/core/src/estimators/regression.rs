//! Regression on the linearized cdf: `logit F(t_(i)) = −β ln α + β ln t_(i)`.

use super::{Diagnostics, EstimateResult, Method};
use crate::distribution::{LLParams, Sample};
use crate::error::{domain, Error, Result};
use crate::robust::{least_squares_line, repeated_median_line_with, LineFit, RmOptions, TieHandling};

/// `F_i = i / (n + 1)` for `i = 1..=n`.
pub fn plotting_positions(n: usize) -> Vec<f64> {
    let denom = (n + 1) as f64;
    (1..=n).map(|i| i as f64 / denom).collect()
}

/// Regression design: `x_i = ln t_(i)`, `y_i = ln[(1 − F_i)⁻¹ − 1]`.
fn design(s: &Sample) -> Result<(Vec<f64>, Vec<f64>)> {
    if s.len() < 2 {
        return Err(domain("regression estimators need at least two observations"));
    }
    let xs = s.sorted_logs();
    let ys = plotting_positions(s.len()).into_iter().map(|f| (1.0 / (1.0 - f) - 1.0).ln()).collect();
    Ok((xs, ys))
}

fn reject_ties(xs: &[f64]) -> Result<()> {
    // xs is sorted
    match xs.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::Ties { value: w[0].exp() }),
        None => Ok(()),
    }
}

fn from_line(line: LineFit, method: Method) -> Result<EstimateResult> {
    let beta = line.slope;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::NonIdentifiable { slope: beta });
    }
    let alpha = (-line.intercept / beta).exp();
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::NonIdentifiable { slope: beta });
    }
    Ok(EstimateResult { params: LLParams::new(alpha, beta)?, method, diagnostics: Diagnostics::Regression { line } })
}

/// Repeated-median fit with the default [`RmOptions`].
pub fn fit_repeated_median(s: &Sample) -> Result<EstimateResult> {
    fit_repeated_median_with(s, RmOptions::default())
}

pub fn fit_repeated_median_with(s: &Sample, opts: RmOptions) -> Result<EstimateResult> {
    let (xs, ys) = design(s)?;
    if opts.ties == TieHandling::Reject {
        reject_ties(&xs)?;
    }
    from_line(repeated_median_line_with(&xs, &ys, opts)?, Method::Rm)
}

/// Least-squares fit; tied observations are rejected.
pub fn fit_least_squares(s: &Sample) -> Result<EstimateResult> {
    fit_least_squares_with(s, TieHandling::Reject)
}

/// Least-squares fit. Ties are harmless to least squares, so
/// [`TieHandling::SignedInfinity`] simply accepts them.
pub fn fit_least_squares_with(s: &Sample, ties: TieHandling) -> Result<EstimateResult> {
    let (xs, ys) = design(s)?;
    if ties == TieHandling::Reject {
        reject_ties(&xs)?;
    }
    from_line(least_squares_line(&xs, &ys)?, Method::Ls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::from_uniforms;
    use crate::robust::InnerMedian;

    #[test]
    fn plotting_position_values() {
        assert_eq!(plotting_positions(1), vec![0.5]);
        assert_eq!(plotting_positions(3), vec![0.25, 0.5, 0.75]);
        assert_eq!(plotting_positions(19)[0], 0.05);
        assert!(plotting_positions(0).is_empty());
    }

    fn exact(a: f64, b: f64, n: usize) -> Sample {
        let p = LLParams::new(a, b).unwrap();
        from_uniforms(&p, plotting_positions(n)).unwrap()
    }

    #[test]
    fn collinear_data_recovered_exactly() {
        let s = exact(2.0, 4.0, 30);
        for inner in [InnerMedian::Siegel, InnerMedian::Cumulative] {
            let r = fit_repeated_median_with(&s, RmOptions { inner, ties: TieHandling::Reject }).unwrap();
            assert!((r.alpha() - 2.0).abs() < 1e-8 && (r.beta() - 4.0).abs() < 1e-8);
        }
        let r = fit_least_squares(&s).unwrap();
        assert!((r.alpha() - 2.0).abs() < 1e-8 && (r.beta() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn ties_and_tiny_samples() {
        let s = Sample::new(vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        assert!(matches!(fit_repeated_median(&s), Err(Error::Ties { .. })));
        assert!(matches!(fit_least_squares(&s), Err(Error::Ties { .. })));
        assert!(fit_least_squares_with(&s, TieHandling::SignedInfinity).is_ok());
        let one = Sample::new(vec![3.0]).unwrap();
        assert!(fit_least_squares(&one).is_err());
        assert!(fit_repeated_median(&one).is_err());
    }

    #[test]
    fn rm_resists_outliers_where_ls_does_not() {
        use rand::SeedableRng;
        let truth = LLParams::new(1.0, 10.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let clean = crate::distribution::sample(&truth, 25, &mut rng).unwrap();
        let mut dirty = clean.clone().into_values();
        dirty[0] = 1e6;
        let dirty = Sample::new(dirty).unwrap();
        let shift = |f: fn(&Sample) -> Result<EstimateResult>| {
            let a = f(&clean).unwrap().beta();
            let b = f(&dirty).unwrap().beta();
            ((b - a) / a).abs()
        };
        let ls = shift(fit_least_squares);
        let rm = shift(fit_repeated_median);
        assert!(ls > 0.5, "ls shift {ls}");
        assert!(rm < 0.05, "rm shift {rm}");
    }

    #[test]
    fn rm_robust_to_ten_percent_gross_outliers() {
        use rand::SeedableRng;
        let truth = LLParams::new(1.0, 10.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let clean = crate::distribution::sample(&truth, 50, &mut rng).unwrap();
        let base = fit_repeated_median(&clean).unwrap().beta();
        let mut dirty = clean.into_values();
        for (k, v) in dirty.iter_mut().take(5).enumerate() {
            *v = 1e6 * (1.0 + k as f64 * 1e-3);
        }
        let r = fit_repeated_median(&Sample::new(dirty).unwrap()).unwrap();
        assert!(((r.beta() - base) / base).abs() < 0.25, "{} vs {base}", r.beta());
    }
}
