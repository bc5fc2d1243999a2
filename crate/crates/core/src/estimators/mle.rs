//! Maximum likelihood by damped Newton iteration in `(μ, v) = (ln α, ln β)`.
//!
//! Writing `w_i = β (z_i − μ)` and `σ_i = σ(w_i)`, the gradient is
//!
//! ```text
//! ∂ℓ/∂μ = β (2 Σ σ_i − n)
//! ∂ℓ/∂v = n + Σ w_i − 2 Σ σ_i w_i
//! ```
//!
//! and the Hessian
//!
//! ```text
//! ∂²ℓ/∂μ²  = −2 β² Σ σ_i (1 − σ_i)
//! ∂²ℓ/∂μ∂v = ∂ℓ/∂μ + 2 β Σ σ_i (1 − σ_i) w_i
//! ∂²ℓ/∂v²  = Σ w_i − 2 Σ σ_i w_i − 2 Σ σ_i (1 − σ_i) w_i²
//! ```
//!
//! Convergence is judged on the two likelihood equations returned by
//! [`crate::distribution::score`].

use super::{fit_repeated_median_with, Diagnostics, EstimateResult, FitOptions, Method};
use crate::distribution::{sigmoid, softplus, LLParams, Sample};
use crate::error::{domain, Error, Result};
use crate::robust::{InnerMedian, RmOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    /// Bound on the max-norm of the likelihood equations.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 200 }
    }
}

/// Which path produced the reported optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MleSolver {
    Newton,
    /// Newton stalled; a Nelder-Mead pass supplied a new start for Newton.
    SimplexThenNewton,
}

struct Eval {
    ll: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
    score_norm: f64,
}

struct Objective<'a> {
    z: &'a [f64],
}

impl Objective<'_> {
    fn ll(&self, mu: f64, v: f64) -> f64 {
        let beta = v.exp();
        if !beta.is_finite() {
            return f64::NEG_INFINITY;
        }
        self.z
            .iter()
            .map(|&z| {
                let w = beta * (z - mu);
                v - z + w - 2.0 * softplus(w)
            })
            .sum()
    }

    fn eval(&self, mu: f64, v: f64) -> Eval {
        let n = self.z.len() as f64;
        let beta = v.exp();
        let (mut ll, mut s_sig, mut s_w, mut s_sig_w, mut s_q, mut s_qw, mut s_qww) =
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &z in self.z {
            let w = beta * (z - mu);
            let sg = sigmoid(w);
            let q = sg * (1.0 - sg);
            ll += v - z + w - 2.0 * softplus(w);
            s_sig += sg;
            s_w += w;
            s_sig_w += sg * w;
            s_q += q;
            s_qw += q * w;
            s_qww += q * w * w;
        }
        let score0 = 2.0 * s_sig - n;
        let score1 = 2.0 * s_sig_w - s_w - n;
        let g_mu = beta * score0;
        let g_v = -score1;
        let h_mumu = -2.0 * beta * beta * s_q;
        let h_muv = g_mu + 2.0 * beta * s_qw;
        let h_vv = s_w - 2.0 * s_sig_w - 2.0 * s_qww;
        Eval {
            ll,
            grad: [g_mu, g_v],
            hess: [[h_mumu, h_muv], [h_muv, h_vv]],
            score_norm: score0.abs().max(score1.abs()),
        }
    }
}

/// Newton direction when the Hessian is negative definite, otherwise a
/// scaled gradient step.
fn direction(e: &Eval) -> [f64; 2] {
    let [[a, b], [_, d]] = e.hess;
    let det = a * d - b * b;
    let [g0, g1] = e.grad;
    let mut step = if a < 0.0 && det > 0.0 {
        [-(d * g0 - b * g1) / det, -(a * g1 - b * g0) / det]
    } else {
        let scale = 1.0 / (1.0 + a.abs().max(d.abs()));
        [g0 * scale, g1 * scale]
    };
    let big = step[0].abs().max(step[1].abs());
    if big > 1.0 {
        step = [step[0] / big, step[1] / big];
    }
    step
}

enum Outcome {
    Converged { theta: [f64; 2], iterations: usize, score_norm: f64 },
    Stalled { theta: [f64; 2], iterations: usize, score_norm: f64 },
}

fn newton(obj: &Objective, start: [f64; 2], opts: &MleOptions) -> Outcome {
    let mut theta = start;
    let mut e = obj.eval(theta[0], theta[1]);
    for iter in 0..opts.max_iter {
        if e.score_norm < opts.tol {
            return Outcome::Converged { theta, iterations: iter, score_norm: e.score_norm };
        }
        let d = direction(&e);
        let slack = 1e-12 * e.ll.abs().max(1.0);
        let mut t = 1.0;
        let accepted = loop {
            let cand = [theta[0] + t * d[0], theta[1] + t * d[1]];
            let ce = obj.eval(cand[0], cand[1]);
            if ce.ll.is_finite() && ce.ll >= e.ll - slack {
                break Some((cand, ce));
            }
            t *= 0.5;
            if t < 1e-12 {
                break None;
            }
        };
        match accepted {
            Some((cand, ce)) => {
                theta = cand;
                e = ce;
            }
            None => {
                return Outcome::Stalled { theta, iterations: iter, score_norm: e.score_norm };
            }
        }
    }
    if e.score_norm < opts.tol {
        Outcome::Converged { theta, iterations: opts.max_iter, score_norm: e.score_norm }
    } else {
        Outcome::Stalled { theta, iterations: opts.max_iter, score_norm: e.score_norm }
    }
}

/// Nelder-Mead on `−ℓ` in two dimensions.
fn simplex(obj: &Objective, start: [f64; 2], max_evals: usize) -> [f64; 2] {
    let f = |p: &[f64; 2]| -obj.ll(p[0], p[1]);
    let mut pts = [start, [start[0] + 0.5, start[1]], [start[0], start[1] + 0.5]];
    let mut vals = pts.map(|p| f(&p));
    let mut evals = 3;
    while evals < max_evals {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);
        if (vals[2] - vals[0]).abs() <= 1e-14 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |c: f64| [centroid[0] + c * (pts[2][0] - centroid[0]), centroid[1] + c * (pts[2][1] - centroid[1])];
        let refl = along(-1.0);
        let fr = f(&refl);
        evals += 1;
        if fr < vals[0] {
            let exp = along(-2.0);
            let fe = f(&exp);
            evals += 1;
            if fe < fr {
                pts[2] = exp;
                vals[2] = fe;
            } else {
                pts[2] = refl;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = refl;
            vals[2] = fr;
        } else {
            let con = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(&con);
            evals += 1;
            if fc < vals[2].min(fr) {
                pts[2] = con;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    pts[k] = [(pts[0][0] + pts[k][0]) / 2.0, (pts[0][1] + pts[k][1]) / 2.0];
                    vals[k] = f(&pts[k]);
                }
                evals += 2;
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("three vertices");
    pts[best]
}

/// Logistic moment start: `μ = mean z`, `β = π / (√3 sd z)`.
fn moment_start(z: &[f64]) -> [f64; 2] {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let beta = std::f64::consts::PI / (3.0 * var).sqrt();
    [mean, beta.ln()]
}

/// Maximum likelihood fit, starting from Siegel's repeated-median estimate unless
/// `start` is given.
pub fn fit_mle(s: &Sample, tol: f64, max_iter: usize, start: Option<LLParams>) -> Result<EstimateResult> {
    let opts = FitOptions { mle: MleOptions { tol, max_iter }, ..FitOptions::default() };
    fit_mle_with(s, start, &opts)
}

pub fn fit_mle_with(s: &Sample, start: Option<LLParams>, opts: &FitOptions) -> Result<EstimateResult> {
    if s.len() < 2 {
        return Err(domain("MLE needs at least two observations"));
    }
    let z = s.log_values();
    if z.iter().all(|&v| v == z[0]) {
        return Err(domain("MLE is undefined when all observations are equal"));
    }
    let mle = &opts.mle;
    let start = match start {
        Some(p) => [p.log_alpha(), p.beta().ln()],
        // Siegel's inner medians cost O(n^2) against O(n^3) for the pooled ones
        None => match fit_repeated_median_with(s, RmOptions { inner: InnerMedian::Siegel, ..opts.rm }) {
            Ok(r) => [r.params.log_alpha(), r.beta().ln()],
            Err(_) => moment_start(z),
        },
    };
    let obj = Objective { z };
    let finish = |theta: [f64; 2], iterations, score_norm, solver| -> Result<EstimateResult> {
        Ok(EstimateResult {
            params: LLParams::new(theta[0].exp(), theta[1].exp())?,
            method: Method::Mle,
            diagnostics: Diagnostics::Mle { iterations, score_norm, solver },
        })
    };
    let (theta, used) = match newton(&obj, start, mle) {
        Outcome::Converged { theta, iterations, score_norm } => {
            return finish(theta, iterations, score_norm, MleSolver::Newton);
        }
        Outcome::Stalled { theta, iterations, .. } => (theta, iterations),
    };
    let restart = simplex(&obj, theta, 4000);
    // max_iter bounds the Newton iterations of both passes together
    let remaining = MleOptions { max_iter: mle.max_iter - used, ..*mle };
    match newton(&obj, restart, &remaining) {
        Outcome::Converged { theta, iterations, score_norm } => {
            finish(theta, used + iterations, score_norm, MleSolver::SimplexThenNewton)
        }
        Outcome::Stalled { theta, iterations, score_norm } => Err(Error::NonConvergence {
            best: LLParams::new(theta[0].exp(), theta[1].exp())?,
            iterations: used + iterations,
            score_norm,
        }),
    }
}
