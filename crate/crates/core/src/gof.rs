//! One-sample Kolmogorov-Smirnov test against a fitted log-logistic law.

use crate::distribution::{cdf, quantile, LLParams, Sample};
use crate::estimators::{plotting_positions, EstimateResult, Method};
use serde::{Deserialize, Serialize};

/// Largest sample size for which [`ks_p_value`] uses the exact null
/// distribution.
pub const EXACT_MAX_N: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub d_statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub method: Method,
}

/// `D = max_i max(i/n − F(t_(i)), F(t_(i)) − (i−1)/n)`.
pub fn ks_statistic(s: &Sample, p: &LLParams) -> f64 {
    let sorted = s.sorted();
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = cdf(t, p).expect("sample values are positive");
            let i = i as f64;
            ((i + 1.0) / n - f).max(f - i / n)
        })
        .fold(0.0, f64::max)
}

/// Upper-tail probability `P(D_n ≥ d)` under the simple null hypothesis.
///
/// Exact for `n ≤ 100`, Kolmogorov's limiting distribution otherwise.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    if n <= EXACT_MAX_N {
        ks_exact_p_value(d, n)
    } else {
        ks_asymptotic_p_value(d, n)
    }
}

/// `1 − P(D_n < d)` with the CDF from the Marsaglia–Tsang–Wang matrix power.
pub fn ks_exact_p_value(d: f64, n: usize) -> f64 {
    (1.0 - ks_exact_cdf(d, n)).clamp(0.0, 1.0)
}

/// `P(D_n < d)`, following Marsaglia, Tsang & Wang (2003).
pub fn ks_exact_cdf(d: f64, n: usize) -> f64 {
    assert!(n >= 1, "KS distribution needs n >= 1");
    if d.is_nan() || d <= 0.0 {
        return 0.0;
    }
    if d >= 1.0 {
        return 1.0;
    }
    let nf = n as f64;
    let k = (nf * d).floor() as usize + 1;
    let m = 2 * k - 1;
    let h = k as f64 - nf * d;

    let mut hm = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i + 1 >= j {
                hm[i * m + j] = 1.0;
            }
        }
    }
    for i in 0..m {
        hm[i * m] -= h.powi(i as i32 + 1);
        hm[(m - 1) * m + i] -= h.powi((m - i) as i32);
    }
    if 2.0 * h - 1.0 > 0.0 {
        hm[(m - 1) * m] += (2.0 * h - 1.0).powi(m as i32);
    }
    for i in 0..m {
        for j in 0..m {
            if i + 1 > j {
                for g in 1..=(i + 1 - j) {
                    hm[i * m + j] /= g as f64;
                }
            }
        }
    }

    let (q, mut exp10) = matrix_power(&hm, m, n);
    let mut s = q[(k - 1) * m + (k - 1)];
    for i in 1..=n {
        s *= i as f64 / nf;
        if s < 1e-140 {
            s *= 1e140;
            exp10 -= 140;
        }
    }
    s * 10f64.powi(exp10)
}

fn matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for l in 0..m {
            let a_il = a[i * m + l];
            if a_il == 0.0 {
                continue;
            }
            for j in 0..m {
                c[i * m + j] += a_il * b[l * m + j];
            }
        }
    }
    c
}

/// `A^n` as a mantissa matrix and a power-of-ten exponent.
fn matrix_power(a: &[f64], m: usize, n: usize) -> (Vec<f64>, i32) {
    if n == 1 {
        return (a.to_vec(), 0);
    }
    let (half, e_half) = matrix_power(a, m, n / 2);
    let mut v = matmul(&half, &half, m);
    let mut e = 2 * e_half;
    if n % 2 == 1 {
        v = matmul(a, &v, m);
    }
    let center = (m / 2) * m + m / 2;
    if v[center] > 1e140 {
        for x in v.iter_mut() {
            *x *= 1e-140;
        }
        e += 140;
    }
    (v, e)
}

/// Kolmogorov's limit `2 Σ (−1)^{k−1} exp(−2 k² n d²)`.
///
/// For small `z = √n d` the alternating series converges slowly and the
/// equivalent theta-function form `1 − √(2π)/z Σ exp(−(2k−1)² π² / (8 z²))`
/// is summed instead.
pub fn ks_asymptotic_p_value(d: f64, n: usize) -> f64 {
    if d.is_nan() || d <= 0.0 {
        return 1.0;
    }
    let z = (n as f64).sqrt() * d;
    let p = if z < 1.18 {
        let pi2 = std::f64::consts::PI.powi(2);
        let cdf: f64 = (1..=20)
            .map(|k| {
                let odd = (2 * k - 1) as f64;
                (-odd * odd * pi2 / (8.0 * z * z)).exp()
            })
            .sum::<f64>()
            * (2.0 * std::f64::consts::PI).sqrt()
            / z;
        1.0 - cdf
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * z * z).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-17 {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// `(quantile(F_i), t_(i))` pairs with `F_i = i / (n + 1)`, ascending.
pub fn qq_points(s: &Sample, p: &LLParams) -> Vec<(f64, f64)> {
    let sorted = s.sorted();
    plotting_positions(sorted.len())
        .into_iter()
        .zip(sorted)
        .map(|(f, t)| (quantile(f, p).expect("plotting positions lie in (0, 1)"), t))
        .collect()
}

/// KS statistic and p-value of a fitted model on the data it was fitted to.
///
/// The p-value uses the fully specified null and ignores that the parameters
/// were estimated from the same data.
pub fn gof_report(s: &Sample, fit: &EstimateResult) -> GofReport {
    let d = ks_statistic(s, &fit.params);
    GofReport { d_statistic: d, p_value: ks_p_value(d, s.len()), n: s.len(), method: fit.method }
}
