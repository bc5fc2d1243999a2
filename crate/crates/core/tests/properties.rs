use llfit_core::distribution::{cdf, hazard, pdf, quantile, sample, score};
use llfit_core::estimators::{fit_hl_shamos, fit_repeated_median, fit_sm_mad};
use llfit_core::gof::{ks_asymptotic_p_value, ks_exact_p_value, ks_statistic};
use llfit_core::rng::substream;
use llfit_core::robust::{
    hodges_lehmann, mad_scale, median, repeated_median_line_with, shamos_scale, InnerMedian, RmOptions, TieHandling,
    NORMAL_Q3,
};
use llfit_core::simulation::{run_monte_carlo, Parameter, SimulationConfig};
use llfit_core::{fit, FitOptions, HlVariant, LLParams, Method, Sample};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn med(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Distinct values, so no pairwise slope is undefined.
fn distinct(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(-50_000i32..50_000, n)
        .prop_map(|set| set.into_iter().map(|k| k as f64 / 997.0).collect::<Vec<_>>())
        .prop_shuffle()
}

fn params() -> impl Strategy<Value = LLParams> {
    (0.05f64..50.0, 0.2f64..20.0).prop_map(|(a, b)| LLParams::new(a, b).unwrap())
}

fn ll_sample(n: std::ops::Range<usize>) -> impl Strategy<Value = (LLParams, Sample)> {
    (params(), n, any::<u64>()).prop_map(|(p, n, seed)| {
        let s = sample(&p, n, &mut substream(seed, 0)).unwrap();
        (p, s)
    })
}

proptest! {
    #[test]
    fn quantile_inverts_cdf(p in params(), u in 1e-9f64..1.0 - 1e-9) {
        let t = quantile(u, &p).unwrap();
        prop_assert!((cdf(t, &p).unwrap() - u).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_scale_equivariant(p in params(), t in 1e-3f64..1e3, c in 1e-2f64..1e2) {
        let scaled = LLParams::new(c * p.alpha(), p.beta()).unwrap();
        prop_assert!((cdf(c * t, &scaled).unwrap() - cdf(t, &p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn power_closure(p in params(), u in 1e-6f64..1.0 - 1e-6, c in 0.1f64..5.0) {
        let powered = LLParams::new(p.alpha().powf(c), p.beta() / c).unwrap();
        let lhs = quantile(u, &p).unwrap().powf(c);
        prop_assert!(close(lhs, quantile(u, &powered).unwrap(), 1e-10));
    }

    #[test]
    fn hazard_is_density_over_survival(p in params(), u in 1e-4f64..0.999) {
        let t = quantile(u, &p).unwrap();
        let h = pdf(t, &p).unwrap() / (1.0 - cdf(t, &p).unwrap());
        prop_assert!(close(hazard(t, &p).unwrap(), h, 1e-9));
    }

    #[test]
    fn location_estimators_are_affine_equivariant(xs in distinct(1..=40), a in 0.01f64..100.0, b in -100.0f64..100.0) {
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        prop_assert!(close(median(&ys).unwrap(), a * median(&xs).unwrap() + b, 1e-12));
        for v in [HlVariant::StrictPairs, HlVariant::WithSelf] {
            prop_assert!(close(hodges_lehmann(&ys, v).unwrap(), a * hodges_lehmann(&xs, v).unwrap() + b, 1e-12));
        }
    }

    #[test]
    fn scale_estimators_ignore_shifts(xs in distinct(2..=40), a in -100.0f64..100.0, b in -100.0f64..100.0) {
        prop_assume!(a.abs() > 1e-2);
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        prop_assert!(close(mad_scale(&ys).unwrap(), a.abs() * mad_scale(&xs).unwrap(), 1e-10));
        for corr in [false, true] {
            prop_assert!(close(shamos_scale(&ys, corr).unwrap(), a.abs() * shamos_scale(&xs, corr).unwrap(), 1e-10));
        }
    }

    #[test]
    fn repeated_median_is_regression_equivariant(
        xs in distinct(2..=30),
        seed in any::<u64>(),
        a in 0.1f64..10.0,
        b in -10.0f64..10.0,
        c in -10.0f64..10.0,
    ) {
        use rand::Rng;
        let mut rng = substream(seed, 1);
        let ys: Vec<f64> = xs.iter().map(|_| rng.random_range(-5.0..5.0)).collect();
        let yt: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * y + b + c * x).collect();
        for inner in [InnerMedian::Siegel, InnerMedian::Cumulative] {
            let opts = RmOptions { inner, ties: TieHandling::Reject };
            let base = repeated_median_line_with(&xs, &ys, opts).unwrap();
            let t = repeated_median_line_with(&xs, &yt, opts).unwrap();
            prop_assert!(close(t.slope, a * base.slope + c, 1e-9));
            prop_assert!(close(t.intercept, a * base.intercept + b, 1e-9));
        }
    }

    #[test]
    fn siegel_matches_double_loop(xs in distinct(2..=30), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = substream(seed, 2);
        let ys: Vec<f64> = xs.iter().map(|_| rng.random_range(-5.0..5.0)).collect();
        let n = xs.len();
        let rows: Vec<f64> = (0..n)
            .map(|i| med((0..n).filter(|&j| j != i).map(|j| (ys[j] - ys[i]) / (xs[j] - xs[i])).collect()))
            .collect();
        let slope = med(rows);
        let got = repeated_median_line_with(&xs, &ys, RmOptions::SIEGEL).unwrap();
        prop_assert_eq!(got.slope, slope);
        let intercept = med(xs.iter().zip(&ys).map(|(x, y)| y - slope * x).collect());
        prop_assert!(close(got.intercept, intercept, 1e-12));
    }

    #[test]
    fn cumulative_matches_unreset_buffer_loop(xs in distinct(2..=30), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = substream(seed, 3);
        let ys: Vec<f64> = xs.iter().map(|_| rng.random_range(-5.0..5.0)).collect();
        // transcription of the reference loop: the slope buffer is appended to, never cleared
        let n = xs.len();
        let mut buffer = Vec::new();
        let mut rows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    buffer.push((ys[i] - ys[j]) / (xs[i] - xs[j]));
                }
            }
            rows.push(med(buffer.clone()));
        }
        let slope = med(rows);
        let opts = RmOptions { inner: InnerMedian::Cumulative, ties: TieHandling::Reject };
        prop_assert_eq!(repeated_median_line_with(&xs, &ys, opts).unwrap().slope, slope);
    }

    #[test]
    fn shamos_matches_outer_difference_matrix(xs in distinct(2..=30)) {
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut lower = Vec::new();
        for i in 0..n {
            for j in 0..i {
                lower.push(sorted[i] - sorted[j]);
            }
        }
        let expected = med(lower) / (std::f64::consts::SQRT_2 * NORMAL_Q3);
        prop_assert!(close(shamos_scale(&xs, false).unwrap(), expected, 1e-14));
    }

    #[test]
    fn half_corrupted_median_and_rm_stay_in_hull(
        idx in subsequence((0..101).collect::<Vec<usize>>(), 50),
        signs in prop::collection::vec(any::<bool>(), 50),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = substream(seed, 4);
        let xs: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let clean: Vec<f64> = (0..101).map(|i| 0.3 * i as f64 + rng.random_range(-1.0..1.0)).collect();
        let mut dirty = clean.clone();
        for (k, &i) in idx.iter().enumerate() {
            dirty[i] = if signs[k] { 1e9 } else { -1e9 } + k as f64;
        }
        let (lo, hi) = clean.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let m = median(&dirty).unwrap();
        prop_assert!(m.is_finite() && m >= lo && m <= hi);

        let mut slopes = Vec::new();
        for i in 0..101 {
            for j in 0..i {
                slopes.push((clean[i] - clean[j]) / (xs[i] - xs[j]));
            }
        }
        let (slo, shi) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let line = repeated_median_line_with(&xs, &dirty, RmOptions::SIEGEL).unwrap();
        prop_assert!(line.slope.is_finite() && line.slope >= slo && line.slope <= shi);
    }

    #[test]
    fn hl_and_shamos_survive_29_of_101(idx in subsequence((0..101).collect::<Vec<usize>>(), 29), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = substream(seed, 5);
        let mut xs: Vec<f64> = (0..101).map(|_| rng.random_range(-3.0..3.0)).collect();
        for (k, &i) in idx.iter().enumerate() {
            xs[i] = 1e9 * (1.0 + k as f64);
        }
        for v in [HlVariant::StrictPairs, HlVariant::WithSelf] {
            let hl = hodges_lehmann(&xs, v).unwrap();
            prop_assert!(hl.abs() <= 3.0, "{}", hl);
        }
        prop_assert!(shamos_scale(&xs, false).unwrap() < 10.0);
    }

    #[test]
    fn estimators_are_scale_equivariant((_, s) in ll_sample(5..60), c in prop::sample::select(vec![0.1, 1.0, 7.3])) {
        let opts = FitOptions::default();
        let scaled = Sample::new(s.values().iter().map(|v| v * c).collect()).unwrap();
        for m in Method::ALL {
            let (Ok(base), Ok(r)) = (fit(&s, m, &opts), fit(&scaled, m, &opts)) else { continue };
            let tol = if m == Method::Mle { 1e-6 } else { 1e-9 };
            prop_assert!(close(r.alpha(), c * base.alpha(), tol), "{} alpha", m);
            prop_assert!(close(r.beta(), base.beta(), tol), "{} beta", m);
        }
    }

    #[test]
    fn order_statistic_estimators_are_power_equivariant((_, s) in ll_sample(5..60), c in 0.3f64..3.0) {
        let opts = FitOptions::default();
        let powered = Sample::new(s.values().iter().map(|v| v.powf(c)).collect()).unwrap();
        for m in [Method::Mle, Method::Rm, Method::SmMad, Method::HlShamos, Method::Ls] {
            let (Ok(base), Ok(r)) = (fit(&s, m, &opts), fit(&powered, m, &opts)) else { continue };
            let tol = if m == Method::Mle { 1e-6 } else { 1e-9 };
            prop_assert!(close(r.beta(), base.beta() / c, tol), "{} beta", m);
            prop_assert!(close(r.alpha(), base.alpha().powf(c), tol), "{} alpha", m);
        }
    }

    #[test]
    fn mle_solves_score_equations((_, s) in ll_sample(5..200)) {
        if let Ok(r) = fit(&s, Method::Mle, &FitOptions::default()) {
            let (a, b) = score(&s, &r.params);
            prop_assert!(a.abs() < 1e-6 && b.abs() < 1e-6, "{} {}", a, b);
        }
    }

    #[test]
    fn ks_statistic_is_scale_invariant((p, s) in ll_sample(2..80), c in 0.01f64..100.0) {
        let scaled = Sample::new(s.values().iter().map(|v| v * c).collect()).unwrap();
        let ps = LLParams::new(c * p.alpha(), p.beta()).unwrap();
        prop_assert!((ks_statistic(&s, &p) - ks_statistic(&scaled, &ps)).abs() < 1e-12);
    }
}

#[test]
fn density_integrates_to_one() {
    // substitute t = e^z: ∫ f(t) dt = ∫ f(e^z) e^z dz, Simpson on a wide z range
    for beta in [0.5, 1.5, 5.0, 10.0] {
        let p = LLParams::new(1.7, beta).unwrap();
        let (lo, hi) = (p.log_alpha() - 80.0 / beta, p.log_alpha() + 80.0 / beta);
        let k = 20_000;
        let h = (hi - lo) / k as f64;
        let g = |z: f64| pdf(z.exp(), &p).unwrap() * z.exp();
        let mut sum = g(lo) + g(hi);
        for i in 1..k {
            sum += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let total = sum * h / 3.0;
        assert!((total - 1.0).abs() < 1e-9, "beta {beta}: {total}");
    }
}

#[test]
fn ks_tails_match_reference_values() {
    // scipy.stats.kstwo.sf(d, 100) and kstwobign.sf(10 d)
    let table = [
        (0.05, 0.953_215_971_063_572_5, 0.963_945_243_664_875_1),
        (0.08, 0.518_219_364_548_067_2, 0.544_142_411_574_198_1),
        (0.10, 0.252_692_757_006_387_4, 0.269_999_671_677_358_7),
        (0.12, 0.103_303_749_018_198_7, 0.112_249_666_670_721_9),
        (0.15, 0.019_839_242_125_643_017, 0.022_217_962_616_525_127),
    ];
    for (d, exact, limit) in table {
        assert!((ks_exact_p_value(d, 100) - exact).abs() < 1e-10, "exact d={d}");
        assert!((ks_asymptotic_p_value(d, 100) - limit).abs() < 1e-10, "asymptotic d={d}");
        // the limit overstates small-sample tails by O(1/sqrt(n))
        assert!((exact - limit).abs() < 0.03);
    }
}

#[test]
fn breakdown_experiments_on_ll_data() {
    let truth = LLParams::new(1.0, 5.0).unwrap();
    let clean = sample(&truth, 99, &mut substream(42, 0)).unwrap();
    let corrupt = |k: usize| {
        let mut v = clean.values().to_vec();
        for (i, x) in v.iter_mut().rev().take(k).enumerate() {
            *x = 1e9 * (1.0 + i as f64 * 1e-6);
        }
        Sample::new(v).unwrap()
    };
    // finite and far from the corruption level; regression fits do drift,
    // since every corrupted point sits in the upper half of the design
    let bounded = |r: llfit_core::EstimateResult| r.alpha() < 1e6 && r.beta().is_finite() && r.beta() > 0.0;
    for k in [10, 30, 49] {
        assert!(bounded(fit_repeated_median(&corrupt(k)).unwrap()), "RM k={k}");
        assert!(bounded(fit_sm_mad(&corrupt(k)).unwrap()), "SM/MAD k={k}");
    }
    assert!(bounded(fit_hl_shamos(&corrupt(29), HlVariant::WithSelf, false).unwrap()));
    // past half the sample the median itself lands on a corrupted point
    assert!(fit_sm_mad(&corrupt(50)).unwrap().alpha() > 1e8);
}

#[test]
fn clean_rmse_shrinks_with_n() {
    let truth = LLParams::new(1.0, 2.5).unwrap();
    let small = run_monte_carlo(&SimulationConfig::new(10, 400, truth, Method::TABLE.to_vec(), 3)).unwrap();
    let large = run_monte_carlo(&SimulationConfig::new(100, 400, truth, Method::TABLE.to_vec(), 3)).unwrap();
    for m in Method::TABLE {
        for p in [Parameter::Alpha, Parameter::Beta] {
            assert!(large.rmse(m, p).unwrap() < small.rmse(m, p).unwrap(), "{m} {p}");
        }
    }
}
