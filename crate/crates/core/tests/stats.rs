use ipsim_core::dynamics::LocalRule;
use ipsim_core::graph::{Graph, Region};
use ipsim_core::simulate::{gillespie, run_replicas, EmpiricalSeries, ReplicaOutput, ReplicaPlan};
use ipsim_core::stats::{
    anderson_darling, clt_check, covariance_with_se, estimate_moments, hitting_analysis, kout_of_n,
    ks_statistic, lilliefors_critical, mean_sd, normality_test, HittingOptions,
};
use ipsim_core::Error;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn degradation_replicas(side: usize, grid: &[f64], t_end: f64, n: usize, seed: u64, threshold: Option<f64>) -> Vec<ReplicaOutput> {
    let g = Graph::torus(2, side).unwrap();
    let rule = LocalRule::pure_degradation(2, 1.0).unwrap();
    let region = Region::whole(&g);
    let eta0 = vec![0; g.len()];
    let plan = ReplicaPlan {
        graph: &g,
        rule: &rule,
        initial: &eta0,
        t_end,
        grid,
        region: &region,
        degradation: Some(&[0.0, 1.0]),
        threshold,
        keep_logs: false,
        seed,
    };
    run_replicas(&plan, n, None).unwrap()
}

fn series(out: &[ReplicaOutput]) -> Vec<EmpiricalSeries> {
    out.iter().map(|o| o.series.clone()).collect()
}

fn p(t: f64) -> f64 {
    1.0 - (-t).exp()
}

#[test]
fn moments_match_independent_sites() {
    let grid = [0.0, 0.3, 0.7, 1.2];
    let out = degradation_replicas(10, &grid, 1.2, 3000, 12, None);
    let est = estimate_moments(&series(&out), &[0.0, 1.0], &[1, 2, 3]).unwrap();
    assert_eq!(est.v[0], 0.0);
    assert_eq!(est.m[0], 0.0);
    for (i, &t) in grid.iter().enumerate().skip(1) {
        assert!((est.m[i] - p(t)).abs() <= 3.0 * est.se_m[i], "m at {t}");
        assert!((est.v[i] - p(t) * (1.0 - p(t))).abs() <= 3.0 * est.se_v[i], "v at {t}");
    }
    for &(s, t) in &[(0.3, 0.7), (0.3, 1.2), (0.7, 1.2), (0.7, 0.7)] {
        let e = est.gamma_at(s, t, 1, 1).unwrap();
        let exact = p(s) * (1.0 - p(t));
        assert!((e.cov - exact).abs() <= 3.0 * e.se, "gamma({s},{t}) = {} vs {exact}", e.cov);
    }
    for (i, &t) in grid.iter().enumerate().skip(1) {
        let e = est.gamma_at(t, t, 1, 1).unwrap();
        assert!((e.cov - est.v[i]).abs() < 1e-9 * est.v[i].max(1.0));
        let cross = est.gamma_at(t, t, 0, 1).unwrap();
        assert!((cross.cov + e.cov).abs() < 1e-9);
    }
}

#[test]
fn clt_holds_for_independent_flips() {
    let grid = [0.5, 1.0];
    let out = degradation_replicas(12, &grid, 1.0, 800, 31, None);
    let r = clt_check(&series(&out), &grid, &[1], 0.01).unwrap();
    assert!(r.passed(), "{}", r.to_csv());
    for c in &r.cells {
        let exact = p(c.t) * (1.0 - p(c.t));
        assert!((c.variance - exact).abs() < 0.2 * exact, "t={} var={}", c.t, c.variance);
    }
}

#[test]
fn clt_refuses_small_samples() {
    let grid = [0.5];
    let out = degradation_replicas(4, &grid, 0.5, 100, 1, None);
    assert!(matches!(
        clt_check(&series(&out), &grid, &[1], 0.01),
        Err(Error::TooFewReplicas { needed: 500, got: 100 })
    ));
}

#[test]
fn contact_without_infection_is_pure_recovery() {
    let g = Graph::torus(2, 5).unwrap();
    let contact = LocalRule::contact(0.0, 1.0).unwrap();
    let recovery = LocalRule::independent_ladder(2, 0.0, 1.0).unwrap();
    let eta0 = vec![1; g.len()];
    for id in 0..20 {
        let a = gillespie(&g, &contact, &eta0, 2.0, 99, id).unwrap();
        let b = gillespie(&g, &recovery, &eta0, 2.0, 99, id).unwrap();
        assert_eq!(a.events, b.events);
    }
}

#[test]
fn kout_of_n_thresholds() {
    assert_eq!(kout_of_n(0.5, 400).unwrap().threshold, 200.0);
    assert_eq!(kout_of_n(0.3, 10).unwrap().threshold, 3.0);
    assert_eq!(kout_of_n(0.25, 7).unwrap().threshold, 2.0);
    assert_eq!(kout_of_n(0.0, 7).unwrap().threshold, 0.0);
    assert_eq!(kout_of_n(1.0, 7).unwrap().threshold, 7.0);
    assert_eq!(kout_of_n(0.5, 3).unwrap().f, [0.0, 1.0]);
    assert!(kout_of_n(1.2, 7).is_err());
    assert!(kout_of_n(-0.1, 7).is_err());
}

#[test]
fn heavy_censoring_is_an_error() {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.02).collect();
    let k = kout_of_n(0.5, 16).unwrap();
    let out = degradation_replicas(4, &grid, 0.4, 200, 2, Some(k.threshold));
    let times: Vec<_> = out.iter().map(|o| o.hitting).collect();
    let opts = HittingOptions {
        alpha: 0.5,
        f: k.f.to_vec(),
        t_end: 0.4,
        bandwidth_c: 0.5,
        significance: 0.01,
        analytic: None,
    };
    assert!(matches!(
        hitting_analysis(&series(&out), &times, &opts),
        Err(Error::Censored { .. })
    ));
}

#[test]
fn immediate_failure_is_degenerate() {
    let grid = [0.0, 0.5, 1.0];
    let out = degradation_replicas(4, &grid, 1.0, 10, 2, Some(0.0));
    let times: Vec<_> = out.iter().map(|o| o.hitting).collect();
    assert!(times.iter().all(|&t| t == Some(0.0)));
    let opts = HittingOptions {
        alpha: 0.0,
        f: vec![0.0, 1.0],
        t_end: 1.0,
        bandwidth_c: 0.5,
        significance: 0.01,
        analytic: None,
    };
    let r = hitting_analysis(&series(&out), &times, &opts).unwrap();
    assert!(r.degenerate);
    assert_eq!(r.t_alpha, 0.0);
}

#[test]
fn lilliefors_critical_values_match_asymptotic_table() {
    for (alpha, coef) in [(0.05, 0.886), (0.01, 1.031)] {
        let c = lilliefors_critical(400, alpha).unwrap();
        let table = coef / 400f64.sqrt();
        assert!((c - table).abs() < 0.05 * table, "alpha {alpha}: {c} vs {table}");
    }
}

#[test]
fn ks_statistic_matches_direct_formula() {
    let sample = [-1.3, -0.2, 0.1, 0.4, 0.9, 1.7, 2.2];
    let (mean, sd) = mean_sd(&sample);
    let normal = Normal::new(mean, sd).unwrap();
    let n = sample.len() as f64;
    let oracle = sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    assert!((ks_statistic(&sample, mean, sd, false) - oracle).abs() < 1e-12);

    let a2_oracle = -n - (0..sample.len())
        .map(|i| {
            let fi = normal.cdf(sample[i]);
            let fj = normal.cdf(sample[sample.len() - 1 - i]);
            (2.0 * i as f64 + 1.0) * (fi.ln() + (1.0 - fj).ln())
        })
        .sum::<f64>()
        / n;
    assert!((anderson_darling(&sample, mean, sd) - a2_oracle).abs() < 1e-10);
}

#[test]
fn constant_sample_is_degenerate() {
    let t = normality_test(&[3.0; 50], 0.01, true).unwrap();
    assert!(t.degenerate);
    assert_eq!(t.pass_label(), "degenerate");
    assert_eq!(covariance_with_se(&[3.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]).0, 0.0);
}

proptest! {
    #[test]
    fn covariance_matches_two_pass_formula(x in proptest::collection::vec(-1e3f64..1e3, 2..50), shift in -1e6f64..1e6) {
        let y: Vec<f64> = x.iter().enumerate().map(|(i, &v)| v * 0.5 + (i as f64).sin()).collect();
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let oracle = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
        let (cov, se) = covariance_with_se(&x, &y);
        prop_assert!((cov - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
        prop_assert!(se >= 0.0);
        let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
        let (cov2, _) = covariance_with_se(&shifted, &y);
        prop_assert!((cov2 - cov).abs() <= 1e-6 * cov.abs().max(1.0));
    }

    #[test]
    fn ks_statistic_is_a_distance(x in proptest::collection::vec(-5.0f64..5.0, 3..40)) {
        let mut x = x;
        x.sort_by(f64::total_cmp);
        let (mean, sd) = mean_sd(&x);
        prop_assume!(sd > 1e-6);
        let d = ks_statistic(&x, mean, sd, false);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(d >= 0.5 / x.len() as f64 - 1e-12);
    }
}

#[test]
fn subcritical_contact_never_reaches_threshold() {
    let g = Graph::torus(2, 6).unwrap();
    let rule = LocalRule::contact(0.1, 1.0).unwrap();
    let region = Region::whole(&g);
    let mut eta0 = vec![0; g.len()];
    eta0[0] = 1;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.2).collect();
    let k = kout_of_n(0.5, g.len()).unwrap();
    let plan = ReplicaPlan {
        graph: &g,
        rule: &rule,
        initial: &eta0,
        t_end: 2.0,
        grid: &grid,
        region: &region,
        degradation: Some(&k.f),
        threshold: Some(k.threshold),
        keep_logs: false,
        seed: 12,
    };
    let out = run_replicas(&plan, 100, None).unwrap();
    let times: Vec<_> = out.iter().map(|o| o.hitting).collect();
    assert!(times.iter().all(Option::is_none));
    let opts = HittingOptions {
        alpha: 0.5,
        f: k.f.to_vec(),
        t_end: 2.0,
        bandwidth_c: 0.5,
        significance: 0.01,
        analytic: None,
    };
    assert!(matches!(
        hitting_analysis(&series(&out), &times, &opts),
        Err(Error::Censored { .. })
    ));
}
