use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Synthetic normal samples drawn to calibrate the composite KS test.
pub const LILLIEFORS_SAMPLES: usize = 5000;
const LILLIEFORS_SEED: u64 = 0x1111_2222_3333_4444;

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Sample mean and unbiased standard deviation.
pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Kolmogorov-Smirnov distance between the sample and `N(mean, sd^2)`.
/// `sorted` must be ascending.
///
/// With `lattice` the sample is taken to live on the integers and is
/// compared with the normal law rounded to the nearest integer, the usual
/// continuity correction for counts.
pub fn ks_statistic(sorted: &[f64], mean: f64, sd: f64, lattice: bool) -> f64 {
    let phi = std_normal();
    let n = sorted.len() as f64;
    let cdf = |x: f64| phi.cdf((x - mean) / sd);
    let mut d: f64 = 0.0;
    if lattice {
        let mut i = 0;
        while i < sorted.len() {
            let k = sorted[i];
            let mut j = i;
            while j < sorted.len() && sorted[j] == k {
                j += 1;
            }
            let below = i as f64 / n;
            let upto = j as f64 / n;
            d = d
                .max((upto - cdf(k + 0.5)).abs())
                .max((below - cdf(k - 0.5)).abs());
            i = j;
        }
    } else {
        for (i, &x) in sorted.iter().enumerate() {
            let f = cdf(x);
            d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
        }
    }
    d
}

/// Anderson-Darling `A^2` of the sample against `N(mean, sd^2)`.
pub fn anderson_darling(sorted: &[f64], mean: f64, sd: f64) -> f64 {
    let phi = std_normal();
    let n = sorted.len();
    let nf = n as f64;
    let clamp = |p: f64| p.clamp(1e-300, 1.0 - 1e-16);
    let mut s = 0.0;
    for i in 0..n {
        let lo = clamp(phi.cdf((sorted[i] - mean) / sd));
        let hi = clamp(phi.cdf((sorted[n - 1 - i] - mean) / sd));
        s += (2 * i + 1) as f64 * (lo.ln() + (1.0 - hi).ln());
    }
    -nf - s / nf
}

type Calibration = Arc<Vec<f64>>;

fn calibration(n: usize) -> Calibration {
    static CACHE: OnceLock<Mutex<HashMap<usize, Calibration>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("calibration cache").get(&n) {
        return c.clone();
    }
    let mut stats: Vec<f64> = (0..LILLIEFORS_SAMPLES as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(LILLIEFORS_SEED);
            rng.set_stream(i);
            let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            x.sort_by(f64::total_cmp);
            let (m, s) = mean_sd(&x);
            ks_statistic(&x, m, s, false)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let stats = Arc::new(stats);
    cache
        .lock()
        .expect("calibration cache")
        .entry(n)
        .or_insert(stats)
        .clone()
}

/// Critical value of the KS distance at level `alpha` when mean and variance
/// are estimated from a normal sample of size `n`, from a Monte Carlo
/// calibration that is computed once per `n` and cached.
pub fn lilliefors_critical(n: usize, alpha: f64) -> Result<f64> {
    if n < 5 {
        return Err(Error::TooFewReplicas { needed: 5, got: n });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("significance {alpha} must lie in (0, 1)")));
    }
    let stats = calibration(n);
    let rank = ((1.0 - alpha) * stats.len() as f64).ceil() as usize;
    Ok(stats[rank.clamp(1, stats.len()) - 1])
}

/// Pairs `(normal quantile, sorted sample)` at plotting positions `(i - 1/2) / n`.
pub fn qq_points(sorted: &[f64]) -> Vec<(f64, f64)> {
    let phi = std_normal();
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (phi.inverse_cdf((i as f64 + 0.5) / n), x))
        .collect()
}

/// Composite normality test with estimated mean and variance.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalityTest {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub ks: f64,
    pub ad: f64,
    pub critical: f64,
    /// `ks <= critical`; always true for a degenerate sample.
    pub pass: bool,
    /// The sample has (numerically) no spread and was not tested.
    pub degenerate: bool,
}

impl NormalityTest {
    pub fn pass_label(&self) -> &'static str {
        match (self.degenerate, self.pass) {
            (true, _) => "degenerate",
            (false, true) => "true",
            (false, false) => "false",
        }
    }
}

pub fn normality_test(sample: &[f64], alpha: f64, lattice: bool) -> Result<NormalityTest> {
    let critical = lilliefors_critical(sample.len(), alpha)?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mean, sd) = mean_sd(&sorted);
    let spread = sorted[sorted.len() - 1] - sorted[0];
    if sd.is_nan() || sd <= 0.0 || spread <= 1e-12 * mean.abs().max(1.0) {
        return Ok(NormalityTest {
            n: sample.len(),
            mean,
            sd,
            ks: f64::NAN,
            ad: f64::NAN,
            critical,
            pass: true,
            degenerate: true,
        });
    }
    let ks = ks_statistic(&sorted, mean, sd, lattice);
    Ok(NormalityTest {
        n: sample.len(),
        mean,
        sd,
        ks,
        ad: anderson_darling(&sorted, mean, sd),
        critical,
        pass: ks <= critical,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_uniform_grid_is_small() {
        let phi = std_normal();
        let n = 1000;
        let x: Vec<f64> = (0..n).map(|i| phi.inverse_cdf((i as f64 + 0.5) / n as f64)).collect();
        assert!((ks_statistic(&x, 0.0, 1.0, false) - 0.5 / n as f64).abs() < 1e-9);
        assert!(anderson_darling(&x, 0.0, 1.0) < 0.01);
    }

    #[test]
    fn lilliefors_table_values() {
        // Large-sample approximation 1.031 / sqrt(n) at the 1% level.
        let c = lilliefors_critical(400, 0.01).unwrap();
        assert!((c * 20.0 - 1.031).abs() < 0.06, "{c}");
        let c5 = lilliefors_critical(400, 0.05).unwrap();
        assert!((c5 * 20.0 - 0.886).abs() < 0.05, "{c5}");
    }

    #[test]
    fn degenerate_sample_is_flagged() {
        let t = normality_test(&[3.0; 50], 0.01, true).unwrap();
        assert!(t.degenerate && t.pass);
        assert_eq!(t.pass_label(), "degenerate");
    }

    #[test]
    fn skewed_sample_fails() {
        let x: Vec<f64> = (0..500).map(|i| ((i as f64 + 0.5) / 500.0).powi(4)).collect();
        assert!(!normality_test(&x, 0.01, false).unwrap().pass);
    }
}
