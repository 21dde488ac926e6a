use std::fmt::Write as _;

use super::moments::{check_series, estimate_moments};
use super::normality::{normality_test, NormalityTest};
use crate::error::{Error, Result};
use crate::simulate::EmpiricalSeries;

/// Largest tolerated share of replicas that never reach the threshold.
pub const MAX_CENSORED_FRACTION: f64 = 0.01;
pub const DEFAULT_BANDWIDTH_C: f64 = 0.5;

/// Closed-form hitting quantities, when the model has them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticHitting {
    pub t_alpha: f64,
    pub m_prime: f64,
    pub v: f64,
    pub sigma2: f64,
}

impl AnalyticHitting {
    /// Independent two-state sites failing at rate `lambda`:
    /// `m(t) = 1 - e^{-lambda t}` and `v(t) = m(t)(1 - m(t))`.
    pub fn pure_degradation(lambda: f64, alpha: f64) -> Self {
        let t_alpha = -(1.0 - alpha).ln() / lambda;
        let m_prime = lambda * (1.0 - alpha);
        let v = alpha * (1.0 - alpha);
        Self {
            t_alpha,
            m_prime,
            v,
            sigma2: v / (m_prime * m_prime),
        }
    }
}

/// Binary "k-out-of-n" wiring: `f` is the indicator of the failed state
/// (state 1) and the system fails once `ceil(alpha |R|)` sites have failed.
#[derive(Clone, Debug, PartialEq)]
pub struct KOutOfN {
    pub alpha: f64,
    pub f: [f64; 2],
    pub threshold: f64,
}

pub fn kout_of_n(alpha: f64, region_size: usize) -> Result<KOutOfN> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} must lie in [0, 1]")));
    }
    Ok(KOutOfN {
        alpha,
        f: [0.0, 1.0],
        threshold: (alpha * region_size as f64).ceil(),
    })
}

#[derive(Clone, Debug)]
pub struct HittingOptions {
    pub alpha: f64,
    pub f: Vec<f64>,
    pub t_end: f64,
    pub bandwidth_c: f64,
    pub significance: f64,
    pub analytic: Option<AnalyticHitting>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HittingReport {
    pub region_size: usize,
    /// Per replica; `None` when censored at `t_end`.
    pub times: Vec<Option<f64>>,
    pub censored: usize,
    pub t_alpha: f64,
    pub m_prime: f64,
    pub h: f64,
    pub v: f64,
    pub sigma2: f64,
    /// Normality of `sqrt|R| (T - t_alpha) / sigma` over uncensored replicas.
    pub test: Option<NormalityTest>,
    pub analytic: Option<AnalyticHitting>,
    /// Every replica had already failed at time 0.
    pub degenerate: bool,
}

impl HittingReport {
    pub fn passed(&self) -> bool {
        !self.degenerate && self.test.as_ref().is_some_and(|t| t.pass)
    }

    pub fn times_csv(&self) -> String {
        let mut out = String::from("replica,T\n");
        for (i, t) in self.times.iter().enumerate() {
            match t {
                Some(t) => writeln!(out, "{i},{t}"),
                None => writeln!(out, "{i},"),
            }
            .expect("write to string");
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let (ks, pass) = match (&self.test, self.degenerate) {
            (_, true) => (f64::NAN, "degenerate"),
            (Some(t), false) => (t.ks, t.pass_label()),
            (None, false) => (f64::NAN, "false"),
        };
        format!(
            "t_alpha,m_prime,h,v,sigma2,ks,pass\n{},{},{},{},{},{},{}\n",
            self.t_alpha, self.m_prime, self.h, self.v, self.sigma2, ks, pass
        )
    }
}

fn interpolate(grid: &[f64], values: &[f64], t: f64) -> f64 {
    let i = grid.partition_point(|&g| g <= t).clamp(1, grid.len() - 1);
    let (t0, t1) = (grid[i - 1], grid[i]);
    values[i - 1] + (values[i] - values[i - 1]) * (t - t0) / (t1 - t0)
}

/// Hitting-time CLT check from per-replica series and first-passage times.
///
/// `t_alpha` is where the linearly interpolated mean degradation per site
/// crosses `alpha`; `m'(t_alpha)` is a central difference with bandwidth
/// `h = c t_end n^{-1/5}` clamped to the grid; `sigma^2 = v / m'^2`.
pub fn hitting_analysis(series: &[EmpiricalSeries], times: &[Option<f64>], opts: &HittingOptions) -> Result<HittingReport> {
    check_series(series, 2)?;
    if times.len() != series.len() {
        return Err(Error::InvalidArgument("one hitting time per replica is required".into()));
    }
    let n = series.len();
    let region_size = series[0].region_size;
    let mut report = HittingReport {
        region_size,
        times: times.to_vec(),
        censored: times.iter().filter(|t| t.is_none()).count(),
        t_alpha: f64::NAN,
        m_prime: f64::NAN,
        h: f64::NAN,
        v: f64::NAN,
        sigma2: f64::NAN,
        test: None,
        analytic: opts.analytic,
        degenerate: false,
    };
    if times.iter().all(|&t| t == Some(0.0)) {
        report.t_alpha = 0.0;
        report.degenerate = true;
        return Ok(report);
    }
    if report.censored as f64 > MAX_CENSORED_FRACTION * n as f64 {
        return Err(Error::Censored {
            censored: report.censored,
            total: n,
        });
    }
    let grid = &series[0].grid;
    if grid.len() < 3 {
        return Err(Error::InvalidGrid("hitting analysis needs at least three grid points".into()));
    }
    let est = estimate_moments(series, &opts.f, &[])?;
    let m = &est.m;
    let (low, high) = (m[0], m[m.len() - 1]);
    if !(opts.alpha > low && opts.alpha < high) {
        return Err(Error::LevelOutOfRange {
            alpha: opts.alpha,
            low,
            high,
        });
    }
    let i = (0..m.len() - 1)
        .find(|&i| m[i] < opts.alpha && m[i + 1] >= opts.alpha)
        .expect("alpha lies strictly inside the observed range");
    let t_alpha = grid[i] + (opts.alpha - m[i]) / (m[i + 1] - m[i]) * (grid[i + 1] - grid[i]);

    let raw_h = opts.bandwidth_c * opts.t_end * (n as f64).powf(-0.2);
    let h = raw_h.min(t_alpha - grid[0]).min(grid[grid.len() - 1] - t_alpha);
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidGrid("the crossing sits on the edge of the grid".into()));
    }
    let lo = grid.partition_point(|&g| g <= t_alpha - h).saturating_sub(1);
    let hi = grid.partition_point(|&g| g < t_alpha + h).min(grid.len() - 1);
    if let Some(j) = (lo..hi).find(|&j| m[j + 1] <= m[j]) {
        return Err(Error::NotIncreasing(j));
    }
    let m_prime = (interpolate(grid, m, t_alpha + h) - interpolate(grid, m, t_alpha - h)) / (2.0 * h);
    let v = interpolate(grid, &est.v, t_alpha);
    let sigma2 = v / (m_prime * m_prime);
    report.t_alpha = t_alpha;
    report.m_prime = m_prime;
    report.h = h;
    report.v = v;
    report.sigma2 = sigma2;

    let scale = (region_size as f64).sqrt() / sigma2.sqrt();
    let z: Vec<f64> = times.iter().flatten().map(|&t| scale * (t - t_alpha)).collect();
    report.test = Some(normality_test(&z, opts.significance, false)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_values_for_rate_one() {
        let a = AnalyticHitting::pure_degradation(1.0, 0.5);
        assert!((a.t_alpha - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(a.m_prime, 0.5);
        assert_eq!(a.v, 0.25);
        assert_eq!(a.sigma2, 1.0);
    }

    #[test]
    fn kout_of_n_threshold() {
        assert_eq!(kout_of_n(0.5, 400).unwrap().threshold, 200.0);
        assert_eq!(kout_of_n(0.501, 400).unwrap().threshold, 201.0);
        assert_eq!(kout_of_n(0.0, 400).unwrap().threshold, 0.0);
        assert!(kout_of_n(1.5, 400).is_err());
    }

    #[test]
    fn interpolation_is_linear() {
        let g = [0.0, 1.0, 2.0];
        let v = [0.0, 2.0, 3.0];
        assert_eq!(interpolate(&g, &v, 0.5), 1.0);
        assert_eq!(interpolate(&g, &v, 1.5), 2.5);
        assert_eq!(interpolate(&g, &v, 2.0), 3.0);
    }
}
