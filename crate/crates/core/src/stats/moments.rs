use std::fmt::Write as _;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::simulate::EmpiricalSeries;

/// Unbiased cross-replica covariance of two samples and its standard error.
///
/// Both samples are shifted by their first element before accumulating, so
/// a constant sample gives exactly zero.
pub fn covariance_with_se(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    debug_assert!(n >= 2 && y.len() == n);
    let (x0, y0) = (x[0], y[0]);
    let nf = n as f64;
    let mx = x.iter().map(|&a| a - x0).sum::<f64>() / nf;
    let my = y.iter().map(|&b| b - y0).sum::<f64>() / nf;
    let prods: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| (a - x0 - mx) * (b - y0 - my))
        .collect();
    let mean_p = prods.iter().sum::<f64>() / nf;
    let cov = mean_p * nf / (nf - 1.0);
    let var_p = prods.iter().map(|p| (p - mean_p) * (p - mean_p)).sum::<f64>() / (nf - 1.0);
    (cov, (var_p / nf).sqrt() * nf / (nf - 1.0))
}

/// Sample mean and its standard error.
pub fn mean_with_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let x0 = x[0];
    let shift = x.iter().map(|&a| a - x0).sum::<f64>() / n;
    let mean = x0 + shift;
    if x.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = x.iter().map(|&a| (a - x0 - shift).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaEntry {
    pub s: f64,
    pub t: f64,
    pub w: State,
    pub wp: State,
    pub cov: f64,
    pub se: f64,
}

/// Cross-replica moments of the degradation and the normalized count
/// covariances on a fixed grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentEstimates {
    pub grid: Vec<f64>,
    pub region_size: usize,
    pub replicas: usize,
    /// Mean degradation per site.
    pub m: Vec<f64>,
    pub se_m: Vec<f64>,
    /// Variance of the total degradation divided by the region size.
    pub v: Vec<f64>,
    pub se_v: Vec<f64>,
    pub gamma: Vec<GammaEntry>,
}

impl MomentEstimates {
    pub fn moments_csv(&self) -> String {
        let mut out = String::from("t,m,se_m,v,se_v\n");
        for i in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.grid[i], self.m[i], self.se_m[i], self.v[i], self.se_v[i]
            );
        }
        out
    }

    pub fn gamma_csv(&self) -> String {
        let mut out = String::from("s,t,w,wp,cov,se\n");
        for e in &self.gamma {
            let _ = writeln!(out, "{},{},{},{},{},{}", e.s, e.t, e.w, e.wp, e.cov, e.se);
        }
        out
    }

    pub fn gamma_at(&self, s: f64, t: f64, w: State, wp: State) -> Option<&GammaEntry> {
        self.gamma
            .iter()
            .find(|e| e.s == s && e.t == t && e.w == w && e.wp == wp)
    }
}

pub(crate) fn check_series(series: &[EmpiricalSeries], needed: usize) -> Result<()> {
    if series.len() < needed {
        return Err(Error::TooFewReplicas {
            needed,
            got: series.len(),
        });
    }
    let first = &series[0];
    if first.region_size == 0 {
        return Err(Error::InvalidArgument("observation region is empty".into()));
    }
    if series
        .iter()
        .any(|s| s.grid != first.grid || s.n_states != first.n_states || s.region_size != first.region_size)
    {
        return Err(Error::InvalidArgument(
            "replicas disagree on grid, alphabet or region".into(),
        ));
    }
    Ok(())
}

/// Total degradation `sum_w f(w) N_t(w)` of one replica at grid index `gi`.
pub(crate) fn degradation(s: &EmpiricalSeries, gi: usize, f: &[f64]) -> f64 {
    s.counts_at(gi).iter().zip(f).map(|(&c, &fw)| c as f64 * fw).sum()
}

/// Estimates `m(t)`, `v(t)` on the series grid and `Gamma(s, t)(w, w')` for
/// every `s <= t` drawn from `gamma_times` (grid indices).
pub fn estimate_moments(series: &[EmpiricalSeries], f: &[f64], gamma_times: &[usize]) -> Result<MomentEstimates> {
    check_series(series, 2)?;
    let first = &series[0];
    let (g_len, n_states, size) = (first.grid.len(), first.n_states, first.region_size as f64);
    if f.len() != n_states {
        return Err(Error::InvalidArgument(format!(
            "degradation map has {} entries for {n_states} states",
            f.len()
        )));
    }
    if let Some(&i) = gamma_times.iter().find(|&&i| i >= g_len) {
        return Err(Error::InvalidArgument(format!("grid index {i} out of range")));
    }
    let (mut m, mut se_m, mut v, mut se_v) = (vec![], vec![], vec![], vec![]);
    for gi in 0..g_len {
        let d: Vec<f64> = series.iter().map(|s| degradation(s, gi, f)).collect();
        let (mean, se) = mean_with_se(&d);
        let (var, var_se) = covariance_with_se(&d, &d);
        m.push(mean / size);
        se_m.push(se / size);
        v.push(var / size);
        se_v.push(var_se / size);
    }
    let column = |gi: usize, w: usize| -> Vec<f64> { series.iter().map(|s| s.counts_at(gi)[w] as f64).collect() };
    let mut gamma = Vec::new();
    let mut times = gamma_times.to_vec();
    times.sort_unstable();
    times.dedup();
    for (a, &si) in times.iter().enumerate() {
        for &ti in &times[a..] {
            for w in 0..n_states {
                let x = column(si, w);
                for wp in 0..n_states {
                    let (cov, se) = covariance_with_se(&x, &column(ti, wp));
                    gamma.push(GammaEntry {
                        s: first.grid[si],
                        t: first.grid[ti],
                        w: w as State,
                        wp: wp as State,
                        cov: cov / size,
                        se: se / size,
                    });
                }
            }
        }
    }
    Ok(MomentEstimates {
        grid: first.grid.clone(),
        region_size: first.region_size,
        replicas: series.len(),
        m,
        se_m,
        v,
        se_v,
        gamma,
    })
}
