use std::fmt::Write as _;

use super::moments::check_series;
use super::normality::{normality_test, qq_points, NormalityTest};
use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::simulate::EmpiricalSeries;

/// Fewest replicas for which the KS calibration is trusted.
pub const MIN_CLT_REPLICAS: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct CltCell {
    pub t: f64,
    pub w: State,
    /// `Var N_t(w) / |R|` across replicas.
    pub variance: f64,
    pub test: NormalityTest,
    /// `(normal quantile scaled by the fitted sd, sorted (N - mean) / sqrt|R|)`.
    pub qq: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CltReport {
    pub significance: f64,
    pub region_size: usize,
    pub replicas: usize,
    pub cells: Vec<CltCell>,
}

impl CltReport {
    /// True when no tested (non-degenerate) cell rejects normality.
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.test.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,w,ks,ad,crit,pass\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.t,
                c.w,
                c.test.ks,
                c.test.ad,
                c.test.critical,
                c.test.pass_label()
            );
        }
        out
    }

    pub fn qq_csv(&self) -> String {
        let mut out = String::from("t,w,theoretical,sample\n");
        for c in &self.cells {
            for &(q, x) in &c.qq {
                let _ = writeln!(out, "{},{},{},{}", c.t, c.w, q, x);
            }
        }
        out
    }
}

pub(crate) fn grid_index(grid: &[f64], t: f64) -> Result<usize> {
    grid.iter()
        .position(|&g| (g - t).abs() <= 1e-9 * t.abs().max(1.0))
        .ok_or_else(|| Error::InvalidGrid(format!("time {t} is not a grid point")))
}

/// Tests `N_t(w)` across replicas for normality at each requested time and
/// state. The counts are integers, so the lattice-corrected KS distance is
/// used.
pub fn clt_check(series: &[EmpiricalSeries], times: &[f64], states: &[State], significance: f64) -> Result<CltReport> {
    check_series(series, MIN_CLT_REPLICAS)?;
    let first = &series[0];
    let root = (first.region_size as f64).sqrt();
    let mut cells = Vec::new();
    for &t in times {
        let gi = grid_index(&first.grid, t)?;
        for &w in states {
            if w as usize >= first.n_states {
                return Err(Error::InvalidArgument(format!("state {w} not in alphabet")));
            }
            let sample: Vec<f64> = series.iter().map(|s| s.count(gi, w) as f64).collect();
            let test = normality_test(&sample, significance, true)?;
            let mut centered: Vec<f64> = sample.iter().map(|x| (x - test.mean) / root).collect();
            centered.sort_by(f64::total_cmp);
            let scale = test.sd / root;
            let qq = qq_points(&centered)
                .into_iter()
                .map(|(q, x)| (q * scale, x))
                .collect();
            cells.push(CltCell {
                t: first.grid[gi],
                w,
                variance: test.sd * test.sd / first.region_size as f64,
                test,
                qq,
            });
        }
    }
    Ok(CltReport {
        significance,
        region_size: first.region_size,
        replicas: series.len(),
        cells,
    })
}
