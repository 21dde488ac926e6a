use std::fmt::Write as _;

use rayon::prelude::*;

use super::moments::covariance_with_se;
use crate::dynamics::{LocalRule, NeighborhoodTable, State};
use crate::error::{Error, Result};
use crate::graph::{Graph, Region};
use crate::simulate::{map_replicas, replica_rng, Simulator};

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceRow {
    pub label: String,
    pub size: usize,
    /// `Var Z(B) / |B|` with `Z(B) = sum_{x in B} f(eta_t(x))`.
    pub ratio: f64,
    pub se_ratio: f64,
    pub partial_sum: f64,
    pub se_partial: f64,
    /// Distance from the ratio to the reference (or to the partial sum).
    pub gap: f64,
    pub se: f64,
    pub boundary_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceRatioReport {
    pub t: f64,
    pub ell: usize,
    pub replicas: usize,
    /// Value the gap is measured against; the partial covariance sum when `None`.
    pub reference: Option<f64>,
    pub rows: Vec<VarianceRow>,
}

impl VarianceRatioReport {
    /// `|dB_n| / |B_n|` strictly decreasing along the ladder.
    pub fn boundary_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].boundary_fraction < w[0].boundary_fraction)
    }

    /// Each gap is no larger than the previous one, up to the sum of their
    /// standard errors.
    pub fn gap_shrinks(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].gap <= w[0].gap + w[0].se + w[1].se)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("Bn,ratio,partial_sum,gap,se,boundary_frac\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.size, r.ratio, r.partial_sum, r.gap, r.se, r.boundary_fraction
            );
        }
        out
    }
}

/// Default covariance truncation radius for a rule of range `k`.
pub fn default_ell(range: usize) -> usize {
    3 * range + 3
}

/// Scan from already simulated configurations at time `t` (one per replica).
///
/// The partial sum `sum_{z in B(x, ell)} Cov(Y_x, Y_z)` is averaged over all
/// base vertices `x` whose `ell`-ball avoids the truncation boundary.
pub fn variance_ratio_from_configs(
    g: &Graph,
    configs: &[Vec<State>],
    ladder: &[Region],
    f: &[f64],
    ell: usize,
    reference: Option<f64>,
    t: f64,
) -> Result<VarianceRatioReport> {
    let n = configs.len();
    if n < 2 {
        return Err(Error::TooFewReplicas { needed: 2, got: n });
    }
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("region ladder is empty".into()));
    }
    if let Some(c) = configs.iter().find(|c| c.len() != g.len()) {
        return Err(Error::InvalidConfiguration(format!(
            "configuration has {} sites, graph has {}",
            c.len(),
            g.len()
        )));
    }
    if let Some(s) = configs.iter().flatten().find(|&&s| s as usize >= f.len()) {
        return Err(Error::InvalidArgument(format!("degradation map has no entry for state {s}")));
    }
    let value = |c: &[State], x: usize| f[c[x] as usize];

    let bases = g.interior_vertices(ell);
    if bases.is_empty() {
        return Err(Error::InvalidGraph(format!("no vertex has an interior ball of radius {ell}")));
    }
    let balls: Vec<Vec<usize>> = bases
        .iter()
        .map(|&x| g.bfs_within(x, ell).into_iter().map(|(v, _)| v).collect())
        .collect();
    let nf = n as f64;
    let mut mean_y = vec![0.0; g.len()];
    for c in configs {
        for (x, m) in mean_y.iter_mut().enumerate() {
            *m += value(c, x) / nf;
        }
    }
    let mean_s: Vec<f64> = balls.iter().map(|b| b.iter().map(|&z| mean_y[z]).sum()).collect();
    let q: Vec<f64> = configs
        .par_iter()
        .map(|c| {
            bases
                .iter()
                .zip(&balls)
                .zip(&mean_s)
                .map(|((&x, ball), &ms)| {
                    let s: f64 = ball.iter().map(|&z| value(c, z)).sum();
                    (value(c, x) - mean_y[x]) * (s - ms)
                })
                .sum::<f64>()
                / bases.len() as f64
        })
        .collect();
    let q_mean = q.iter().sum::<f64>() / nf;
    let partial_sum = q_mean * nf / (nf - 1.0);
    let q_var = q.iter().map(|v| (v - q_mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let se_partial = (q_var / nf).sqrt() * nf / (nf - 1.0);

    let mut rows = Vec::with_capacity(ladder.len());
    for region in ladder {
        if let Some(&v) = region.members().last() {
            if v >= g.len() {
                return Err(Error::VertexOutOfRange(v));
            }
        }
        let size = region.len() as f64;
        let z: Vec<f64> = configs
            .iter()
            .map(|c| region.members().iter().map(|&x| value(c, x)).sum())
            .collect();
        let (var, se_var) = covariance_with_se(&z, &z);
        let (ratio, se_ratio) = (var / size, se_var / size);
        let (gap, se) = match reference {
            Some(r) => ((ratio - r).abs(), se_ratio),
            None => (
                (ratio - partial_sum).abs(),
                (se_ratio * se_ratio + se_partial * se_partial).sqrt(),
            ),
        };
        rows.push(VarianceRow {
            label: region.label.clone(),
            size: region.len(),
            ratio,
            se_ratio,
            partial_sum,
            se_partial,
            gap,
            se,
            boundary_fraction: region.boundary_fraction(),
        });
    }
    Ok(VarianceRatioReport {
        t,
        ell,
        replicas: n,
        reference,
        rows,
    })
}

#[derive(Clone, Copy)]
pub struct VarianceScan<'a> {
    pub graph: &'a Graph,
    pub rule: &'a LocalRule<f64>,
    pub initial: &'a [State],
    pub t: f64,
    pub ladder: &'a [Region],
    pub f: &'a [f64],
    pub ell: Option<usize>,
    pub reference: Option<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub threads: Option<usize>,
}

/// Simulates `replicas` trajectories to time `t` and compares the variance
/// of `Z(B_n)` per site with the truncated covariance sum on every rung.
pub fn variance_ratio_scan(scan: &VarianceScan<'_>) -> Result<VarianceRatioReport> {
    if !(scan.t > 0.0 && scan.t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {}", scan.t)));
    }
    let table = NeighborhoodTable::new(scan.graph, scan.rule.range());
    let configs = map_replicas(scan.replicas, scan.threads, |id| {
        let mut rng = replica_rng(scan.seed, id);
        let mut sim = Simulator::new(scan.rule, &table, scan.initial)?;
        sim.run(&mut rng, scan.t, |_| {})?;
        Ok(sim.config().to_vec())
    })?;
    let ell = scan.ell.unwrap_or_else(|| default_ell(scan.rule.range()));
    variance_ratio_from_configs(scan.graph, &configs, scan.ladder, scan.f, ell, scan.reference, scan.t)
}
