use rayon::prelude::*;

use super::record::{check_grid, region_mask, EmpiricalSeries, Event, EventLog, GridRecorder, HittingRecorder};
use super::rng::replica_rng;
use super::Simulator;
use crate::dynamics::{LocalRule, NeighborhoodTable, State};
use crate::error::{Error, Result};
use crate::graph::{Graph, Region};

/// Evaluates `job(replica_id)` for ids `0..n` on a worker pool and returns
/// the results in id order. With `threads = None` the global pool is used.
pub fn map_replicas<T, F>(n: usize, threads: Option<usize>, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let run = || (0..n as u64).into_par_iter().map(&job).collect::<Result<Vec<T>>>();
    match threads {
        None => run(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?
            .install(run),
    }
}

/// Everything one batch of replicas shares.
#[derive(Clone, Copy)]
pub struct ReplicaPlan<'a> {
    pub graph: &'a Graph,
    pub rule: &'a LocalRule<f64>,
    pub initial: &'a [State],
    pub t_end: f64,
    pub grid: &'a [f64],
    pub region: &'a Region,
    pub degradation: Option<&'a [f64]>,
    /// Record the first time `D_t` reaches this level (needs `degradation`).
    pub threshold: Option<f64>,
    pub keep_logs: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicaOutput {
    pub replica_id: u64,
    pub series: EmpiricalSeries,
    pub hitting: Option<f64>,
    pub log: Option<EventLog>,
}

/// Simulates `n` independent replicas keyed by `(plan.seed, replica_id)`.
/// The output does not depend on `threads`.
pub fn run_replicas(plan: &ReplicaPlan<'_>, n: usize, threads: Option<usize>) -> Result<Vec<ReplicaOutput>> {
    if n == 0 {
        return Err(Error::TooFewReplicas { needed: 1, got: 0 });
    }
    if !(plan.t_end > 0.0 && plan.t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {}", plan.t_end)));
    }
    check_grid(plan.grid, plan.t_end)?;
    if plan.threshold.is_some() && plan.degradation.is_none() {
        return Err(Error::InvalidArgument("a hitting threshold needs a degradation map".into()));
    }
    if let Some(f) = plan.degradation {
        if f.len() != plan.rule.n_states() {
            return Err(Error::InvalidArgument(format!(
                "degradation map has {} entries for {} states",
                f.len(),
                plan.rule.n_states()
            )));
        }
    }
    let table = NeighborhoodTable::new(plan.graph, plan.rule.range());
    let mask = region_mask(plan.region, plan.graph.len())?;
    let n_states = plan.rule.n_states();
    map_replicas(n, threads, |id| {
        let mut rng = replica_rng(plan.seed, id);
        let mut sim = Simulator::new(plan.rule, &table, plan.initial)?;
        let mut grid = GridRecorder::new(plan.grid, &mask, plan.degradation, n_states, plan.initial)?;
        let mut hit = match (plan.threshold, plan.degradation) {
            (Some(k), Some(f)) => Some(HittingRecorder::new(&mask, f, k, plan.initial)),
            _ => None,
        };
        let mut events: Option<Vec<Event>> = plan.keep_logs.then(Vec::new);
        sim.run(&mut rng, plan.t_end, |e| {
            grid.on_event(e);
            if let Some(h) = hit.as_mut() {
                h.on_event(e);
            }
            if let Some(ev) = events.as_mut() {
                ev.push(*e);
            }
        })?;
        Ok(ReplicaOutput {
            replica_id: id,
            series: grid.finish(),
            hitting: hit.and_then(|h| h.hit()),
            log: events.map(|events| EventLog {
                initial: plan.initial.to_vec(),
                events,
                t_end: plan.t_end,
                seed: plan.seed,
                replica_id: id,
            }),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{gillespie, observe};

    #[test]
    fn single_replica_matches_gillespie_then_observe() {
        let g = Graph::torus(2, 5).unwrap();
        let rule = LocalRule::contact(0.9, 1.0).unwrap();
        let eta0 = vec![1; 25];
        let region = Region::torus_box(&g, 3).unwrap();
        let grid = [0.0, 0.5, 1.0, 1.5];
        let f = [0.0, 1.0];
        let plan = ReplicaPlan {
            graph: &g,
            rule: &rule,
            initial: &eta0,
            t_end: 1.5,
            grid: &grid,
            region: &region,
            degradation: Some(&f),
            threshold: None,
            keep_logs: true,
            seed: 11,
        };
        let out = run_replicas(&plan, 1, Some(1)).unwrap();
        let log = gillespie(&g, &rule, &eta0, 1.5, 11, 0).unwrap();
        assert_eq!(out[0].log.as_ref(), Some(&log));
        assert_eq!(out[0].series, observe(&log, &region, &grid, Some(&f), 2).unwrap());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let g = Graph::torus(2, 6).unwrap();
        let rule = LocalRule::contact(0.7, 1.0).unwrap();
        let eta0 = vec![1; 36];
        let region = Region::whole(&g);
        let grid = [0.25, 1.0];
        let f = [0.0, 1.0];
        let plan = ReplicaPlan {
            graph: &g,
            rule: &rule,
            initial: &eta0,
            t_end: 1.0,
            grid: &grid,
            region: &region,
            degradation: Some(&f),
            threshold: Some(10.0),
            keep_logs: false,
            seed: 5,
        };
        let a = run_replicas(&plan, 40, Some(1)).unwrap();
        let b = run_replicas(&plan, 40, Some(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.series.is_conserved() && r.hitting == Some(0.0)));
    }
}
