//! Exact continuous-time simulation of single-site particle systems.
//!
//! [`Simulator`] runs the next-event scheme: per-site total rates live in a
//! Fenwick tree, the jumping site is found in `O(log V)`, and after each jump
//! only the sites within the interaction range are refreshed.

mod coupling;
mod fenwick;
mod record;
mod replicas;
mod rng;

pub use coupling::coupled_pair;
pub use fenwick::Fenwick;
pub use record::{
    check_grid, first_crossing, observe, EmpiricalSeries, Event, EventLog, GridRecorder, HittingRecorder,
};
pub use replicas::{map_replicas, run_replicas, ReplicaOutput, ReplicaPlan};
pub use rng::{replica_rng, RNG_ALGORITHM};

use rand::Rng;
use rand_distr::Exp1;

use crate::dynamics::{LocalRule, NeighborhoodTable, ShellCounts, State};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Simulation state for one trajectory.
pub struct Simulator<'a> {
    rule: &'a LocalRule<f64>,
    table: &'a NeighborhoodTable,
    config: Vec<State>,
    rates: Vec<f64>,
    totals: Fenwick,
    shells: ShellCounts,
    time: f64,
    since_rebuild: usize,
}

impl<'a> Simulator<'a> {
    pub fn new(rule: &'a LocalRule<f64>, table: &'a NeighborhoodTable, initial: &[State]) -> Result<Self> {
        let n = rule.n_states();
        let v = table.len();
        if initial.len() != v {
            return Err(Error::InvalidConfiguration(format!(
                "initial configuration has {} sites, graph has {v}",
                initial.len()
            )));
        }
        if let Some(&s) = initial.iter().find(|&&s| s as usize >= n) {
            return Err(Error::InvalidConfiguration(format!("state {s} not in alphabet")));
        }
        if table.range() != rule.range() {
            return Err(Error::InvalidArgument("neighbourhood table range differs from rule range".into()));
        }
        let mut sim = Self {
            rule,
            table,
            config: initial.to_vec(),
            rates: vec![0.0; v * n],
            totals: Fenwick::new(v),
            shells: ShellCounts::new(rule.range(), n),
            time: 0.0,
            since_rebuild: 0,
        };
        for x in 0..v {
            sim.refresh(x)?;
        }
        sim.totals.rebuild();
        Ok(sim)
    }

    pub fn config(&self) -> &[State] {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    fn refresh(&mut self, x: usize) -> Result<()> {
        let n = self.rule.n_states();
        self.table.fill(x, &self.config, &mut self.shells);
        let own = self.config[x];
        let slot = &mut self.rates[x * n..(x + 1) * n];
        self.rule.rates_into(own, &self.shells, slot);
        let mut total = 0.0;
        for (to, &r) in slot.iter().enumerate() {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::BadRate {
                    site: x,
                    from: own,
                    to: to as State,
                    rate: r,
                });
            }
            total += r;
        }
        self.totals.set(x, total);
        Ok(())
    }

    /// Advances until the next jump or `t_end`, whichever comes first.
    /// Returns the jump `(time, site, from, to)`, or `None` once the
    /// trajectory is past `t_end` or absorbed.
    pub fn step<R: Rng>(&mut self, rng: &mut R, t_end: f64) -> Result<Option<Event>> {
        let n = self.rule.n_states();
        loop {
            let total = self.totals.total();
            if total <= 0.0 {
                // Rounding can leave a tiny positive residue; a genuinely
                // absorbed state has an all-zero tree after a rebuild.
                self.time = t_end;
                return Ok(None);
            }
            let wait: f64 = rng.sample::<f64, _>(Exp1) / total;
            let next = self.time + wait;
            if next > t_end {
                self.time = t_end;
                return Ok(None);
            }
            let target = rng.random::<f64>() * total;
            let site = self.totals.find(target);
            let site_total = self.totals.get(site);
            if site_total <= 0.0 {
                // Accumulated rounding pointed at an idle site: resync and redraw.
                self.totals.rebuild();
                self.since_rebuild = 0;
                continue;
            }
            self.time = next;
            let mut pick = rng.random::<f64>() * site_total;
            let row = &self.rates[site * n..(site + 1) * n];
            let from = self.config[site];
            let mut to = from;
            for (w, &r) in row.iter().enumerate() {
                if r > 0.0 {
                    to = w as State;
                    if pick < r {
                        break;
                    }
                    pick -= r;
                }
            }
            self.config[site] = to;
            self.refresh(site)?;
            for &(u, _) in self.table.around(site) {
                self.refresh(u as usize)?;
            }
            self.since_rebuild += 1;
            if self.since_rebuild >= 4 * self.config.len().max(64) {
                self.totals.rebuild();
                self.since_rebuild = 0;
            }
            return Ok(Some(Event {
                time: next,
                site: site as u32,
                from,
                to,
            }));
        }
    }

    /// Runs to `t_end`, handing every jump to `on_event`.
    pub fn run<R: Rng>(&mut self, rng: &mut R, t_end: f64, mut on_event: impl FnMut(&Event)) -> Result<()> {
        while let Some(e) = self.step(rng, t_end)? {
            on_event(&e);
        }
        Ok(())
    }
}

/// One trajectory from `eta0` on `[0, t_end]`, reproducible from
/// `(seed, replica_id)`.
pub fn gillespie(
    g: &Graph,
    rule: &LocalRule<f64>,
    eta0: &[State],
    t_end: f64,
    seed: u64,
    replica_id: u64,
) -> Result<EventLog> {
    let table = NeighborhoodTable::new(g, rule.range());
    gillespie_with_table(&table, rule, eta0, t_end, seed, replica_id)
}

pub fn gillespie_with_table(
    table: &NeighborhoodTable,
    rule: &LocalRule<f64>,
    eta0: &[State],
    t_end: f64,
    seed: u64,
    replica_id: u64,
) -> Result<EventLog> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    let mut rng = replica_rng(seed, replica_id);
    let mut sim = Simulator::new(rule, table, eta0)?;
    let mut events = Vec::new();
    sim.run(&mut rng, t_end, |e| events.push(*e))?;
    Ok(EventLog {
        initial: eta0.to_vec(),
        events,
        t_end,
        seed,
        replica_id,
    })
}
