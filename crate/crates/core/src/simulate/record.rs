use std::fmt::Write as _;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::graph::Region;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub time: f64,
    pub site: u32,
    pub from: State,
    pub to: State,
}

/// One realized trajectory: the starting configuration and every jump up to `t_end`.
#[derive(Clone, Debug, PartialEq)]
pub struct EventLog {
    pub initial: Vec<State>,
    pub events: Vec<Event>,
    pub t_end: f64,
    pub seed: u64,
    pub replica_id: u64,
}

impl EventLog {
    /// Checks that times increase strictly inside `(0, t_end]` and that every
    /// `from` matches the replayed state.
    pub fn validate(&self) -> Result<()> {
        let mut config = self.initial.clone();
        let mut last = 0.0;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.time > last && e.time <= self.t_end) {
                return Err(Error::InvalidConfiguration(format!(
                    "event {i} at time {} is out of order",
                    e.time
                )));
            }
            let site = e.site as usize;
            if site >= config.len() || config[site] != e.from {
                return Err(Error::InvalidConfiguration(format!(
                    "event {i} does not start from the replayed state"
                )));
            }
            config[site] = e.to;
            last = e.time;
        }
        Ok(())
    }

    /// Configuration at time `t` (events at exactly `t` included).
    pub fn state_at(&self, t: f64) -> Result<Vec<State>> {
        if !(0.0..=self.t_end).contains(&t) {
            return Err(Error::GridOutOfRange {
                time: t,
                t_end: self.t_end,
            });
        }
        let mut config = self.initial.clone();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            config[e.site as usize] = e.to;
        }
        Ok(config)
    }

    pub fn final_state(&self) -> Vec<State> {
        let mut config = self.initial.clone();
        for e in &self.events {
            config[e.site as usize] = e.to;
        }
        config
    }

    /// CSV with a `#` metadata line followed by `time,site,from,to`.
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = String::with_capacity(32 * (self.events.len() + 2));
        let _ = writeln!(
            out,
            "# seed={},replica_id={},config_hash={},rng={},t_end={}",
            self.seed,
            self.replica_id,
            config_hash,
            super::RNG_ALGORITHM,
            self.t_end
        );
        out.push_str("time,site,from,to\n");
        for e in &self.events {
            let _ = writeln!(out, "{},{},{},{}", e.time, e.site, e.from, e.to);
        }
        out
    }
}

/// Per-state counts `N_t(w)` on a region at each grid time, plus the total
/// degradation `D_t = sum_w f(w) N_t(w)` when a map `f` was supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSeries {
    pub region_size: usize,
    pub n_states: usize,
    pub grid: Vec<f64>,
    /// Row-major `grid.len() x n_states`.
    pub counts: Vec<u32>,
    pub degradation: Option<Vec<f64>>,
}

impl EmpiricalSeries {
    pub fn count(&self, gi: usize, w: State) -> u32 {
        self.counts[gi * self.n_states + w as usize]
    }

    pub fn counts_at(&self, gi: usize) -> &[u32] {
        &self.counts[gi * self.n_states..(gi + 1) * self.n_states]
    }

    /// Checks `sum_w N_t(w) = |R|` at every grid time.
    pub fn is_conserved(&self) -> bool {
        (0..self.grid.len())
            .all(|gi| self.counts_at(gi).iter().map(|&c| c as usize).sum::<usize>() == self.region_size)
    }

    /// Rows `replica,t,w,count[,D]`, without header.
    pub fn write_rows(&self, replica: u64, out: &mut String) {
        for (gi, &t) in self.grid.iter().enumerate() {
            for w in 0..self.n_states {
                let _ = write!(out, "{replica},{t},{w},{}", self.count(gi, w as State));
                if let Some(d) = &self.degradation {
                    let _ = write!(out, ",{}", d[gi]);
                }
                out.push('\n');
            }
        }
    }

    pub fn csv_header(with_degradation: bool) -> &'static str {
        if with_degradation {
            "replica,t,w,count,D\n"
        } else {
            "replica,t,w,count\n"
        }
    }
}

/// Requires a strictly increasing grid inside `[0, t_end]`.
pub fn check_grid(grid: &[f64], t_end: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    for (i, &t) in grid.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidGrid(format!("grid point {t} is not a finite time >= 0")));
        }
        if t > t_end {
            return Err(Error::GridOutOfRange { time: t, t_end });
        }
        if i > 0 && t <= grid[i - 1] {
            return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
        }
    }
    Ok(())
}

fn check_map(f: &[f64], n_states: usize) -> Result<()> {
    if f.len() != n_states {
        return Err(Error::InvalidArgument(format!(
            "degradation map has {} entries for {n_states} states",
            f.len()
        )));
    }
    Ok(())
}

/// Streaming recorder that snapshots region counts at grid times while
/// events are being generated. Grid values are right-continuous: a jump at
/// exactly a grid time is counted in that snapshot.
pub struct GridRecorder<'a> {
    grid: &'a [f64],
    mask: &'a [bool],
    f: Option<&'a [f64]>,
    n_states: usize,
    region_size: usize,
    current: Vec<u32>,
    counts: Vec<u32>,
    next: usize,
}

impl<'a> GridRecorder<'a> {
    pub fn new(
        grid: &'a [f64],
        mask: &'a [bool],
        f: Option<&'a [f64]>,
        n_states: usize,
        initial: &[State],
    ) -> Result<Self> {
        if mask.len() != initial.len() {
            return Err(Error::InvalidConfiguration(
                "region mask and configuration sizes differ".into(),
            ));
        }
        if let Some(f) = f {
            check_map(f, n_states)?;
        }
        let mut current = vec![0u32; n_states];
        let mut region_size = 0;
        for (&s, &inside) in initial.iter().zip(mask) {
            if inside {
                current[s as usize] += 1;
                region_size += 1;
            }
        }
        Ok(Self {
            grid,
            mask,
            f,
            n_states,
            region_size,
            current,
            counts: Vec::with_capacity(grid.len() * n_states),
            next: 0,
        })
    }

    fn flush_before(&mut self, t: f64) {
        while self.next < self.grid.len() && self.grid[self.next] < t {
            self.counts.extend_from_slice(&self.current);
            self.next += 1;
        }
    }

    pub fn on_event(&mut self, e: &Event) {
        self.flush_before(e.time);
        if self.mask[e.site as usize] {
            self.current[e.from as usize] -= 1;
            self.current[e.to as usize] += 1;
        }
    }

    pub fn finish(mut self) -> EmpiricalSeries {
        self.flush_before(f64::INFINITY);
        let degradation = self.f.map(|f| {
            self.counts
                .chunks(self.n_states)
                .map(|row| row.iter().zip(f).map(|(&c, &fw)| c as f64 * fw).sum())
                .collect()
        });
        EmpiricalSeries {
            region_size: self.region_size,
            n_states: self.n_states,
            grid: self.grid.to_vec(),
            counts: self.counts,
            degradation,
        }
    }
}

/// Streaming first-passage detector for `D_t >= threshold` on a region.
pub struct HittingRecorder<'a> {
    mask: &'a [bool],
    f: &'a [f64],
    threshold: f64,
    level: f64,
    hit: Option<f64>,
}

impl<'a> HittingRecorder<'a> {
    pub fn new(mask: &'a [bool], f: &'a [f64], threshold: f64, initial: &[State]) -> Self {
        let level: f64 = initial
            .iter()
            .zip(mask)
            .filter(|(_, &inside)| inside)
            .map(|(&s, _)| f[s as usize])
            .sum();
        let hit = (level >= threshold).then_some(0.0);
        Self {
            mask,
            f,
            threshold,
            level,
            hit,
        }
    }

    pub fn on_event(&mut self, e: &Event) {
        if self.hit.is_some() || !self.mask[e.site as usize] {
            return;
        }
        self.level += self.f[e.to as usize] - self.f[e.from as usize];
        if self.level >= self.threshold {
            self.hit = Some(e.time);
        }
    }

    pub fn hit(&self) -> Option<f64> {
        self.hit
    }
}

/// Region counts of a recorded trajectory on `grid`, by a single replay.
pub fn observe(log: &EventLog, region: &Region, grid: &[f64], f: Option<&[f64]>, n_states: usize) -> Result<EmpiricalSeries> {
    check_grid(grid, log.t_end)?;
    let mask = region_mask(region, log.initial.len())?;
    let mut rec = GridRecorder::new(grid, &mask, f, n_states, &log.initial)?;
    for e in &log.events {
        rec.on_event(e);
    }
    Ok(rec.finish())
}

/// Exact time of the first jump after which `D_t >= threshold`, 0 when the
/// initial level already reaches it, `None` when it is never reached.
pub fn first_crossing(log: &EventLog, region: &Region, f: &[f64], threshold: f64) -> Result<Option<f64>> {
    let mask = region_mask(region, log.initial.len())?;
    if let Some(&s) = log.initial.iter().find(|&&s| s as usize >= f.len()) {
        return Err(Error::InvalidArgument(format!("degradation map has no entry for state {s}")));
    }
    let mut rec = HittingRecorder::new(&mask, f, threshold, &log.initial);
    for e in &log.events {
        rec.on_event(e);
        if rec.hit().is_some() {
            break;
        }
    }
    Ok(rec.hit())
}

pub(crate) fn region_mask(region: &Region, n: usize) -> Result<Vec<bool>> {
    match region.members().last() {
        Some(&v) if v >= n => Err(Error::VertexOutOfRange(v)),
        _ => Ok(region.mask(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn log() -> EventLog {
        EventLog {
            initial: vec![0, 0, 1],
            events: vec![
                Event { time: 0.2, site: 0, from: 0, to: 1 },
                Event { time: 0.5, site: 2, from: 1, to: 0 },
                Event { time: 0.9, site: 1, from: 0, to: 1 },
            ],
            t_end: 1.0,
            seed: 0,
            replica_id: 0,
        }
    }

    #[test]
    fn observe_is_right_continuous() {
        let g = Graph::from_adjacency(2, vec![vec![1, 2], vec![0, 2], vec![0, 1]], false).unwrap();
        let r = Region::whole(&g);
        let s = observe(&log(), &r, &[0.0, 0.5, 1.0], Some(&[0.0, 1.0]), 2).unwrap();
        assert_eq!(s.counts, vec![2, 1, 2, 1, 1, 2]);
        assert_eq!(s.degradation, Some(vec![1.0, 1.0, 2.0]));
        assert!(s.is_conserved());
        assert!(observe(&log(), &r, &[1.5], None, 2).is_err());
    }

    #[test]
    fn crossing_times() {
        let g = Graph::from_adjacency(2, vec![vec![1, 2], vec![0, 2], vec![0, 1]], false).unwrap();
        let r = Region::whole(&g);
        let f = [0.0, 1.0];
        assert_eq!(first_crossing(&log(), &r, &f, 1.0).unwrap(), Some(0.0));
        assert_eq!(first_crossing(&log(), &r, &f, 2.0).unwrap(), Some(0.2));
        assert_eq!(first_crossing(&log(), &r, &f, 3.0).unwrap(), None);
    }

    #[test]
    fn csv_layout() {
        let csv = log().to_csv("abc");
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# seed=0,replica_id=0,config_hash=abc,rng="));
        assert_eq!(lines.next(), Some("time,site,from,to"));
        assert_eq!(lines.next(), Some("0.2,0,0,1"));
    }
}
