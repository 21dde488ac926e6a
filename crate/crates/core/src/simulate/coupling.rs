use rand::Rng;
use rand_distr::Exp1;

use super::record::{Event, EventLog};
use super::rng::replica_rng;
use crate::dynamics::{
    monotonicity_certificate, total_rate_bound, Enumeration, LocalRule, NeighborhoodTable, ShellCounts, State,
};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Runs two copies of the dynamics from `low <= high` on shared randomness
/// so that the order is kept at every event.
///
/// Every site carries a Poisson clock of rate `max_up + max_down`. At a ring
/// a single uniform `u` drives both copies: a copy jumps up to the highest
/// level `l` with `u` below its total rate of reaching `>= l`, and down to
/// the lowest level `j` whose cumulative rate from the bottom covers the
/// mirrored draw. The rule must pass the monotonicity certificate.
pub fn coupled_pair(
    g: &Graph,
    rule: &LocalRule<f64>,
    low: &[State],
    high: &[State],
    t_end: f64,
    seed: u64,
    replica_id: u64,
) -> Result<(EventLog, EventLog)> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    let v = g.len();
    let n = rule.n_states();
    for (name, c) in [("low", low), ("high", high)] {
        if c.len() != v {
            return Err(Error::InvalidConfiguration(format!(
                "{name} configuration has {} sites, graph has {v}",
                c.len()
            )));
        }
        if let Some(&s) = c.iter().find(|&&s| s as usize >= n) {
            return Err(Error::InvalidConfiguration(format!("state {s} not in alphabet")));
        }
    }
    if let Some(x) = (0..v).find(|&x| low[x] > high[x]) {
        return Err(Error::InvalidConfiguration(format!(
            "initial configurations are not ordered at site {x}"
        )));
    }
    let policy = Enumeration::default();
    let cert = monotonicity_certificate(rule, g, &policy)?;
    if !cert.passed {
        let detail = cert
            .violation
            .map(|w| format!("threshold {} ({:?}): {} vs {}", w.threshold, w.direction, w.low_rate, w.high_rate))
            .unwrap_or_default();
        return Err(Error::NotMonotone(detail));
    }
    let bound = total_rate_bound(rule, g, &policy)?;
    let lambda = bound.max_up + bound.max_down;

    let table = NeighborhoodTable::new(g, rule.range());
    let mut rng = replica_rng(seed, replica_id);
    let mut lo = low.to_vec();
    let mut hi = high.to_vec();
    let mut lo_events = Vec::new();
    let mut hi_events = Vec::new();
    let mut shells = ShellCounts::new(rule.range(), n);
    let mut rates = vec![0.0; n];
    let total = lambda * v as f64;
    let mut time = 0.0;
    loop {
        if total <= 0.0 {
            break;
        }
        time += rng.sample::<f64, _>(Exp1) / total;
        if time > t_end {
            break;
        }
        let x = rng.random_range(0..v);
        let u = rng.random::<f64>() * lambda;
        for (config, events) in [(&mut lo, &mut lo_events), (&mut hi, &mut hi_events)] {
            table.fill(x, config, &mut shells);
            let own = config[x];
            rule.rates_into(own, &shells, &mut rates);
            let target = coupled_target(own, &rates, u, lambda, x)?;
            if target != own {
                config[x] = target;
                events.push(Event {
                    time,
                    site: x as u32,
                    from: own,
                    to: target,
                });
            }
        }
        if lo[x] > hi[x] {
            return Err(Error::OrderViolation {
                time,
                site: x,
                low: lo[x],
                high: hi[x],
            });
        }
    }
    let log = |initial: &[State], events| EventLog {
        initial: initial.to_vec(),
        events,
        t_end,
        seed,
        replica_id,
    };
    Ok((log(low, lo_events), log(high, hi_events)))
}

fn coupled_target(own: State, rates: &[f64], u: f64, lambda: f64, site: usize) -> Result<State> {
    let a = own as usize;
    let mut outflow = 0.0;
    for (to, &r) in rates.iter().enumerate() {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::BadRate {
                site,
                from: own,
                to: to as State,
                rate: r,
            });
        }
        outflow += r;
    }
    if outflow > lambda * (1.0 + 1e-12) {
        return Err(Error::InvalidRule(format!(
            "realized outflow {outflow} at site {site} exceeds the coupling rate {lambda}"
        )));
    }
    let mut up = 0.0;
    for l in (a + 1..rates.len()).rev() {
        up += rates[l];
        if u < up {
            return Ok(l as State);
        }
    }
    let mirrored = lambda - u;
    let mut down = 0.0;
    for (j, &r) in rates[..a].iter().enumerate() {
        down += r;
        if mirrored <= down {
            return Ok(j as State);
        }
    }
    Ok(own)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::StateAlphabet;

    #[test]
    fn equal_starts_give_equal_paths() {
        let g = Graph::torus(2, 3).unwrap();
        let rule = LocalRule::contact(1.0, 1.0).unwrap();
        let eta = vec![0, 1, 0, 0, 1, 1, 0, 0, 1];
        let (a, b) = coupled_pair(&g, &rule, &eta, &eta, 3.0, 9, 0).unwrap();
        assert_eq!(a.events, b.events);
        a.validate().unwrap();
    }

    #[test]
    fn order_holds_for_contact() {
        let g = Graph::torus(2, 3).unwrap();
        let rule = LocalRule::contact(1.5, 1.0).unwrap();
        for r in 0..20 {
            let (a, b) = coupled_pair(&g, &rule, &[0; 9], &[1; 9], 2.0, 1, r).unwrap();
            for k in 0..=20 {
                let t = k as f64 * 0.1;
                let (x, y) = (a.state_at(t).unwrap(), b.state_at(t).unwrap());
                assert!(x.iter().zip(&y).all(|(p, q)| p <= q));
            }
        }
    }

    #[test]
    fn refuses_non_monotone_rule() {
        let g = Graph::torus(2, 3).unwrap();
        let rule = LocalRule::custom(StateAlphabet::numbered(2).unwrap(), 1, "inhibited", |from, to, s| {
            if from == 0 && to == 1 {
                1.0 / (1.0 + s.in_state(1) as f64)
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(matches!(
            coupled_pair(&g, &rule, &[0; 9], &[1; 9], 1.0, 0, 0),
            Err(Error::NotMonotone(_))
        ));
    }

    #[test]
    fn target_partition_matches_rates() {
        let rates = [0.5, 0.0, 0.25, 1.0];
        let lambda = 2.0;
        let mut mass = [0.0; 4];
        let steps = 20_000;
        for i in 0..steps {
            let u = (i as f64 + 0.5) / steps as f64 * lambda;
            mass[coupled_target(1, &rates, u, lambda, 0).unwrap() as usize] += lambda / steps as f64;
        }
        assert!((mass[0] - 0.5).abs() < 1e-3);
        assert!((mass[2] - 0.25).abs() < 1e-3);
        assert!((mass[3] - 1.0).abs() < 1e-3);
    }
}
