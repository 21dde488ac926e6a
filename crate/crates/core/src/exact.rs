//! Exact oracle on the full configuration space `W^V` of a small graph.
//!
//! The generator is stored sparsely (only single-site jumps are nonzero) and
//! transient laws `mu S_t` or functions `S_t f` are computed by
//! uniformization with an explicit Poisson-tail truncation. Everything here
//! is exponential in the number of sites and meant for graphs with at most
//! a couple dozen vertices.

use crate::dynamics::{
    influence_matrix, total_rate_bound, Enumeration, InfluenceMatrix, LocalRule,
    NeighborhoodTable, ShellCounts, State,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Default cap on `|W|^V`.
pub const DEFAULT_STATE_CAP: u128 = 1 << 20;

/// Mass allowed in the neglected Poisson tail.
pub const UNIFORMIZATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct GeneratorMatrix<T> {
    n_states: usize,
    n_sites: usize,
    row_ptr: Vec<usize>,
    targets: Vec<u32>,
    rates: Vec<T>,
    exit: Vec<T>,
    uniformization: T,
}

impl<T: Scalar> GeneratorMatrix<T> {
    pub fn dimension(&self) -> usize {
        self.exit.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Constant `Lambda >= max_eta sum_zeta q(eta, zeta)` of the uniformized chain.
    pub fn uniformization_rate(&self) -> T {
        self.uniformization
    }

    /// Off-diagonal entries `(target, rate)` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.targets[span.clone()]
            .iter()
            .zip(&self.rates[span])
            .map(|(&j, &r)| (j as usize, r))
    }

    /// Diagonal entry `q(i, i) = -sum_j q(i, j)`.
    pub fn diagonal(&self, i: usize) -> T {
        -self.exit[i]
    }

    /// Dense copy, row-major. Only sensible for tiny dimensions.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dimension();
        let mut out = vec![vec![T::zero(); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = self.diagonal(i);
            for (j, r) in self.row(i) {
                row[j] = row[j] + r;
            }
        }
        out
    }

    /// Index of a configuration: `sum_v config[v] * |W|^v`.
    pub fn encode(&self, config: &[State]) -> Result<usize> {
        if config.len() != self.n_sites {
            return Err(Error::InvalidConfiguration(format!(
                "configuration has {} sites, expected {}",
                config.len(),
                self.n_sites
            )));
        }
        let mut idx = 0usize;
        for &s in config.iter().rev() {
            if s as usize >= self.n_states {
                return Err(Error::InvalidConfiguration(format!("state {s} not in alphabet")));
            }
            idx = idx * self.n_states + s as usize;
        }
        Ok(idx)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<State> {
        (0..self.n_sites)
            .map(|_| {
                let s = (idx % self.n_states) as State;
                idx /= self.n_states;
                s
            })
            .collect()
    }

    /// State of `site` in configuration `idx`.
    pub fn site_state(&self, idx: usize, site: usize) -> State {
        ((idx / self.n_states.pow(site as u32)) % self.n_states) as State
    }

    /// Function `eta -> 1{eta(site) = state}` as a vector over configurations.
    pub fn site_indicator(&self, site: usize, state: State) -> Vec<T> {
        (0..self.dimension())
            .map(|i| {
                if self.site_state(i, site) == state {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    /// `p -> p P` for the uniformized kernel `P = I + Q / Lambda`.
    fn step_measure(&self, p: &[T], out: &mut [T]) {
        let lam = self.uniformization;
        for (i, o) in out.iter_mut().enumerate() {
            *o = p[i] * (T::one() - self.exit[i] / lam);
        }
        for (i, &pi) in p.iter().enumerate() {
            if pi == T::zero() {
                continue;
            }
            for (j, r) in self.row(i) {
                out[j] = out[j] + pi * r / lam;
            }
        }
    }

    /// `f -> P f`.
    fn step_function(&self, f: &[T], out: &mut [T]) {
        let lam = self.uniformization;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = f[i] * (T::one() - self.exit[i] / lam);
            for (j, r) in self.row(i) {
                acc = acc + r / lam * f[j];
            }
            *o = acc;
        }
    }

    fn uniformize(&self, v: &[T], t: f64, step: impl Fn(&Self, &[T], &mut [T])) -> Vec<T> {
        let lam = self.uniformization.as_f64();
        if t == 0.0 || lam == 0.0 {
            return v.to_vec();
        }
        let weights = poisson_weights(lam * t, UNIFORMIZATION_TOL);
        let mut acc: Vec<T> = v.iter().map(|&x| x * T::of(weights[0])).collect();
        let mut cur = v.to_vec();
        let mut next = vec![T::zero(); v.len()];
        for &w in &weights[1..] {
            step(self, &cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            let w = T::of(w);
            for (a, &c) in acc.iter_mut().zip(&cur) {
                *a = *a + w * c;
            }
        }
        acc
    }

    /// Law at time `t` of the chain started from the distribution `p0`.
    pub fn evolve_measure(&self, p0: &[T], t: f64) -> Vec<T> {
        self.uniformize(p0, t, Self::step_measure)
    }

    /// `S_t f`, i.e. `eta -> E_eta[f(eta_t)]`.
    pub fn evolve_function(&self, f: &[T], t: f64) -> Vec<T> {
        self.uniformize(f, t, Self::step_function)
    }

    pub fn point_mass(&self, idx: usize) -> Vec<T> {
        let mut p = vec![T::zero(); self.dimension()];
        p[idx] = T::one();
        p
    }
}

/// Poisson(`mean`) probabilities `w_0..w_N` with `N` the first index whose
/// cumulative mass reaches `1 - tol`.
pub fn poisson_weights(mean: f64, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut log_w = -mean;
    let mut cumulative = 0.0;
    let ln_mean = mean.ln();
    let mut n = 0usize;
    loop {
        let w = log_w.exp();
        out.push(w);
        cumulative += w;
        if cumulative >= 1.0 - tol && (n as f64) > mean {
            break;
        }
        n += 1;
        log_w += ln_mean - (n as f64).ln();
        if n > 10 * (mean as usize) + 1000 {
            break;
        }
    }
    out
}

/// Assembles the generator of `rule` on `g`, refusing state spaces larger
/// than `cap`.
pub fn build_generator<T: Scalar>(
    g: &Graph,
    rule: &LocalRule<T>,
    cap: u128,
) -> Result<GeneratorMatrix<T>> {
    let n = rule.n_states();
    let v = g.len();
    let dim = (n as u128).checked_pow(v as u32).unwrap_or(u128::MAX);
    if dim > cap {
        return Err(Error::StateSpaceCap { states: dim, cap });
    }
    let dim = dim as usize;
    let table = NeighborhoodTable::new(g, rule.range());
    let mut shells = ShellCounts::new(rule.range(), n);
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut targets = Vec::new();
    let mut rates = Vec::new();
    let mut exit = Vec::with_capacity(dim);
    let mut config = vec![0 as State; v];
    let powers: Vec<usize> = (0..v).map(|i| n.pow(i as u32)).collect();
    row_ptr.push(0);
    for idx in 0..dim {
        let mut rest = idx;
        for c in config.iter_mut() {
            *c = (rest % n) as State;
            rest /= n;
        }
        let mut total = T::zero();
        for x in 0..v {
            table.fill(x, &config, &mut shells);
            let own = config[x];
            for to in 0..n as State {
                if to == own {
                    continue;
                }
                let r = rule.rate(own, to, &shells);
                if !(r.is_finite() && r >= T::zero()) {
                    return Err(Error::BadRate {
                        site: x,
                        from: own,
                        to,
                        rate: r.as_f64(),
                    });
                }
                if r > T::zero() {
                    let target = idx + to as usize * powers[x] - own as usize * powers[x];
                    targets.push(target as u32);
                    rates.push(r);
                    total = total + r;
                }
            }
        }
        exit.push(total);
        row_ptr.push(targets.len());
    }
    let uniformization = exit.iter().copied().fold(T::zero(), T::max);
    Ok(GeneratorMatrix {
        n_states: n,
        n_sites: v,
        row_ptr,
        targets,
        rates,
        exit,
        uniformization,
    })
}

/// Law of `eta_t` started from `eta0`.
pub fn transient<T: Scalar>(gen: &GeneratorMatrix<T>, eta0: &[State], t: f64) -> Result<Vec<T>> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let idx = gen.encode(eta0)?;
    Ok(gen.evolve_measure(&gen.point_mass(idx), t))
}

/// Transient laws from one initial configuration on a time grid, computed by
/// propagating increments.
#[derive(Clone, Debug)]
pub struct SemigroupCache<T> {
    pub times: Vec<f64>,
    pub distributions: Vec<Vec<T>>,
}

impl<T: Scalar> SemigroupCache<T> {
    pub fn new(gen: &GeneratorMatrix<T>, eta0: &[State], times: &[f64]) -> Result<Self> {
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::InvalidGrid("times must be non-negative and sorted".into()));
        }
        let mut p = gen.point_mass(gen.encode(eta0)?);
        let mut last = 0.0;
        let mut distributions = Vec::with_capacity(times.len());
        for &t in times {
            p = gen.evolve_measure(&p, t - last);
            last = t;
            distributions.push(p.clone());
        }
        Ok(Self {
            times: times.to_vec(),
            distributions,
        })
    }

    /// `P(eta_t(site) = state)` at grid index `i`.
    pub fn marginal(&self, gen: &GeneratorMatrix<T>, i: usize, site: usize, state: State) -> T {
        self.distributions[i]
            .iter()
            .enumerate()
            .filter(|&(idx, _)| gen.site_state(idx, site) == state)
            .map(|(_, &p)| p)
            .sum()
    }
}

/// Covariance vector `eta -> Cov_eta(f(eta_s), g(eta_t))` over every starting
/// configuration, via `E_eta[f(eta_s) g(eta_t)] = S_s(f S_{t-s} g)(eta)`.
/// Arguments with `s > t` are handled by symmetry.
pub fn two_time_cov_all<T: Scalar>(
    gen: &GeneratorMatrix<T>,
    f: &[T],
    g: &[T],
    s: f64,
    t: f64,
) -> Vec<T> {
    if s > t {
        return two_time_cov_all(gen, g, f, t, s);
    }
    let h = gen.evolve_function(g, t - s);
    let fh: Vec<T> = f.iter().zip(&h).map(|(&a, &b)| a * b).collect();
    let joint = gen.evolve_function(&fh, s);
    let mean_f = gen.evolve_function(f, s);
    let mean_g = gen.evolve_function(&h, s);
    joint
        .iter()
        .zip(mean_f.iter().zip(&mean_g))
        .map(|(&j, (&a, &b))| j - a * b)
        .collect()
}

/// `Cov_eta0(f(eta_s), g(eta_t))`.
pub fn exact_two_time_cov<T: Scalar>(
    gen: &GeneratorMatrix<T>,
    eta0: &[State],
    f: &[T],
    g: &[T],
    s: f64,
    t: f64,
) -> Result<T> {
    if s < 0.0 || t < 0.0 {
        return Err(Error::InvalidArgument("times must be non-negative".into()));
    }
    let (first, second, s, t) = if s <= t { (f, g, s, t) } else { (g, f, t, s) };
    let p_s = gen.evolve_measure(&gen.point_mass(gen.encode(eta0)?), s);
    let h = gen.evolve_function(second, t - s);
    let dot = |a: &[T], b: &[T]| -> T { a.iter().zip(b).map(|(&x, &y)| x * y).sum() };
    let joint: T = p_s
        .iter()
        .zip(first.iter().zip(&h))
        .map(|(&p, (&a, &b))| p * a * b)
        .sum();
    Ok(joint - dot(&p_s, first) * dot(&p_s, &h))
}

/// Oscillation `Delta_f(x) = max |f(eta) - f(zeta)|` over configurations that
/// differ only at site `x`, for every site.
pub fn oscillation<T: Scalar>(gen: &GeneratorMatrix<T>, f: &[T]) -> Vec<T> {
    let n = gen.n_states();
    let mut out = vec![T::zero(); gen.n_sites()];
    for (x, slot) in out.iter_mut().enumerate() {
        let stride = n.pow(x as u32);
        for idx in 0..gen.dimension() {
            let own = (idx / stride) % n;
            for other in own + 1..n {
                let j = idx + (other - own) * stride;
                *slot = slot.max((f[idx] - f[j]).abs());
            }
        }
    }
    out
}

/// Constants of the covariance inequality for functions mainly located on
/// finite sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovBoundConstants {
    pub b: f64,
    pub m: f64,
    pub k: usize,
    pub beta: f64,
    pub rho: f64,
}

impl CovBoundConstants {
    /// `D = 2 M e^{(beta + rho) k}`.
    pub fn d(&self) -> f64 {
        2.0 * self.m * ((self.beta + self.rho) * self.k as f64).exp()
    }

    /// `C = (2 B e^{beta k} / D) (1 + e^{rho k} / (1 - e^{rho - beta}))`.
    pub fn c(&self) -> f64 {
        let k = self.k as f64;
        2.0 * self.b * (self.beta * k).exp() / self.d()
            * (1.0 + (self.rho * k).exp() / (1.0 - (self.rho - self.beta).exp()))
    }

    /// `C kappa_f kappa_g (|R1| ^ |R2|) e^{D(s+t)} e^{-(beta - rho) dist}`.
    /// Infinite when `M = 0`, where the constant degenerates.
    pub fn bound(&self, kappa_f: f64, kappa_g: f64, min_size: usize, s: f64, t: f64, dist: usize) -> f64 {
        if self.m == 0.0 {
            return f64::INFINITY;
        }
        self.c()
            * kappa_f
            * kappa_g
            * min_size as f64
            * (self.d() * (s + t)).exp()
            * (-(self.beta - self.rho) * dist as f64).exp()
    }
}

#[derive(Clone, Debug)]
pub struct CovBoundParams {
    pub distances: Vec<usize>,
    pub times: Vec<f64>,
    /// Values of `beta - rho`; each must be positive.
    pub beta_offsets: Vec<f64>,
    pub base_site: usize,
    /// State whose indicator is used for both functions.
    pub state: State,
    /// Replacement for `rho` in the amenable-graph variant of the bound.
    pub epsilon: f64,
}

impl Default for CovBoundParams {
    fn default() -> Self {
        Self {
            distances: vec![1, 2, 3],
            times: vec![0.25, 0.5],
            beta_offsets: vec![1.0],
            base_site: 0,
            state: 1,
            epsilon: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovBoundRow {
    pub d: usize,
    pub s: f64,
    pub t: f64,
    pub beta: f64,
    /// `sup_eta |Cov_eta(f(eta_s), g(eta_t))|`.
    pub cov: f64,
    /// `|Cov|` from the requested starting configuration.
    pub cov_start: f64,
    pub bound: f64,
    /// Same bound with `rho` replaced by `epsilon`.
    pub bound_eps: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct CovBoundReport {
    pub b: f64,
    pub m: f64,
    pub rho: f64,
    pub range: usize,
    pub rows: Vec<CovBoundRow>,
}

impl CovBoundReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,s,t,cov,bound,pass,beta,cov_start,bound_eps\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.d, r.s, r.t, r.cov, r.bound, r.pass, r.beta, r.cov_start, r.bound_eps
            ));
        }
        out
    }
}

/// Sweeps distances, time pairs and decay rates, comparing the exact
/// two-time covariance of single-site indicators with the covariance bound.
pub fn verify_cov_bound<T: Scalar>(
    gen: &GeneratorMatrix<T>,
    g: &Graph,
    rule: &LocalRule<T>,
    eta0: &[State],
    params: &CovBoundParams,
) -> Result<CovBoundReport> {
    let policy = Enumeration::default();
    let b = total_rate_bound(rule, g, &policy)?.total.as_f64();
    let m = influence_matrix(rule, g, &policy)?.m.as_f64();
    let rho = g.rho();
    let k = rule.range();
    let start = gen.encode(eta0)?;
    let f = gen.site_indicator(params.base_site, params.state);
    let dist = g.distances_from(params.base_site);
    let mut rows = Vec::new();
    for &d in &params.distances {
        let Some(y) = (0..g.len()).find(|&v| dist[v] == d) else {
            return Err(Error::InvalidArgument(format!(
                "no site at distance {d} from site {}",
                params.base_site
            )));
        };
        let gy = gen.site_indicator(y, params.state);
        for &s in &params.times {
            for &t in &params.times {
                let covs = two_time_cov_all(gen, &f, &gy, s, t);
                let sup = covs.iter().map(|c| c.abs().as_f64()).fold(0.0, f64::max);
                let cov_start = covs[start].abs().as_f64();
                for &offset in &params.beta_offsets {
                    if offset <= 0.0 {
                        return Err(Error::InvalidArgument(format!(
                            "beta must exceed rho (offset {offset})"
                        )));
                    }
                    let beta = rho + offset;
                    let consts = CovBoundConstants { b, m, k, beta, rho };
                    let bound = consts.bound(1.0, 1.0, 1, s, t, d);
                    let eps = CovBoundConstants {
                        rho: params.epsilon,
                        beta: beta.max(params.epsilon + offset),
                        ..consts
                    };
                    rows.push(CovBoundRow {
                        d,
                        s,
                        t,
                        beta,
                        cov: sup,
                        cov_start,
                        bound,
                        bound_eps: eps.bound(1.0, 1.0, 1, s, t, d),
                        pass: sup <= bound + 1e-12,
                    });
                }
            }
        }
    }
    Ok(CovBoundReport {
        b,
        m,
        rho,
        range: k,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessRow {
    pub site: usize,
    /// Exact `Delta_{S_t f}(site)`.
    pub lhs: f64,
    /// `(exp(t Gamma) Delta_f)(site)`.
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct SmoothnessReport {
    pub t: f64,
    pub rows: Vec<SmoothnessRow>,
}

impl SmoothnessReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("site,lhs,rhs,pass,t\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.site, r.lhs, r.rhs, r.pass, self.t));
        }
        out
    }
}

/// Compares the exact oscillation of `S_t f` with `exp(t Gamma) Delta_f`,
/// for `f` the indicator of `state` at `site`.
pub fn verify_smoothness_bound<T: Scalar>(
    gen: &GeneratorMatrix<T>,
    influence: &InfluenceMatrix<T>,
    site: usize,
    state: State,
    t: f64,
) -> SmoothnessReport {
    let f = gen.site_indicator(site, state);
    let delta_f = oscillation(gen, &f);
    let lhs = oscillation(gen, &gen.evolve_function(&f, t));
    let rhs = influence.exp_apply(T::of(t), &delta_f);
    let rows = lhs
        .iter()
        .zip(&rhs)
        .enumerate()
        .map(|(x, (&l, &r))| {
            let (l, r) = (l.as_f64(), r.as_f64());
            SmoothnessRow {
                site: x,
                lhs: l,
                rhs: r,
                pass: l <= r + 1e-8,
            }
        })
        .collect();
    SmoothnessReport { t, rows }
}
