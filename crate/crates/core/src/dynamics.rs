//! Single-site, finite-range transition rules and their rate functionals.
//!
//! A rule sees a site's own state plus, for every shell `d = 1..=range`
//! around it, the number of sites at distance `d` in each state. Because the
//! rule only reads those counts, it is invariant under every graph
//! automorphism, and the influence of a site `y` on `x` depends only on the
//! shell sizes around `x` and on `d(x, y)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

pub type State = u8;

/// Maximum number of neighbourhood patterns enumerated exactly.
pub const DEFAULT_PATTERN_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateAlphabet {
    labels: Vec<String>,
}

impl StateAlphabet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::InvalidRule("an alphabet needs at least two states".into()));
        }
        if labels.len() > State::MAX as usize {
            return Err(Error::InvalidRule(format!("too many states: {}", labels.len())));
        }
        Ok(Self { labels })
    }

    /// States `0 < 1 < ... < n-1` labelled by their index.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, s: State) -> &str {
        &self.labels[s as usize]
    }

    pub fn top(&self) -> State {
        (self.labels.len() - 1) as State
    }
}

/// Per-shell state counts around one site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellCounts {
    n_states: usize,
    counts: Vec<u32>,
}

impl ShellCounts {
    pub fn new(range: usize, n_states: usize) -> Self {
        Self {
            n_states,
            counts: vec![0; range * n_states],
        }
    }

    pub fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }

    pub fn range(&self) -> usize {
        self.counts.len() / self.n_states
    }

    /// Number of sites at distance `shell` (1-based) in state `s`.
    pub fn get(&self, shell: usize, s: State) -> u32 {
        self.counts[(shell - 1) * self.n_states + s as usize]
    }

    pub fn add(&mut self, shell: usize, s: State) {
        self.counts[(shell - 1) * self.n_states + s as usize] += 1;
    }

    pub fn remove(&mut self, shell: usize, s: State) {
        self.counts[(shell - 1) * self.n_states + s as usize] -= 1;
    }

    /// Sites in state `s` over all shells.
    pub fn in_state(&self, s: State) -> u32 {
        self.counts
            .chunks(self.n_states)
            .map(|shell| shell[s as usize])
            .sum()
    }

    pub fn population(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Average state index over the neighbourhood, 0 when it is empty.
    pub fn mean_index(&self) -> f64 {
        let pop = self.population();
        if pop == 0 {
            return 0.0;
        }
        let weighted: u64 = self
            .counts
            .chunks(self.n_states)
            .flat_map(|shell| shell.iter().enumerate())
            .map(|(s, &c)| s as u64 * c as u64)
            .sum();
        weighted as f64 / pop as f64
    }
}

pub type RateFn<T> = dyn Fn(State, State, &ShellCounts) -> T + Send + Sync;

/// User-supplied rate function `(from, to, shells) -> rate`.
#[derive(Clone)]
pub struct CustomRule<T> {
    pub name: String,
    pub rate: Arc<RateFn<T>>,
}

impl<T> fmt::Debug for CustomRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum RuleKind<T> {
    /// No interaction; `rates[from * n + to]` is the jump rate.
    IndependentFlip { rates: Vec<T> },
    /// Binary contact process: `0 -> 1` at `lambda` times the number of
    /// infected sites within range, `1 -> 0` at `delta`.
    Contact { lambda: T, delta: T },
    /// `i -> i+1` at `a[i] + b[i] * (mean neighbour state index)`.
    DegradationLadder { a: Vec<T>, b: Vec<T> },
    Custom(CustomRule<T>),
}

#[derive(Clone, Debug)]
pub struct LocalRule<T> {
    alphabet: StateAlphabet,
    range: usize,
    kind: RuleKind<T>,
}

fn check_rate<T: Scalar>(what: &str, x: T) -> Result<()> {
    if x.is_finite() && x >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidRule(format!("{what} must be finite and >= 0, got {x}")))
    }
}

impl<T: Scalar> LocalRule<T> {
    /// Independent jumps with an explicit `n x n` rate matrix (diagonal ignored).
    pub fn independent(alphabet: StateAlphabet, rates: Vec<T>) -> Result<Self> {
        let n = alphabet.len();
        if rates.len() != n * n {
            return Err(Error::InvalidRule(format!(
                "rate matrix has {} entries, expected {}",
                rates.len(),
                n * n
            )));
        }
        for &r in &rates {
            check_rate("independent rate", r)?;
        }
        Ok(Self {
            alphabet,
            range: 1,
            kind: RuleKind::IndependentFlip { rates },
        })
    }

    /// Independent birth-death ladder: `i -> i+1` at `up`, `i -> i-1` at `down`.
    pub fn independent_ladder(n_states: usize, up: T, down: T) -> Result<Self> {
        let alphabet = StateAlphabet::numbered(n_states)?;
        let mut rates = vec![T::zero(); n_states * n_states];
        for i in 0..n_states {
            if i + 1 < n_states {
                rates[i * n_states + i + 1] = up;
            }
            if i > 0 {
                rates[i * n_states + i - 1] = down;
            }
        }
        Self::independent(alphabet, rates)
    }

    /// Independent pure degradation `i -> i+1` at rate `lambda`.
    pub fn pure_degradation(n_states: usize, lambda: T) -> Result<Self> {
        Self::independent_ladder(n_states, lambda, T::zero())
    }

    pub fn contact(lambda: T, delta: T) -> Result<Self> {
        Self::contact_with_range(lambda, delta, 1)
    }

    pub fn contact_with_range(lambda: T, delta: T, range: usize) -> Result<Self> {
        check_rate("lambda", lambda)?;
        check_rate("delta", delta)?;
        if range < 1 {
            return Err(Error::InvalidRule("range must be >= 1".into()));
        }
        Ok(Self {
            alphabet: StateAlphabet::new(vec!["healthy".into(), "infected".into()])?,
            range,
            kind: RuleKind::Contact { lambda, delta },
        })
    }

    pub fn ladder(a: Vec<T>, b: Vec<T>, range: usize) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidRule(format!(
                "ladder needs equally long, non-empty a and b (got {} and {})",
                a.len(),
                b.len()
            )));
        }
        if range < 1 {
            return Err(Error::InvalidRule("range must be >= 1".into()));
        }
        for (&ai, &bi) in a.iter().zip(&b) {
            check_rate("ladder a", ai)?;
            check_rate("ladder b", bi)?;
        }
        Ok(Self {
            alphabet: StateAlphabet::numbered(a.len() + 1)?,
            range,
            kind: RuleKind::DegradationLadder { a, b },
        })
    }

    pub fn custom(
        alphabet: StateAlphabet,
        range: usize,
        name: impl Into<String>,
        rate: impl Fn(State, State, &ShellCounts) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        if range < 1 {
            return Err(Error::InvalidRule("range must be >= 1".into()));
        }
        Ok(Self {
            alphabet,
            range,
            kind: RuleKind::Custom(CustomRule {
                name: name.into(),
                rate: Arc::new(rate),
            }),
        })
    }

    pub fn alphabet(&self) -> &StateAlphabet {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.alphabet.len()
    }

    /// Interaction range `k` in hops.
    pub fn range(&self) -> usize {
        self.range
    }

    pub fn kind(&self) -> &RuleKind<T> {
        &self.kind
    }

    /// Whether every rate is independent of the neighbourhood.
    pub fn is_independent(&self) -> bool {
        matches!(self.kind, RuleKind::IndependentFlip { .. })
    }

    /// Rate of the jump `from -> to` at a site whose neighbourhood has the
    /// given shell counts. Zero when `from == to`.
    pub fn rate(&self, from: State, to: State, shells: &ShellCounts) -> T {
        if from == to {
            return T::zero();
        }
        let n = self.n_states();
        match &self.kind {
            RuleKind::IndependentFlip { rates } => rates[from as usize * n + to as usize],
            RuleKind::Contact { lambda, delta } => match (from, to) {
                (0, 1) => *lambda * T::of(shells.in_state(1) as f64),
                (1, 0) => *delta,
                _ => T::zero(),
            },
            RuleKind::DegradationLadder { a, b } => {
                if to as usize == from as usize + 1 {
                    let i = from as usize;
                    a[i] + b[i] * T::of(shells.mean_index())
                } else {
                    T::zero()
                }
            }
            RuleKind::Custom(c) => (c.rate)(from, to, shells),
        }
    }

    /// Writes the rate to every target state into `out` (length `n_states`).
    pub fn rates_into(&self, from: State, shells: &ShellCounts, out: &mut [T]) {
        for (to, slot) in out.iter_mut().enumerate() {
            *slot = self.rate(from, to as State, shells);
        }
    }

    /// Total rate of leaving `from`.
    pub fn outflow(&self, from: State, shells: &ShellCounts) -> T {
        (0..self.n_states() as State)
            .map(|to| self.rate(from, to, shells))
            .sum()
    }
}

/// For every vertex, the sites within the rule's range together with their
/// shell index. Also used in reverse: a jump at `x` changes the rates of
/// exactly the sites listed for `x` (distance is symmetric).
#[derive(Clone, Debug)]
pub struct NeighborhoodTable {
    range: usize,
    offsets: Vec<usize>,
    entries: Vec<(u32, u8)>,
}

impl NeighborhoodTable {
    pub fn new(g: &Graph, range: usize) -> Self {
        let mut offsets = Vec::with_capacity(g.len() + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for v in 0..g.len() {
            for (u, d) in g.bfs_within(v, range).into_iter().skip(1) {
                entries.push((u as u32, d as u8));
            }
            offsets.push(entries.len());
        }
        Self {
            range,
            offsets,
            entries,
        }
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(site, shell)` pairs around `v`, excluding `v` itself.
    pub fn around(&self, v: usize) -> &[(u32, u8)] {
        &self.entries[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn fill(&self, v: usize, config: &[State], shells: &mut ShellCounts) {
        shells.clear();
        for &(u, d) in self.around(v) {
            shells.add(d as usize, config[u as usize]);
        }
    }

    /// Sizes of shells `1..=range` around `v`.
    pub fn shell_sizes(&self, v: usize) -> Vec<usize> {
        let mut sizes = vec![0; self.range];
        for &(_, d) in self.around(v) {
            sizes[d as usize - 1] += 1;
        }
        sizes
    }
}

/// How neighbourhood patterns are visited by the rate functionals.
#[derive(Clone, Copy, Debug)]
pub struct Enumeration {
    pub cap: u128,
    /// When the pattern space exceeds `cap`, draw this many random patterns
    /// (with the given seed) instead of failing.
    pub sample: Option<(usize, u64)>,
}

impl Default for Enumeration {
    fn default() -> Self {
        Self {
            cap: DEFAULT_PATTERN_CAP,
            sample: None,
        }
    }
}

/// The neighbourhood of one representative vertex: the vertex itself at
/// position 0 followed by every site within range and its shell index.
struct PatternSpace {
    shells: Vec<usize>,
    n_states: usize,
}

impl PatternSpace {
    fn from_sizes(sizes: &[usize], n_states: usize) -> Self {
        let mut shells = vec![0];
        for (d, &count) in sizes.iter().enumerate() {
            shells.extend(std::iter::repeat_n(d + 1, count));
        }
        Self { shells, n_states }
    }

    fn len(&self) -> usize {
        self.shells.len()
    }

    fn size(&self) -> u128 {
        (self.n_states as u128)
            .checked_pow(self.shells.len() as u32)
            .unwrap_or(u128::MAX)
    }

    fn counts(&self, pattern: &[State], range: usize) -> ShellCounts {
        let mut c = ShellCounts::new(range, self.n_states);
        for (i, &s) in pattern.iter().enumerate().skip(1) {
            c.add(self.shells[i], s);
        }
        c
    }

    /// Visits every pattern (or a random sample of them) and reports whether
    /// the visit was exhaustive.
    fn visit(&self, policy: &Enumeration, mut f: impl FnMut(&[State])) -> Result<(bool, u128)> {
        let size = self.size();
        if size <= policy.cap {
            let mut pattern = vec![0 as State; self.len()];
            for _ in 0..size {
                f(&pattern);
                for digit in pattern.iter_mut() {
                    *digit += 1;
                    if (*digit as usize) < self.n_states {
                        break;
                    }
                    *digit = 0;
                }
            }
            return Ok((true, size));
        }
        let Some((samples, seed)) = policy.sample else {
            return Err(Error::EnumerationCap {
                patterns: size,
                cap: policy.cap,
            });
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pattern = vec![0 as State; self.len()];
        for _ in 0..samples {
            for digit in pattern.iter_mut() {
                *digit = rng.random_range(0..self.n_states) as State;
            }
            f(&pattern);
        }
        Ok((false, samples as u128))
    }
}

/// Distinct shell-size profiles in the graph, each with one representative
/// vertex. On a vertex-transitive graph there is exactly one.
fn shell_profiles(g: &Graph, range: usize) -> BTreeMap<Vec<usize>, usize> {
    let table = NeighborhoodTable::new(g, range);
    let mut out = BTreeMap::new();
    for v in 0..g.len() {
        out.entry(table.shell_sizes(v)).or_insert(v);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateBound<T> {
    /// `B = sup_x sum_{T containing x} c_T`, the largest total jump rate of one site.
    pub total: T,
    /// Largest total rate of upward jumps.
    pub max_up: T,
    /// Largest total rate of downward jumps.
    pub max_down: T,
    /// False when the value came from random sampling and is only a lower bound.
    pub exact: bool,
    pub patterns: u128,
}

/// Exact (or sampled) `B` for `rule` on `g`.
pub fn total_rate_bound<T: Scalar>(
    rule: &LocalRule<T>,
    g: &Graph,
    policy: &Enumeration,
) -> Result<RateBound<T>> {
    let n = rule.n_states();
    let mut best = RateBound {
        total: T::zero(),
        max_up: T::zero(),
        max_down: T::zero(),
        exact: true,
        patterns: 0,
    };
    for sizes in shell_profiles(g, rule.range()).keys() {
        let space = PatternSpace::from_sizes(sizes, n);
        let (exact, visited) = space.visit(policy, |p| {
            let shells = space.counts(p, rule.range());
            let own = p[0];
            let mut up = T::zero();
            let mut down = T::zero();
            for to in 0..n as State {
                let r = rule.rate(own, to, &shells);
                if to > own {
                    up = up + r;
                } else if to < own {
                    down = down + r;
                }
            }
            best.total = best.total.max(up + down);
            best.max_up = best.max_up.max(up);
            best.max_down = best.max_down.max(down);
        })?;
        best.exact &= exact;
        best.patterns += visited;
    }
    Ok(best)
}

/// Sparse influence matrix `gamma(x, y)` with its row-sum bound `M`.
#[derive(Clone, Debug)]
pub struct InfluenceMatrix<T> {
    rows: Vec<Vec<(usize, T)>>,
    pub m: T,
    pub exact: bool,
}

impl<T: Scalar> InfluenceMatrix<T> {
    /// Nonzero entries `(y, gamma(x, y))` of row `x`.
    pub fn row(&self, x: usize) -> &[(usize, T)] {
        &self.rows[x]
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.rows[x]
            .iter()
            .find(|&&(u, _)| u == y)
            .map_or(T::zero(), |&(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `u -> u Gamma`, i.e. `(u Gamma)(y) = sum_x u(x) gamma(x, y)`.
    pub fn apply_right(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); u.len()];
        for (x, row) in self.rows.iter().enumerate() {
            if u[x] == T::zero() {
                continue;
            }
            for &(y, g) in row {
                out[y] = out[y] + u[x] * g;
            }
        }
        out
    }

    /// `exp(t Gamma) u` by its power series, summed until the terms vanish.
    pub fn exp_apply(&self, t: T, u: &[T]) -> Vec<T> {
        let mut total = u.to_vec();
        let mut term = u.to_vec();
        let tol = T::epsilon() * T::of(1e-4);
        for k in 1..10_000usize {
            term = self.apply_right(&term);
            let scale = t / T::of(k as f64);
            term.iter_mut().for_each(|v| *v = *v * scale);
            let mut largest = T::zero();
            for (acc, &v) in total.iter_mut().zip(&term) {
                *acc = *acc + v;
                largest = largest.max(v.abs());
            }
            if largest <= tol {
                break;
            }
        }
        total
    }
}

/// Influence `gamma(x, y)` of site `y` on the rates at `x`: the largest `l1`
/// distance between the jump-rate vectors at `x` when only `y` changes.
/// Computed once per (shell profile, distance) and spread over the graph.
pub fn influence_matrix<T: Scalar>(
    rule: &LocalRule<T>,
    g: &Graph,
    policy: &Enumeration,
) -> Result<InfluenceMatrix<T>> {
    let n = rule.n_states();
    let k = rule.range();
    let mut per_profile: BTreeMap<Vec<usize>, Vec<T>> = BTreeMap::new();
    let mut exact = true;
    for sizes in shell_profiles(g, k).keys() {
        let space = PatternSpace::from_sizes(sizes, n);
        let mut by_shell = vec![T::zero(); k + 1];
        let mut base = vec![T::zero(); n];
        let mut moved = vec![T::zero(); n];
        let (ex, _) = space.visit(policy, |p| {
            let mut shells = space.counts(p, k);
            let own = p[0];
            rule.rates_into(own, &shells, &mut base);
            for (i, &old) in p.iter().enumerate().skip(1) {
                let d = space.shells[i];
                for s in 0..n as State {
                    if s <= old {
                        continue;
                    }
                    shells.remove(d, old);
                    shells.add(d, s);
                    rule.rates_into(own, &shells, &mut moved);
                    shells.remove(d, s);
                    shells.add(d, old);
                    let diff: T = base.iter().zip(&moved).map(|(&a, &b)| (a - b).abs()).sum();
                    by_shell[d] = by_shell[d].max(diff);
                }
            }
        })?;
        exact &= ex;
        per_profile.insert(sizes.clone(), by_shell);
    }
    let table = NeighborhoodTable::new(g, k);
    let mut m = T::zero();
    let rows = (0..g.len())
        .map(|x| {
            let gammas = &per_profile[&table.shell_sizes(x)];
            let row: Vec<(usize, T)> = table
                .around(x)
                .iter()
                .map(|&(y, d)| (y as usize, gammas[d as usize]))
                .filter(|&(_, v)| v > T::zero())
                .collect();
            m = m.max(row.iter().map(|&(_, v)| v).sum());
            row
        })
        .collect();
    Ok(InfluenceMatrix { rows, m, exact })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpDirection {
    Up,
    Down,
}

/// A covering pair of neighbourhood patterns `low <= high` at which the
/// threshold rates go the wrong way.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneViolation {
    /// Pattern around the focal site, focal site first.
    pub low: Vec<State>,
    pub high: Vec<State>,
    pub threshold: State,
    pub direction: JumpDirection,
    pub low_rate: f64,
    pub high_rate: f64,
}

#[derive(Clone, Debug)]
pub struct MonotonicityCertificate {
    pub passed: bool,
    pub violation: Option<MonotoneViolation>,
    pub pairs_checked: u128,
}

/// Checks the sufficient condition for attractiveness of single-site
/// dynamics: for ordered patterns `low <= high` and every threshold `l`,
/// the rate of jumping to `>= l` from below `l` does not decrease, and the
/// rate of jumping below `l` from `>= l` does not increase. Only covering
/// pairs (one site raised by one level) are checked; the general case
/// follows by chaining.
pub fn monotonicity_certificate<T: Scalar>(
    rule: &LocalRule<T>,
    g: &Graph,
    policy: &Enumeration,
) -> Result<MonotonicityCertificate> {
    let n = rule.n_states();
    let k = rule.range();
    let mut violation = None;
    let mut pairs = 0u128;
    let exhaustive = Enumeration {
        cap: policy.cap,
        sample: None,
    };
    for sizes in shell_profiles(g, k).keys() {
        let space = PatternSpace::from_sizes(sizes, n);
        let mut lo = vec![T::zero(); n];
        let mut hi = vec![T::zero(); n];
        space.visit(&exhaustive, |p| {
            if violation.is_some() {
                return;
            }
            let shells_lo = space.counts(p, k);
            rule.rates_into(p[0], &shells_lo, &mut lo);
            for i in 0..space.len() {
                if p[i] as usize + 1 >= n {
                    continue;
                }
                let mut q = p.to_vec();
                q[i] += 1;
                let shells_hi = space.counts(&q, k);
                rule.rates_into(q[0], &shells_hi, &mut hi);
                pairs += 1;
                if let Some(v) = threshold_violation(p, &q, &lo, &hi) {
                    violation = Some(v);
                    return;
                }
            }
        })?;
        if violation.is_some() {
            break;
        }
    }
    Ok(MonotonicityCertificate {
        passed: violation.is_none(),
        violation,
        pairs_checked: pairs,
    })
}

fn threshold_violation<T: Scalar>(
    low: &[State],
    high: &[State],
    lo_rates: &[T],
    hi_rates: &[T],
) -> Option<MonotoneViolation> {
    let n = lo_rates.len();
    let (a, b) = (low[0] as usize, high[0] as usize);
    let slack = |x: T, y: T| T::epsilon() * T::of(64.0) * (T::one() + x.abs().max(y.abs()));
    for l in 1..n {
        if a < l && b < l {
            let u_lo: T = lo_rates[l..].iter().copied().sum();
            let u_hi: T = hi_rates[l..].iter().copied().sum();
            if u_lo > u_hi + slack(u_lo, u_hi) {
                return Some(MonotoneViolation {
                    low: low.to_vec(),
                    high: high.to_vec(),
                    threshold: l as State,
                    direction: JumpDirection::Up,
                    low_rate: u_lo.as_f64(),
                    high_rate: u_hi.as_f64(),
                });
            }
        }
        if a >= l && b >= l {
            let d_lo: T = lo_rates[..l].iter().copied().sum();
            let d_hi: T = hi_rates[..l].iter().copied().sum();
            if d_hi > d_lo + slack(d_lo, d_hi) {
                return Some(MonotoneViolation {
                    low: low.to_vec(),
                    high: high.to_vec(),
                    threshold: l as State,
                    direction: JumpDirection::Down,
                    low_rate: d_lo.as_f64(),
                    high_rate: d_hi.as_f64(),
                });
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct PositiveCorrelationsCertificate {
    pub passed: bool,
    /// Always true: every rule here updates one site per jump, which makes
    /// the generator condition `Omega(fg) >= f Omega g + g Omega f` on
    /// monotone functions automatic.
    pub single_site: bool,
    pub monotone: MonotonicityCertificate,
}

pub fn positive_correlations_certificate<T: Scalar>(
    rule: &LocalRule<T>,
    g: &Graph,
    policy: &Enumeration,
) -> Result<PositiveCorrelationsCertificate> {
    let monotone = monotonicity_certificate(rule, g, policy)?;
    Ok(PositiveCorrelationsCertificate {
        passed: monotone.passed,
        single_site: true,
        monotone,
    })
}
