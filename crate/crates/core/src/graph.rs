//! Finite transitive graphs and their metric structure.
//!
//! Three families are provided: tori `(Z/side)^d`, balls of the `r`-regular
//! tree (the Cayley graph of the free product of `r` copies of `Z/2`), and
//! balls of the "tetrahedron tree", the Cayley graph of `(Z/2)^2 * Z/2`
//! with generators `a, b, c = ab, d`. Tori have no boundary. The two tree
//! families are truncated, so every vertex carries an interior radius: its
//! hop distance to the nearest vertex whose neighbourhood was cut.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// Default upper bound on the number of vertices a builder may allocate.
pub const DEFAULT_VERTEX_CAP: usize = 4_000_000;

/// Distance value used for unreachable vertices.
pub const UNREACHABLE: usize = usize::MAX;

const PROFILE_EXACT_LIMIT: usize = 5_000;
const PROFILE_SAMPLE: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Torus { dim: usize, side: usize },
    TreeBall { degree: usize, radius: usize },
    TetraTreeBall { radius: usize },
    /// Hand-assembled adjacency, mostly for audits and tests.
    Custom,
}

#[derive(Clone, Debug)]
pub struct Graph {
    kind: GraphKind,
    degree: usize,
    adjacency: Vec<Vec<usize>>,
    interior_radius: Option<Vec<usize>>,
    center: usize,
}

impl Graph {
    /// Torus `(Z/side)^dim` with nearest-neighbour edges.
    pub fn torus(dim: usize, side: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidGraph("torus dimension must be >= 1".into()));
        }
        if side < 3 {
            return Err(Error::InvalidGraph(format!(
                "torus side must be >= 3, got {side}"
            )));
        }
        let requested = (side as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if requested > DEFAULT_VERTEX_CAP as u128 {
            return Err(Error::VertexCap {
                requested,
                cap: DEFAULT_VERTEX_CAP,
            });
        }
        let n = requested as usize;
        let mut adjacency = Vec::with_capacity(n);
        let mut coords = vec![0usize; dim];
        for v in 0..n {
            let mut rest = v;
            for c in coords.iter_mut() {
                *c = rest % side;
                rest /= side;
            }
            let mut nbrs = Vec::with_capacity(2 * dim);
            let mut stride = 1;
            for &c in &coords {
                let up = if c + 1 == side { v - c * stride } else { v + stride };
                let down = if c == 0 { v + (side - 1) * stride } else { v - stride };
                nbrs.push(up);
                nbrs.push(down);
                stride *= side;
            }
            nbrs.sort_unstable();
            adjacency.push(nbrs);
        }
        Ok(Self {
            kind: GraphKind::Torus { dim, side },
            degree: 2 * dim,
            adjacency,
            interior_radius: None,
            center: 0,
        })
    }

    pub fn tree_ball(degree: usize, radius: usize) -> Result<Self> {
        Self::tree_ball_capped(degree, radius, DEFAULT_VERTEX_CAP)
    }

    /// Ball of radius `radius` around the identity in the `degree`-regular tree.
    /// Vertex 0 is the root; vertices are numbered shell by shell.
    pub fn tree_ball_capped(degree: usize, radius: usize, cap: usize) -> Result<Self> {
        if degree < 3 {
            return Err(Error::InvalidGraph(format!(
                "tree degree must be >= 3, got {degree}"
            )));
        }
        if radius < 1 {
            return Err(Error::InvalidGraph("tree radius must be >= 1".into()));
        }
        let mut requested: u128 = 1;
        let mut shell: u128 = degree as u128;
        for _ in 0..radius {
            requested = requested.saturating_add(shell);
            shell = shell.saturating_mul(degree as u128 - 1);
        }
        if requested > cap as u128 {
            return Err(Error::VertexCap { requested, cap });
        }
        let n = requested as usize;
        let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(n);
        adjacency.push(Vec::with_capacity(degree));
        let mut depth = vec![0usize];
        let mut frontier = vec![0usize];
        for d in 0..radius {
            let mut next = Vec::new();
            for &parent in &frontier {
                let children = if d == 0 { degree } else { degree - 1 };
                for _ in 0..children {
                    let child = adjacency.len();
                    adjacency.push(vec![parent]);
                    depth.push(d + 1);
                    adjacency[parent].push(child);
                    next.push(child);
                }
            }
            frontier = next;
        }
        for nbrs in adjacency.iter_mut() {
            nbrs.sort_unstable();
        }
        let interior = depth.iter().map(|&d| radius - d).collect();
        Ok(Self {
            kind: GraphKind::TreeBall { degree, radius },
            degree,
            adjacency,
            interior_radius: Some(interior),
            center: 0,
        })
    }

    pub fn tetra_tree_ball(radius: usize) -> Result<Self> {
        Self::tetra_tree_ball_capped(radius, DEFAULT_VERTEX_CAP)
    }

    /// Ball of radius `radius` around the identity in the Cayley graph of
    /// `<a, b, c, d | a^2, b^2, c^2, d^2, ab = c>`.
    ///
    /// Elements are kept in normal form: words alternating between a
    /// non-identity Klein-group letter (`a = 1`, `b = 2`, `c = 3`, product is
    /// xor) and `d`.
    pub fn tetra_tree_ball_capped(radius: usize, cap: usize) -> Result<Self> {
        if radius < 1 {
            return Err(Error::InvalidGraph("tetra-tree radius must be >= 1".into()));
        }
        const GENERATORS: [u8; 4] = [1, 2, 3, TETRA_D];
        let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        index.insert(Vec::new(), 0);
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        while let Some((v, dist)) = queue.pop_front() {
            if dist == radius {
                continue;
            }
            for g in GENERATORS {
                let w = tetra_multiply(&words[v], g);
                if !index.contains_key(&w) {
                    if words.len() >= cap {
                        return Err(Error::VertexCap {
                            requested: words.len() as u128 + 1,
                            cap,
                        });
                    }
                    let id = words.len();
                    index.insert(w.clone(), id);
                    words.push(w);
                    queue.push_back((id, dist + 1));
                }
            }
        }
        let adjacency: Vec<Vec<usize>> = words
            .iter()
            .map(|w| {
                let mut nbrs: Vec<usize> = GENERATORS
                    .iter()
                    .filter_map(|&g| index.get(&tetra_multiply(w, g)).copied())
                    .collect();
                nbrs.sort_unstable();
                nbrs
            })
            .collect();
        let mut graph = Self {
            kind: GraphKind::TetraTreeBall { radius },
            degree: 4,
            adjacency,
            interior_radius: None,
            center: 0,
        };
        graph.interior_radius = Some(graph.deficiency_distances());
        Ok(graph)
    }

    /// Wraps an explicit adjacency structure after checking it is simple and
    /// undirected. `degree` is the nominal degree of the untruncated graph;
    /// with `truncated`, vertices with fewer neighbours mark the truncation
    /// boundary, otherwise they are simply defects.
    pub fn from_adjacency(
        degree: usize,
        mut adjacency: Vec<Vec<usize>>,
        truncated: bool,
    ) -> Result<Self> {
        let n = adjacency.len();
        for nbrs in adjacency.iter_mut() {
            nbrs.sort_unstable();
        }
        for (v, nbrs) in adjacency.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("vertex {v} has a repeated neighbour")));
            }
            for &u in nbrs {
                if u >= n {
                    return Err(Error::VertexOutOfRange(u));
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {v}")));
                }
                if adjacency[u].binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!("edge {v}-{u} is not symmetric")));
                }
            }
        }
        let mut graph = Self {
            kind: GraphKind::Custom,
            degree,
            adjacency,
            interior_radius: None,
            center: 0,
        };
        if truncated {
            let interior = graph.deficiency_distances();
            graph.center = (0..n).max_by_key(|&v| (interior[v], std::cmp::Reverse(v))).unwrap_or(0);
            graph.interior_radius = Some(interior);
        }
        Ok(graph)
    }

    /// Copy of this graph with the edge `u`-`v` removed.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut adjacency = self.adjacency.clone();
        adjacency
            .get_mut(u)
            .ok_or(Error::VertexOutOfRange(u))?
            .retain(|&x| x != v);
        adjacency
            .get_mut(v)
            .ok_or(Error::VertexOutOfRange(v))?
            .retain(|&x| x != u);
        Self::from_adjacency(self.degree, adjacency, self.is_truncated())
    }

    fn deficiency_distances(&self) -> Vec<usize> {
        let sources: Vec<usize> = (0..self.len())
            .filter(|&v| self.adjacency[v].len() < self.degree)
            .collect();
        if sources.is_empty() {
            return vec![UNREACHABLE; self.len()];
        }
        self.multi_source_distances(&sources)
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    /// Nominal degree `r` of the (untruncated) graph.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Root of a tree ball, or vertex 0 for tori.
    pub fn center(&self) -> usize {
        self.center
    }

    pub fn is_truncated(&self) -> bool {
        self.interior_radius.is_some()
    }

    /// Hop distance from `v` to the nearest truncated vertex; `None` when the
    /// graph has no truncation.
    pub fn interior_radius(&self, v: usize) -> Option<usize> {
        self.interior_radius.as_ref().map(|r| r[v])
    }

    /// Vertices whose distance to the truncation boundary is at least `margin`.
    pub fn interior_vertices(&self, margin: usize) -> Vec<usize> {
        match &self.interior_radius {
            None => (0..self.len()).collect(),
            Some(r) => (0..self.len()).filter(|&v| r[v] >= margin).collect(),
        }
    }

    /// Growth exponent `ln(r - 1)` used by the ball-size bound of the
    /// covariance inequality.
    pub fn rho(&self) -> f64 {
        ((self.degree as f64) - 1.0).ln()
    }

    /// Growth exponent `ln(max(r, 4) - 1)` used by the random-field CLT.
    pub fn rho_field(&self) -> f64 {
        ((self.degree.max(4) as f64) - 1.0).ln()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }

    /// BFS distances from `x` to every vertex.
    pub fn distances_from(&self, x: usize) -> Vec<usize> {
        self.multi_source_distances(&[x])
    }

    fn multi_source_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.len()];
        let mut queue = VecDeque::with_capacity(self.len());
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &u in &self.adjacency[v] {
                if dist[u] == UNREACHABLE {
                    dist[u] = next;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Distances from `x`, truncated at `radius`: returns `(vertex, distance)`
    /// pairs in BFS order, `x` first.
    pub fn bfs_within(&self, x: usize, radius: usize) -> Vec<(usize, usize)> {
        let mut seen = HashMap::new();
        seen.insert(x, 0usize);
        let mut order = vec![(x, 0)];
        let mut head = 0;
        while head < order.len() {
            let (v, d) = order[head];
            head += 1;
            if d == radius {
                continue;
            }
            for &u in &self.adjacency[v] {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(u) {
                    e.insert(d + 1);
                    order.push((u, d + 1));
                }
            }
        }
        order
    }

    /// Graph distance between `x` and `y`.
    pub fn distance(&self, x: usize, y: usize) -> Result<usize> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Ok(0);
        }
        let mut dist = vec![UNREACHABLE; self.len()];
        dist[x] = 0;
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if dist[u] == UNREACHABLE {
                    dist[u] = dist[v] + 1;
                    if u == y {
                        return Ok(dist[u]);
                    }
                    queue.push_back(u);
                }
            }
        }
        Ok(UNREACHABLE)
    }

    fn check_radius(&self, x: usize, n: usize) -> Result<()> {
        self.check_vertex(x)?;
        if let Some(available) = self.interior_radius(x) {
            if n > available {
                return Err(Error::BeyondTruncation {
                    vertex: x,
                    requested: n,
                    available,
                });
            }
        }
        Ok(())
    }

    /// Vertices at distance exactly `n` from `x`, sorted.
    pub fn sphere(&self, x: usize, n: usize) -> Result<Vec<usize>> {
        self.check_radius(x, n)?;
        let mut out: Vec<usize> = self
            .bfs_within(x, n)
            .into_iter()
            .filter(|&(_, d)| d == n)
            .map(|(v, _)| v)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Vertices at distance at most `n` from `x`, sorted.
    pub fn ball(&self, x: usize, n: usize) -> Result<Vec<usize>> {
        self.check_radius(x, n)?;
        let mut out: Vec<usize> = self.bfs_within(x, n).into_iter().map(|(v, _)| v).collect();
        out.sort_unstable();
        Ok(out)
    }

    pub fn eccentricity(&self, x: usize) -> usize {
        self.distances_from(x)
            .into_iter()
            .max()
            .unwrap_or(0)
    }

    /// Largest finite distance. Exact for tori, trees and graphs up to a few
    /// thousand vertices; a double-sweep lower bound beyond that.
    pub fn diameter(&self) -> usize {
        match self.kind {
            GraphKind::Torus { .. } => self.eccentricity(0),
            GraphKind::TreeBall { radius, .. } => 2 * radius,
            _ if self.len() <= PROFILE_EXACT_LIMIT => {
                (0..self.len()).map(|v| self.eccentricity(v)).max().unwrap_or(0)
            }
            _ => {
                let d0 = self.distances_from(self.center);
                let far = (0..self.len()).max_by_key(|&v| d0[v]).unwrap_or(0);
                self.eccentricity(far)
            }
        }
    }

    /// Sorted histogram of distances from `x`: entry `n` counts the vertices at
    /// distance `n`.
    pub fn distance_profile(&self, x: usize) -> Vec<usize> {
        let mut hist = Vec::new();
        for d in self.distances_from(x) {
            if d == UNREACHABLE {
                continue;
            }
            if hist.len() <= d {
                hist.resize(d + 1, 0);
            }
            hist[d] += 1;
        }
        hist
    }
}

const TETRA_D: u8 = 4;

fn tetra_multiply(word: &[u8], g: u8) -> Vec<u8> {
    let mut w = word.to_vec();
    match (w.last().copied(), g) {
        (Some(TETRA_D), TETRA_D) => {
            w.pop();
        }
        (Some(last), g) if last != TETRA_D && g != TETRA_D => {
            let prod = last ^ g;
            w.pop();
            if prod != 0 {
                w.push(prod);
            }
        }
        _ => w.push(g),
    }
    w
}

/// A finite vertex subset together with its inner boundary
/// `{x in R : some neighbour of x lies outside R}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub label: String,
    members: Vec<usize>,
    boundary: Vec<usize>,
}

impl Region {
    pub fn new(g: &Graph, label: impl Into<String>, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&v) = members.iter().find(|&&v| v >= g.len()) {
            return Err(Error::VertexOutOfRange(v));
        }
        let boundary = region_boundary(g, &members);
        Ok(Self {
            label: label.into(),
            members,
            boundary,
        })
    }

    pub fn whole(g: &Graph) -> Self {
        Self {
            label: "S".into(),
            members: (0..g.len()).collect(),
            boundary: Vec::new(),
        }
    }

    pub fn ball(g: &Graph, x: usize, n: usize) -> Result<Self> {
        let members = g.ball(x, n)?;
        Self::new(g, format!("B({x},{n})"), members)
    }

    /// Interior core of a truncated graph (every vertex for tori).
    pub fn interior(g: &Graph, margin: usize) -> Result<Self> {
        let members = g.interior_vertices(margin);
        if members.is_empty() {
            return Err(Error::InvalidGraph(format!(
                "no vertex lies at distance >= {margin} from the truncation boundary"
            )));
        }
        Self::new(g, format!("interior({margin})"), members)
    }

    /// Axis-aligned box `[0, side)^d` in a torus.
    pub fn torus_box(g: &Graph, side: usize) -> Result<Self> {
        let GraphKind::Torus { dim, side: tside } = *g.kind() else {
            return Err(Error::InvalidGraph("boxes are only defined on tori".into()));
        };
        if side == 0 || side > tside {
            return Err(Error::InvalidGraph(format!(
                "box side {side} must lie in 1..={tside}"
            )));
        }
        let count = side.pow(dim as u32);
        let members = (0..count)
            .map(|mut i| {
                let mut v = 0;
                let mut stride = 1;
                for _ in 0..dim {
                    v += (i % side) * stride;
                    i /= side;
                    stride *= tside;
                }
                v
            })
            .collect();
        Self::new(g, format!("box({side})"), members)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn boundary_fraction(&self) -> f64 {
        if self.members.is_empty() {
            0.0
        } else {
            self.boundary.len() as f64 / self.members.len() as f64
        }
    }

    /// Dense membership mask over the graph's vertices.
    pub fn mask(&self, n_vertices: usize) -> Vec<bool> {
        let mut mask = vec![false; n_vertices];
        for &v in &self.members {
            mask[v] = true;
        }
        mask
    }
}

/// Members of `members` having at least one neighbour outside the set.
pub fn region_boundary(g: &Graph, members: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; g.len()];
    for &v in members {
        inside[v] = true;
    }
    let mut out: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&v| g.neighbors(v).iter().any(|&u| !inside[u]))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub sphere: usize,
    pub ball: usize,
    /// `2 e^{n rho}` with `rho = ln(r - 1)`.
    pub bound_s3: f64,
    /// `2 e^{n rho}` with `rho = ln(max(r, 4) - 1)`.
    pub bound_s7: f64,
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub center: usize,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn ball_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].ball <= w[1].ball)
    }

    /// Rows where the shell size exceeds `2 e^{n ln(r-1)}`.
    pub fn sphere_violations_s3(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.sphere as f64 > r.bound_s3 * (1.0 + 1e-12))
            .map(|r| r.n)
            .collect()
    }

    /// Rows where the ball size exceeds `2 e^{n ln(r-1)}`.
    pub fn ball_violations_s3(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.ball as f64 > r.bound_s3 * (1.0 + 1e-12))
            .map(|r| r.n)
            .collect()
    }

    /// Rows where the ball size exceeds `2 e^{n ln(max(r,4)-1)}`.
    pub fn ball_violations_s7(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.ball as f64 > r.bound_s7 * (1.0 + 1e-12))
            .map(|r| r.n)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sphere,ball,bound_s3,bound_s7\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.sphere, r.ball, r.bound_s3, r.bound_s7
            ));
        }
        out
    }
}

/// Sphere and ball sizes around the graph's center, out to its interior
/// radius (or eccentricity for untruncated graphs).
pub fn growth_report(g: &Graph) -> GrowthReport {
    let center = g.center();
    let profile = g.distance_profile(center);
    let max_n = match g.interior_radius(center) {
        Some(r) => r.min(profile.len().saturating_sub(1)),
        None => profile.len().saturating_sub(1),
    };
    let (rho3, rho7) = (g.rho(), g.rho_field());
    let mut ball = 0;
    let rows = (0..=max_n)
        .map(|n| {
            ball += profile[n];
            GrowthRow {
                n,
                sphere: profile[n],
                ball,
                bound_s3: 2.0 * (n as f64 * rho3).exp(),
                bound_s7: 2.0 * (n as f64 * rho7).exp(),
            }
        })
        .collect();
    GrowthReport { center, rows }
}

#[derive(Clone, Debug)]
pub struct TransitivityReport {
    pub passed: bool,
    pub degree_uniform: bool,
    pub profiles_consistent: bool,
    pub vertices_checked: usize,
    /// Vertices skipped because they sit on the truncation boundary.
    pub truncated_excluded: usize,
    /// Whether only a sample of vertices had their profiles compared.
    pub sampled: bool,
    /// First vertex whose degree or profile disagreed with the reference.
    pub witness: Option<usize>,
    pub note: &'static str,
}

/// Necessary-condition audit for vertex transitivity: uniform degree and
/// matching distance profiles. Truncated graphs are audited on interior
/// vertices only, each profile compared with the center's up to that vertex's
/// interior radius.
pub fn transitivity_witness(g: &Graph) -> TransitivityReport {
    let checked: Vec<usize> = match g.interior_radius {
        Some(ref r) => (0..g.len()).filter(|&v| r[v] >= 1).collect(),
        None => (0..g.len()).collect(),
    };
    let truncated_excluded = g.len() - checked.len();
    let bad_degree = checked.iter().copied().find(|&v| g.neighbors(v).len() != g.degree());

    let sampled = checked.len() > PROFILE_EXACT_LIMIT;
    let probe: Vec<usize> = if sampled {
        let step = checked.len() / PROFILE_SAMPLE;
        checked.iter().copied().step_by(step.max(1)).collect()
    } else {
        checked.clone()
    };
    let reference = g.distance_profile(g.center());
    let bad_profile = probe.iter().copied().find(|&v| {
        let profile = g.distance_profile(v);
        match g.interior_radius(v) {
            None => profile != reference,
            Some(r) => {
                let upto = r + 1;
                profile.len() < upto.min(reference.len())
                    || reference.len() < upto.min(profile.len())
                    || profile[..upto.min(profile.len())] != reference[..upto.min(reference.len())]
            }
        }
    });
    TransitivityReport {
        passed: bad_degree.is_none() && bad_profile.is_none(),
        degree_uniform: bad_degree.is_none(),
        profiles_consistent: bad_profile.is_none(),
        vertices_checked: checked.len(),
        truncated_excluded,
        sampled,
        witness: bad_degree.or(bad_profile),
        note: "necessary conditions only (degree and distance profiles); not an automorphism search",
    }
}
