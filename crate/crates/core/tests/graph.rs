use std::collections::{HashMap, HashSet};

use ipsim_core::graph::{growth_report, transitivity_witness, Graph, Region};
use proptest::prelude::*;

/// Shortest-word lengths of group elements reached by words of length at
/// most `n`, each word reduced by `reduce`.
fn word_spheres(generators: &[u8], n: usize, reduce: impl Fn(&[u8]) -> Vec<u8>) -> Vec<usize> {
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    seen.insert(Vec::new(), 0);
    for len in 1..=n {
        let mut next = Vec::new();
        for w in &frontier {
            for &g in generators {
                let mut word = w.clone();
                word.push(g);
                next.push(word.clone());
                seen.entry(reduce(&word)).or_insert(len);
            }
        }
        frontier = next;
    }
    let mut spheres = vec![0; n + 1];
    for &l in seen.values() {
        spheres[l] += 1;
    }
    spheres
}

fn free_involutions(word: &[u8]) -> Vec<u8> {
    let mut stack = Vec::new();
    for &g in word {
        if stack.last() == Some(&g) {
            stack.pop();
        } else {
            stack.push(g);
        }
    }
    stack
}

/// Letters 1, 2, 3 form the Klein group under xor; 4 is a free involution.
fn klein_star_z2(word: &[u8]) -> Vec<u8> {
    let mut stack: Vec<u8> = Vec::new();
    for &g in word {
        match stack.last().copied() {
            Some(4) if g == 4 => {
                stack.pop();
            }
            Some(top) if top != 4 && g != 4 => {
                stack.pop();
                let p = top ^ g;
                if p != 0 {
                    stack.push(p);
                }
            }
            _ => stack.push(g),
        }
    }
    stack
}

fn lattice_sphere(dim: usize, n: usize) -> usize {
    let side = 2 * n + 1;
    (0..side.pow(dim as u32))
        .filter(|&idx| {
            let mut i = idx;
            let mut norm = 0;
            for _ in 0..dim {
                norm += ((i % side) as i64 - n as i64).unsigned_abs() as usize;
                i /= side;
            }
            norm == n
        })
        .count()
}

#[test]
fn tree_ball_matches_reduced_words() {
    for degree in [3usize, 4, 5] {
        let g = Graph::tree_ball(degree, 4).unwrap();
        let gens: Vec<u8> = (0..degree as u8).collect();
        assert_eq!(g.distance_profile(g.center()), word_spheres(&gens, 4, free_involutions));
    }
}

#[test]
fn degree_four_tree_spheres() {
    let g = Graph::tree_ball(4, 3).unwrap();
    assert_eq!(g.distance_profile(0), vec![1, 4, 12, 36]);
    assert_eq!(g.len(), 53);
}

#[test]
fn tetra_tree_matches_word_enumeration() {
    let g = Graph::tetra_tree_ball(6).unwrap();
    let expected = word_spheres(&[1, 2, 3, 4], 6, klein_star_z2);
    assert_eq!(g.distance_profile(g.center()), expected);
    assert_eq!(expected, vec![1, 4, 6, 12, 18, 36, 54]);
}

#[test]
fn torus_spheres_match_lattice_until_wraparound() {
    for dim in 1..=3 {
        let g = Graph::torus(dim, 11).unwrap();
        for n in 0..=5 {
            assert_eq!(g.sphere(0, n).unwrap().len(), lattice_sphere(dim, n), "dim {dim} n {n}");
        }
    }
}

#[test]
fn growth_bounds_hold_on_regular_trees() {
    for degree in [3, 4, 6] {
        let r = growth_report(&Graph::tree_ball(degree, 5).unwrap());
        assert!(r.sphere_violations_s3().is_empty());
        assert!(r.ball_violations_s7().is_empty());
        assert!(r.ball_monotone());
    }
}

#[test]
fn witness_passes_on_vertex_transitive_graphs() {
    for g in [
        Graph::torus(2, 6).unwrap(),
        Graph::torus(3, 4).unwrap(),
        Graph::tree_ball(3, 5).unwrap(),
        Graph::tetra_tree_ball(5).unwrap(),
    ] {
        let w = transitivity_witness(&g);
        assert!(w.passed, "{:?}", g.kind());
    }
}

#[test]
fn truncated_tree_excludes_leaves_from_witness() {
    let g = Graph::tree_ball(3, 3).unwrap();
    let w = transitivity_witness(&g);
    assert_eq!(w.truncated_excluded, 12);
    assert_eq!(w.vertices_checked, 10);
}

#[test]
fn box_boundary_fraction_shrinks() {
    let g = Graph::torus(2, 64).unwrap();
    let fractions: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&s| Region::torus_box(&g, s).unwrap().boundary_fraction())
        .collect();
    assert_eq!(fractions, vec![28.0 / 64.0, 60.0 / 256.0, 124.0 / 1024.0]);
}

proptest! {
    #[test]
    fn torus_distances_form_a_metric(dim in 1usize..4, side in 3usize..7, seed in any::<u64>()) {
        let g = Graph::torus(dim, side).unwrap();
        let n = g.len();
        let pick = |k: u64| ((seed.wrapping_mul(6364136223846793005).wrapping_add(k)) >> 17) as usize % n;
        let (x, y, z) = (pick(1), pick(2), pick(3));
        let dxy = g.distance(x, y).unwrap();
        prop_assert_eq!(dxy, g.distance(y, x).unwrap());
        prop_assert!(dxy <= g.distance(x, z).unwrap() + g.distance(z, y).unwrap());
        prop_assert_eq!(dxy == 0, x == y);
        prop_assert_eq!(g.distance_profile(x), g.distance_profile(y));
    }

    #[test]
    fn spheres_partition_the_graph(dim in 1usize..4, side in 3usize..7) {
        let g = Graph::torus(dim, side).unwrap();
        let mut all = HashSet::new();
        for n in 0..=g.eccentricity(0) {
            for v in g.sphere(0, n).unwrap() {
                prop_assert!(all.insert(v));
                prop_assert_eq!(g.distance(0, v).unwrap(), n);
            }
        }
        prop_assert_eq!(all.len(), g.len());
    }

    #[test]
    fn region_boundary_is_inner(side in 3usize..10, box_side in 1usize..10) {
        prop_assume!(box_side <= side);
        let g = Graph::torus(2, side).unwrap();
        let r = Region::torus_box(&g, box_side).unwrap();
        prop_assert_eq!(r.len(), box_side * box_side);
        for &v in r.members() {
            let exposed = g.neighbors(v).iter().any(|&u| !r.contains(u));
            prop_assert_eq!(exposed, r.boundary().contains(&v));
        }
    }

    #[test]
    fn tree_ball_sizes(degree in 3usize..6, radius in 1usize..5) {
        let g = Graph::tree_ball(degree, radius).unwrap();
        let expected: usize = 1 + (1..=radius).map(|n| degree * (degree - 1).pow(n as u32 - 1)).sum::<usize>();
        prop_assert_eq!(g.len(), expected);
        for v in g.interior_vertices(1) {
            prop_assert_eq!(g.neighbors(v).len(), degree);
        }
    }
}

fn tetra_closed_form(n: usize) -> usize {
    if n.is_multiple_of(2) {
        4 * 3usize.pow(n as u32 / 2)
    } else {
        6 * 3usize.pow((n as u32 - 1) / 2)
    }
}

#[test]
fn tetra_tree_spheres_follow_shifted_closed_form() {
    // The closed form 4*3^{n/2} (even) / 6*3^{(n-1)/2} (odd) matches the
    // BFS counts one shell further out.
    let g = Graph::tetra_tree_ball(7).unwrap();
    let profile = g.distance_profile(g.center());
    for (n, &size) in profile.iter().enumerate().skip(1) {
        assert_eq!(size, tetra_closed_form(n - 1), "n = {n}");
        assert_ne!(size, tetra_closed_form(n), "n = {n}");
    }
}

#[test]
fn tetra_tree_vertices_lie_in_one_clique() {
    let g = Graph::tetra_tree_ball(5).unwrap();
    for v in g.interior_vertices(1) {
        let nb = g.neighbors(v);
        assert_eq!(nb.len(), 4);
        let clique: Vec<usize> = nb
            .iter()
            .copied()
            .filter(|&u| nb.iter().filter(|&&w| w != u && g.neighbors(u).contains(&w)).count() == 2)
            .collect();
        assert_eq!(clique.len(), 3, "vertex {v}");
        let tree_edges = nb.iter().filter(|u| !clique.contains(u)).count();
        assert_eq!(tree_edges, 1);
    }
}

#[test]
fn small_fixed_examples() {
    let c4 = Graph::torus(1, 4).unwrap();
    assert_eq!((c4.len(), c4.degree()), (4, 2));
    assert_eq!(Graph::torus(2, 4).unwrap().diameter(), 4);
    let t = Graph::torus(2, 5).unwrap();
    assert_eq!(t.distance(0, 2 + 2 * 5).unwrap(), 4);
    assert_eq!(t.ball(3, 1).unwrap().len(), 5);
    let tree = Graph::tree_ball(3, 2).unwrap();
    assert_eq!(tree.distance_profile(0), vec![1, 3, 6]);
    assert_eq!(Graph::tree_ball(3, 1).unwrap().len(), 4);
}

proptest! {
    #[test]
    fn boundary_of_boundary_stays_inside(side in 3usize..8, bits in proptest::collection::vec(any::<bool>(), 64)) {
        let g = Graph::torus(2, side).unwrap();
        let members: Vec<usize> = (0..g.len()).filter(|&v| bits[v % bits.len()]).collect();
        prop_assume!(!members.is_empty());
        let r = Region::new(&g, "R", members).unwrap();
        let inner = Region::new(&g, "dR", r.boundary().to_vec()).unwrap();
        prop_assert!(inner.boundary().iter().all(|v| r.boundary().contains(v)));
        prop_assert_eq!(inner.boundary(), r.boundary());
    }
}
