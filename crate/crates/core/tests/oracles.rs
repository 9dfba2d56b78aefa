//! Brute-force reference computations checked against the library on the
//! small exhaustive corpus. None of the oracles call into the code they
//! check beyond reading graph and bundle data.

use std::sync::Arc;

use num_traits::{One, Zero};

use nodal_clifford::constructions::{exhaustive_corpus, star_of_cycles, with_random_coords};
use nodal_clifford::graph::{bridge_forest, bridges, DualGraph};
use nodal_clifford::multidegree::{
    dhar, enumerate_stable, enumerate_uniform, is_stable_multidegree, is_uniform, Multidegree,
};
use nodal_clifford::{GluedLineBundle, Rational, RationalCurveModel};

fn corpus() -> Vec<DualGraph> {
    exhaustive_corpus(4, 6)
}

fn edge_list(g: &DualGraph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|e| (e.ends[0], e.ends[1])).collect()
}

/// Number of connected components using only the listed edges.
fn components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut label: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            let m = label[a].min(label[b]);
            if label[a] != m || label[b] != m {
                label[a] = m;
                label[b] = m;
                changed = true;
            }
        }
    }
    let mut roots: Vec<usize> = label;
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

fn connected_pair(n: usize, edges: &[(usize, usize)], u: usize, v: usize) -> bool {
    let mut reach = vec![false; n];
    reach[u] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            if reach[a] != reach[b] {
                reach[a] = true;
                reach[b] = true;
                changed = true;
            }
        }
    }
    reach[v]
}

#[test]
fn bridges_match_deletion_oracle() {
    for g in corpus().into_iter().chain([star_of_cycles(3, 2).unwrap()]) {
        let edges = edge_list(&g);
        let base = components(g.vertex_count(), &edges);
        let expected: Vec<usize> = (0..edges.len())
            .filter(|&j| {
                let mut rest = edges.clone();
                rest.remove(j);
                components(g.vertex_count(), &rest) > base
            })
            .collect();
        assert_eq!(bridges(&g), expected, "{edges:?}");
    }
}

#[test]
fn two_edge_components_match_cut_oracle() {
    // u and v share a 2-edge-connected component iff no single edge
    // deletion separates them.
    for g in corpus().into_iter().chain([star_of_cycles(3, 3).unwrap()]) {
        let n = g.vertex_count();
        let edges = edge_list(&g);
        let forest = bridge_forest(&g);
        for u in 0..n {
            for v in 0..n {
                let together = connected_pair(n, &edges, u, v)
                    && (0..edges.len()).all(|j| {
                        let mut rest = edges.clone();
                        rest.remove(j);
                        connected_pair(n, &rest, u, v)
                    });
                let same = forest.component_map()[u] == forest.component_map()[v];
                assert_eq!(same, together, "{edges:?} {u} {v}");
            }
        }
    }
}

#[test]
fn leaf_count_matches_degree_oracle() {
    for g in corpus()
        .into_iter()
        .chain((2..=5).map(|l| star_of_cycles(l, 2).unwrap()))
    {
        let edges = edge_list(&g);
        let n = g.vertex_count();
        let b = bridges(&g);
        let non_bridges: Vec<(usize, usize)> = (0..edges.len())
            .filter(|j| !b.contains(j))
            .map(|j| edges[j])
            .collect();
        // Contract the non-bridge edges and count degree-1 blobs; a blob with
        // no bridges at all counts 2.
        let blobs = components(n, &non_bridges);
        let forest = bridge_forest(&g);
        assert_eq!(forest.forest().vertex_count(), blobs);
        let mut degree = vec![0usize; blobs];
        for &j in &b {
            let (u, v) = edges[j];
            degree[forest.component_map()[u]] += 1;
            degree[forest.component_map()[v]] += 1;
        }
        let expected: usize = degree
            .iter()
            .map(|&k| if k == 0 { 2 } else { usize::from(k == 1) })
            .sum();
        assert_eq!(forest.leaf_count(), expected, "{edges:?}");
    }
}

/// Dhar set straight from the definition: repeatedly absorb every outside
/// vertex whose degree minus its edges into the current set is negative.
fn dhar_oracle(g: &DualGraph, d: &Multidegree, v: usize) -> Vec<usize> {
    let n = g.vertex_count();
    let edges = edge_list(g);
    let mut set = vec![v];
    loop {
        let mut grow = Vec::new();
        for w in (0..n).filter(|w| !set.contains(w)) {
            let into: i64 = edges
                .iter()
                .filter(|&&(a, b)| (a == w && set.contains(&b)) || (b == w && set.contains(&a)))
                .count() as i64;
            if d[w] - into < 0 {
                grow.push(w);
            }
        }
        if grow.is_empty() {
            set.sort_unstable();
            return set;
        }
        set.extend(grow);
    }
}

#[test]
fn dhar_matches_definition() {
    for g in corpus() {
        for d in enumerate_uniform(&g) {
            for v in 0..g.vertex_count() {
                assert_eq!(dhar(&g, &d, v), dhar_oracle(&g, &d, v));
            }
        }
        // Also some non-uniform degrees, negative entries included.
        let n = g.vertex_count();
        for shift in -2i64..=1 {
            let d = Multidegree::new((0..n).map(|v| (v as i64 % 3) + shift).collect());
            for v in 0..n {
                assert_eq!(dhar(&g, &d, v), dhar_oracle(&g, &d, v));
            }
        }
    }
}

#[test]
fn uniform_enumeration_matches_product_formula() {
    for g in corpus() {
        let all: Vec<Multidegree> = enumerate_uniform(&g).collect();
        let expected: usize = g
            .valences()
            .iter()
            .zip(g.weights())
            .map(|(&val, &w)| (2 * w as usize + val as usize) - 1)
            .product();
        assert_eq!(all.len(), expected);
        assert!(all.iter().all(|d| is_uniform(&g, d)));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}

/// Genus of an induced vertex subset, by components.
fn subset_genus(g: &DualGraph, set: &[usize]) -> i64 {
    let edges: Vec<(usize, usize)> = edge_list(g)
        .into_iter()
        .filter(|(a, b)| set.contains(a) && set.contains(b))
        .collect();
    let local: Vec<(usize, usize)> = edges
        .iter()
        .map(|(a, b)| {
            (
                set.iter().position(|x| x == a).unwrap(),
                set.iter().position(|x| x == b).unwrap(),
            )
        })
        .collect();
    let c = components(set.len(), &local) as i64;
    let w: i64 = set.iter().map(|&v| g.weight(v) as i64).sum();
    c - set.len() as i64 + edges.len() as i64 + w
}

#[test]
fn stable_enumeration_matches_subset_oracle() {
    let stable: Vec<DualGraph> = corpus().into_iter().filter(|g| g.is_stable()).collect();
    assert!(!stable.is_empty());
    for g in stable {
        let n = g.vertex_count();
        let total = g.genus() - 1;
        let listed: Vec<Multidegree> = enumerate_stable(&g, total).unwrap().collect();
        // Brute force over all vectors in a box that must contain every
        // stable multidegree.
        let mut expected = Vec::new();
        let hi = total.max(0);
        let lo = -hi - 1;
        let mut current = vec![lo; n];
        loop {
            if current.iter().sum::<i64>() == total {
                let d = Multidegree::new(current.clone());
                let ok = (1u32..(1 << n) - 1).all(|mask| {
                    let set: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
                    set.iter().map(|&v| d[v]).sum::<i64>() >= subset_genus(&g, &set)
                });
                if ok {
                    expected.push(d);
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if current[i] < hi {
                    current[i] += 1;
                    for x in current.iter_mut().skip(i + 1) {
                        *x = lo;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
        assert_eq!(listed, expected, "{:?}", edge_list(&g));
        for d in &listed {
            assert!(is_stable_multidegree(&g, d).unwrap());
        }
    }
}

/// `h^0` by plain Gauss-Jordan elimination on a constraint matrix assembled
/// here from the bundle's raw data.
fn h0_oracle(b: &GluedLineBundle) -> usize {
    let g = b.graph();
    let m = b.model();
    let mut offset = Vec::new();
    let mut cols = 0usize;
    for v in 0..g.vertex_count() {
        offset.push(cols);
        cols += (b.degree()[v] + 1).max(0) as usize;
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (j, e) in g.edges().iter().enumerate() {
        let mut row = vec![Rational::zero(); cols];
        for side in 0..2 {
            let v = e.ends[side];
            let sign = if side == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            let c = &b.gluing()[j][side] * sign;
            let x = m.coord(j, side);
            let mut power = Rational::one();
            for k in 0..(b.degree()[v] + 1).max(0) as usize {
                row[offset[v] + k] += &c * &power;
                power *= x;
            }
        }
        rows.push(row);
    }
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    cols - rank
}

#[test]
fn h0_matches_gauss_jordan_oracle() {
    let graphs: Vec<DualGraph> = exhaustive_corpus(3, 5);
    for (i, g) in graphs.into_iter().enumerate() {
        let m = Arc::new(with_random_coords(&g, i as u64).unwrap());
        for d in enumerate_uniform(&g).take(12) {
            for s in 0..3i64 {
                let gluing = (0..g.edge_count() as i64)
                    .map(|j| {
                        [
                            Rational::new((j + s + 1).into(), 1.into()),
                            Rational::new((2 * s - 4 * j - 1).into(), (j + 2).into()),
                        ]
                    })
                    .collect();
                let b = GluedLineBundle::new(m.clone(), d.clone(), gluing).unwrap();
                assert_eq!(b.h0(), h0_oracle(&b));
            }
        }
    }
}

#[test]
fn h0_of_trivial_bundles_counts_components() {
    for g in corpus() {
        let m = Arc::new(RationalCurveModel::with_default_coords(g.clone()).unwrap());
        let o = GluedLineBundle::structure_sheaf(m.clone());
        assert_eq!(o.h0(), g.component_count());
        let negative =
            GluedLineBundle::with_trivial_gluing(m, Multidegree::new(vec![-1; g.vertex_count()]))
                .unwrap();
        assert_eq!(negative.h0(), 0);
    }
}
