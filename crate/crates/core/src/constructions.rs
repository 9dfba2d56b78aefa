//! Graph families, the exhaustive test corpus, and explicit bundles that
//! attain or break Clifford-type bounds.
//!
//! Smooth genus-1 components are not available to the section solver, so
//! wherever a construction calls for one it uses a 2-cycle of rational
//! components instead: same genus contribution, same bridge structure.

use std::collections::HashSet;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::One;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{integer, Rational};
use crate::curve::{canonical_bundle, GluedLineBundle, RationalCurveModel};
use crate::error::{Error, Result};
use crate::graph::{bridge_forest, DualGraph, EdgeId};
use crate::multidegree::Multidegree;

/// `n` rational components in a ring; `cycle(1)` is a single loop.
pub fn cycle(n: usize) -> Result<DualGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cycle needs at least one vertex".into(),
        ));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    DualGraph::new(&vec![0; n], &edges)
}

/// Two rational components meeting in `k` nodes.
pub fn theta(k: usize) -> Result<DualGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "theta needs at least one edge".into(),
        ));
    }
    DualGraph::new(&[0, 0], &vec![(0, 1); k])
}

/// A central vertex joined by one bridge each to `leaves` disjoint cycles of
/// length `cycle_len`.
///
/// Vertex 0 is the center; leaf `i` occupies vertices
/// `1 + i * cycle_len ..`, the first of which carries the bridge. Edges come
/// per leaf: the bridge, then the cycle.
pub fn star_of_cycles(leaves: usize, cycle_len: usize) -> Result<DualGraph> {
    if leaves == 0 || cycle_len == 0 {
        return Err(Error::InvalidParameter(
            "star_of_cycles needs at least one leaf and cycle length >= 1".into(),
        ));
    }
    let n = 1 + leaves * cycle_len;
    let mut edges = Vec::new();
    for i in 0..leaves {
        let base = 1 + i * cycle_len;
        edges.push((0, base));
        for k in 0..cycle_len {
            edges.push((base + k, base + (k + 1) % cycle_len));
        }
    }
    DualGraph::new(&vec![0; n], &edges)
}

/// Inserts one weight-0 vertex in the middle of each listed edge.
///
/// Edge `e = (u, v)` becomes `(u, x)` under its old id plus a fresh edge
/// `(x, v)`; fresh vertex and edge ids continue past the current maxima.
pub fn subdivided(g: &DualGraph, edges: &[EdgeId]) -> Result<DualGraph> {
    let first_vertex = g.vertex_ids().iter().map(|v| v.0 + 1).max().unwrap_or(0);
    let first_edge = g.edges().iter().map(|e| e.id.0 + 1).max().unwrap_or(0);
    let mut vertices: Vec<(u32, i64)> = (0..g.vertex_count())
        .map(|v| (g.vertex_id(v).0, g.weight(v) as i64))
        .collect();
    let mut out: Vec<(u32, u32, u32)> = g
        .edges()
        .iter()
        .map(|e| (e.id.0, g.vertex_id(e.ends[0]).0, g.vertex_id(e.ends[1]).0))
        .collect();
    let mut done = HashSet::new();
    for (k, &id) in (0u32..).zip(edges) {
        let j = g.edge_index(id).ok_or(Error::UnknownEdge(id))?;
        if !done.insert(j) {
            return Err(Error::DuplicateEdge(id));
        }
        let (_, u, v) = out[j];
        let x = first_vertex + k;
        vertices.push((x, 0));
        out[j] = (id.0, u, x);
        out.push((first_edge + k, x, v));
    }
    DualGraph::from_labeled(vertices, out)
}

/// Every edge subdivided once.
pub fn subdivide_all(g: &DualGraph) -> Result<DualGraph> {
    let ids: Vec<EdgeId> = g.edges().iter().map(|e| e.id).collect();
    subdivided(g, &ids)
}

const RANDOM_ATTEMPTS: usize = 100_000;

/// A connected semistable weight-0 multigraph with `vertices` vertices and
/// `edges` edges, endpoints drawn uniformly (loops allowed). Returns the
/// graph and the number of draws it took.
pub fn random_semistable(vertices: usize, edges: usize, seed: u64) -> Result<(DualGraph, usize)> {
    if vertices == 0 || edges < vertices {
        return Err(Error::InvalidParameter(format!(
            "no connected semistable graph with {vertices} vertices and {edges} edges"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = vec![0; vertices];
    for attempt in 1..=RANDOM_ATTEMPTS {
        let list: Vec<(usize, usize)> = (0..edges)
            .map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices)))
            .collect();
        let g = DualGraph::new(&weights, &list)?;
        if g.is_connected() && g.is_semistable() {
            return Ok((g, attempt));
        }
    }
    Err(Error::InvalidParameter(format!(
        "no semistable draw in {RANDOM_ATTEMPTS} attempts"
    )))
}

/// Distinct random integer node coordinates on each component.
pub fn with_random_coords(g: &DualGraph, seed: u64) -> Result<RationalCurveModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![[Rational::one(), Rational::one()]; g.edge_count()];
    for v in 0..g.vertex_count() {
        let ends = g.endpoints(v);
        let span = 8 * ends.len() + 16;
        let picks = sample(&mut rng, span, ends.len());
        for (&(j, side), k) in ends.iter().zip(picks.iter()) {
            coords[j][side] = integer(k as i64 - (span / 2) as i64);
        }
    }
    RationalCurveModel::new(g.clone(), coords)
}

/// A named, seeded family member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Cycle { n: usize },
    Theta { k: usize },
    StarOfCycles { leaves: usize, cycle_len: usize },
    Random { vertices: usize, edges: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        CorpusSpec { family, seed }
    }

    pub fn graph(&self) -> Result<DualGraph> {
        match self.family {
            Family::Cycle { n } => cycle(n),
            Family::Theta { k } => theta(k),
            Family::StarOfCycles { leaves, cycle_len } => star_of_cycles(leaves, cycle_len),
            Family::Random { vertices, edges } => {
                random_semistable(vertices, edges, self.seed).map(|(g, _)| g)
            }
        }
    }

    pub fn name(&self) -> String {
        match self.family {
            Family::Cycle { n } => format!("cycle({n})"),
            Family::Theta { k } => format!("theta({k})"),
            Family::StarOfCycles { leaves, cycle_len } => {
                format!("star_of_cycles({leaves},{cycle_len})")
            }
            Family::Random { vertices, edges } => {
                format!("random({vertices},{edges};{})", self.seed)
            }
        }
    }
}

/// All connected semistable weight-0 multigraphs with at most
/// `max_vertices` vertices and `max_edges` edges, one per isomorphism class.
///
/// Each class is represented by the lexicographically greatest upper-triangular
/// multiplicity matrix over all vertex orderings; edges are emitted in
/// matrix order.
pub fn exhaustive_corpus(max_vertices: usize, max_edges: usize) -> Vec<DualGraph> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let mut seen = HashSet::new();
        let mut counts = vec![0u8; slots.len()];
        // Semistable weight-0 graphs have at least as many edges as vertices.
        for e in n..=max_edges {
            fill(&mut counts, 0, e, &mut |counts| {
                let g = from_counts(n, &slots, counts);
                if !(g.is_connected() && g.is_semistable()) {
                    return;
                }
                let key = canonical_counts(n, &slots, counts, &perms);
                if seen.insert(key.clone()) {
                    out.push(from_counts(n, &slots, &key));
                }
            });
        }
    }
    out
}

/// Every way of placing `left` edges into `counts[slot..]`.
fn fill(counts: &mut [u8], slot: usize, left: usize, visit: &mut dyn FnMut(&[u8])) {
    if slot + 1 == counts.len() {
        counts[slot] = left as u8;
        visit(counts);
        return;
    }
    for k in (0..=left).rev() {
        counts[slot] = k as u8;
        fill(counts, slot + 1, left - k, visit);
    }
    counts[slot] = 0;
}

fn from_counts(n: usize, slots: &[(usize, usize)], counts: &[u8]) -> DualGraph {
    let edges: Vec<(usize, usize)> = slots
        .iter()
        .zip(counts)
        .flat_map(|(&slot, &c)| std::iter::repeat_n(slot, c as usize))
        .collect();
    DualGraph::new(&vec![0; n], &edges).expect("valid endpoints")
}

fn canonical_counts(
    n: usize,
    slots: &[(usize, usize)],
    counts: &[u8],
    perms: &[Vec<usize>],
) -> Vec<u8> {
    let mut matrix = vec![0u8; n * n];
    for (&(i, j), &c) in slots.iter().zip(counts) {
        matrix[i * n + j] = c;
        matrix[j * n + i] = c;
    }
    perms
        .iter()
        .map(|p| {
            slots
                .iter()
                .map(|&(i, j)| matrix[p[i] * n + p[j]])
                .collect::<Vec<u8>>()
        })
        .max()
        .expect("at least one permutation")
}

/// A corpus graph together with a readable label.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub graph: DualGraph,
}

/// The exhaustive graphs with at most 5 vertices and 8 edges, then the
/// families theta(2..=5) and star_of_cycles(2..=5, 2).
pub fn default_corpus() -> Vec<CorpusEntry> {
    let mut out: Vec<CorpusEntry> = exhaustive_corpus(5, 8)
        .into_iter()
        .enumerate()
        .map(|(i, graph)| CorpusEntry {
            name: format!("exhaustive#{i}"),
            graph,
        })
        .collect();
    let families = (2..=5)
        .map(|k| Family::Theta { k })
        .chain((2..=5).map(|leaves| Family::StarOfCycles {
            leaves,
            cycle_len: 2,
        }));
    for family in families {
        let spec = CorpusSpec::new(family, 0);
        out.push(CorpusEntry {
            name: spec.name(),
            graph: spec.graph().expect("family parameters are valid"),
        });
    }
    out
}

fn check_extremal_input(m: &RationalCurveModel) -> Result<()> {
    let g = m.graph();
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    if let Some(v) = g.first_unsemistable() {
        return Err(Error::NotSemistable {
            vertex: g.vertex_id(v),
            valence: g.valences()[v],
        });
    }
    Ok(())
}

/// A bundle attaining `h^0 = d/2 + #l/2` with uniform multidegree.
///
/// With two leaves this is the dualizing sheaf. Otherwise every leaf
/// 2-edge-connected component `Y` with attaching node `p` carries
/// `ω_Y(p)` and the rest of the curve the trivial bundle. Written in terms
/// of the whole curve, `ω_Y(p)` is the dualizing sheaf's residue gluing on
/// `Y`'s endpoints, bridge included, so it is read off the canonical bundle.
pub fn extremal_bundle(m: &Arc<RationalCurveModel>) -> Result<GluedLineBundle> {
    check_extremal_input(m)?;
    let g = m.graph();
    let forest = bridge_forest(g);
    let canonical = canonical_bundle(m)?;
    if forest.leaf_count() == 2 {
        return Ok(canonical);
    }
    let mut on_leaf = vec![false; g.vertex_count()];
    for leaf in forest.leaves() {
        for &v in forest.members(leaf) {
            on_leaf[v] = true;
        }
    }
    let degree = (0..g.vertex_count())
        .map(|v| if on_leaf[v] { canonical.degree()[v] } else { 0 })
        .collect();
    let gluing = g
        .edges()
        .iter()
        .zip(canonical.gluing())
        .map(|(e, pair)| {
            [0, 1].map(|side| {
                if on_leaf[e.ends[side]] {
                    pair[side].clone()
                } else {
                    Rational::one()
                }
            })
        })
        .collect();
    GluedLineBundle::new(m.clone(), Multidegree::new(degree), gluing)
}

/// Starting from trivial gluing, raises the degree on `v` by one with the
/// pole at the node endpoint `(j, side)`: `O(p)` in the chart of `v`.
///
/// Sections on `v` become `Q(z) / (z - p)`; at any other node `a` of `v` the
/// value is `Q(a) / (a - p)`, while at `p` itself the fiber is read off as
/// `Q(p)`.
fn pole_at_node(
    m: &RationalCurveModel,
    gluing: &mut [[Rational; 2]],
    degree: &mut [i64],
    v: usize,
    node: (usize, usize),
) {
    let p = m.coord(node.0, node.1).clone();
    for &(j, side) in m.graph().endpoints(v) {
        if (j, side) != node {
            gluing[j][side] /= m.coord(j, side) - &p;
        }
    }
    degree[v] += 1;
}

/// The side of edge `j` lying on vertex `v` (side 0 for loops).
fn side_on(g: &DualGraph, j: usize, v: usize) -> usize {
    if g.edge(j).ends[0] == v {
        0
    } else {
        1
    }
}

/// A uniform bundle of total degree 3 with `h^0 = 3` on a genus-3 curve,
/// breaking `h^0 <= d/2 + 1`.
///
/// The curve is a central line with three 2-cycles hanging off it by
/// bridges, i.e. `star_of_cycles(3, 2)`. Each cycle carries `O(p)` for its
/// attaching point `p`, which makes `p` a base point; all sections vanish on
/// the central component.
pub fn example_basic() -> Result<(Arc<RationalCurveModel>, GluedLineBundle)> {
    let g = star_of_cycles(3, 2)?;
    let m = Arc::new(RationalCurveModel::with_default_coords(g)?);
    let graph = m.graph();
    let mut gluing = vec![[Rational::one(), Rational::one()]; graph.edge_count()];
    let mut degree = vec![0; graph.vertex_count()];
    for i in 0..3 {
        let attach = 1 + 2 * i;
        let bridge = 3 * i;
        let node = (bridge, side_on(graph, bridge, attach));
        pole_at_node(&m, &mut gluing, &mut degree, attach, node);
    }
    let b = GluedLineBundle::new(m.clone(), Multidegree::new(degree), gluing)?;
    Ok((m, b))
}

/// Stable, bridge-free weighted graph of genus 15 with a stable multidegree
/// of total 15 on which line bundles have `h^0 = 9 > 15/2 + 1`.
///
/// A 9-valent weight-0 vertex `0` meets nine 2-valent weight-1 vertices
/// `1..=9`, each of degree 1; their second edges go, three at a time, to
/// weight-0 vertices `10`, `11`, `12` of degree 2.
pub fn example_stable_violation() -> (DualGraph, Multidegree) {
    let mut weights = vec![0i64];
    weights.extend([1; 9]);
    weights.extend([0; 3]);
    let mut edges = Vec::new();
    for i in 1..=9 {
        edges.push((0, i));
    }
    for i in 1..=9 {
        edges.push((i, 10 + (i - 1) / 3));
    }
    let g = DualGraph::new(&weights, &edges).expect("valid graph");
    let mut degree = vec![0i64];
    degree.extend([1; 9]);
    degree.extend([2; 3]);
    (g, Multidegree::new(degree))
}

/// Weight-0 stand-in for [`example_stable_violation`]: each weight-1 vertex
/// becomes a 2-cycle `a_i = b_i`, with `a_i` meeting the center and `b_i`
/// the outer vertex. `a_i` carries `O(p_i)` at the node with the center.
///
/// Vertices: center 0, then `a_i = 1 + 2i`, `b_i = 2 + 2i` for `i < 9`, then
/// outer vertices 19, 20, 21. The bundle has `h^0 = 9` for total degree 15.
pub fn example_stable_violation_surrogate() -> Result<GluedLineBundle> {
    let n = 22;
    let mut edges = Vec::new();
    let mut center_edges = Vec::new();
    for i in 0..9 {
        let (a, b) = (1 + 2 * i, 2 + 2 * i);
        center_edges.push(edges.len());
        edges.push((0, a));
        edges.push((a, b));
        edges.push((a, b));
        edges.push((b, 19 + i / 3));
    }
    let g = DualGraph::new(&vec![0; n], &edges)?;
    let m = Arc::new(RationalCurveModel::with_default_coords(g)?);
    let mut gluing = vec![[Rational::one(), Rational::one()]; m.graph().edge_count()];
    let mut degree = vec![0; n];
    for (i, &j) in center_edges.iter().enumerate() {
        pole_at_node(&m, &mut gluing, &mut degree, 1 + 2 * i, (j, 1));
    }
    for d in &mut degree[19..] {
        *d = 2;
    }
    GluedLineBundle::new(m, Multidegree::new(degree), gluing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::multidegree::{clifford_bound, is_stable_multidegree, is_uniform};

    fn model(g: DualGraph) -> Arc<RationalCurveModel> {
        Arc::new(RationalCurveModel::with_default_coords(g).unwrap())
    }

    #[test]
    fn family_invariants() {
        assert_eq!(theta(3).unwrap().genus(), 2);
        let c1 = cycle(1).unwrap();
        assert_eq!((c1.vertex_count(), c1.genus()), (1, 1));
        let s = star_of_cycles(3, 2).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count(), s.genus()), (7, 9, 3));
        assert_eq!(bridge_forest(&s).leaf_count(), 3);
        assert!(cycle(0).is_err() && theta(0).is_err() && star_of_cycles(0, 2).is_err());
    }

    #[test]
    fn subdivision_adds_exceptional_vertices() {
        let t = theta(3).unwrap();
        let s = subdivided(&t, &[EdgeId(1)]).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count(), s.genus()), (3, 4, 2));
        assert!(s.is_exceptional(2));
        assert_eq!(subdivide_all(&t).unwrap().vertex_count(), 5);
        assert!(subdivided(&t, &[EdgeId(1), EdgeId(1)]).is_err());
        assert!(subdivided(&t, &[EdgeId(7)]).is_err());
    }

    #[test]
    fn random_graphs_are_reproducible() {
        let (a, tries) = random_semistable(4, 6, 11).unwrap();
        let (b, again) = random_semistable(4, 6, 11).unwrap();
        assert_eq!((a.clone(), tries), (b, again));
        assert!(a.is_connected() && a.is_semistable());
        assert!(random_semistable(4, 3, 0).is_err());
        let m = with_random_coords(&a, 5).unwrap();
        assert_eq!(m, with_random_coords(&a, 5).unwrap());
    }

    #[test]
    fn small_exhaustive_counts() {
        // One vertex: k loops for k = 1, 2. Two vertices with <= 2 edges:
        // only the double edge.
        assert_eq!(exhaustive_corpus(1, 2).len(), 2);
        assert_eq!(exhaustive_corpus(2, 2).len(), 3);
        // Three vertices, three edges: only the triangle.
        let three: Vec<_> = exhaustive_corpus(3, 3)
            .into_iter()
            .filter(|g| g.vertex_count() == 3)
            .collect();
        assert_eq!(three.len(), 1);
    }

    #[test]
    fn corpus_spec_round_trip() {
        let spec = CorpusSpec::new(
            Family::StarOfCycles {
                leaves: 3,
                cycle_len: 2,
            },
            7,
        );
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<CorpusSpec>(&json).unwrap(), spec);
        assert_eq!(spec.graph().unwrap(), star_of_cycles(3, 2).unwrap());
    }

    #[test]
    fn extremal_attains_bound() {
        for g in [
            theta(3).unwrap(),
            star_of_cycles(3, 2).unwrap(),
            star_of_cycles(5, 2).unwrap(),
        ] {
            let b = extremal_bundle(&model(g.clone())).unwrap();
            assert!(is_uniform(&g, b.degree()));
            assert_eq!(
                integer(b.h0() as i64),
                clifford_bound(&g, b.degree()),
                "{g:?}"
            );
        }
    }

    #[test]
    fn basic_example_breaks_classic_bound() {
        let (m, b) = example_basic().unwrap();
        assert_eq!(b.total_degree(), 3);
        assert_eq!(b.h0(), 3);
        assert!(is_uniform(m.graph(), b.degree()));
        assert!(b.sections().vanishes_on(0));
        assert_eq!(clifford_bound(m.graph(), b.degree()), integer(3));
    }

    #[test]
    fn stable_violation_reconstruction() {
        let (g, d) = example_stable_violation();
        assert_eq!((g.genus(), d.total()), (15, 15));
        assert!(g.is_stable());
        assert_eq!(bridge_forest(&g).leaf_count(), 2);
        assert!(is_stable_multidegree(&g, &d).unwrap());
        assert!(!is_uniform(&g, &d));
        assert_eq!(clifford_bound(&g, &d), rational(17, 2));

        let s = example_stable_violation_surrogate().unwrap();
        assert_eq!((s.graph().genus(), s.total_degree()), (15, 15));
        assert_eq!(s.h0(), 9);
    }
}
