//! Weighted multigraphs with loops and parallel edges.
//!
//! A [`DualGraph`] is the dual graph of a nodal curve: one vertex per
//! irreducible component, weighted by its geometric genus, and one edge per
//! node. Vertices and edges carry stable integer identifiers that survive
//! induced subgraphs, edge deletion and contraction, so records produced by
//! those operations can always be traced back to the source graph.
//!
//! Internally every algorithm works with dense indices: vertex `i` is the
//! vertex with the `i`-th smallest id, edge `j` the edge with the `j`-th
//! smallest id.

mod bridges;
pub(crate) mod stabilize;

pub use bridges::{bridge_forest, bridges, leaf_count, BridgeForest};
pub use stabilize::{stabilize, Contraction, ContractionRecord};

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multidegree::Multidegree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An edge between two vertex indices. `ends[0]` is side 0, `ends[1]` side 1;
/// the sides matter for gluing data on curve models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    pub ends: [usize; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    /// The endpoint opposite to `v`. For a loop this is `v` itself.
    pub fn opposite(&self, v: usize) -> usize {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// One edge-endpoint at a vertex: (edge index, side).
pub type Endpoint = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    ids: Vec<VertexId>,
    weights: Vec<u32>,
    edges: Vec<Edge>,
    valences: Vec<u32>,
    incidence: Vec<Vec<Endpoint>>,
    component: Vec<usize>,
    component_count: usize,
}

impl DualGraph {
    /// Builds a graph whose vertex and edge ids are their positions in the
    /// input slices.
    pub fn new(weights: &[i64], edges: &[(usize, usize)]) -> Result<Self> {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i as u32, w))
            .collect::<Vec<_>>();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(j, &(u, v))| (j as u32, u as u32, v as u32))
            .collect::<Vec<_>>();
        Self::from_labeled(vertices, edges)
    }

    /// Builds a graph from `(vertex id, weight)` and `(edge id, u id, v id)`
    /// triples. Ids need not be contiguous but must be unique.
    pub fn from_labeled(
        vertices: impl IntoIterator<Item = (u32, i64)>,
        edges: impl IntoIterator<Item = (u32, u32, u32)>,
    ) -> Result<Self> {
        let mut vmap: BTreeMap<VertexId, u32> = BTreeMap::new();
        for (id, weight) in vertices {
            let id = VertexId(id);
            if weight < 0 {
                return Err(Error::NegativeWeight { vertex: id, weight });
            }
            let weight = u32::try_from(weight)
                .map_err(|_| Error::InvalidParameter(format!("weight {weight} too large")))?;
            if vmap.insert(id, weight).is_some() {
                return Err(Error::DuplicateVertex(id));
            }
        }
        let ids: Vec<VertexId> = vmap.keys().copied().collect();
        let weights: Vec<u32> = vmap.values().copied().collect();
        let index_of = |id: VertexId| ids.binary_search(&id).ok();

        let mut emap: BTreeMap<EdgeId, [usize; 2]> = BTreeMap::new();
        for (id, u, v) in edges {
            let id = EdgeId(id);
            let mut ends = [0; 2];
            for (slot, raw) in ends.iter_mut().zip([u, v]) {
                *slot = index_of(VertexId(raw)).ok_or(Error::DanglingEndpoint {
                    edge: id,
                    vertex: VertexId(raw),
                })?;
            }
            if emap.insert(id, ends).is_some() {
                return Err(Error::DuplicateEdge(id));
            }
        }
        let edges = emap
            .into_iter()
            .map(|(id, ends)| Edge { id, ends })
            .collect();
        Ok(Self::assemble(ids, weights, edges))
    }

    /// Assembles a graph from already validated parts. `ids` must be strictly
    /// increasing, `edges` sorted by id with in-range endpoints.
    pub(crate) fn assemble(ids: Vec<VertexId>, weights: Vec<u32>, edges: Vec<Edge>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.windows(2).all(|w| w[0].id < w[1].id));
        let n = ids.len();
        let mut valences = vec![0u32; n];
        let mut incidence = vec![Vec::new(); n];
        for (j, e) in edges.iter().enumerate() {
            for side in 0..2 {
                valences[e.ends[side]] += 1;
                incidence[e.ends[side]].push((j, side));
            }
        }

        let mut component = vec![usize::MAX; n];
        let mut component_count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = component_count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &(j, side) in &incidence[v] {
                    let w = edges[j].ends[1 - side];
                    if component[w] == usize::MAX {
                        component[w] = component_count;
                        queue.push_back(w);
                    }
                }
            }
            component_count += 1;
        }

        DualGraph {
            ids,
            weights,
            edges,
            valences,
            incidence,
            component,
            component_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, v: usize) -> VertexId {
        self.ids[v]
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn vertex_index(&self, id: VertexId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, j: usize) -> &Edge {
        &self.edges[j]
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    /// Number of incident edge-endpoints; a loop counts twice.
    pub fn valence(&self, v: usize) -> Result<u32> {
        self.valences.get(v).copied().ok_or(Error::UnknownVertex(v))
    }

    pub fn valences(&self) -> &[u32] {
        &self.valences
    }

    /// Edge-endpoints at `v`, ordered by edge id then side.
    pub fn endpoints(&self, v: usize) -> &[Endpoint] {
        &self.incidence[v]
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count <= 1
    }

    /// Vertex indices of each connected component, each list ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (v, &c) in self.component.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Sum over connected components of `1 - |V_i| + |E_i| + Σ g_v`.
    pub fn genus(&self) -> i64 {
        self.component_count as i64 + self.first_betti_offset()
    }

    /// `1 - |V| + |E| + Σ g_v`, the arithmetic genus of the curve. Equal to
    /// [`genus`](Self::genus) for connected graphs.
    pub fn arithmetic_genus(&self) -> i64 {
        1 + self.first_betti_offset()
    }

    fn first_betti_offset(&self) -> i64 {
        let weight_sum: i64 = self.weights.iter().map(|&w| w as i64).sum();
        self.edges.len() as i64 - self.ids.len() as i64 + weight_sum
    }

    /// Degree of the dualizing sheaf on each component: `2g_v - 2 + val(v)`.
    pub fn canonical_multidegree(&self) -> Multidegree {
        Multidegree::new(
            (0..self.vertex_count())
                .map(|v| self.canonical_degree(v))
                .collect(),
        )
    }

    pub(crate) fn canonical_degree(&self, v: usize) -> i64 {
        2 * self.weights[v] as i64 - 2 + self.valences[v] as i64
    }

    pub fn is_semistable(&self) -> bool {
        self.first_unsemistable().is_none()
    }

    pub(crate) fn first_unsemistable(&self) -> Option<usize> {
        (0..self.vertex_count()).find(|&v| self.weights[v] == 0 && self.valences[v] < 2)
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertex_count()).all(|v| match self.weights[v] {
            0 => self.valences[v] >= 3,
            1 => self.valences[v] >= 1,
            _ => true,
        })
    }

    /// Weight-0 vertices of valence 2.
    pub fn is_exceptional(&self, v: usize) -> bool {
        self.weights[v] == 0 && self.valences[v] == 2
    }

    /// The induced subgraph on the vertex indices `set`, together with the
    /// number of edges having exactly one endpoint in `set`.
    pub fn induced_subgraph(&self, set: &[usize]) -> Result<(DualGraph, usize)> {
        let members = self.membership(set)?;
        let sub = self.induced(&members);
        Ok((sub.graph, sub.boundary.len()))
    }

    pub(crate) fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        if set.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut members = vec![false; self.vertex_count()];
        for &v in set {
            *members.get_mut(v).ok_or(Error::UnknownVertex(v))? = true;
        }
        Ok(members)
    }

    pub(crate) fn induced(&self, members: &[bool]) -> Induced {
        let mut vertex_map = vec![None; self.vertex_count()];
        let mut ids = Vec::new();
        let mut weights = Vec::new();
        for v in 0..self.vertex_count() {
            if members[v] {
                vertex_map[v] = Some(ids.len());
                ids.push(self.ids[v]);
                weights.push(self.weights[v]);
            }
        }
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        let mut boundary = Vec::new();
        for (j, e) in self.edges.iter().enumerate() {
            match (vertex_map[e.ends[0]], vertex_map[e.ends[1]]) {
                (Some(a), Some(b)) => {
                    edges.push(Edge {
                        id: e.id,
                        ends: [a, b],
                    });
                    edge_map.push(j);
                }
                (None, None) => {}
                _ => boundary.push(j),
            }
        }
        Induced {
            graph: DualGraph::assemble(ids, weights, edges),
            vertex_map,
            edge_map,
            boundary,
        }
    }

    /// The graph with edge index `j` removed.
    pub fn without_edge(&self, j: usize) -> DualGraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, e)| *e)
            .collect();
        DualGraph::assemble(self.ids.clone(), self.weights.clone(), edges)
    }
}

/// An induced subgraph with index maps back to its parent.
pub(crate) struct Induced {
    pub graph: DualGraph,
    /// parent vertex index -> subgraph vertex index
    pub vertex_map: Vec<Option<usize>>,
    /// subgraph edge index -> parent edge index
    pub edge_map: Vec<usize>,
    /// parent edges with exactly one endpoint inside
    pub boundary: Vec<usize>,
}
