use super::{DualGraph, Edge, VertexId};

/// Edge indices of all bridges, ascending.
///
/// Iterative depth-first low-link traversal. The tree edge back to the parent
/// is skipped by edge index rather than by vertex, so a parallel edge counts
/// as a back edge and the pair never yields a bridge. Loops are never bridges.
pub fn bridges(g: &DualGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut order = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut clock = 0;
    let mut out = Vec::new();
    // (vertex, edge index used to enter it, next endpoint position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if order[root] != usize::MAX {
            continue;
        }
        order[root] = clock;
        low[root] = clock;
        clock += 1;
        stack.push((root, usize::MAX, 0));

        while let Some(top) = stack.last_mut() {
            let (v, via, pos) = *top;
            if let Some(&(j, side)) = g.endpoints(v).get(pos) {
                top.2 += 1;
                let e = g.edge(j);
                if j == via || e.is_loop() {
                    continue;
                }
                let w = e.ends[1 - side];
                if order[w] == usize::MAX {
                    order[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, j, 0));
                } else {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > order[parent] {
                        out.push(via);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The forest of 2-edge-connected components: every non-bridge edge
/// contracted.
#[derive(Debug, Clone)]
pub struct BridgeForest {
    forest: DualGraph,
    component_map: Vec<usize>,
    members: Vec<Vec<usize>>,
    bridges: Vec<usize>,
}

impl BridgeForest {
    pub fn new(g: &DualGraph) -> Self {
        let bridges = bridges(g);
        let mut is_bridge = vec![false; g.edge_count()];
        for &j in &bridges {
            is_bridge[j] = true;
        }

        let n = g.vertex_count();
        let mut component_map = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if component_map[start] != usize::MAX {
                continue;
            }
            let c = members.len();
            let mut group = vec![start];
            component_map[start] = c;
            let mut i = 0;
            while i < group.len() {
                let v = group[i];
                i += 1;
                for &(j, side) in g.endpoints(v) {
                    if is_bridge[j] {
                        continue;
                    }
                    let w = g.edge(j).ends[1 - side];
                    if component_map[w] == usize::MAX {
                        component_map[w] = c;
                        group.push(w);
                    }
                }
            }
            group.sort_unstable();
            members.push(group);
        }

        // Each forest vertex carries the genus of its component, so the
        // contraction preserves total genus.
        let mut internal_edges = vec![0i64; members.len()];
        for (j, e) in g.edges().iter().enumerate() {
            if !is_bridge[j] {
                internal_edges[component_map[e.ends[0]]] += 1;
            }
        }
        let weights = members
            .iter()
            .zip(&internal_edges)
            .map(|(group, &edges)| {
                let w: i64 = group.iter().map(|&v| g.weight(v) as i64).sum();
                (1 - group.len() as i64 + edges + w) as u32
            })
            .collect();
        let ids = (0..members.len() as u32).map(VertexId).collect();
        let edges = bridges
            .iter()
            .map(|&j| {
                let e = g.edge(j);
                Edge {
                    id: e.id,
                    ends: [component_map[e.ends[0]], component_map[e.ends[1]]],
                }
            })
            .collect();

        BridgeForest {
            forest: DualGraph::assemble(ids, weights, edges),
            component_map,
            members,
            bridges,
        }
    }

    pub fn forest(&self) -> &DualGraph {
        &self.forest
    }

    /// Source vertex index -> forest vertex index.
    pub fn component_map(&self) -> &[usize] {
        &self.component_map
    }

    /// Source vertices contracted into each forest vertex.
    pub fn members(&self, forest_vertex: usize) -> &[usize] {
        &self.members[forest_vertex]
    }

    /// Source edge indices of the bridges, ascending; forest edge `i` is
    /// source edge `bridges()[i]`.
    pub fn bridges(&self) -> &[usize] {
        &self.bridges
    }

    /// Forest vertices of valence 1.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.forest.vertex_count())
            .filter(|&v| self.forest.valences()[v] == 1)
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        leaf_count(self)
    }
}

pub fn bridge_forest(g: &DualGraph) -> BridgeForest {
    BridgeForest::new(g)
}

/// Leaves summed over the trees of the forest, where a single-vertex tree
/// counts as 2.
pub fn leaf_count(f: &BridgeForest) -> usize {
    let forest = &f.forest;
    forest
        .components()
        .iter()
        .map(|tree| {
            if tree.len() == 1 {
                2
            } else {
                tree.iter().filter(|&&v| forest.valences()[v] == 1).count()
            }
        })
        .sum()
}
