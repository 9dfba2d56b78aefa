use super::{DualGraph, Edge, EdgeId, VertexId};
use crate::error::{Error, Result};

/// One contraction step: edge `contracted` joined the exceptional vertex
/// `removed` to `kept`; the other edge at `removed`, `rerouted`, now ends at
/// `kept` on side `rerouted_side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contraction {
    pub contracted: EdgeId,
    pub removed: VertexId,
    pub kept: VertexId,
    pub rerouted: EdgeId,
    pub rerouted_side: usize,
}

/// Steps in the order they were applied. Surviving edges and vertices keep
/// their ids, so the record doubles as the map from the stable graph back
/// into the source.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractionRecord {
    pub steps: Vec<Contraction>,
}

impl ContractionRecord {
    pub fn contracted_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.steps.iter().map(|s| s.contracted)
    }
}

/// Contracts edges at weight-0 vertices of valence 2 until none remain.
/// Each step takes the qualifying edge of smallest id.
pub fn stabilize(g: &DualGraph) -> Result<(DualGraph, ContractionRecord)> {
    check_stabilizable(g)?;
    let mut current = g.clone();
    let mut record = ContractionRecord::default();
    while let Some((next, step)) = contract_step(&current) {
        current = next;
        record.steps.push(step);
    }
    Ok((current, record))
}

pub(crate) fn check_stabilizable(g: &DualGraph) -> Result<()> {
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let genus = g.genus();
    if genus < 2 {
        return Err(Error::GenusTooSmall { genus });
    }
    if let Some(v) = g.first_unsemistable() {
        return Err(Error::NotSemistable {
            vertex: g.vertex_id(v),
            valence: g.valences()[v],
        });
    }
    Ok(())
}

/// The next contraction, if any edge touches an exceptional vertex.
pub(crate) fn contract_step(g: &DualGraph) -> Option<(DualGraph, Contraction)> {
    let (e_idx, e) = g.edges().iter().enumerate().find(|(_, e)| {
        !e.is_loop() && (g.is_exceptional(e.ends[0]) || g.is_exceptional(e.ends[1]))
    })?;
    let side = if g.is_exceptional(e.ends[1]) { 1 } else { 0 };
    let removed = e.ends[side];
    let kept = e.ends[1 - side];
    let &(f_idx, f_side) = g
        .endpoints(removed)
        .iter()
        .find(|&&(j, _)| j != e_idx)
        .expect("exceptional vertex has a second edge-endpoint");

    let reindex = |v: usize| if v > removed { v - 1 } else { v };
    let mut ids = g.vertex_ids().to_vec();
    ids.remove(removed);
    let mut weights = g.weights().to_vec();
    weights.remove(removed);
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != e_idx)
        .map(|(j, edge)| {
            let mut ends = edge.ends;
            if j == f_idx {
                ends[f_side] = kept;
            }
            Edge {
                id: edge.id,
                ends: ends.map(reindex),
            }
        })
        .collect();

    let step = Contraction {
        contracted: e.id,
        removed: g.vertex_id(removed),
        kept: g.vertex_id(kept),
        rerouted: g.edge(f_idx).id,
        rerouted_side: f_side,
    };
    Some((DualGraph::assemble(ids, weights, edges), step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::leaf_count;
    use crate::graph::BridgeForest;

    #[test]
    fn theta_is_already_stable() {
        let theta = DualGraph::new(&[0, 0], &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let (s, record) = stabilize(&theta).unwrap();
        assert_eq!(s, theta);
        assert!(record.steps.is_empty());
    }

    #[test]
    fn subdivided_theta_contracts_once() {
        let g = DualGraph::new(&[0, 0, 0], &[(0, 1), (0, 1), (0, 2), (2, 1)]).unwrap();
        let (s, record) = stabilize(&g).unwrap();
        assert_eq!(record.steps.len(), 1);
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.edge_count(), 3);
        assert!(s.is_stable());
        assert_eq!(s.genus(), 2);
        assert_eq!(record.steps[0].contracted, EdgeId(2));
        assert_eq!(record.steps[0].removed, VertexId(2));
        assert_eq!(record.steps[0].rerouted, EdgeId(3));
        assert_eq!(s.edge(2).ends, [0, 1]);
    }

    #[test]
    fn parallel_pair_to_exceptional_vertex_becomes_loop() {
        // vertex 1 hangs off vertex 0 by a 2-cycle; vertex 0 also has a loop
        // and a second 2-cycle, genus 3.
        let g = DualGraph::new(&[0, 0, 0], &[(0, 1), (0, 1), (0, 0), (0, 2), (0, 2)]).unwrap();
        let (s, record) = stabilize(&g).unwrap();
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.edge_count(), 3);
        assert!(s.edges().iter().all(|e| e.is_loop()));
        assert_eq!(record.steps.len(), 2);
        assert_eq!(s.genus(), 3);
        assert_eq!(
            leaf_count(&BridgeForest::new(&s)),
            leaf_count(&BridgeForest::new(&g))
        );
    }

    #[test]
    fn stabilize_errors() {
        let square = DualGraph::new(&[0; 4], &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(stabilize(&square), Err(Error::GenusTooSmall { genus: 1 }));
        let pendant = DualGraph::new(&[0, 2], &[(0, 1)]).unwrap();
        assert!(matches!(
            stabilize(&pendant),
            Err(Error::NotSemistable { .. })
        ));
        let apart = DualGraph::new(&[2, 2], &[]).unwrap();
        assert_eq!(stabilize(&apart), Err(Error::NotConnected));
    }
}
