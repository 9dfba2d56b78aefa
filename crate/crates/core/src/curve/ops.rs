use std::collections::VecDeque;
use std::sync::Arc;

use num_traits::One;

use super::{GluedLineBundle, RationalCurveModel};
use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::graph::stabilize::{check_stabilizable, contract_step};
use crate::graph::{DualGraph, EdgeId};
use crate::multidegree::{self, Multidegree};

/// The dualizing sheaf.
///
/// On component `v` with node coordinates `a_1..a_n` a section is the
/// differential `P(z) dz / Π(z - a_i)` with `deg P <= n - 2`. Its residue at
/// `a_i` is `P(a_i) / Π_{j≠i}(a_i - a_j)`; the residues at the two branches
/// of a node must cancel, which the gluing pair
/// `(1/Π(a - ·), -1/Π(b - ·))` encodes.
pub fn canonical_bundle(m: &Arc<RationalCurveModel>) -> Result<GluedLineBundle> {
    let g = m.graph();
    if let Some(v) = g.first_unsemistable() {
        return Err(Error::NotSemistable {
            vertex: g.vertex_id(v),
            valence: g.valences()[v],
        });
    }
    let mut gluing = vec![[Rational::one(), Rational::one()]; g.edge_count()];
    for v in 0..g.vertex_count() {
        let points = m.node_coords(v);
        for (i, &(j, side)) in g.endpoints(v).iter().enumerate() {
            let product = points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .fold(Rational::one(), |acc, (_, b)| acc * (&points[i] - b));
            let scalar = product.recip();
            gluing[j][side] = if side == 0 { scalar } else { -scalar };
        }
    }
    GluedLineBundle::new(m.clone(), g.canonical_multidegree(), gluing)
}

/// `ω ⊗ L^{-1}`: residual multidegree, gluing divided out of the canonical
/// gluing side by side.
pub fn residual_bundle(b: &GluedLineBundle) -> Result<GluedLineBundle> {
    let canonical = canonical_bundle(b.model())?;
    let gluing = canonical
        .gluing()
        .iter()
        .zip(b.gluing())
        .map(|(k, c)| [&k[0] / &c[0], &k[1] / &c[1]])
        .collect();
    GluedLineBundle::new(
        b.model().clone(),
        multidegree::residual(b.graph(), b.degree()),
        gluing,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist {
    /// `L(-p)`: sections vanishing at `p`.
    Down,
    /// `L(p)`.
    Up,
}

/// `L(-p)` or `L(p)` for a smooth point `p` on component `v`.
///
/// Sections of `L(-p)` on `v` are `(z - p) Q(z)` with `deg Q <= d_v - 1`, so
/// in terms of `Q` the value at a node `a` picks up the factor `a - p`; that
/// factor is folded into the gluing scalar on `v`'s side. `Up` divides it
/// back out.
pub fn twist_point(
    b: &GluedLineBundle,
    v: usize,
    p: &Rational,
    direction: Twist,
) -> Result<GluedLineBundle> {
    let g = b.graph();
    if v >= g.vertex_count() {
        return Err(Error::UnknownVertex(v));
    }
    let m = b.model();
    let mut gluing = b.gluing().to_vec();
    for &(j, side) in g.endpoints(v) {
        let a = m.coord(j, side);
        if a == p {
            return Err(Error::CoordinateCollision {
                vertex: g.vertex_id(v),
                coord: p.to_string(),
            });
        }
        let factor = a - p;
        match direction {
            Twist::Down => gluing[j][side] *= factor,
            Twist::Up => gluing[j][side] /= factor,
        }
    }
    let mut degree = b.degree().clone();
    degree.values_mut()[v] += match direction {
        Twist::Down => -1,
        Twist::Up => 1,
    };
    GluedLineBundle::new(m.clone(), degree, gluing)
}

/// Whether every global section vanishes at `p` on component `v`.
pub fn is_base_point(b: &GluedLineBundle, v: usize, p: &Rational) -> Result<bool> {
    let lowered = twist_point(b, v, p, Twist::Down)?;
    Ok(b.h0() == lowered.h0())
}

/// Pull-back to the partial normalization at the node of `edge`.
pub fn partial_normalization(b: &GluedLineBundle, edge: EdgeId) -> Result<GluedLineBundle> {
    let m = b.model();
    let j = m.graph().edge_index(edge).ok_or(Error::UnknownEdge(edge))?;
    let mut coords = m.coords().to_vec();
    coords.remove(j);
    let mut gluing = b.gluing().to_vec();
    gluing.remove(j);
    let model = RationalCurveModel::from_parts_unchecked(m.graph().without_edge(j), coords);
    GluedLineBundle::new(Arc::new(model), b.degree().clone(), gluing)
}

/// Restrictions to the subcurve `Y` on `set` and to its complement, the
/// latter twisted down at every node of `Y ∩ Y^c`.
pub fn restrict_subcurve(
    b: &GluedLineBundle,
    set: &[usize],
) -> Result<(GluedLineBundle, GluedLineBundle)> {
    let g = b.graph();
    let members = g.membership(set)?;
    if members.iter().all(|&x| x) {
        return Err(Error::TrivialSubcurve);
    }
    let inside = restrict(b, &members);
    let complement: Vec<bool> = members.iter().map(|&x| !x).collect();
    let mut outside = restrict(b, &complement);

    let (sub_vertex, boundary) = {
        let sub = g.induced(&complement);
        (sub.vertex_map, sub.boundary)
    };
    for j in boundary {
        let e = g.edge(j);
        let side = if complement[e.ends[0]] { 0 } else { 1 };
        let v = sub_vertex[e.ends[side]].expect("endpoint lies in the complement");
        outside = twist_point(&outside, v, b.model().coord(j, side), Twist::Down)?;
    }
    Ok((inside, outside))
}

fn restrict(b: &GluedLineBundle, members: &[bool]) -> GluedLineBundle {
    let (model, sub) = b.model().induced(members);
    let degree = Multidegree::new(
        (0..b.graph().vertex_count())
            .filter(|&v| members[v])
            .map(|v| b.degree()[v])
            .collect(),
    );
    let gluing = sub
        .edge_map
        .iter()
        .map(|&j| b.gluing()[j].clone())
        .collect();
    GluedLineBundle::new(Arc::new(model), degree, gluing).expect("restriction of a valid bundle")
}

/// Push-forward to the stabilization.
///
/// An exceptional component carries degree 0, so its sections are constants
/// pinned by the node on one side; eliminating that constant composes the
/// two gluing pairs into one on the surviving edge.
pub fn stabilize_bundle(b: &GluedLineBundle) -> Result<GluedLineBundle> {
    let g = b.graph();
    check_stabilizable(g)?;
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.is_exceptional(v) && b.degree()[v] != 0) {
        return Err(Error::ExceptionalDegree {
            vertex: g.vertex_id(v),
            degree: b.degree()[v],
        });
    }

    let mut graph = g.clone();
    let mut coords = b.model().coords().to_vec();
    let mut gluing = b.gluing().to_vec();
    let mut degree = b.degree().clone().into_values();
    while let Some((next, step)) = contract_step(&graph) {
        let e = graph.edge_index(step.contracted).expect("contracted edge");
        let f = graph.edge_index(step.rerouted).expect("rerouted edge");
        let removed = graph.vertex_index(step.removed).expect("removed vertex");
        let e_side_removed = if graph.edge(e).ends[0] == removed {
            0
        } else {
            1
        };
        let e_side_kept = 1 - e_side_removed;

        // c^f_v s_v = c^f_x s_x and c^e_v s_v = c^e_w s_w(b_e) give
        // (c^f_v c^e_w / c^e_v) s_w(b_e) = c^f_x s_x.
        let scalar =
            &gluing[f][step.rerouted_side] * &gluing[e][e_side_kept] / &gluing[e][e_side_removed];
        gluing[f][step.rerouted_side] = scalar;
        coords[f][step.rerouted_side] = coords[e][e_side_kept].clone();

        coords.remove(e);
        gluing.remove(e);
        degree.remove(removed);
        graph = next;
    }
    let model = RationalCurveModel::new(graph, coords)?;
    GluedLineBundle::new(Arc::new(model), Multidegree::new(degree), gluing)
}

/// The stabilized curve with node coordinates inherited through the
/// contraction, so bundles pushed forward by [`stabilize_bundle`] live on it.
pub fn stabilize_model(m: &Arc<RationalCurveModel>) -> Result<Arc<RationalCurveModel>> {
    let pushed = stabilize_bundle(&GluedLineBundle::structure_sheaf(m.clone()))?;
    Ok(pushed.model().clone())
}

/// Spanning forest by breadth-first search from the lowest vertex of each
/// component, scanning edges in id order. Returns a per-edge flag.
pub fn spanning_forest(g: &DualGraph) -> Vec<bool> {
    let mut in_tree = vec![false; g.edge_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    for root in 0..g.vertex_count() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &(j, side) in g.endpoints(v) {
                let w = g.edge(j).ends[1 - side];
                if !seen[w] {
                    seen[w] = true;
                    in_tree[j] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    in_tree
}

/// Rescales each component's section basis so every spanning-tree edge is
/// glued by `(1, 1)` and every other edge by `(1, r)`.
pub fn gauge_normalize(b: &GluedLineBundle) -> Result<GluedLineBundle> {
    let g = b.graph();
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let in_tree = spanning_forest(g);
    // s_v = λ_v s'_v turns (c0, c1) into (c0 λ_u, c1 λ_w).
    let mut scale: Vec<Option<Rational>> = vec![None; g.vertex_count()];
    if g.vertex_count() > 0 {
        scale[0] = Some(Rational::one());
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &(j, side) in g.endpoints(v) {
            if !in_tree[j] {
                continue;
            }
            let w = g.edge(j).ends[1 - side];
            if scale[w].is_some() {
                continue;
            }
            let lambda_v = scale[v].clone().expect("visited");
            let pair = &b.gluing()[j];
            scale[w] = Some(&pair[side] * lambda_v / &pair[1 - side]);
            queue.push_back(w);
        }
    }

    let gluing = g
        .edges()
        .iter()
        .zip(b.gluing())
        .map(|(e, pair)| {
            let left = &pair[0] * scale[e.ends[0]].as_ref().expect("connected");
            let right = &pair[1] * scale[e.ends[1]].as_ref().expect("connected");
            [Rational::one(), right / left]
        })
        .collect();
    b.with_gluing(gluing)
}

/// The gauge-class coordinates: `r` for every edge outside the spanning tree
/// after [`gauge_normalize`].
pub fn gauge_coordinates(b: &GluedLineBundle) -> Result<Vec<(EdgeId, Rational)>> {
    let normalized = gauge_normalize(b)?;
    let in_tree = spanning_forest(b.graph());
    Ok(b.graph()
        .edges()
        .iter()
        .zip(normalized.gluing())
        .zip(in_tree)
        .filter(|(_, tree)| !tree)
        .map(|((e, pair), _)| (e.id, pair[1].clone()))
        .collect())
}
