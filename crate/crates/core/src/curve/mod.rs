//! Nodal curves whose components are all projective lines, line bundles on
//! them given by gluing data, and the exact computation of `h^0`.
//!
//! Each component carries an affine chart `z`. Every node has a coordinate on
//! each of its two branches; the point at infinity of a chart never carries a
//! node or a twist point. A line bundle of degree `d_v` on component `v` has
//! its sections represented as polynomials of degree at most `d_v` (none when
//! `d_v < 0`), and the gluing pair `(c0, c1)` of an edge imposes
//! `c0 * s_u(a) = c1 * s_w(b)` where `a`, `b` are the node's coordinates on
//! side 0 (component `u`) and side 1 (component `w`).
//!
//! Global sections are the solutions of this linear system, so `h^0` is the
//! nullity of one constraint row per edge over the monomial coefficients.
//! Ranks over the rationals agree with ranks over any field extension, so the
//! value is the same as over an algebraically closed field of characteristic
//! zero.

mod ops;

pub use ops::{
    canonical_bundle, gauge_coordinates, gauge_normalize, is_base_point, partial_normalization,
    residual_bundle, restrict_subcurve, spanning_forest, stabilize_bundle, stabilize_model,
    twist_point, Twist,
};

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{Rational, RationalMatrix};
use crate::error::{Error, Result};
use crate::graph::{DualGraph, EdgeId, Induced};
use crate::multidegree::Multidegree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCurveModel {
    graph: DualGraph,
    coords: Vec<[Rational; 2]>,
}

impl RationalCurveModel {
    /// `coords[j][side]` is the coordinate of edge `j`'s endpoint on `side`.
    pub fn new(graph: DualGraph, coords: Vec<[Rational; 2]>) -> Result<Self> {
        if coords.len() != graph.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "{} coordinate pairs for {} edges",
                coords.len(),
                graph.edge_count()
            )));
        }
        if let Some(v) = (0..graph.vertex_count()).find(|&v| graph.weight(v) != 0) {
            return Err(Error::PositiveWeight {
                vertex: graph.vertex_id(v),
                weight: graph.weight(v),
            });
        }
        let model = RationalCurveModel { graph, coords };
        for v in 0..model.graph.vertex_count() {
            let points = model.node_coords(v);
            for (i, a) in points.iter().enumerate() {
                if points[..i].contains(a) {
                    return Err(Error::CoordinateCollision {
                        vertex: model.graph.vertex_id(v),
                        coord: a.to_string(),
                    });
                }
            }
        }
        Ok(model)
    }

    /// Coordinates 0, 1, 2, ... on each component, assigned to its
    /// edge-endpoints in edge-id order.
    pub fn with_default_coords(graph: DualGraph) -> Result<Self> {
        let mut coords = vec![[Rational::zero(), Rational::zero()]; graph.edge_count()];
        for v in 0..graph.vertex_count() {
            for (k, &(j, side)) in graph.endpoints(v).iter().enumerate() {
                coords[j][side] = Rational::from_integer((k as i64).into());
            }
        }
        Self::new(graph, coords)
    }

    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn coords(&self) -> &[[Rational; 2]] {
        &self.coords
    }

    pub fn coord(&self, edge: usize, side: usize) -> &Rational {
        &self.coords[edge][side]
    }

    /// Node coordinates on component `v`, in edge-endpoint order.
    pub fn node_coords(&self, v: usize) -> Vec<Rational> {
        self.graph
            .endpoints(v)
            .iter()
            .map(|&(j, side)| self.coords[j][side].clone())
            .collect()
    }

    pub fn genus(&self) -> i64 {
        self.graph.genus()
    }

    /// Applies `z -> alpha * z + beta` to every node coordinate on `v`.
    pub fn with_affine_chart(&self, v: usize, alpha: &Rational, beta: &Rational) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::InvalidParameter(
                "affine scale must be nonzero".into(),
            ));
        }
        let mut coords = self.coords.clone();
        for &(j, side) in self.graph.endpoints(v) {
            coords[j][side] = alpha * &self.coords[j][side] + beta;
        }
        Self::new(self.graph.clone(), coords)
    }

    pub(crate) fn induced(&self, members: &[bool]) -> (RationalCurveModel, Induced) {
        let sub = self.graph.induced(members);
        let coords = sub
            .edge_map
            .iter()
            .map(|&j| self.coords[j].clone())
            .collect();
        let model = RationalCurveModel {
            graph: sub.graph.clone(),
            coords,
        };
        (model, sub)
    }

    pub(crate) fn from_parts_unchecked(graph: DualGraph, coords: Vec<[Rational; 2]>) -> Self {
        RationalCurveModel { graph, coords }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedLineBundle {
    model: Arc<RationalCurveModel>,
    degree: Multidegree,
    gluing: Vec<[Rational; 2]>,
}

impl GluedLineBundle {
    pub fn new(
        model: Arc<RationalCurveModel>,
        degree: Multidegree,
        gluing: Vec<[Rational; 2]>,
    ) -> Result<Self> {
        degree.check_len(model.graph())?;
        if gluing.len() != model.graph().edge_count() {
            return Err(Error::InvalidParameter(format!(
                "{} gluing pairs for {} edges",
                gluing.len(),
                model.graph().edge_count()
            )));
        }
        if let Some(j) = gluing
            .iter()
            .position(|pair| pair[0].is_zero() || pair[1].is_zero())
        {
            return Err(Error::ZeroGluing {
                edge: model.graph().edge(j).id,
            });
        }
        Ok(GluedLineBundle {
            model,
            degree,
            gluing,
        })
    }

    /// Every edge glued by `(1, 1)`.
    pub fn with_trivial_gluing(
        model: Arc<RationalCurveModel>,
        degree: Multidegree,
    ) -> Result<Self> {
        let gluing = vec![[Rational::one(), Rational::one()]; model.graph().edge_count()];
        Self::new(model, degree, gluing)
    }

    pub fn structure_sheaf(model: Arc<RationalCurveModel>) -> Self {
        let degree = Multidegree::zero(model.graph().vertex_count());
        Self::with_trivial_gluing(model, degree).expect("trivial gluing is valid")
    }

    pub fn model(&self) -> &Arc<RationalCurveModel> {
        &self.model
    }

    pub fn graph(&self) -> &DualGraph {
        self.model.graph()
    }

    pub fn degree(&self) -> &Multidegree {
        &self.degree
    }

    pub fn total_degree(&self) -> i64 {
        self.degree.total()
    }

    pub fn gluing(&self) -> &[[Rational; 2]] {
        &self.gluing
    }

    pub fn gluing_for(&self, edge: EdgeId) -> Option<&[Rational; 2]> {
        self.graph().edge_index(edge).map(|j| &self.gluing[j])
    }

    /// Same model and degree, different gluing.
    pub fn with_gluing(&self, gluing: Vec<[Rational; 2]>) -> Result<Self> {
        Self::new(self.model.clone(), self.degree.clone(), gluing)
    }

    pub fn h0(&self) -> usize {
        h0(self)
    }

    pub fn sections(&self) -> SectionSpace {
        let system = self.constraint_system();
        SectionSpace {
            basis: system.matrix.null_space(),
            blocks: system.blocks,
        }
    }

    fn constraint_system(&self) -> ConstraintSystem {
        let g = self.graph();
        let mut blocks = Vec::with_capacity(g.vertex_count());
        let mut cols = 0;
        for v in 0..g.vertex_count() {
            let d = self.degree[v];
            if d >= 0 {
                blocks.push(Some((cols, d as usize + 1)));
                cols += d as usize + 1;
            } else {
                blocks.push(None);
            }
        }
        let mut matrix = RationalMatrix::zeros(g.edge_count(), cols);
        for (j, e) in g.edges().iter().enumerate() {
            for side in 0..2 {
                let Some((start, len)) = blocks[e.ends[side]] else {
                    continue;
                };
                let point = self.model.coord(j, side);
                let mut term = self.gluing[j][side].clone();
                if side == 1 {
                    term = -term;
                }
                for k in 0..len {
                    matrix[(j, start + k)] += &term;
                    term *= point;
                }
            }
        }
        ConstraintSystem { matrix, blocks }
    }
}

struct ConstraintSystem {
    matrix: RationalMatrix,
    blocks: Vec<Option<(usize, usize)>>,
}

/// Dimension of the space of global sections.
pub fn h0(b: &GluedLineBundle) -> usize {
    b.constraint_system().matrix.nullity()
}

/// A basis of global sections. Each basis vector lists the polynomial
/// coefficients of every component with nonnegative degree, in vertex order.
#[derive(Debug, Clone)]
pub struct SectionSpace {
    basis: Vec<Vec<Rational>>,
    blocks: Vec<Option<(usize, usize)>>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients (constant term first) of basis section `i` on component `v`.
    pub fn polynomial(&self, i: usize, v: usize) -> &[Rational] {
        match self.blocks[v] {
            Some((start, len)) => &self.basis[i][start..start + len],
            None => &[],
        }
    }

    /// Whether every global section is identically zero on component `v`.
    pub fn vanishes_on(&self, v: usize) -> bool {
        (0..self.dim()).all(|i| self.polynomial(i, v).iter().all(Zero::is_zero))
    }

    /// Values of all basis sections at `point` on component `v`, in the
    /// polynomial trivialization.
    pub fn evaluate(&self, v: usize, point: &Rational) -> Vec<Rational> {
        (0..self.dim())
            .map(|i| {
                self.polynomial(i, v)
                    .iter()
                    .rev()
                    .fold(Rational::zero(), |acc, c| acc * point + c)
            })
            .collect()
    }
}
