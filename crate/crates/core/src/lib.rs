//! Combinatorics of dual graphs of semistable curves and exact `h^0` of line
//! bundles on nodal curves with rational components.
//!
//! The graph side covers bridges, the forest of 2-edge-connected components
//! and its leaf count, stabilization, uniform and stable multidegrees and
//! Dhar subgraphs. The curve side builds concrete nodal curves out of
//! projective lines, glues line bundles on them and computes their spaces of
//! global sections exactly over the rationals. [`harness`] runs the
//! verification campaigns for the Clifford bound
//! `h^0(X, L) <= d/2 + #l(G^Br)/2` on uniform multidegrees.

pub mod algebra;
pub mod constructions;
pub mod curve;
pub mod error;
pub mod graph;
pub mod harness;
pub mod multidegree;
pub mod text;

pub use algebra::{Rational, RationalMatrix};
pub use curve::{h0, GluedLineBundle, RationalCurveModel};
pub use error::{Error, Result};
pub use graph::{BridgeForest, DualGraph, EdgeId, VertexId};
pub use multidegree::Multidegree;
