use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} has negative weight {weight}")]
    NegativeWeight { vertex: VertexId, weight: i64 },
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("unknown vertex index {0}")]
    UnknownVertex(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("vertex set must be a proper nonempty subset")]
    TrivialSubcurve,
    #[error("genus {genus} is below 2")]
    GenusTooSmall { genus: i64 },
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not semistable: rational vertex {vertex} has valence {valence} < 2")]
    NotSemistable { vertex: VertexId, valence: u32 },
    #[error("graph is not stable")]
    NotStable,
    #[error("multidegree has {found} entries, graph has {expected} vertices")]
    DegreeLength { expected: usize, found: usize },
    #[error("total degree {total} is not g-1 or g (g = {genus})")]
    StableDegreeOutOfRange { total: i64, genus: i64 },
    #[error("{count} vertices exceeds the brute-force cap of {cap}")]
    TooManyVertices { count: usize, cap: usize },
    #[error("vertex {vertex} has weight {weight}; the section solver needs rational components")]
    PositiveWeight { vertex: VertexId, weight: u32 },
    #[error("coordinate {coord} on vertex {vertex} collides with another point")]
    CoordinateCollision { vertex: VertexId, coord: String },
    #[error("edge {edge} has a zero gluing scalar")]
    ZeroGluing { edge: EdgeId },
    #[error("exceptional vertex {vertex} has degree {degree}, expected 0")]
    ExceptionalDegree { vertex: VertexId, degree: i64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
