use thiserror::Error;

use crate::equilibria::EquilibriumRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hypergraph has zero vertices")]
    ZeroVertices,
    #[error("hyperedge {edge} is empty")]
    EmptyEdge { edge: usize },
    #[error("hyperedge {edge} references vertex {vertex}, but m = {m}")]
    VertexOutOfRange { edge: usize, vertex: usize, m: usize },
    #[error("hyperedge {edge} contains vertex {vertex} more than once")]
    RepeatedVertex { edge: usize, vertex: usize },
    #[error("vertex {0} belongs to no hyperedge")]
    IsolatedVertex(usize),
    #[error("unknown builtin hypergraph `{0}`")]
    UnknownName(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("edge sum of hyperedge {edge} is {value}, must be positive")]
    DegenerateEdgeSum { edge: usize, value: f64 },
    #[error("point is not on the simplex: {0}")]
    NotOnSimplex(String),
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid flow domain cutoff c = {c}; need 0 < c < 1/N = {limit}")]
    InvalidCutoff { c: f64, limit: f64 },
    #[error("Lyapunov function dropped by {drop:e} at t = {t}; reduce dt")]
    StepTooLarge { t: f64, drop: f64 },
    #[error("trajectory left the flow domain at t = {t}: edge {edge} has sum {value} < c")]
    DomainExit { t: f64, edge: usize, value: f64 },

    #[error("hyperedge {edge} does not meet the support")]
    EdgeMissesSupport { edge: usize },
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("solver stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<EquilibriumRecord>,
    },
    #[error("no interior non-unstable equilibrium; limit lies on the simplex boundary")]
    BoundaryOnly { record: Box<EquilibriumRecord> },
    #[error("point is not an equilibrium: residual {residual:e}")]
    NotAnEquilibrium { residual: f64 },
    #[error("point is not in the interior of the simplex")]
    NotInterior,

    #[error("ball count of vertex {vertex} overflowed")]
    Overflow { vertex: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
