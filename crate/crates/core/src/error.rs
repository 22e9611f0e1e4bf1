use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseAt { line: usize, column: usize, message: String },
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("edge {0} has nonpositive length")]
    NonpositiveLength(String),
    #[error("edge {edge} references unknown vertex {vertex}")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("point is already a vertex")]
    PointIsVertex,
    #[error("offset {offset} outside edge {edge}")]
    OffsetOutOfRange { edge: String, offset: String },
    #[error("points are not interior to edge {0}")]
    PointsNotOnEdge(String),
    #[error("point is not interior to edge {0}")]
    PointNotInterior(String),
    #[error("expected {expected} edges, got {got}")]
    WrongCardinality { expected: usize, got: usize },
    #[error("divisor has nonzero degree {0}")]
    NonzeroDegree(i64),
    #[error("divisor has degree {got}, expected {expected}")]
    WrongDegree { expected: i64, got: i64 },
    #[error("divisor is not principal: {0}")]
    NotPrincipal(String),
    #[error("invalid pillar points: {0}")]
    InvalidPillars(String),
    #[error("edges do not form the complement of a spanning tree")]
    NotComplement,
    #[error("invalid piecewise linear function: {0}")]
    InvalidFunction(String),
    #[error("invalid tropical curve: {0}")]
    InvalidCurve(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("tropicalization needs at least one coordinate")]
    EmptyCoordinates,
    #[error("edge piece is contracted")]
    ContractedEdge,
    #[error("image is not balanced at {0}")]
    Unbalanced(String),
    #[error("divisor points collide: {0}")]
    DivisorCollision(String),
    #[error("divisor point is not simple: {0}")]
    NonSimplePoint(String),
    #[error("edge {0} does not separate its far endpoint from the core")]
    NotSeparated(String),
    #[error("pillar construction failed: {0}")]
    PillarFailure(String),
    #[error("pillar search exhausted: {0}")]
    PillarSearchExhausted(String),
    #[error("not enough room on the edges at {0}")]
    NoRoom(String),
    #[error("the two edges coincide")]
    EqualEdges,
    #[error("stage 0 failed: {0}")]
    Stage0Failure(String),
    #[error("certificate failed: {0}")]
    CertificateFailure(String),
    #[error("singular vertex count did not decrease: {0}")]
    MonotonicityViolation(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
