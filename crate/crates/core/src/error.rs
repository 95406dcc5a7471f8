use thiserror::Error;

use crate::grid::{Edge, Face, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must have at least 2x2 vertices, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },

    #[error("{what}: expected length {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("edge label must be nonzero and finite ({which}[{index}] = {value})")]
    BadLabel {
        which: &'static str,
        index: usize,
        value: f64,
    },

    #[error("vertex {0} is outside the grid")]
    VertexOutOfRange(Vertex),

    #[error("edge form is not closed: face {face} sums to {residual:e}")]
    NotClosed { face: Face, residual: f64 },

    #[error("degenerate quadrilateral: a cross-ratio denominator vanishes")]
    DegenerateQuad,

    #[error("Moebius transformation has its pole on vertex {0}")]
    PoleOnVertex(Vertex),

    #[error("Moebius coefficients are singular (AD - BC = 0)")]
    SingularMoebius,

    #[error("regularity violated: {0}")]
    RegularityViolation(String),

    #[error("multiplicative propagation does not close on face {face} (residual {residual:e})")]
    Inconsistent { face: Face, residual: f64 },

    #[error("invalid spectral parameter t = {t}: {reason}")]
    InvalidParameter { t: f64, reason: String },

    #[error("1 - t a < 0 on edge {edge}; enable the complex branch to allow it")]
    NegativeBranch { edge: Edge },

    #[error("connection is not flat on face {face} (residual {residual:e})")]
    NotFlat { face: Face, residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("edge {0} is singular (vanishing difference)")]
    SingularEdge(Edge),

    #[error("reflection vector is not unit spacelike ((R,R) = {norm})")]
    NotUnitSpacelike { norm: f64 },

    #[error("contact elements do not meet in a single sphere (numerical rank {rank})")]
    NoIntersection { rank: usize },

    #[error("Darboux step along {edge} collides with the other leg")]
    DegenerateStep { edge: Edge },

    #[error("pair points coincide at vertex {0}")]
    CoincidentPoints(Vertex),

    #[error("connection entries on {edge} disagree with the edge cross ratio (residual {residual:e})")]
    EntryMismatch { edge: Edge, residual: f64 },

    #[error("gauge equation does not close on edge {edge} (residual {residual:e})")]
    NotIntegrable { edge: Edge, residual: f64 },

    #[error("point lies on the lower sheet (x0 = {x0})")]
    WrongSheet { x0: f64 },

    #[error("point is not unit timelike ((X,X) = {norm})")]
    NotUnitTimelike { norm: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
