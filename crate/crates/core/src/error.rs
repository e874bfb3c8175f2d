use thiserror::Error;

use crate::gentle::GentlenessViolation;
use crate::quiver::{ArrowId, Relation, VertexId};

/// Errors raised by the library.
///
/// `InternalBreach` signals that an invariant the algorithms rely on did not
/// hold; it always indicates a bug (or an input outside every documented
/// precondition) and maps to exit code 3 in the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid token `{0}`: expected a nonempty string of [A-Za-z0-9_]")]
    InvalidToken(String),

    #[error("quiver has no vertices")]
    NoVertices,

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(VertexId),

    #[error("duplicate arrow `{0}`")]
    DuplicateArrow(ArrowId),

    #[error("duplicate relation {0}")]
    DuplicateRelation(Relation),

    #[error("arrow `{arrow}` references undeclared vertex `{vertex}`")]
    UndeclaredVertex { arrow: ArrowId, vertex: VertexId },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(ArrowId),

    #[error("malformed relation: {0}")]
    MalformedRelation(GentlenessViolation),

    #[error("quiver is not gentle: {}", join_violations(.0))]
    NotGentle(Vec<GentlenessViolation>),

    #[error("sign constraints are inconsistent around arrows {arrows:?}")]
    SignInconsistency { arrows: Vec<ArrowId> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("iteration cap of {cap} exceeded in {phase}")]
    CapExceeded { phase: String, cap: usize },

    #[error("generator rejected {attempts} candidates; try another seed")]
    RejectionBudgetExhausted { attempts: usize },

    #[error("internal invariant breach: {0}")]
    InternalBreach(String),
}

fn join_violations(v: &[GentlenessViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InternalBreach(_) | Error::CapExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn breach(msg: impl Into<String>) -> Error {
    Error::InternalBreach(msg.into())
}
