//! Gentle quivers with relations: the thread invariant, reflections, and
//! classification of gentle algebras derived equivalent to cluster tilted
//! algebras of type A and Ã.

pub mod classify;
pub mod dsl;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod gentle;
pub mod invariant;
pub mod normalize;
pub mod quiver;
pub mod report;
pub mod signs;
mod structure;
pub mod threads;
pub mod transforms;

pub use error::{Error, Result};
pub use gentle::{arrow_kind, gentle, validate_gentle, ArrowKind, GentleQuiver, GentlenessViolation, ViolationKind};
pub use invariant::{aag_invariant, check_sum_identities, AagInvariant, SumReport};
pub use quiver::{Arrow, ArrowId, QuiverWithRelations, Relation, VertexId};
pub use signs::{compute_sign_assignment, compute_sign_assignment_with, Sign, SignAssignment};
pub use threads::{build_thread_system, enumerate_threads, OrbitStats, Thread, ThreadBody, ThreadKind, ThreadSystem};
pub use classify::{
    classify, decompose_class_a, decompose_class_a_tilde, derived_equivalent, gorenstein_dimension, ClassDecompositionA,
    ClassDecompositionAtilde, Classification, ClusterType, EquivalenceVerdict, GorensteinDimension,
};
pub use dsl::{emit, parse_dsl, ParseError, Position, QuiverDocument};
pub use transforms::{
    can_coreflect, can_reflect, complete_relations, coreflect, isolated_relations, model_of, reflect, standard_model,
    triangles, Completion, ReflectObstruction, RewriteStep, RewriteTrace,
};
pub use normalize::{
    normalize_a, normalize_a_tilde, verify_trace, Bound, MeasureSnapshot, NormalizationResult, Phase, TraceCheck,
    TraceFailure,
};
pub use report::{emit_report, Report, SumsRecord};
