//! Signatures, partial structures, literals and the theory language.

pub mod canonical;
pub(crate) mod lexer;
pub mod signature;
pub mod structure;
pub mod theory;

pub use canonical::{canonical_labeling, iso_canonical, CanonicalForm};
pub use signature::{RelId, Relation, Signature, MAX_ARITY};
pub use structure::{
    all_tuples, Literal, PartialStructure, Point, PointKind, Pred, StructureDto,
};
pub use theory::{
    parse_theory, Backend, ClosureRule, Forbidden, OrderFlavor, PatAtom, PatLit, TheorySpec,
};
