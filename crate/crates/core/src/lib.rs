//! Formal concept analysis and closed-itemset mining, extended with graded
//! concepts over many-valued contexts.
//!
//! The pipeline runs from [`context`] (binary and many-valued contexts,
//! CXT/CSV I/O, binarization) through [`galois`] (derivation and closure
//! operators) to [`lattice`] (Next Closure enumeration, concept lattices,
//! closed itemsets). [`ball_domain`] provides a certified contraction
//! fixed-point engine over origin-centered balls, and [`graded`] combines the
//! two into graded closed itemsets and graded concept lattices.

pub mod ball_domain;
pub mod bitset;
pub mod cli;
pub mod context;
pub mod fixtures;
pub mod galois;
pub mod graded;
pub mod lattice;

pub use ball_domain::{Ball, BallSequence, ContractionSpec, Norm, Vector};
pub use context::{FormalContext, ManyValuedContext};
pub use galois::{AttributeSet, ObjectSet};
pub use graded::{GradedConcept, GradedItemset, GradedLattice};
pub use lattice::{Concept, ConceptLattice};
