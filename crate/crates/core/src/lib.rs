//! Ordered Bratteli diagrams, premorphisms between them, and the word
//! combinatorics behind rank reduction and conjugacy certificates.
//!
//! Diagrams are stored as morphism sequences `σ_n: V_n -> V_{n-1}^*`; the
//! order of the edges into a vertex is the order of its image word.

pub mod alphabet;
pub mod conjugacy;
pub mod diagram;
pub mod format;
pub mod matrix;
pub mod morphism;
pub mod path;
pub mod periodic;
pub mod premorphism;
pub mod rank_reduction;
pub mod scalar;
pub mod transforms;
pub mod words;

pub use alphabet::{Alphabet, Letter, Word};
pub use diagram::{OrderedBratteliDiagram, Tail};
pub use matrix::CountMatrix;
pub use morphism::Morphism;
pub use path::PathPrefix;
pub use periodic::IndexSeq;
pub use scalar::Count;

/// Incidence matrix with machine-word entries.
pub type IncidenceMatrix = CountMatrix<u64>;
/// Incidence matrix with unbounded entries, for deep telescopings.
pub type BigIncidenceMatrix = CountMatrix<num_bigint::BigUint>;
