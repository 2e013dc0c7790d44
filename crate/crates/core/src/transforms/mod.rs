//! Diagram surgery: telescoping, packing, proper form, positivity, rank and
//! equivalence certificates.

mod certificate;
mod pack;
mod proper;
mod telescope;

pub use certificate::{
    verify_equivalence_certificate, CertVerdict, EquivalenceCertificate, Side, INTERLEAVED_EVEN, INTERLEAVED_ODD,
};
pub use pack::{pack, pack_names};
pub use proper::{common_ends, diagram_rank, greedy_spec, positive_reach, proper_form_search, ProperForm, Reach};
pub use telescope::{telescope, telescope_within};

use crate::diagram::DiagramError;
use crate::periodic::IndexSeqError;
use crate::words::CodeError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("telescoping spec: {0}")]
    Spec(#[from] IndexSeqError),
    #[error("periodic spec on a finite diagram reaches past level {depth}")]
    SpecBeyondDiagram { depth: usize },
    #[error("packing needs a level k >= 1 (got {0})")]
    BadLevel(usize),
    #[error("packing code: {0}")]
    Code(#[from] CodeError),
    #[error("image of {letter} at level {level} does not factorize over the code")]
    NotCovered { level: usize, letter: String },
    #[error("code word {word} is not needed; prune the code first")]
    NotMinimal { word: String },
    #[error("no suitable telescoping found within {0} levels")]
    Inconclusive(usize),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}
