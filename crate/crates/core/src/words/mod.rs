//! Combinatorics on words: periods, generating sets and codes.
//!
//! Everything here is generic over the letter type so that the same routines
//! run on diagram letters (`usize`) and on plain `char` test data.

mod basis;
mod code;
mod period;

pub use basis::{three_word_basis, Basis, BasisCase, BasisError};
pub use code::{
    check_code, factorize, factorize_all, factorize_greedy, factorize_unique, is_independent,
    minimal_generating_subset, CodeError, FactorMode, Independence,
};
pub use period::{fine_wilf_reduce, has_period, PeriodViolation};

/// Concatenation of the code words listed in `factors`.
pub fn concat<T: Clone>(code: &[Vec<T>], factors: &[usize]) -> Vec<T> {
    factors.iter().flat_map(|&i| code[i].iter().cloned()).collect()
}
