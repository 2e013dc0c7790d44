//! Integer scalars used for path counts, ordinals and incidence matrices.
//!
//! Path counts grow exponentially with depth, so every counting routine is
//! generic over [`Count`]. Machine integers are fast and overflow-checked;
//! [`num_bigint::BigUint`] never overflows.

use std::fmt::{Debug, Display};

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, ToPrimitive, Zero};

/// An unsigned integer type suitable for counting paths.
pub trait Count:
    Clone
    + Ord
    + Debug
    + Display
    + Zero
    + One
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_len(n: usize) -> Option<Self> {
        Self::from_usize(n)
    }
}

impl Count for u32 {}
impl Count for u64 {}
impl Count for u128 {}
impl Count for usize {}
impl Count for BigUint {}

/// Raised when a count does not fit the chosen scalar type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("count overflowed the {0} scalar type")]
pub struct Overflow(pub &'static str);

pub(crate) fn overflow<C>() -> Overflow {
    Overflow(std::any::type_name::<C>())
}

pub(crate) fn add<C: Count>(a: &C, b: &C) -> Result<C, Overflow> {
    a.checked_add(b).ok_or_else(overflow::<C>)
}

pub(crate) fn mul<C: Count>(a: &C, b: &C) -> Result<C, Overflow> {
    a.checked_mul(b).ok_or_else(overflow::<C>)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_helpers_report_overflow() {
        assert_eq!(add(&u32::MAX, &1u32), Err(Overflow("u32")));
        assert_eq!(mul(&3u64, &4u64), Ok(12));
        let big = BigUint::from(u128::MAX);
        assert!(mul(&big, &big).is_ok());
    }
}
