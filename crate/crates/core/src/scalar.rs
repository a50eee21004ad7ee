//! The coordinate type every ring element is built from.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::{BigInt, ToBigInt};
use num_integer::{Integer, Roots};
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integers usable as coordinates of quadratic integers.
///
/// Implemented for `BigInt` (the default everywhere in this crate) and for the
/// primitive signed integers. Fixed-width coordinates are faster but overflow
/// on large inputs; only use them where heights are known to stay small.
pub trait Coord:
    Clone
    + Debug
    + Display
    + FromStr
    + Hash
    + Integer
    + Signed
    + Roots
    + FromPrimitive
    + ToPrimitive
    + ToBigInt
    + Send
    + Sync
    + 'static
{
    fn from_i64_lossless(v: i64) -> Self {
        Self::from_i64(v).expect("coordinate type cannot hold i64 value")
    }

    fn to_big(&self) -> BigInt {
        self.to_bigint().expect("integer converts to BigInt")
    }

    /// Converts back from a `BigInt`; `None` if it does not fit.
    fn from_big(v: &BigInt) -> Option<Self>;
}

impl Coord for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

macro_rules! impl_prim_coord {
    ($($t:ty),*) => {$(
        impl Coord for $t {
            fn from_big(v: &BigInt) -> Option<Self> {
                <$t>::try_from(v.clone()).ok()
            }
        }
    )*};
}

impl_prim_coord!(i32, i64, i128);
