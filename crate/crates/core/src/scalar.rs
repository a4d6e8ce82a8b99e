//! Scalar abstraction for the library core.
//!
//! All numeric code is generic over [`Real`], implemented for `f32` and
//! `f64`. The crate root exposes `f64` aliases, which is what the CLI and
//! the image boundary use.

use std::fmt;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by every kernel in this crate.
///
/// Beyond the arithmetic from `num_traits::Float`, implementors provide a
/// monotone mapping to unsigned integer keys so sorting kernels can order
/// values without calling a comparator. For finite inputs,
/// `a <= b` (numeric) iff `a.order_key() <= b.order_key()`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Order-preserving mapping into `u64` key space.
    fn order_key(self) -> u64;

    /// Inverse of [`Real::order_key`].
    fn from_order_key(key: u64) -> Self;
}

impl Real for f64 {
    #[inline]
    fn order_key(self) -> u64 {
        let bits = self.to_bits();
        if bits >> 63 == 1 {
            !bits
        } else {
            bits | (1 << 63)
        }
    }

    #[inline]
    fn from_order_key(key: u64) -> Self {
        if key >> 63 == 1 {
            f64::from_bits(key & !(1 << 63))
        } else {
            f64::from_bits(!key)
        }
    }
}

impl Real for f32 {
    #[inline]
    fn order_key(self) -> u64 {
        let bits = self.to_bits();
        let key = if bits >> 31 == 1 {
            !bits
        } else {
            bits | (1 << 31)
        };
        u64::from(key)
    }

    #[inline]
    fn from_order_key(key: u64) -> Self {
        let key = key as u32;
        if key >> 31 == 1 {
            f32::from_bits(key & !(1 << 31))
        } else {
            f32::from_bits(!key)
        }
    }
}

/// Converts a count (channel size, position total) into `T`.
#[inline]
pub(crate) fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count fits in scalar type")
}

/// Converts an `f64` literal (kernel weight, default, tolerance) into `T`.
#[inline]
pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal fits in scalar type")
}

/// Compensated (Kahan) accumulator. Keeps sums order-independent to within
/// a few ulps, which the stat-matching tolerances rely on.
#[derive(Clone, Copy, Debug)]
pub(crate) struct KahanSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> KahanSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, value: T) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> T {
        self.sum
    }
}
