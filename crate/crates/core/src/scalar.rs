//! Scalar abstraction for the floating-point parts of the library.
//!
//! Everything that manipulates capacity values, histogram masses or
//! probability weights is generic over [`Real`], so the same code runs in
//! `f32` or `f64`. Exact combinatorial quantities (extension counts,
//! selection probabilities, centroids) additionally have big-integer /
//! big-rational routes that do not go through this trait.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the library.
///
/// Implemented for `f32` and `f64` via the blanket impl.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from `f64` (lossy for `f32`, identity for `f64`).
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any Real")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Default
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Compensated (Kahan) summation.
///
/// Used where probability masses must sum to 1 within tight tolerances even
/// for tens of thousands of terms.
pub fn kahan_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_unit_mass() {
        let n = 12_870usize;
        let w = 1.0f64 / n as f64;
        let naive: f64 = std::iter::repeat(w).take(n).sum();
        let comp = kahan_sum(std::iter::repeat(w).take(n));
        assert!((comp - 1.0).abs() <= (naive - 1.0).abs());
        assert!((comp - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generic_over_f32_and_f64() {
        fn mid<T: Real>() -> T {
            (T::one() + T::one()).recip()
        }
        assert_eq!(mid::<f32>(), 0.5f32);
        assert_eq!(mid::<f64>(), 0.5f64);
    }
}
