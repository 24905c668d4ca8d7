//! Floating-point scalar abstraction shared by the model, simplex and search.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the LP and search code can run on: `f32` or `f64`.
///
/// Each implementation carries default tolerances sized to its precision.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Primal feasibility tolerance (bounds and scaled rows).
    fn default_feasibility_tol() -> Self;
    /// Reduced-cost optimality tolerance.
    fn default_optimality_tol() -> Self;
    /// Smallest magnitude accepted as a pivot element.
    fn pivot_tol() -> Self;
    /// Entries below this magnitude are dropped from LU factors.
    fn drop_tol() -> Self;

    /// Lossy conversion from `f64`; values outside the range saturate to infinity.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| if v > 0.0 { Self::infinity() } else { Self::neg_infinity() })
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_feasibility_tol() -> Self {
        1e-7
    }
    fn default_optimality_tol() -> Self {
        1e-7
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn drop_tol() -> Self {
        1e-14
    }
}

impl Scalar for f32 {
    fn default_feasibility_tol() -> Self {
        1e-4
    }
    fn default_optimality_tol() -> Self {
        1e-4
    }
    fn pivot_tol() -> Self {
        1e-5
    }
    fn drop_tol() -> Self {
        1e-7
    }
}
