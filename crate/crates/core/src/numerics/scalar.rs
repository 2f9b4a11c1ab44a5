//! Working-precision scalar abstraction.
//!
//! Every numerical routine in this crate is generic over [`Real`], a bundle of
//! the standard floating-point traits. The crate currently instantiates it at
//! `f64` (binary64); an extended-precision type implementing the same trait
//! bounds can be dropped in without touching the algorithms.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Working-precision real scalar.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Unit in the last place of 1.0 (machine epsilon).
    fn ulp() -> Self {
        Self::epsilon()
    }

    /// Lossless-enough conversion for diagnostics and error messages.
    fn to_f64_lossy(self) -> f64;

    fn from_usize_exact(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in working precision")
    }

    fn from_f64_exact(v: f64) -> Self {
        Self::from_f64(v).expect("f64 representable in working precision")
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}
