//! Scalar abstraction for the analytic modules.
//!
//! Everything outside the simulator is generic over [`Real`] so the same
//! formulas run at `f32` or `f64`. The simulator and CLI stay on `f64`.

use core::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by the analytic modules.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lift an `f64` literal into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in Real")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in Real")
    }

    fn of_u32(n: u32) -> Self {
        Self::from_u32(n).expect("u32 representable in Real")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}
