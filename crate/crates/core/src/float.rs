//! Scalar abstraction for the numerical core.

use std::fmt::{Debug, Display};

use num_traits as nt;

/// Floating-point scalar the simulation is generic over.
///
/// Everything the core math needs from a scalar type, bundled into one
/// bound. Implemented for `f32` and `f64`; the crate-root aliases fix `f64`.
pub trait Real:
    nt::Float
    + nt::FloatConst
    + nt::NumAssign
    + nt::FromPrimitive
    + nt::ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant (tolerances, table entries) into `Self`.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must be representable")
    }

    /// Lossy view as `f64`, for the statistics layer.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
