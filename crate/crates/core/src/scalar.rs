//! Scalar abstraction: every geometric and dynamic computation in this crate
//! is generic over an IEEE float type (`f32` or `f64`).

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::distributions::uniform::SampleUniform;

/// Floating-point scalar usable throughout the planner.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + SampleUniform
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossy conversion from an `f64` literal.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal must convert into the scalar type")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + SampleUniform
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_is_implemented_for_ieee_floats() {
        fn touch<T: Real>(x: T) -> T {
            x + T::of(1.0)
        }
        assert_eq!(touch(1.0_f64), 2.0);
        assert_eq!(touch(1.0_f32), 2.0);
    }
}
