//! Scalar abstraction shared by the linear-algebra and dynamics layers.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};

/// Real floating-point scalar the simulator core is generic over (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Machine epsilon scaled for accumulated rounding in small dense kernels.
    fn kernel_eps() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Builds a complex number from `f64` parts.
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// `exp(i * theta)`.
pub fn phase<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
