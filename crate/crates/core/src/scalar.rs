//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point type the library is generic over.
///
/// Dense algebra goes through nalgebra, the sparse LU through faer and the
/// analytic signal through rustfft, so the bound gathers all three. `f32`
/// and `f64` implement it.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + faer::traits::RealField<Unit: faer::traits::ComplexField>
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self;

    /// Converts back to `f64` for reporting.
    fn f64(self) -> f64;

    /// A tolerance that never drops below what the type can resolve.
    fn tol(x: f64) -> Self {
        let floor = 64.0 * <Self as faer::traits::RealField>::epsilon_impl().f64();
        Self::lit(x.max(floor))
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn f64(self) -> f64 {
        self
    }
}

/// Builds a complex scalar from `f64` parts.
#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Lifts a real scalar into the complex plane.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
