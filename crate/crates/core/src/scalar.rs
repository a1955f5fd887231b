//! Real and complex scalar support.
//!
//! Jacobi families assemble real systems; the Fourier family needs complex
//! arithmetic. Everything downstream of basis evaluation is generic over
//! [`Scalar`], which is implemented for `f64` and `Complex64`.

use nalgebra::ComplexField;
use num_complex::Complex64;

pub trait Scalar:
    ComplexField<RealField = f64> + Copy + Send + Sync + std::fmt::Debug + 'static
{
    const IS_COMPLEX: bool;

    /// Converts from a complex value. For real scalars the imaginary part is dropped.
    fn from_complex(z: Complex64) -> Self;

    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn from_complex(z: Complex64) -> Self {
        z.re
    }

    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn from_complex(z: Complex64) -> Self {
        z
    }

    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
}
