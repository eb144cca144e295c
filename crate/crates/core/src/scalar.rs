//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All state-vector math is written against [`Scalar`], so the same code runs
//! in `f64` (the reference precision, with tolerances of `1e-12`) and `f32`
//! (for quick sweeps, with tolerances loosened to match the mantissa).

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real field used for amplitudes, probabilities and fidelities.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for equalities of amplitudes, norms and probabilities.
    const EQ_TOL: Self;
    /// Tolerance for positive-semidefiniteness and purity checks.
    const PSD_TOL: Self;
    /// Smallest probability an outcome may have and still be forced.
    const MIN_PROB: Self;

    /// Converts an `f64` literal. Never fails for the supported types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

macro_rules! impl_scalar {
    ($t:ty, $eq:expr, $psd:expr, $min:expr) => {
        impl Scalar for $t {
            const EQ_TOL: Self = $eq;
            const PSD_TOL: Self = $psd;
            const MIN_PROB: Self = $min;
        }
    };
}

impl_scalar!(f64, 1e-12, 1e-10, 1e-12);
impl_scalar!(f32, 1e-5, 1e-4, 1e-6);

/// Complex amplitude over a [`Scalar`].
pub type Amplitude<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
#[cfg(test)]
pub(crate) fn creal<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn frac_1_sqrt_2<T: Scalar>() -> T {
    T::FRAC_1_SQRT_2()
}

pub(crate) fn is_finite<T: Scalar>(c: &Complex<T>) -> bool {
    c.re.is_finite() && c.im.is_finite()
}
