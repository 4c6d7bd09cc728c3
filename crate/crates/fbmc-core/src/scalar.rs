use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the whole toolkit is generic over.
pub trait Real: Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Default + Debug + Display {
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable")
    }

    /// Converts an index or count into the scalar type.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

/// `e^{j x}` evaluated in double precision and narrowed to `T`.
#[inline]
pub fn cis<T: Real>(x: f64) -> C<T> {
    C::new(T::lit(x.cos()), T::lit(x.sin()))
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    C::new(T::one(), T::zero())
}

/// Widens a complex value to double precision.
#[inline]
pub fn to_c64<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

/// Narrows a double-precision complex value to `T`.
#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> C<T> {
    C::new(T::lit(z.re), T::lit(z.im))
}
