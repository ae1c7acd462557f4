//! Scalar abstraction: the crate is generic over the underlying real field.
//!
//! All numerics run over `Complex<T>` with `T: Real`. `f64` is the working
//! precision for the shipped tolerances; `f32` is available for callers that
//! bring their own thresholds.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

/// Real scalar the matrix substrate is built on.
///
/// Mostly a bundle of `num-traits` bounds plus a seeded standard-normal
/// sampler, so random draws stay inside the trait instead of leaking
/// distribution bounds through every signature.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + std::iter::Sum
    + std::iter::Product
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Conversion for literal constants. Panics only if the target type
    /// cannot represent finite `f64` values at all, which no `Real` impl
    /// shipped here does.
    fn from_f64c(x: f64) -> Self {
        num_traits::FromPrimitive::from_f64(x).expect("finite f64 constant must convert")
    }

    fn to_f64c(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar must convert to f64")
    }
}

impl Real for f64 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Real for f32 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

/// Complex scalar over the crate's real field.
pub type C<T> = Complex<T>;

pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// i as a complex constant.
pub fn ci<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}
