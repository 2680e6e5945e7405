use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast};

/// Floating-point scalar used by the numerical modules.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal; every supported type represents these.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field used by the exact branch-point combinatorics.
pub trait Field: Num + Clone + PartialOrd + Debug {}

impl<T: Num + Clone + PartialOrd + Debug> Field for T {}

/// Principal `1/n`-th power. A negative zero imaginary part is treated as `+0`
/// so that negative reals always land on argument `+π`.
pub fn principal_root<T: Real>(z: Complex<T>, n: u32) -> Complex<T> {
    principal_pow(z, T::one() / T::from_u32(n).unwrap())
}

/// Principal power `z^p = exp(p Log z)` with the branch cut along the negative axis
/// approached from above.
pub fn principal_pow<T: Real>(z: Complex<T>, p: T) -> Complex<T> {
    let z = Complex::new(z.re, z.im + T::zero());
    if z.re == T::zero() && z.im == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let r = z.norm().powf(p);
    let arg = z.im.atan2(z.re) * p;
    Complex::new(r * arg.cos(), r * arg.sin())
}

pub(crate) fn real_c<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_uses_upper_branch() {
        let z = Complex::new(-16.0_f64, -0.0);
        let r = principal_root(z, 4);
        let w = Complex::from_polar(2.0, std::f64::consts::FRAC_PI_4);
        assert!((r - w).norm() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let r = principal_root(Complex::new(81.0_f32, 0.0), 4);
        assert!((r.re - 3.0).abs() < 1e-5 && r.im.abs() < 1e-6);
    }
}
