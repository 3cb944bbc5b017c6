//! Scalar traits shared by the f64 and double-double code paths.

use std::fmt::Debug;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_complex::{Complex, Complex64};
use num_traits::Num;

use crate::dd::Dd;

/// Real scalar: `f64` or [`Dd`].
pub trait Real:
    Field<R = Self>
    + Num
    + Copy + Debug + PartialOrd + Neg<Output = Self> + AddAssign + SubAssign + MulAssign + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn abs(self) -> Self;
    fn pi() -> Self;
    fn euler_gamma() -> Self;
    /// Unit roundoff of the representation.
    fn eps() -> f64;
}

impl Real for f64 {
    fn from_f64(x: f64) -> f64 {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn pi() -> f64 {
        std::f64::consts::PI
    }
    fn euler_gamma() -> f64 {
        0.5772156649015329
    }
    fn eps() -> f64 {
        f64::EPSILON
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Dd {
        Dd::new(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn sqrt(self) -> Dd {
        Dd::sqrt(self)
    }
    fn ln(self) -> Dd {
        Dd::ln(self)
    }
    fn exp(self) -> Dd {
        Dd::exp(self)
    }
    fn abs(self) -> Dd {
        Dd::abs(self)
    }
    fn pi() -> Dd {
        Dd::PI
    }
    fn euler_gamma() -> Dd {
        Dd::EULER
    }
    fn eps() -> f64 {
        1e-32
    }
}

/// Matrix entry type: a real or complex number over a [`Real`].
pub trait Field: Num + Copy + Debug + Neg<Output = Self> + Send + Sync + 'static {
    type R: Real;
    fn from_real(x: Self::R) -> Self;
    fn modulus(self) -> Self::R;
    fn conj(self) -> Self;
    fn to_c64(self) -> Complex64;
    fn from_c64(z: Complex64) -> Self;
    fn re(self) -> Self::R;
    fn im(self) -> Self::R;
}

impl<R: Real> Field for Complex<R> {
    type R = R;
    fn from_real(x: R) -> Self {
        Complex::new(x, R::zero())
    }
    fn modulus(self) -> R {
        (self.re * self.re + self.im * self.im).sqrt()
    }
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn from_c64(z: Complex64) -> Self {
        Complex::new(R::from_f64(z.re), R::from_f64(z.im))
    }
    fn re(self) -> R {
        self.re
    }
    fn im(self) -> R {
        self.im
    }
}

impl Field for f64 {
    type R = f64;
    fn from_real(x: f64) -> f64 {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> f64 {
        self
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_c64(z: Complex64) -> f64 {
        z.re
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
}

impl Field for Dd {
    type R = Dd;
    fn from_real(x: Dd) -> Dd {
        x
    }
    fn modulus(self) -> Dd {
        self.abs()
    }
    fn conj(self) -> Dd {
        self
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
    fn from_c64(z: Complex64) -> Dd {
        Dd::new(z.re)
    }
    fn re(self) -> Dd {
        self
    }
    fn im(self) -> Dd {
        Dd::ZERO
    }
}

/// Complex number over a generic real.
pub type Cx<R> = Complex<R>;

pub fn cx<R: Real>(re: f64, im: f64) -> Cx<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}
