//! Real scalar abstraction shared by every numeric routine.
//!
//! All analyses are generic over [`Real`], implemented for `f64` and for the
//! double-double type [`TwoFloat`] (about 32 significant digits). The
//! [`Precision`] switch selects one of the two at the API boundary.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};
pub use twofloat::TwoFloat;

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Scalar field used by jets and everything built on them.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    fn of(x: f64) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn cplx(z: Complex<f64>) -> Cplx<Self> {
        Complex::new(Self::of(z.re), Self::of(z.im))
    }

    /// Correctly rounded reciprocal at the type's working precision.
    fn recip_exact(self) -> Self {
        self.recip()
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for TwoFloat {
    #[inline]
    fn of(x: f64) -> Self {
        TwoFloat::from(x)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }

    // The crate's own reciprocal forms `1 - hi * (1/hi)` without a fused
    // multiply-add and loses the low word; redo the Newton step with an exact
    // product.
    fn recip_exact(self) -> Self {
        let th = self.hi().recip();
        let r = TwoFloat::from(1.0) - self * th;
        TwoFloat::from(th) + r * th
    }
}

/// Lowers a complex value to double precision.
#[inline]
pub fn to_c64<T: Real>(z: Cplx<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

/// `|z|` without squaring overflow.
#[inline]
pub fn abs<T: Real>(z: Cplx<T>) -> T {
    z.re.hypot(z.im)
}

/// `1 - |z|^2`, computed as `(1-|z|)(1+|z|)` to keep relative accuracy near
/// the unit circle.
#[inline]
pub fn one_minus_abs2<T: Real>(z: Cplx<T>) -> T {
    let r = abs(z);
    (T::one() - r) * (T::one() + r)
}

/// `1 / z` built on [`Real::recip_exact`].
#[inline]
pub fn inv<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let s = (z.re * z.re + z.im * z.im).recip_exact();
    Complex::new(z.re * s, -z.im * s)
}

/// Arithmetic mode for jet evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    /// Double-double arithmetic, roughly 32 significant digits.
    Extended,
}

impl Precision {
    /// Closest admissible distance to the unit circle for sampled points.
    pub fn boundary_floor(self) -> f64 {
        match self {
            Precision::Double => 1e-6,
            Precision::Extended => 1e-9,
        }
    }

    /// Deepest tail annulus `1 - 2^-n` used for limsup estimates.
    pub fn tail_depth(self) -> u32 {
        match self {
            Precision::Double => 16,
            Precision::Extended => 24,
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}` (expected double|extended)")),
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        })
    }
}

/// Runs a generic computation at the requested precision.
#[macro_export]
macro_rules! with_precision {
    ($prec:expr, $t:ident => $body:expr) => {
        match $prec {
            $crate::scalar::Precision::Double => {
                type $t = f64;
                $body
            }
            $crate::scalar::Precision::Extended => {
                type $t = $crate::scalar::TwoFloat;
                $body
            }
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_minus_abs2_is_accurate_near_circle() {
        let z = Complex::new(1.0 - (-30f64).exp2(), 0.0);
        let v = one_minus_abs2(z);
        let exact = (-30f64).exp2() * (2.0 - (-30f64).exp2());
        assert!((v - exact).abs() < 1e-25);
    }

    #[test]
    fn extended_carries_more_digits() {
        let third = TwoFloat::of(3.0).recip_exact();
        let back = third * TwoFloat::of(3.0) - TwoFloat::of(1.0);
        assert!(back.as_f64().abs() < 1e-30);
        let z = Complex::new(TwoFloat::of(0.3), TwoFloat::of(-0.7));
        let one = z * inv(z) - Complex::new(TwoFloat::of(1.0), TwoFloat::of(0.0));
        assert!(one.norm_sqr().as_f64().sqrt() < 1e-30);
    }
}
