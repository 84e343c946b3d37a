//! Truncated Taylor series over the complex numbers.
//!
//! A [`Jet`] of order `N` centred at `z0` stores the absolute Taylor
//! coefficients `c_0..=c_N` of `f(z0 + h) = sum c_k h^k + O(h^{N+1})`, so the
//! `k`-th derivative is `k! c_k`. Arithmetic follows the usual truncated
//! power-series rules; composition uses Horner recomposition on the
//! non-constant part of the inner series.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{abs, Cplx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet centers differ ({lhs} vs {rhs})")]
    CenterMismatch { lhs: Complex<f64>, rhs: Complex<f64> },
    #[error("jet orders differ ({lhs} vs {rhs})")]
    OrderMismatch { lhs: usize, rhs: usize },
    #[error("series division by a jet with vanishing constant term at {at}")]
    Pole { at: Complex<f64> },
    #[error("the variable jet needs order >= 1")]
    ZeroOrderVariable,
    #[error("jet of order {have} cannot be differentiated {need} times")]
    OrderTooLow { need: usize, have: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T: Real> {
    center: Cplx<T>,
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> Jet<T> {
    /// Wraps raw coefficients. `coeffs` must be non-empty.
    pub fn from_coeffs(center: Cplx<T>, coeffs: Vec<Cplx<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant coefficient");
        Self { center, coeffs }
    }

    pub fn constant(c: Cplx<T>, center: Cplx<T>, order: usize) -> Self {
        let mut coeffs = vec![Cplx::zero(); order + 1];
        coeffs[0] = c;
        Self { center, coeffs }
    }

    pub fn zero(center: Cplx<T>, order: usize) -> Self {
        Self::constant(Cplx::zero(), center, order)
    }

    /// The identity function `z` expanded at `center`.
    pub fn variable(center: Cplx<T>, order: usize) -> Result<Self, JetError> {
        if order == 0 {
            return Err(JetError::ZeroOrderVariable);
        }
        let mut j = Self::constant(center, center, order);
        j.coeffs[1] = Cplx::one();
        Ok(j)
    }

    /// Taylor jet of `1 / (1 - conj(a) z)` at `center`: `c_k = conj(a)^k / d^{k+1}`
    /// with `d = 1 - conj(a) center`.
    pub fn geometric(a: Cplx<T>, center: Cplx<T>, order: usize) -> Result<Self, JetError> {
        let ab = a.conj();
        let d = Cplx::<T>::one() - ab * center;
        if d.is_zero() {
            return Err(JetError::Pole {
                at: crate::scalar::to_c64(center),
            });
        }
        let inv = crate::scalar::inv(d);
        let ratio = ab * inv;
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = inv;
        for _ in 0..=order {
            coeffs.push(c);
            c = c * ratio;
        }
        Ok(Self { center, coeffs })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn center(&self) -> Cplx<T> {
        self.center
    }

    #[inline]
    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    #[inline]
    pub fn value(&self) -> Cplx<T> {
        self.coeffs[0]
    }

    /// `k! c_k`. Panics when `k` exceeds the order.
    pub fn derivative(&self, k: usize) -> Cplx<T> {
        let mut fact = T::one();
        for i in 2..=k {
            fact = fact * T::of(i as f64);
        }
        self.coeffs[k] * fact
    }

    /// All derivatives `f^(0..=N)(z0)`.
    pub fn derivatives(&self) -> Vec<Cplx<T>> {
        let mut fact = T::one();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 1 {
                    fact = fact * T::of(k as f64);
                }
                *c * fact
            })
            .collect()
    }

    /// Truncates (or zero-extends) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Cplx::zero());
        Self {
            center: self.center,
            coeffs,
        }
    }

    fn check(&self, other: &Self) -> Result<(), JetError> {
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch {
                lhs: self.order(),
                rhs: other.order(),
            });
        }
        if self.center != other.center {
            return Err(JetError::CenterMismatch {
                lhs: crate::scalar::to_c64(self.center),
                rhs: crate::scalar::to_c64(other.center),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// Cauchy product truncated at the common order.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Series division; fails when the divisor's constant term vanishes.
    pub fn checked_div(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        let y0 = other.coeffs[0];
        if y0.is_zero() {
            return Err(JetError::Pole {
                at: crate::scalar::to_c64(self.center),
            });
        }
        let inv = crate::scalar::inv(y0);
        let n = self.coeffs.len();
        let mut q: Vec<Cplx<T>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for i in 1..=k {
                acc = acc - other.coeffs[i] * q[k - i];
            }
            q.push(acc * inv);
        }
        Ok(Self {
            center: self.center,
            coeffs: q,
        })
    }

    /// `outer(inner(z))` where `outer` is expanded at `inner(z0)`.
    ///
    /// Horner recomposition on `inner - inner(z0)`; exact through the common
    /// order.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self, JetError> {
        if outer.order() != inner.order() {
            return Err(JetError::OrderMismatch {
                lhs: outer.order(),
                rhs: inner.order(),
            });
        }
        let w = inner.coeffs[0];
        let tol = T::of(64.0) * T::epsilon() * (T::one() + abs(w));
        if abs(outer.center - w) > tol {
            return Err(JetError::CenterMismatch {
                lhs: crate::scalar::to_c64(outer.center),
                rhs: crate::scalar::to_c64(w),
            });
        }
        let n = inner.order();
        let mut shift = inner.clone();
        shift.coeffs[0] = Cplx::zero();
        let mut acc = Self::constant(outer.coeffs[n], inner.center, n);
        for k in (0..n).rev() {
            acc = acc.mul_shifted(&shift);
            acc.coeffs[0] = acc.coeffs[0] + outer.coeffs[k];
        }
        Ok(acc)
    }

    /// `x^p` by binary exponentiation, `p >= 1`.
    pub fn powi(&self, p: u32) -> Self {
        assert!(p >= 1, "powi needs a positive exponent");
        let mut base = self.clone();
        let mut result: Option<Self> = None;
        let mut e = p;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul_unchecked(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul_unchecked(&base);
        }
        result.expect("p >= 1")
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        Self {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
        }
    }

    /// Jet of `f^(m)` at the same centre, of order `N - m`.
    pub fn differentiate(&self, m: usize) -> Result<Self, JetError> {
        let n = self.order();
        if m > n {
            return Err(JetError::OrderTooLow { need: m, have: n });
        }
        let coeffs = (0..=n - m)
            .map(|k| {
                // (k+m)! / k!
                let mut f = T::one();
                for i in (k + 1)..=(k + m) {
                    f = f * T::of(i as f64);
                }
                self.coeffs[k + m] * f
            })
            .collect();
        Ok(Self {
            center: self.center,
            coeffs,
        })
    }

    /// Rewrites a jet of `g` at `r z0` as the jet of `z -> g(r z)` at `z0`.
    pub fn rescale_argument(&self, r: T, center: Cplx<T>) -> Self {
        let mut p = T::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = *c * p;
                p = p * r;
                out
            })
            .collect();
        Self { center, coeffs }
    }

    /// Sum of `|c_k|`, used in relative comparisons.
    pub fn l1(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + abs(*c))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Cplx<T>, Cplx<T>) -> Cplx<T>) -> Self {
        Self {
            center: self.center,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Cplx::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] = out[i + j] + *a * *b;
            }
        }
        Self {
            center: self.center,
            coeffs: out,
        }
    }

    // Product with a series whose constant term is zero; result centre is the
    // shift's centre.
    fn mul_shifted(&self, shift: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Cplx::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for j in 1..(n - i) {
                out[i + j] = out[i + j] + *a * shift.coeffs[j];
            }
        }
        Self {
            center: shift.center,
            coeffs: out,
        }
    }
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, T: Real> $tr<&'a Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;

            /// Panics on centre or order mismatch; use the checked variant
            /// for untrusted inputs.
            fn $method(self, rhs: &'a Jet<T>) -> Jet<T> {
                self.$checked(rhs)
                    .expect("jet operands must share centre and order")
            }
        }
    };
}

jet_binop!(Add, add, checked_add);
jet_binop!(Sub, sub, checked_sub);
jet_binop!(Mul, mul, checked_mul);

impl<T: Real> Neg for &Jet<T> {
    type Output = Jet<T>;

    fn neg(self) -> Jet<T> {
        self.scale(-Cplx::<T>::one())
    }
}
