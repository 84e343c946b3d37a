//! Expression trees over closed-form analytic building blocks on the disk.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, JetError};
use crate::scalar::{abs, to_c64, Cplx, Real};

pub type C64 = Complex<f64>;

/// Node kinds of an [`AnalyticFn`].
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(C64),
    Var,
    /// Coefficients `c0, c1, ...` of `sum c_k z^k`.
    Poly(Vec<C64>),
    /// Disk automorphism `(a - z) / (1 - conj(a) z)`.
    MobiusSigma(C64),
    /// `((1 - |a|^2) / (1 - conj(a) z))^j`, evaluated as the constant
    /// `(1 - |a|^2)^j` times `(1 - conj(a) z)^{-j}`.
    TestFn {
        j: u32,
        a: C64,
    },
    Sum(Vec<AnalyticFn>),
    Product(Vec<AnalyticFn>),
    Quotient(AnalyticFn, AnalyticFn),
    /// `outer(inner(z))`.
    Compose(AnalyticFn, AnalyticFn),
    /// `f(r z)`.
    Dilate(f64, AnalyticFn),
    /// `f^(m)(z)`.
    Derivative(u32, AnalyticFn),
}

/// Immutable, cheaply clonable analytic function on the unit disk.
#[derive(Clone, PartialEq)]
pub struct AnalyticFn(Arc<Expr>);

fn check_in_disk(a: C64, what: &str) -> Result<()> {
    if !(a.re.is_finite() && a.im.is_finite()) || a.norm() >= 1.0 {
        return Err(Error::InvalidFunction(format!(
            "{what} parameter {a} must lie in the open unit disk"
        )));
    }
    Ok(())
}

impl AnalyticFn {
    fn new(e: Expr) -> Self {
        Self(Arc::new(e))
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }

    pub fn constant(c: C64) -> Self {
        Self::new(Expr::Const(c))
    }

    pub fn real(c: f64) -> Self {
        Self::constant(C64::new(c, 0.0))
    }

    pub fn var() -> Self {
        Self::new(Expr::Var)
    }

    pub fn poly(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidFunction("poly needs at least one coefficient".into()));
        }
        Ok(Self::new(Expr::Poly(coeffs)))
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![C64::zero(); n + 1];
        c[n] = C64::one();
        Self::new(Expr::Poly(c))
    }

    pub fn sigma(a: C64) -> Result<Self> {
        check_in_disk(a, "sigma")?;
        Ok(Self::new(Expr::MobiusSigma(a)))
    }

    pub fn test_fn(j: u32, a: C64) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidFunction("testfn exponent must be >= 1".into()));
        }
        check_in_disk(a, "testfn")?;
        Ok(Self::new(Expr::TestFn { j, a }))
    }

    pub fn sum(terms: Vec<AnalyticFn>) -> Self {
        Self::new(Expr::Sum(terms))
    }

    pub fn product(factors: Vec<AnalyticFn>) -> Self {
        Self::new(Expr::Product(factors))
    }

    pub fn quotient(num: AnalyticFn, den: AnalyticFn) -> Self {
        Self::new(Expr::Quotient(num, den))
    }

    pub fn compose(outer: AnalyticFn, inner: AnalyticFn) -> Self {
        Self::new(Expr::Compose(outer, inner))
    }

    /// `f(r z)` with real `|r| <= 1`.
    pub fn dilate(r: f64, f: AnalyticFn) -> Result<Self> {
        if !r.is_finite() || r.abs() > 1.0 {
            return Err(Error::InvalidFunction(format!(
                "dilation radius {r} must satisfy |r| <= 1"
            )));
        }
        Ok(Self::new(Expr::Dilate(r, f)))
    }

    pub fn derivative(m: u32, f: AnalyticFn) -> Self {
        if m == 0 {
            return f;
        }
        Self::new(Expr::Derivative(m, f))
    }

    pub fn scaled(c: C64, f: AnalyticFn) -> Self {
        Self::product(vec![Self::constant(c), f])
    }

    /// True when the tree is the constant zero (no evaluation needed).
    pub fn is_zero_const(&self) -> bool {
        matches!(self.expr(), Expr::Const(c) if c.is_zero())
    }

    /// Taylor jet of the function at `z0`, `|z0| < 1`.
    pub fn eval_jet<T: Real>(&self, z0: Cplx<T>, order: usize) -> Result<Jet<T>> {
        if !(z0.re.is_finite() && z0.im.is_finite()) || abs(z0) >= T::one() {
            return Err(Error::OutsideDisk { at: to_c64(z0) });
        }
        self.eval_inner(z0, order)
    }

    /// Function value at `z`.
    pub fn eval<T: Real>(&self, z: Cplx<T>) -> Result<Cplx<T>> {
        Ok(self.eval_jet(z, 0)?.value())
    }

    /// `f^(k)(z)` for `k = 0..=order`.
    pub fn derivatives<T: Real>(&self, z: Cplx<T>, order: usize) -> Result<Vec<Cplx<T>>> {
        Ok(self.eval_jet(z, order)?.derivatives())
    }

    fn eval_inner<T: Real>(&self, z0: Cplx<T>, order: usize) -> Result<Jet<T>> {
        let pole = |e: JetError| match e {
            JetError::Pole { .. } => Error::Pole { at: to_c64(z0) },
            other => Error::Jet(other),
        };
        Ok(match self.expr() {
            Expr::Const(c) => Jet::constant(T::cplx(*c), z0, order),
            Expr::Var => var_jet(z0, order),
            Expr::Poly(cs) => {
                let z = var_jet(z0, order);
                let mut acc = Jet::constant(T::cplx(*cs.last().expect("non-empty")), z0, order);
                for c in cs.iter().rev().skip(1) {
                    acc = &acc * &z;
                    let mut coeffs = acc.coeffs().to_vec();
                    coeffs[0] = coeffs[0] + T::cplx(*c);
                    acc = Jet::from_coeffs(z0, coeffs);
                }
                acc
            }
            Expr::MobiusSigma(a) => {
                let a = T::cplx(*a);
                let geom = Jet::geometric(a, z0, order).map_err(pole)?;
                let num = &Jet::constant(a, z0, order) - &var_jet(z0, order);
                &num * &geom
            }
            Expr::TestFn { j, a } => {
                if a.is_zero() {
                    Jet::constant(Cplx::one(), z0, order)
                } else {
                    let a = T::cplx(*a);
                    let k = crate::scalar::one_minus_abs2(a).powi(*j as i32);
                    Jet::geometric(a, z0, order)
                        .map_err(pole)?
                        .powi(*j)
                        .scale(Cplx::new(k, T::zero()))
                }
            }
            Expr::Sum(terms) => {
                let mut acc = Jet::zero(z0, order);
                for t in terms {
                    acc = &acc + &t.eval_inner(z0, order)?;
                }
                acc
            }
            Expr::Product(factors) => {
                let mut acc = Jet::constant(Cplx::one(), z0, order);
                for f in factors {
                    acc = &acc * &f.eval_inner(z0, order)?;
                }
                acc
            }
            Expr::Quotient(n, d) => {
                let nj = n.eval_inner(z0, order)?;
                let dj = d.eval_inner(z0, order)?;
                nj.checked_div(&dj).map_err(pole)?
            }
            Expr::Compose(outer, inner) => {
                let ij = inner.eval_inner(z0, order)?;
                let w = ij.value();
                if !(w.re.is_finite() && w.im.is_finite()) || abs(w) >= T::one() {
                    return Err(Error::OutsideDisk { at: to_c64(w) });
                }
                let oj = outer.eval_inner(w, order)?;
                Jet::compose(&oj, &ij)?
            }
            Expr::Dilate(r, f) => {
                let r = T::of(*r);
                let inner = f.eval_inner(z0 * r, order)?;
                inner.rescale_argument(r, z0)
            }
            Expr::Derivative(m, f) => f.eval_inner(z0, order + *m as usize)?.differentiate(*m as usize)?,
        })
    }
}

fn var_jet<T: Real>(z0: Cplx<T>, order: usize) -> Jet<T> {
    if order == 0 {
        Jet::constant(z0, z0, 0)
    } else {
        Jet::variable(z0, order).expect("order >= 1")
    }
}

impl Add for AnalyticFn {
    type Output = AnalyticFn;
    fn add(self, rhs: Self) -> Self {
        AnalyticFn::sum(vec![self, rhs])
    }
}

impl Sub for AnalyticFn {
    type Output = AnalyticFn;
    fn sub(self, rhs: Self) -> Self {
        AnalyticFn::sum(vec![self, -rhs])
    }
}

impl Mul for AnalyticFn {
    type Output = AnalyticFn;
    fn mul(self, rhs: Self) -> Self {
        AnalyticFn::product(vec![self, rhs])
    }
}

impl Div for AnalyticFn {
    type Output = AnalyticFn;
    fn div(self, rhs: Self) -> Self {
        AnalyticFn::quotient(self, rhs)
    }
}

impl Neg for AnalyticFn {
    type Output = AnalyticFn;
    fn neg(self) -> Self {
        AnalyticFn::scaled(C64::new(-1.0, 0.0), self)
    }
}

/// Formats a complex literal in the textual grammar (`x`, `yi`, `x+yi`).
pub fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, items: &[AnalyticFn], op: &str, empty: &str| {
            if items.is_empty() {
                return f.write_str(empty);
            }
            f.write_str("(")?;
            for (i, t) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")
        };
        match self.expr() {
            Expr::Const(c) => write!(f, "const({})", fmt_complex(*c)),
            Expr::Var => f.write_str("z"),
            Expr::Poly(cs) => {
                f.write_str("poly(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&fmt_complex(*c))?;
                }
                f.write_str(")")
            }
            Expr::MobiusSigma(a) => write!(f, "sigma({})", fmt_complex(*a)),
            Expr::TestFn { j, a } => write!(f, "testfn({j},{})", fmt_complex(*a)),
            Expr::Sum(ts) => join(f, ts, "+", "const(0)"),
            Expr::Product(ts) => join(f, ts, "*", "const(1)"),
            Expr::Quotient(n, d) => write!(f, "({n} / {d})"),
            Expr::Compose(o, i) => write!(f, "compose({o},{i})"),
            Expr::Dilate(r, g) => write!(f, "dilate({r},{g})"),
            Expr::Derivative(m, g) => write!(f, "deriv({m},{g})"),
        }
    }
}

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticFn({self})")
    }
}
