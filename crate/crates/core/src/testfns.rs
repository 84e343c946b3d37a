//! Test functions `f_{j,a}` and the linear combinations `g_{i,a}` whose
//! scaled derivatives at `a` pick out a single order.
//!
//! With `f_{j,a}^{(k)}(a) = (j)_k conj(a)^k / (1 - |a|^2)^k`, the combination
//! `g = sum_j c_j f_{j,a}` satisfies
//! `g^{(k)}(a) = delta_{ik} conj(a)^k / (1 - |a|^2)^k` for every `k` in the
//! row set exactly when `sum_j c_j (j)_k = delta_{ik}`, a system independent
//! of `a`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{AnalyticFn, C64};
use crate::linalg::{condition1, matvec, Lu};
use crate::scalar::{abs, one_minus_abs2, to_c64, Cplx, Real, TwoFloat};

/// Condition estimate above which the system is re-solved in double-double.
pub const EXTENDED_COND: f64 = 1e12;
/// Condition estimate above which the system counts as singular.
pub const SINGULAR_COND: f64 = 1e28;

/// Rising factorial `(j)_k = j (j+1) ... (j+k-1)`.
///
/// # Panics
/// On `u128` overflow, far beyond any index set used here.
pub fn pochhammer(j: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, i| {
        acc.checked_mul(u128::from(j) + u128::from(i))
            .expect("rising factorial overflows u128")
    })
}

/// Derivative orders that enter the second derivative of the image:
/// `{0, 1, 2, m, m+1, m+2}` with duplicates merged.
pub fn index_set(m: u32) -> Vec<u32> {
    let set: BTreeSet<u32> = [0, 1, 2, m, m + 1, m + 2].into_iter().collect();
    set.into_iter().collect()
}

/// Default test-function exponents, one per row of [`index_set`].
pub fn basis_exponents(m: u32) -> Vec<u32> {
    index_set(m)
        .into_iter()
        .enumerate()
        .map(|(n, _)| basis_for_row(m, n))
        .collect()
}

fn basis_for_row(m: u32, n: usize) -> u32 {
    if m > 2 {
        [1, 2, 3, m + 1, m + 2, m + 3][n]
    } else {
        n as u32 + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DeltaSystem {
    pub m: u32,
    /// Derivative orders `k` (rows).
    pub rows: Vec<u32>,
    /// Exponents `j` (columns).
    pub basis: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaSolution {
    pub i: u32,
    pub system: DeltaSystem,
    /// Coefficients rounded to double.
    pub coeffs: Vec<f64>,
    /// Rounding remainders: `coeffs + coeffs_lo` is the double-double
    /// solution.
    pub coeffs_lo: Vec<f64>,
    /// Row-wise backward error of the double-double coefficients:
    /// `max_k |sum_j c_j (j)_k - delta_ik| / max(1, sum_j |c_j| (j)_k)`.
    pub residual: f64,
    pub condition: f64,
    /// True when the double-precision solve was replaced by double-double.
    pub extended: bool,
}

impl DeltaSystem {
    /// Full system on [`index_set`] with [`basis_exponents`].
    pub fn new(m: u32) -> Result<Self> {
        Self::with_basis(m, basis_exponents_checked(m)?)
    }

    /// Full system with caller-chosen exponents, one per row.
    pub fn with_basis(m: u32, basis: Vec<u32>) -> Result<Self> {
        let rows = index_set(check_m(m)?);
        if basis.len() != rows.len() {
            return Err(Error::Config(format!(
                "basis has {} exponents but the index set has {} orders",
                basis.len(),
                rows.len()
            )));
        }
        let distinct: BTreeSet<u32> = basis.iter().copied().collect();
        if distinct.len() != basis.len() || distinct.contains(&0) {
            return Err(Error::Config("basis exponents must be distinct and >= 1".into()));
        }
        Ok(Self { m, rows, basis })
    }

    /// Three-term system matching only the block that contains `i`: rows
    /// `{0,1,2}` with `j in {1,2,3}` or rows `{m,m+1,m+2}` with
    /// `j in {m+1,m+2,m+3}`. For `m <= 2` the blocks overlap and the full
    /// merged system is returned.
    pub fn three_term(m: u32, i: u32) -> Result<Self> {
        let m = check_m(m)?;
        if !index_set(m).contains(&i) {
            return Err(Error::Config(format!("order {i} is not in the index set for m = {m}")));
        }
        if m <= 2 {
            return Self::new(m);
        }
        let (rows, basis) = if i <= 2 {
            (vec![0, 1, 2], vec![1, 2, 3])
        } else {
            (vec![m, m + 1, m + 2], vec![m + 1, m + 2, m + 3])
        };
        Ok(Self { m, rows, basis })
    }

    /// Integer matrix `(j)_k`, rows `k`, columns `j`.
    pub fn matrix(&self) -> Vec<Vec<u128>> {
        self.rows
            .iter()
            .map(|&k| self.basis.iter().map(|&j| pochhammer(j, k)).collect())
            .collect()
    }

    fn matrix_as<T: Real>(&self) -> Vec<Vec<T>> {
        self.matrix()
            .iter()
            .map(|row| row.iter().map(|&v| u128_to::<T>(v)).collect())
            .collect()
    }

    /// Coefficients with `sum_j c_j (j)_k = delta_{ik}` over the rows.
    /// Results are memoised per `(system, i)`.
    pub fn solve(&self, i: u32) -> Result<Arc<DeltaSolution>> {
        let pos = self
            .rows
            .iter()
            .position(|&k| k == i)
            .ok_or_else(|| Error::Config(format!("order {i} is not a row of the system")))?;
        let key = (self.clone(), i);
        if let Some(hit) = cache().read().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let sol = Arc::new(self.solve_uncached(i, pos)?);
        cache().write().expect("cache poisoned").insert(key, sol.clone());
        Ok(sol)
    }

    fn solve_uncached(&self, i: u32, pos: usize) -> Result<DeltaSolution> {
        let n = self.rows.len();
        let rhs = |one: f64| -> Vec<f64> { (0..n).map(|r| if r == pos { one } else { 0.0 }).collect() };
        let a64 = self.matrix_as::<f64>();
        let cond = condition1(&a64);
        if !cond.is_finite() || cond > SINGULAR_COND {
            return Err(Error::Singular { cond });
        }
        let add = self.matrix_as::<TwoFloat>();
        let b_dd: Vec<TwoFloat> = rhs(1.0).into_iter().map(TwoFloat::from).collect();
        let (x_dd, extended) = if cond <= EXTENDED_COND {
            let lu = Lu::factor(&a64).ok_or(Error::Singular { cond })?;
            let mut x: Vec<TwoFloat> = lu.solve(&rhs(1.0)).into_iter().map(TwoFloat::from).collect();
            // refinement with residual and update accumulated in double-double
            for _ in 0..2 {
                let r: Vec<f64> = matvec(&add, &x)
                    .iter()
                    .zip(&b_dd)
                    .map(|(ax, b)| f64::from(*b - *ax))
                    .collect();
                for (xi, d) in x.iter_mut().zip(lu.solve(&r)) {
                    *xi += TwoFloat::from(d);
                }
            }
            (x, false)
        } else {
            let lu = Lu::factor(&add).ok_or(Error::Singular { cond })?;
            (lu.solve(&b_dd), true)
        };
        let coeffs: Vec<f64> = x_dd.iter().map(|v| f64::from(*v)).collect();
        let coeffs_lo: Vec<f64> = x_dd.iter().zip(&coeffs).map(|(v, hi)| f64::from(*v - *hi)).collect();
        let abs_row: Vec<TwoFloat> = x_dd.iter().map(|v| v.abs()).collect();
        let residual = matvec(&add, &x_dd)
            .iter()
            .zip(&b_dd)
            .zip(matvec(&add, &abs_row))
            .map(|((ax, b), size)| f64::from(*ax - *b).abs() / f64::from(size).max(1.0))
            .fold(0.0, f64::max);
        Ok(DeltaSolution {
            i,
            system: self.clone(),
            coeffs,
            coeffs_lo,
            residual,
            condition: cond,
            extended,
        })
    }
}

fn check_m(m: u32) -> Result<u32> {
    if (1..=32).contains(&m) {
        Ok(m)
    } else {
        Err(Error::Config(format!("derivative order m = {m} must lie in 1..=32")))
    }
}

fn basis_exponents_checked(m: u32) -> Result<Vec<u32>> {
    Ok(basis_exponents(check_m(m)?))
}

fn u128_to<T: Real>(v: u128) -> T {
    // exact for the double-double type up to ~2^106
    let hi = (v >> 64) as f64 * 18446744073709551616.0;
    let lo = (v & u128::from(u64::MAX)) as f64;
    T::of(hi) + T::of(lo)
}

type CacheKey = (DeltaSystem, u32);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<DeltaSolution>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<DeltaSolution>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Solves the default full system for order `i`, or the system over a custom
/// exponent set when `basis` is given.
pub fn solve_delta_coeffs(i: u32, m: u32, basis: Option<&[u32]>) -> Result<Arc<DeltaSolution>> {
    let system = match basis {
        Some(b) => DeltaSystem::with_basis(m, b.to_vec())?,
        None => DeltaSystem::new(m)?,
    };
    system.solve(i)
}

/// `f_{j,a}`.
pub fn test_fn(j: u32, a: C64) -> Result<AnalyticFn> {
    AnalyticFn::test_fn(j, a)
}

/// `g_{i,a} = sum_j c_j f_{j,a}` for a solved system. `a = 0` is rejected
/// because every `f_{j,0}` is the constant one.
pub fn g_ia(sol: &DeltaSolution, a: C64) -> Result<AnalyticFn> {
    if a == C64::new(0.0, 0.0) {
        return Err(Error::InvalidFunction("g_{i,a} is degenerate at a = 0".into()));
    }
    let mut terms = Vec::with_capacity(2 * sol.coeffs.len());
    for ((&j, &hi), &lo) in sol.system.basis.iter().zip(&sol.coeffs).zip(&sol.coeffs_lo) {
        let f = AnalyticFn::test_fn(j, a)?;
        terms.push(AnalyticFn::scaled(C64::new(hi, 0.0), f.clone()));
        // keeps the full double-double coefficient for extended evaluation
        if lo != 0.0 {
            terms.push(AnalyticFn::scaled(C64::new(lo, 0.0), f));
        }
    }
    Ok(AnalyticFn::sum(terms))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub k: u32,
    /// `|g^{(k)}(a) (1-|a|^2)^k - delta_ik conj(a)^k|`, scaled by
    /// `max(1, |expected|)`.
    pub mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaCheck {
    pub i: u32,
    pub a: [f64; 2],
    pub rows: Vec<DeltaRow>,
    pub max_mismatch: f64,
    pub pass: bool,
}

/// Checks `g^{(k)}(a) (1-|a|^2)^k = delta_ik conj(a)^k` for every `k` in
/// `rows`.
pub fn verify_delta<T: Real>(g: &AnalyticFn, i: u32, a: C64, rows: &[u32], tol: f64) -> Result<DeltaCheck> {
    let order = rows.iter().copied().max().unwrap_or(0) as usize;
    let at = T::cplx(a);
    let jet = g.eval_jet(at, order)?;
    let s = one_minus_abs2(at);
    let ab = at.conj();
    let mut out = Vec::with_capacity(rows.len());
    for &k in rows {
        let got = jet.derivative(k as usize) * Cplx::new(s.powi(k as i32), T::zero());
        let expected = if k == i {
            ab.powi(k as i32)
        } else {
            Cplx::new(T::zero(), T::zero())
        };
        let scale = abs(expected).as_f64().max(1.0);
        let mismatch = to_c64(got - expected).norm() / scale;
        out.push(DeltaRow { k, mismatch });
    }
    let max_mismatch = out.iter().map(|r| r.mismatch).fold(0.0, f64::max);
    Ok(DeltaCheck {
        i,
        a: [a.re, a.im],
        rows: out,
        max_mismatch,
        pass: max_mismatch <= tol,
    })
}
