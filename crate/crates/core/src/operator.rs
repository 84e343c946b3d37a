//! The weighted composition-differentiation operator
//! `T f = u * (f o phi) + v * (f^(m) o phi)` and its second-derivative
//! coefficient functions.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::norms::{argmax, check_alpha, refine_max, top_indices, weighted};
use crate::funcspace::{atomic_function, AnalyticFn, DiskGrid, NormEstimate, C64};
use crate::jet::Jet;
use crate::scalar::{abs, one_minus_abs2, to_c64, Cplx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub u: AnalyticFn,
    pub v: AnalyticFn,
    pub phi: AnalyticFn,
    pub m: u32,
    pub alpha: f64,
}

/// Jets of order 2 of `u`, `v`, `phi` at one point.
#[derive(Debug, Clone)]
pub struct Symbols<T: Real> {
    pub z: Cplx<T>,
    pub u: Jet<T>,
    pub v: Jet<T>,
    pub phi: Jet<T>,
}

/// Coefficients `I_k(z)` of `(T f)''(z) = sum_k I_k(z) f^(k)(phi(z))`, with
/// colliding orders summed.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBundle<T: Real> {
    pub at: Cplx<T>,
    pub phi: Cplx<T>,
    pub entries: BTreeMap<u32, Cplx<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub at: [f64; 2],
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_mismatch: f64,
    /// `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
    pub rel_mismatch: f64,
}

impl IdentityReport {
    fn new(at: C64, lhs: C64, rhs: C64) -> Self {
        let abs_mismatch = (lhs - rhs).norm();
        Self {
            at: [at.re, at.im],
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            abs_mismatch,
            rel_mismatch: abs_mismatch / 1f64.max(lhs.norm()).max(rhs.norm()),
        }
    }
}

impl OperatorSpec {
    pub fn new(u: AnalyticFn, v: AnalyticFn, phi: AnalyticFn, m: u32, alpha: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("derivative order m must be >= 1".into()));
        }
        check_alpha(alpha)?;
        Ok(Self { u, v, phi, m, alpha })
    }

    /// Fails with [`Error::NotSelfMap`] at the first grid point where
    /// `|phi(z)| >= 1`.
    pub fn validate_self_map(&self, grid: &DiskGrid) -> Result<()> {
        for &z in grid.points() {
            let w = self.phi.eval::<f64>(z)?;
            if !(w.norm() < 1.0) {
                return Err(Error::NotSelfMap {
                    at: z,
                    modulus: w.norm(),
                });
            }
        }
        Ok(())
    }

    /// The tree `u * (f o phi) + v * (f^(m) o phi)`.
    pub fn apply(&self, f: &AnalyticFn) -> AnalyticFn {
        let mut terms = Vec::with_capacity(2);
        if !self.u.is_zero_const() {
            terms.push(self.u.clone() * AnalyticFn::compose(f.clone(), self.phi.clone()));
        }
        if !self.v.is_zero_const() {
            let dm = AnalyticFn::derivative(self.m, f.clone());
            terms.push(self.v.clone() * AnalyticFn::compose(dm, self.phi.clone()));
        }
        if terms.is_empty() {
            return AnalyticFn::real(0.0);
        }
        AnalyticFn::sum(terms)
    }

    pub fn symbols<T: Real>(&self, z: Cplx<T>) -> Result<Symbols<T>> {
        let phi = self.phi.eval_jet(z, 2)?;
        let w = phi.value();
        if !(abs(w) < T::one()) {
            return Err(Error::NotSelfMap {
                at: to_c64(z),
                modulus: abs(w).as_f64(),
            });
        }
        Ok(Symbols {
            z,
            u: self.u.eval_jet(z, 2)?,
            v: self.v.eval_jet(z, 2)?,
            phi,
        })
    }

    /// Order-2 jet of `T f` at the symbols' point, built from a single jet
    /// of `f` at `phi(z)` of order `m + 2`.
    pub fn image_jet<T: Real>(&self, s: &Symbols<T>, f: &AnalyticFn) -> Result<Jet<T>> {
        let w = s.phi.value();
        let fj = f.eval_jet(w, self.m as usize + 2)?;
        let mut out = Jet::zero(s.z, 2);
        if !self.u.is_zero_const() {
            let f0 = Jet::compose(&fj.with_order(2), &s.phi)?;
            out = out.checked_add(&s.u.checked_mul(&f0)?)?;
        }
        if !self.v.is_zero_const() {
            let fm = Jet::compose(&fj.differentiate(self.m as usize)?, &s.phi)?;
            out = out.checked_add(&s.v.checked_mul(&fm)?)?;
        }
        Ok(out)
    }

    pub fn coefficient_bundle<T: Real>(&self, z: Cplx<T>) -> Result<CoefficientBundle<T>> {
        Ok(self.bundle_from(&self.symbols(z)?))
    }

    pub fn bundle_from<T: Real>(&self, s: &Symbols<T>) -> CoefficientBundle<T> {
        let two = Cplx::new(T::of(2.0), T::zero());
        let (u, u1, u2) = (s.u.derivative(0), s.u.derivative(1), s.u.derivative(2));
        let (v, v1, v2) = (s.v.derivative(0), s.v.derivative(1), s.v.derivative(2));
        let (p1, p2) = (s.phi.derivative(1), s.phi.derivative(2));
        let m = self.m;
        let mut entries = BTreeMap::new();
        let mut put = |k: u32, val: Cplx<T>| {
            let e = entries.entry(k).or_insert_with(Cplx::zero);
            *e = *e + val;
        };
        put(0, u2);
        put(1, two * u1 * p1 + u * p2);
        put(2, u * p1 * p1);
        put(m, v2);
        put(m + 1, two * v1 * p1 + v * p2);
        put(m + 2, v * p1 * p1);
        CoefficientBundle {
            at: s.z,
            phi: s.phi.value(),
            entries,
        }
    }

    /// Compares `(T f)''(z)` from the expression tree with
    /// `sum_k I_k(z) f^(k)(phi(z))`.
    pub fn second_derivative_identity_check<T: Real>(&self, f: &AnalyticFn, z: C64) -> Result<IdentityReport> {
        let zt = T::cplx(z);
        let lhs = self.apply(f).eval_jet(zt, 2)?.derivative(2);
        let bundle = self.coefficient_bundle(zt)?;
        let fd = f.eval_jet(bundle.phi, self.m as usize + 2)?;
        let rhs = bundle
            .entries
            .iter()
            .fold(Cplx::<T>::zero(), |acc, (&k, &ik)| acc + ik * fd.derivative(k as usize));
        Ok(IdentityReport::new(z, to_c64(lhs), to_c64(rhs)))
    }

    /// `(T f)'(0) = u'(0) f(phi(0)) + u(0) phi'(0) f'(phi(0))
    ///            + v'(0) f^(m)(phi(0)) + v(0) phi'(0) f^(m+1)(phi(0))`.
    pub fn first_derivative_at_zero<T: Real>(&self, f: &AnalyticFn) -> Result<Cplx<T>> {
        let s = self.symbols(Cplx::<T>::zero())?;
        let m = self.m as usize;
        let fd = f.eval_jet(s.phi.value(), m + 1)?;
        let p1 = s.phi.derivative(1);
        Ok(s.u.derivative(1) * fd.derivative(0)
            + s.u.derivative(0) * p1 * fd.derivative(1)
            + s.v.derivative(1) * fd.derivative(m)
            + s.v.derivative(0) * p1 * fd.derivative(m + 1))
    }

    /// The four-term value against the jet derivative of the tree at 0.
    pub fn first_derivative_check<T: Real>(&self, f: &AnalyticFn) -> Result<IdentityReport> {
        let rhs = self.first_derivative_at_zero::<T>(f)?;
        let lhs = self.apply(f).eval_jet(Cplx::<T>::zero(), 1)?.derivative(1);
        Ok(IdentityReport::new(C64::zero(), to_c64(lhs), to_c64(rhs)))
    }

    /// Caches symbol jets on `grid` after checking the self-map property.
    pub fn prepare<'g, T: Real>(&self, grid: &'g DiskGrid) -> Result<Prepared<'g, T>> {
        let symbols = grid
            .points()
            .par_iter()
            .map(|&z| self.symbols(T::cplx(z)))
            .collect::<Result<Vec<_>>>()?;
        let weights = grid
            .points()
            .iter()
            .map(|&z| one_minus_abs2(z).powf(self.alpha))
            .collect();
        let origin = self.symbols(Cplx::<T>::zero())?;
        Ok(Prepared {
            spec: self.clone(),
            grid,
            symbols,
            weights,
            origin,
        })
    }

    /// Lower bound for the operator norm from the sampler's atomic family.
    pub fn op_norm_lower_bound<T: Real>(&self, grid: &DiskGrid, sampler: &AtomicSampler) -> Result<NormEstimate> {
        self.prepare::<T>(grid)?.op_norm_lower_bound(sampler)
    }
}

/// Operator with symbol jets cached on a grid.
#[derive(Debug, Clone)]
pub struct Prepared<'g, T: Real> {
    pub spec: OperatorSpec,
    pub grid: &'g DiskGrid,
    symbols: Vec<Symbols<T>>,
    weights: Vec<f64>,
    origin: Symbols<T>,
}

impl<'g, T: Real> Prepared<'g, T> {
    pub fn symbols(&self) -> &[Symbols<T>] {
        &self.symbols
    }

    /// `(1 - |z|^2)^alpha` per grid point.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bundles(&self) -> Vec<CoefficientBundle<T>> {
        self.symbols.iter().map(|s| self.spec.bundle_from(s)).collect()
    }

    fn seminorm_at(&self, z: C64, f: &AnalyticFn) -> Result<f64> {
        let s = self.spec.symbols(T::cplx(z))?;
        let j = self.spec.image_jet(&s, f)?;
        Ok(weighted(s.z, self.spec.alpha, j.derivative(2)))
    }

    /// Grid values of `(1 - |z|^2)^alpha |(T f)''(z)|` evaluated sequentially.
    pub fn image_values(&self, f: &AnalyticFn) -> Result<Vec<f64>> {
        self.symbols
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| {
                let j = self.spec.image_jet(s, f)?;
                let v = w * abs(j.derivative(2)).as_f64();
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite {
                        what: "image second derivative".into(),
                        at: to_c64(s.z),
                    })
                }
            })
            .collect()
    }

    /// `||T f||` in the Zygmund-type norm: head terms at 0 plus the refined
    /// grid supremum. Sequential over the grid; callers parallelise over
    /// families of `f`.
    pub fn image_norm(&self, f: &AnalyticFn) -> Result<NormEstimate> {
        let j0 = self.spec.image_jet(&self.origin, f)?;
        let head = abs(j0.value()).as_f64() + abs(j0.derivative(1)).as_f64();
        let values = self.image_values(f)?;
        let (imax, vmax) = argmax(&values).ok_or_else(|| Error::Config("empty grid".into()))?;
        let mut best = (self.grid.points()[imax], vmax);
        if vmax > 0.0 {
            let obj = |z: C64| self.seminorm_at(z, f);
            for i in top_indices(&values, 3) {
                let floor = self.grid.config().floor;
                let (z, v) = refine_max(&obj, self.grid.points()[i], values[i], self.grid.spacing_at(i), floor);
                if v > best.1 {
                    best = (z, v);
                }
            }
        }
        Ok(NormEstimate::from_trace(vec![head + vmax, head + best.1], Some(best.0)))
    }

    /// Parallel map of [`Self::image_norm`] over a family, in family order.
    pub fn image_norms(&self, family: &[AnalyticFn]) -> Result<Vec<NormEstimate>> {
        family.par_iter().map(|f| self.image_norm(f)).collect()
    }

    pub fn op_norm_lower_bound(&self, sampler: &AtomicSampler) -> Result<NormEstimate> {
        let family = sampler.functions()?;
        let norms = self.image_norms(&family)?;
        // running maximum over the family; converged when the second half
        // of the family no longer raises it
        let mut trace = Vec::with_capacity(norms.len());
        let mut best: (f64, Option<[f64; 2]>) = (0.0, None);
        for n in &norms {
            if best.1.is_none() || n.value > best.0 {
                best = (n.value, n.attained_at);
            }
            trace.push(best.0);
        }
        let half = trace.len() / 2;
        Ok(NormEstimate {
            value: best.0,
            attained_at: best.1,
            converged: half > 0 && trace[half - 1] == best.0,
            refinement_trace: trace,
        })
    }
}

/// Deterministic family of unit-atomic-norm functions `sum c_k sigma_{a_k}`,
/// `sum |c_k| = 1`, with centres on a golden-angle lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtomicSampler {
    pub radii: Vec<f64>,
    pub count: usize,
    pub max_atoms: usize,
    pub seed: u64,
}

impl Default for AtomicSampler {
    fn default() -> Self {
        Self {
            radii: vec![0.5, 0.9, 0.99, 0.999],
            count: 32,
            max_atoms: 3,
            seed: 0x5eed,
        }
    }
}

impl AtomicSampler {
    /// `(coefficient, centre)` pairs per family member.
    pub fn family(&self) -> Result<Vec<Vec<(C64, C64)>>> {
        if self.radii.is_empty() || self.max_atoms == 0 {
            return Err(Error::Config("sampler needs radii and max_atoms >= 1".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return Err(Error::Config(format!("sampler radius {r} outside [0, 1)")));
        }
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut lattice = 0usize;
        let mut out = Vec::with_capacity(self.count);
        for _ in 0..self.count {
            let n = 1 + rng.random_range(0..self.max_atoms);
            let mut atoms = Vec::with_capacity(n);
            for _ in 0..n {
                let r = self.radii[lattice % self.radii.len()];
                let a = C64::from_polar(r, golden * lattice as f64);
                lattice += 1;
                let mag = 0.1 + 0.9 * rng.random::<f64>();
                let arg = std::f64::consts::TAU * rng.random::<f64>();
                atoms.push((C64::from_polar(mag, arg), a));
            }
            let total: f64 = atoms.iter().map(|(c, _)| c.norm()).sum();
            for (c, _) in &mut atoms {
                *c /= total;
            }
            out.push(atoms);
        }
        Ok(out)
    }

    pub fn functions(&self) -> Result<Vec<AnalyticFn>> {
        self.family()?.iter().map(|atoms| atomic_function(atoms)).collect()
    }
}
