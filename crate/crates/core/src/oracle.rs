//! Derivative estimates from function values alone, used to cross-check the
//! jet engine.
//!
//! The trapezoid rule on the circle `|z - z0| = rho` applied to Cauchy's
//! integral gives `f^(k)(z0) ~ k! / (N rho^k) sum_n f(z0 + rho w^n) w^{-nk}`
//! with `w = exp(2 pi i / N)`. The aliasing error is `O((rho / R)^N)` for a
//! function analytic on `|z - z0| < R`, so with `N = 64` and `rho <= R / 2`
//! the aliasing term is negligible. Samples are taken in double-double but
//! the nodes are double, so the absolute error is about `1e-16 M_k` with
//! `M_k = k! max|f| / rho^k`.

use serde::Serialize;

use crate::error::Result;
use crate::funcspace::{AnalyticFn, C64};
use crate::scalar::{to_c64, Cplx, Real, TwoFloat};

pub const DEFAULT_POINTS: usize = 64;

/// Sampling radius for a centre `z0`: `min(0.05, (1 - |z0|) / 2)`.
pub fn default_radius(z0: C64) -> f64 {
    (0.5 * (1.0 - z0.norm())).min(0.05)
}

/// `f^(k)(z0)` for `k = 0..=kmax` from `n` samples on a circle of radius
/// `rho` around `z0`.
pub fn circle_derivatives(f: &AnalyticFn, z0: C64, rho: f64, n: usize, kmax: usize) -> Result<Vec<C64>> {
    assert!(n > kmax, "need more samples than derivative orders");
    let tau = std::f64::consts::TAU;
    let mut samples = Vec::with_capacity(n);
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let w = C64::from_polar(1.0, tau * i as f64 / n as f64);
        let z = Cplx::new(TwoFloat::of(z0.re), TwoFloat::of(z0.im))
            + Cplx::new(TwoFloat::of(rho * w.re), TwoFloat::of(rho * w.im));
        samples.push(f.eval::<TwoFloat>(z)?);
        nodes.push(w);
    }
    let mut out = Vec::with_capacity(kmax + 1);
    let mut fact = 1.0;
    for k in 0..=kmax {
        if k > 0 {
            fact *= k as f64;
        }
        let mut acc = Cplx::new(TwoFloat::of(0.0), TwoFloat::of(0.0));
        for (s, w) in samples.iter().zip(&nodes) {
            let wk = w.powi(-(k as i32));
            acc += *s * Cplx::new(TwoFloat::of(wk.re), TwoFloat::of(wk.im));
        }
        let scale = fact / (n as f64 * rho.powi(k as i32));
        out.push(to_c64(acc) * scale);
    }
    Ok(out)
}

/// Jet derivatives against circle samples at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub at: [f64; 2],
    pub radius: f64,
    pub orders: usize,
    /// Per order, `|jet - circle| / max(|circle|, 1e-3 M_k)` where
    /// `M_k = k! max|f| / rho^k` is the Cauchy bound on the circle.
    pub mismatch: Vec<f64>,
    pub max_mismatch: f64,
}

/// Compares `f.derivatives` (double-double jets) with [`circle_derivatives`].
pub fn derivative_check(f: &AnalyticFn, z0: C64, kmax: usize) -> Result<DerivativeCheck> {
    let rho = default_radius(z0);
    let circle = circle_derivatives(f, z0, rho, DEFAULT_POINTS, kmax)?;
    let jet: Vec<C64> = f
        .derivatives(Cplx::new(TwoFloat::of(z0.re), TwoFloat::of(z0.im)), kmax)?
        .into_iter()
        .map(to_c64)
        .collect();
    let mut peak = 0.0f64;
    for i in 0..DEFAULT_POINTS {
        let w = z0 + C64::from_polar(rho, std::f64::consts::TAU * i as f64 / DEFAULT_POINTS as f64);
        peak = peak.max(f.eval::<f64>(w)?.norm());
    }
    let mut mismatch = Vec::with_capacity(kmax + 1);
    let mut bound = peak;
    for k in 0..=kmax {
        if k > 0 {
            bound *= k as f64 / rho;
        }
        let e = (jet[k] - circle[k]).norm();
        let den = circle[k].norm().max(1e-3 * bound);
        mismatch.push(if e == 0.0 { 0.0 } else { e / den });
    }
    Ok(DerivativeCheck {
        at: [z0.re, z0.im],
        radius: rho,
        orders: kmax,
        max_mismatch: mismatch.iter().fold(0.0f64, |a, b| a.max(*b)),
        mismatch,
    })
}

/// `|a - b| / max(|b|, floor)`.
pub fn rel_err(a: C64, b: C64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}
