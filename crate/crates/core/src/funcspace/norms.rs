//! Sup-weighted seminorms on a grid and the quadrature norm on the Bloch-type
//! space `B_1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expr::{AnalyticFn, C64};
use super::grid::DiskGrid;
use super::quad::gauss_legendre_on;
use crate::error::{Error, Result};
use crate::scalar::{abs, one_minus_abs2, Cplx, Real};

/// Relative change below which two refinement levels count as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// `[re, im]` of the maximiser, when the estimate is a supremum.
    pub attained_at: Option<[f64; 2]>,
    pub refinement_trace: Vec<f64>,
    pub converged: bool,
}

impl NormEstimate {
    pub fn from_trace(trace: Vec<f64>, attained_at: Option<C64>) -> Self {
        let value = trace.last().copied().unwrap_or(0.0);
        let converged = match trace.as_slice() {
            [.., a, b] => rel_change(*a, *b) < CONVERGENCE_TOL,
            _ => false,
        };
        Self {
            value,
            attained_at: attained_at.map(|z| [z.re, z.im]),
            refinement_trace: trace,
            converged,
        }
    }
}

/// `|b - a| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_change(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (b - a).abs() / s
    }
}

/// Evaluates `obj` on every grid point in parallel. Results keep grid order.
pub fn grid_values<F>(points: &[C64], obj: F) -> Result<Vec<f64>>
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    points
        .par_iter()
        .map(|&z| {
            let v = obj(z)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite {
                    what: "objective".into(),
                    at: z,
                })
            }
        })
        .collect()
}

/// Index and value of the first maximum.
pub fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best
}

/// Indices of the `k` largest values, ties broken by index.
pub fn top_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Compass search for a local maximum of `obj` starting at `z0`, staying in
/// the disk of radius `1 - floor`. Candidates where `obj` fails are skipped.
pub fn refine_max<F>(obj: &F, z0: C64, v0: f64, step: f64, floor: f64) -> (C64, f64)
where
    F: Fn(C64) -> Result<f64>,
{
    const DIRS: [(f64, f64); 8] = [
        (1.0, 0.0),
        (0.0, 1.0),
        (-1.0, 0.0),
        (0.0, -1.0),
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        (-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        (-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
        (std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
    ];
    let rmax = 1.0 - floor;
    let (mut z, mut best, mut h) = (z0, v0, step);
    let stop = (step * 1e-4).max(floor * 1e-3);
    for _ in 0..400 {
        if h < stop {
            break;
        }
        let mut winner: Option<(C64, f64)> = None;
        for (dx, dy) in DIRS {
            let mut c = z + C64::new(dx * h, dy * h);
            let r = c.norm();
            if r > rmax {
                c *= rmax / r;
            }
            if let Ok(v) = obj(c) {
                if v.is_finite() && v > winner.map_or(best, |w| w.1) {
                    winner = Some((c, v));
                }
            }
        }
        match winner {
            Some((c, v)) => {
                z = c;
                best = v;
            }
            None => h *= 0.5,
        }
    }
    (z, best)
}

/// Supremum of `obj` over the grid followed by local refinement around the
/// best few grid points. The trace is `[grid max, refined max]`.
pub fn sup_estimate<F>(grid: &DiskGrid, obj: F) -> Result<NormEstimate>
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    let values = grid_values(grid.points(), &obj)?;
    sup_from_values(grid, &values, &obj)
}

/// As [`sup_estimate`] with the grid values already computed.
pub fn sup_from_values<F>(grid: &DiskGrid, values: &[f64], obj: &F) -> Result<NormEstimate>
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    let Some((imax, vmax)) = argmax(values) else {
        return Err(Error::Config("empty grid".into()));
    };
    let floor = grid.config().floor;
    let mut best = (grid.points()[imax], vmax);
    if vmax > 0.0 {
        for i in top_indices(values, 3) {
            let (z, v) = refine_max(obj, grid.points()[i], values[i], grid.spacing_at(i), floor);
            if v > best.1 {
                best = (z, v);
            }
        }
    }
    Ok(NormEstimate::from_trace(vec![vmax, best.1], Some(best.0)))
}

/// Refined supremum on `grid` and on its next refinement; the trace holds
/// both and the value is the larger.
pub fn sup_two_levels<F>(grid: &DiskGrid, obj: F) -> Result<NormEstimate>
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    let coarse = sup_estimate(grid, &obj)?;
    let fine = sup_estimate(&grid.refined()?, &obj)?;
    let (a, b) = (coarse.value, fine.value);
    let at = if b >= a { fine.attained_at } else { coarse.attained_at };
    Ok(NormEstimate::from_trace(
        vec![a, a.max(b)],
        at.map(|[x, y]| C64::new(x, y)),
    ))
}

/// `(1 - |z|^2)^alpha |g(z)|` in double.
pub fn weighted<T: Real>(z: Cplx<T>, alpha: f64, g: Cplx<T>) -> f64 {
    one_minus_abs2(z).as_f64().powf(alpha) * abs(g).as_f64()
}

/// `sup (1 - |z|^2)^alpha |f''(z)|`, locally refined on `grid` and on its
/// next refinement.
pub fn zygmund_seminorm<T: Real>(f: &AnalyticFn, alpha: f64, grid: &DiskGrid) -> Result<NormEstimate> {
    check_alpha(alpha)?;
    sup_two_levels(grid, |z| {
        let z = T::cplx(z);
        let jet = f.eval_jet(z, 2)?;
        Ok(weighted(z, alpha, jet.derivative(2)))
    })
}

/// `|f(0)| + |f'(0)| + sup (1 - |z|^2)^alpha |f''(z)|`.
pub fn zygmund_norm<T: Real>(f: &AnalyticFn, alpha: f64, grid: &DiskGrid) -> Result<NormEstimate> {
    let head = head_terms::<T>(f)?;
    let semi = zygmund_seminorm::<T>(f, alpha, grid)?;
    let trace = semi.refinement_trace.iter().map(|s| head + s).collect();
    let at = semi.attained_at.map(|[x, y]| C64::new(x, y));
    Ok(NormEstimate::from_trace(trace, at))
}

/// `|f(0)| + |f'(0)|`.
pub fn head_terms<T: Real>(f: &AnalyticFn) -> Result<f64> {
    let j = f.eval_jet(Cplx::<T>::new(T::zero(), T::zero()), 1)?;
    Ok(abs(j.value()).as_f64() + abs(j.derivative(1)).as_f64())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("alpha must be positive and finite, got {alpha}")))
    }
}

/// Quadrature settings for [`b1_surrogate_norm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct B1Config {
    /// Gauss–Legendre nodes per radial panel at the coarse level.
    pub nodes: usize,
    /// Radial panels stop at `1 - 2^{-N}` with `2^{-N} <= floor`; the last
    /// panel runs to `r = 1`.
    pub floor: f64,
    /// Relative tolerance of the adaptive angular trapezoid rule.
    pub angular_tol: f64,
    pub min_angular: usize,
    pub start_cap: usize,
    pub max_angular: usize,
}

impl Default for B1Config {
    fn default() -> Self {
        Self {
            nodes: 8,
            floor: 1e-6,
            angular_tol: 1e-9,
            min_angular: 32,
            start_cap: 4096,
            max_angular: 1 << 16,
        }
    }
}

impl B1Config {
    fn doubled(&self) -> Self {
        Self {
            nodes: self.nodes * 2,
            angular_tol: self.angular_tol * 1e-2,
            ..self.clone()
        }
    }

    fn panels(&self) -> Vec<(f64, f64)> {
        let mut p = vec![(0.0, 0.25), (0.25, 0.5)];
        let n_max = (1.0 / self.floor).log2().ceil().clamp(2.0, 48.0) as i32;
        for n in 1..n_max {
            p.push((1.0 - 0.5f64.powi(n), 1.0 - 0.5f64.powi(n + 1)));
        }
        p.push((1.0 - 0.5f64.powi(n_max), 1.0));
        p
    }
}

/// `|f(0)| + |f'(0)| + (1/pi) * integral over the disk of |f''| dA`,
/// computed twice at doubled resolution; the trace holds both totals.
pub fn b1_surrogate_norm<T: Real>(f: &AnalyticFn, cfg: &B1Config) -> Result<NormEstimate> {
    let head = head_terms::<T>(f)?;
    let coarse = area_integral::<T>(f, cfg)?;
    let fine = area_integral::<T>(f, &cfg.doubled())?;
    Ok(NormEstimate::from_trace(vec![head + coarse, head + fine], None))
}

fn area_integral<T: Real>(f: &AnalyticFn, cfg: &B1Config) -> Result<f64> {
    let g = |z: C64| -> Result<f64> {
        let zt = T::cplx(z);
        let v = abs(f.eval_jet(zt, 2)?.derivative(2)).as_f64();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "second derivative".into(),
                at: z,
            })
        }
    };
    normalized_area_integral(&g, cfg)
}

/// `(1/pi) * integral over the disk of g dA` on the panels of `cfg`.
pub fn normalized_area_integral<G>(g: &G, cfg: &B1Config) -> Result<f64>
where
    G: Fn(C64) -> Result<f64> + Sync,
{
    let nodes: Vec<(f64, f64)> = cfg
        .panels()
        .into_iter()
        .flat_map(|(a, b)| gauss_legendre_on(cfg.nodes, a, b))
        .collect();
    let rings: Vec<f64> = nodes
        .par_iter()
        .map(|&(r, w)| Ok(w * r * ring_integral(g, r, cfg)?))
        .collect::<Result<_>>()?;
    Ok(rings.iter().sum::<f64>() / std::f64::consts::PI)
}

/// Adaptive trapezoid rule for `int_0^{2pi} g(r e^{it}) dt`.
fn ring_integral<G>(g: &G, r: f64, cfg: &B1Config) -> Result<f64>
where
    G: Fn(C64) -> Result<f64>,
{
    let tau = std::f64::consts::TAU;
    let at = |theta: f64| g(C64::from_polar(r, theta));
    let want = (2.0 / (1.0 - r)).ceil().max(1.0) as usize;
    let mut n = want
        .next_power_of_two()
        .clamp(cfg.min_angular, cfg.start_cap.max(cfg.min_angular));
    let mut sum = 0.0;
    for k in 0..n {
        sum += at(tau * k as f64 / n as f64)?;
    }
    let mut est = tau * sum / n as f64;
    while n < cfg.max_angular {
        let mut odd = 0.0;
        for k in 0..n {
            odd += at(tau * (2 * k + 1) as f64 / (2 * n) as f64)?;
        }
        sum += odd;
        n *= 2;
        let next = tau * sum / n as f64;
        let done = (next - est).abs() <= cfg.angular_tol * next.abs();
        est = next;
        if done {
            break;
        }
    }
    Ok(est)
}

/// `sum |c_k|` for an atomic combination `sum c_k sigma_{a_k}`.
pub fn atomic_l1_bound(atoms: &[(C64, C64)]) -> Result<f64> {
    if atoms.is_empty() {
        return Err(Error::InvalidFunction("atomic decomposition is empty".into()));
    }
    for &(_, a) in atoms {
        if a.norm() >= 1.0 {
            return Err(Error::InvalidFunction(format!("atom centre {a} outside the disk")));
        }
    }
    Ok(atoms.iter().map(|(c, _)| c.norm()).sum())
}

/// `sum c_k sigma_{a_k}` for pairs `(c_k, a_k)`.
pub fn atomic_function(atoms: &[(C64, C64)]) -> Result<AnalyticFn> {
    let terms = atoms
        .iter()
        .map(|&(c, a)| Ok(AnalyticFn::scaled(c, AnalyticFn::sigma(a)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyticFn::sum(terms))
}
