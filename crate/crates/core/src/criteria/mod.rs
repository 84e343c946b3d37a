//! Boundedness and compactness diagnostics from grid samples of the
//! coefficient functions `I_k` and from images of the test functions.
//!
//! * `Q_k = sup (1-|z|^2)^alpha |I_k(z)| / (1-|phi(z)|^2)^k`
//! * `U_k = sup (1-|z|^2)^alpha |I_k(z)|`
//! * `S_j = sup_a ||T f_{j,a}||`
//! * `E_j`: per-annulus maxima of `||T f_{j,a}||` for `|a| = 1 - 2^{-n}`
//! * `F_k`: per-annulus maxima of the `Q_k` integrand over `|phi(z)|` in
//!   `[1 - 2^{-n}, 1 - 2^{-n-1})`
//!
//! Sup traces are cumulative over `1 - |z| >= 2^{-n}` for
//! `n = n0, n0 + step, ...`, so a bounded quantity settles while a quantity
//! growing like `(1 - r)^{-p}` multiplies by `2^{p step}` per level.

pub mod trend;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::norms::rel_change;
use crate::funcspace::{AnalyticFn, DiskGrid, NormEstimate, C64};
use crate::operator::{AtomicSampler, OperatorSpec, Prepared};
use crate::scalar::{abs, one_minus_abs2, Precision, Real};
use crate::testfns::index_set;

pub use trend::{classify_sup, classify_tail, tail_limsup, SupTrend, TailRule, TailTrend};

/// Tail sampling for the sup traces and the limsup estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfig {
    pub n0: u32,
    pub n_max: u32,
    pub step: u32,
    /// Angles per test-function radius `|a|`.
    pub a_angles: usize,
    /// Radii `|a|` sampled below the geometric tail.
    pub inner_a_radii: Vec<f64>,
}

impl TailConfig {
    pub fn for_precision(p: Precision) -> Self {
        Self {
            n0: 4,
            n_max: p.tail_depth(),
            step: 2,
            a_angles: 8,
            inner_a_radii: vec![0.0, 0.25],
        }
    }

    pub fn validate(&self, grid: &DiskGrid) -> Result<()> {
        if self.n0 == 0 || self.step == 0 || self.a_angles == 0 {
            return Err(Error::Config("tail n0, step and a_angles must be positive".into()));
        }
        if self.n_max < self.n0 + 2 * self.step {
            return Err(Error::Config(format!(
                "tail depth {} leaves fewer than three levels from n0 = {} with step {}",
                self.n_max, self.n0, self.step
            )));
        }
        let floor = grid.config().floor;
        if (-(self.n_max as f64)).exp2() < floor * (1.0 - 1e-12) {
            return Err(Error::Config(format!(
                "tail depth {} reaches past the grid floor {floor:e}",
                self.n_max
            )));
        }
        if let Some(r) = self.inner_a_radii.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return Err(Error::Config(format!("inner radius {r} outside [0, 1)")));
        }
        Ok(())
    }

    /// Sup-trace levels `n0, n0 + step, ...`, always ending at `n_max`.
    pub fn levels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = (self.n0..=self.n_max).step_by(self.step as usize).collect();
        if v.last() != Some(&self.n_max) {
            v.push(self.n_max);
        }
        v
    }

    pub fn annuli(&self) -> Vec<u32> {
        (self.n0..=self.n_max).collect()
    }

    /// Test-function radii: the inner list plus `1 - 2^{-t}`, `t = 1..=n_max`.
    pub fn a_radii(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.inner_a_radii.clone();
        r.extend((1..=self.n_max).map(|t| 1.0 - (-(t as f64)).exp2()));
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compactness {
    Compact,
    NotCompact,
    Inconclusive,
}

pub fn boundedness_from(trends: impl IntoIterator<Item = SupTrend>) -> Boundedness {
    let mut all_converged = true;
    for t in trends {
        match t {
            SupTrend::Diverging => return Boundedness::Unbounded,
            SupTrend::Inconclusive => all_converged = false,
            SupTrend::Converged => {}
        }
    }
    if all_converged {
        Boundedness::Bounded
    } else {
        Boundedness::Inconclusive
    }
}

pub fn compactness_from(trends: impl IntoIterator<Item = TailTrend>) -> Compactness {
    let mut all_vanish = true;
    for t in trends {
        match t {
            TailTrend::Persistent => return Compactness::NotCompact,
            TailTrend::Inconclusive => all_vanish = false,
            TailTrend::Vanishing => {}
        }
    }
    if all_vanish {
        Compactness::Compact
    } else {
        Compactness::Inconclusive
    }
}

/// Sup estimate for one derivative order `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSup {
    pub k: u32,
    #[serde(flatten)]
    pub estimate: NormEstimate,
    pub levels: Vec<u32>,
    pub trend: SupTrend,
}

/// Sup estimate for one test-function exponent `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JSup {
    pub j: u32,
    #[serde(flatten)]
    pub estimate: NormEstimate,
    pub levels: Vec<u32>,
    pub trend: SupTrend,
}

/// Per-annulus estimates for one `F_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FTrace {
    pub k: u32,
    pub annuli: Vec<u32>,
    pub values: Vec<Option<f64>>,
    pub limsup: f64,
    pub trend: TailTrend,
}

/// Per-annulus estimates for one `E_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ETrace {
    pub j: u32,
    pub annuli: Vec<u32>,
    pub values: Vec<Option<f64>>,
    pub limsup: f64,
    pub trend: TailTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitRow {
    pub k: u32,
    pub outer_sup: Option<f64>,
    pub inner_sup: Option<f64>,
    pub global_sup: f64,
    /// Largest `Q_k / U_k` over inner points with `U_k > 0`.
    pub inner_ratio: f64,
    pub ratio_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionII {
    pub s_sups: Vec<JSup>,
    pub u_sups: Vec<KSup>,
    pub verdict: Boundedness,
}

/// Maxima of `||T f_{j,a}||` per exponent and per radius `|a|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFnProfile {
    pub basis: Vec<u32>,
    pub radii: Vec<f64>,
    /// `values[j_index][radius_index]`.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationReport {
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub via_f: Compactness,
    pub via_e: Compactness,
    pub agree: bool,
    pub verdict: Compactness,
}

pub fn compactness_verdict(e: &[ETrace], f: &[FTrace]) -> CompactnessReport {
    let via_f = compactness_from(f.iter().map(|t| t.trend));
    let via_e = compactness_from(e.iter().map(|t| t.trend));
    let agree = via_f == via_e;
    CompactnessReport {
        via_f,
        via_e,
        agree,
        verdict: if agree { via_f } else { Compactness::Inconclusive },
    }
}

/// Grid samples of everything the criteria need, for one operator.
pub struct Analysis<'g, T: Real> {
    pub prepared: Prepared<'g, T>,
    pub tail: TailConfig,
    keys: Vec<u32>,
    q: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
    phi_abs: Vec<f64>,
    phi_gap: Vec<f64>,
    depth: Vec<f64>,
}

impl<'g, T: Real> Analysis<'g, T> {
    pub fn new(spec: &OperatorSpec, grid: &'g DiskGrid, tail: TailConfig) -> Result<Self> {
        tail.validate(grid)?;
        let prepared = spec.prepare::<T>(grid)?;
        let keys = index_set(spec.m);
        let n = grid.len();
        let mut q = vec![Vec::with_capacity(n); keys.len()];
        let mut u = vec![Vec::with_capacity(n); keys.len()];
        let mut phi_abs = Vec::with_capacity(n);
        let mut phi_gap = Vec::with_capacity(n);
        for (p, (s, w)) in prepared.symbols().iter().zip(prepared.weights()).enumerate() {
            let b = spec.bundle_from(s);
            let den = one_minus_abs2(b.phi).as_f64();
            for (i, k) in keys.iter().enumerate() {
                let ik = abs(b.entries[k]).as_f64();
                let uk = w * ik;
                let qk = if uk == 0.0 { 0.0 } else { uk / den.powi(*k as i32) };
                if !qk.is_finite() {
                    return Err(Error::NonFinite {
                        what: format!("Q_{k}"),
                        at: grid.points()[p],
                    });
                }
                q[i].push(qk);
                u[i].push(uk);
            }
            let r = abs(b.phi);
            phi_abs.push(r.as_f64());
            phi_gap.push((T::one() - r).as_f64());
        }
        let depth = (0..n).map(|p| 1.0 - grid.radius_of(p)).collect();
        Ok(Self {
            prepared,
            tail,
            keys,
            q,
            u,
            phi_abs,
            phi_gap,
            depth,
        })
    }

    pub fn spec(&self) -> &OperatorSpec {
        &self.prepared.spec
    }

    pub fn grid(&self) -> &'g DiskGrid {
        self.prepared.grid
    }

    /// Orders of the (merged) index set.
    pub fn keys(&self) -> &[u32] {
        &self.keys
    }

    fn cumulative(&self, values: &[f64]) -> (Vec<f64>, Option<usize>) {
        let levels = self.tail.levels();
        let mut trace = Vec::with_capacity(levels.len());
        let mut best: Option<usize> = None;
        for n in &levels {
            let cut = (-(*n as f64)).exp2() * (1.0 - 1e-12);
            for (p, &v) in values.iter().enumerate() {
                if self.depth[p] >= cut && best.is_none_or(|b| v > values[b]) {
                    best = Some(p);
                }
            }
            trace.push(best.map_or(0.0, |b| values[b]));
        }
        (trace, best)
    }

    fn k_sups(&self, table: &[Vec<f64>]) -> Vec<KSup> {
        self.keys
            .iter()
            .zip(table)
            .map(|(&k, values)| {
                let (trace, best) = self.cumulative(values);
                let trend = classify_sup(&trace);
                KSup {
                    k,
                    estimate: NormEstimate::from_trace(trace, best.map(|p| self.grid().points()[p])),
                    levels: self.tail.levels(),
                    trend,
                }
            })
            .collect()
    }

    /// `Q_k` traces, one per order of the index set.
    pub fn criterion_iii(&self) -> Vec<KSup> {
        self.k_sups(&self.q)
    }

    /// `U_k` traces.
    pub fn unweighted_sups(&self) -> Vec<KSup> {
        self.k_sups(&self.u)
    }

    pub fn boundedness_iii(&self) -> Boundedness {
        boundedness_from(self.criterion_iii().iter().map(|s| s.trend))
    }

    /// `||T f_{j,a}||` on the test-function radii, maximised over angles.
    pub fn test_function_profile(&self, basis: &[u32]) -> Result<TestFnProfile> {
        let radii = self.tail.a_radii();
        let angles = self.tail.a_angles;
        let mut jobs: Vec<(usize, usize, C64)> = Vec::new();
        for (ji, _) in basis.iter().enumerate() {
            for (ri, &r) in radii.iter().enumerate() {
                let count = if r == 0.0 { 1 } else { angles };
                for t in 0..count {
                    let theta = std::f64::consts::TAU * t as f64 / count as f64;
                    jobs.push((ji, ri, C64::from_polar(r, theta)));
                }
            }
        }
        let norms: Vec<f64> = jobs
            .par_iter()
            .map(|&(ji, _, a)| {
                let f = AnalyticFn::test_fn(basis[ji], a)?;
                Ok(self.prepared.image_norm(&f)?.value)
            })
            .collect::<Result<_>>()?;
        let mut values = vec![vec![0.0f64; radii.len()]; basis.len()];
        for (&(ji, ri, _), v) in jobs.iter().zip(norms) {
            values[ji][ri] = values[ji][ri].max(v);
        }
        Ok(TestFnProfile {
            basis: basis.to_vec(),
            radii,
            values,
        })
    }

    /// `S_j` traces cumulative over `1 - |a| >= 2^{-n}`, plus `U_k` traces.
    pub fn criterion_ii(&self, profile: &TestFnProfile) -> CriterionII {
        let levels = self.tail.levels();
        let s_sups: Vec<JSup> = profile
            .basis
            .iter()
            .zip(&profile.values)
            .map(|(&j, vals)| {
                let trace: Vec<f64> = levels
                    .iter()
                    .map(|n| {
                        let cut = (-(*n as f64)).exp2() * (1.0 - 1e-12);
                        profile
                            .radii
                            .iter()
                            .zip(vals)
                            .filter(|(r, _)| 1.0 - **r >= cut)
                            .fold(0.0f64, |acc, (_, v)| acc.max(*v))
                    })
                    .collect();
                let trend = classify_sup(&trace);
                JSup {
                    j,
                    estimate: NormEstimate::from_trace(trace, None),
                    levels: levels.clone(),
                    trend,
                }
            })
            .collect();
        let u_sups = self.unweighted_sups();
        let verdict = boundedness_from(s_sups.iter().map(|s| s.trend).chain(u_sups.iter().map(|s| s.trend)));
        CriterionII {
            s_sups,
            u_sups,
            verdict,
        }
    }

    /// Splits each `Q_k` sup at `|phi| = 1/3` and checks the inner ratio
    /// `Q_k / U_k <= (9/8)^k`.
    pub fn third_split_check(&self) -> Vec<SplitRow> {
        let third = 1.0 / 3.0;
        self.keys
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let (mut outer, mut inner, mut global) = (None::<f64>, None::<f64>, 0.0f64);
                let mut ratio = 0.0f64;
                for p in 0..self.phi_abs.len() {
                    let v = self.q[i][p];
                    global = global.max(v);
                    if self.phi_abs[p] > third {
                        outer = Some(outer.map_or(v, |o| o.max(v)));
                    } else {
                        inner = Some(inner.map_or(v, |o| o.max(v)));
                        if self.u[i][p] > 0.0 {
                            ratio = ratio.max(v / self.u[i][p]);
                        }
                    }
                }
                let bound = (9.0f64 / 8.0).powi(k as i32);
                let split_max = outer.unwrap_or(0.0).max(inner.unwrap_or(0.0));
                SplitRow {
                    k,
                    outer_sup: outer,
                    inner_sup: inner,
                    global_sup: global,
                    inner_ratio: ratio,
                    ratio_bound: bound,
                    pass: split_max == global && ratio <= bound * (1.0 + 1e-12),
                }
            })
            .collect()
    }

    /// Tail annulus of `|phi(z_p)|`, for points inside the deepest sup level.
    fn annulus_of(&self, p: usize) -> Option<u32> {
        if self.depth[p] < (-(self.tail.n_max as f64)).exp2() * (1.0 - 1e-12) {
            return None;
        }
        let gap = self.phi_gap[p];
        if !(gap > 0.0) {
            return Some(self.tail.n_max);
        }
        let t = (-gap.log2() + 1e-6).floor();
        if t < self.tail.n0 as f64 {
            None
        } else {
            Some((t as u32).min(self.tail.n_max))
        }
    }

    /// Per-annulus maxima of the `Q_k` integrand over `|phi(z)|` in the tail.
    pub fn f_traces(&self) -> Vec<FTrace> {
        let annuli = self.tail.annuli();
        let slot: Vec<Option<usize>> = (0..self.phi_gap.len())
            .map(|p| self.annulus_of(p).map(|n| (n - self.tail.n0) as usize))
            .collect();
        self.keys
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let mut values: Vec<Option<f64>> = vec![None; annuli.len()];
                for (p, s) in slot.iter().enumerate() {
                    if let Some(s) = *s {
                        let v = self.q[i][p];
                        values[s] = Some(values[s].map_or(v, |o| o.max(v)));
                    }
                }
                FTrace {
                    k,
                    limsup: tail_limsup(&values),
                    trend: classify_tail(&values, TailRule::Absolute),
                    annuli: annuli.clone(),
                    values,
                }
            })
            .collect()
    }

    /// Per-annulus `||T f_{j,a}||` maxima at `|a| = 1 - 2^{-n}`.
    pub fn e_traces(&self, profile: &TestFnProfile) -> Vec<ETrace> {
        let annuli = self.tail.annuli();
        profile
            .basis
            .iter()
            .zip(&profile.values)
            .map(|(&j, vals)| {
                let values: Vec<Option<f64>> = annuli
                    .iter()
                    .map(|n| {
                        let r = 1.0 - (-(*n as f64)).exp2();
                        profile.radii.iter().position(|x| *x == r).map(|i| vals[i])
                    })
                    .collect();
                ETrace {
                    j,
                    limsup: tail_limsup(&values),
                    trend: classify_tail(&values, TailRule::Decay),
                    annuli: annuli.clone(),
                    values,
                }
            })
            .collect()
    }

    /// `E` and `F` traces; refuses operators whose `Q_k` traces diverge.
    pub fn essential_quantities(&self, profile: &TestFnProfile) -> Result<(Vec<ETrace>, Vec<FTrace>)> {
        self.require_bounded()?;
        Ok((self.e_traces(profile), self.f_traces()))
    }

    pub fn require_bounded(&self) -> Result<()> {
        let diverging: Vec<String> = self
            .criterion_iii()
            .iter()
            .filter(|s| s.trend == SupTrend::Diverging)
            .map(|s| format!("Q_{}", s.k))
            .collect();
        if diverging.is_empty() {
            Ok(())
        } else {
            Err(Error::Unbounded(format!(
                "diverging towards the boundary: {}",
                diverging.join(", ")
            )))
        }
    }

    /// `sup_f ||T f - T f_r||` over the sampler's family for each `r`.
    pub fn dilation_residual(&self, sampler: &AtomicSampler, radii: &[f64]) -> Result<DilationReport> {
        self.require_bounded()?;
        let family = sampler.functions()?;
        let mut residuals = Vec::with_capacity(radii.len());
        for &r in radii {
            let diffs = family
                .iter()
                .map(|f| Ok(f.clone() - AnalyticFn::dilate(r, f.clone())?))
                .collect::<Result<Vec<_>>>()?;
            let norms = self.prepared.image_norms(&diffs)?;
            residuals.push(norms.iter().fold(0.0f64, |a, n| a.max(n.value)));
        }
        let decreasing = residuals
            .windows(2)
            .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
        Ok(DilationReport {
            radii: radii.to_vec(),
            residuals,
            decreasing,
        })
    }

    /// Max of `Q_k` on each grid ring: `(r, k, value)` sorted by `k`, then `r`.
    pub fn radial_profile(&self) -> Vec<(f64, u32, f64)> {
        let grid = self.grid();
        let mut out = Vec::new();
        for (i, &k) in self.keys.iter().enumerate() {
            for ring in grid.rings() {
                let v = self.q[i][ring.offset..ring.offset + ring.count]
                    .iter()
                    .fold(0.0f64, |a, b| a.max(*b));
                out.push((ring.radius, k, v));
            }
        }
        out
    }
}

/// Relative spread `max / min` of positive values; `None` when empty.
pub fn band_width(values: &[f64]) -> Option<f64> {
    let pos: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    if pos.is_empty() {
        return None;
    }
    let hi = pos.iter().fold(0.0f64, |a, b| a.max(*b));
    let lo = pos.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    Some(hi / lo)
}

/// Whether two estimates agree to the convergence tolerance.
pub fn agree(a: f64, b: f64) -> bool {
    rel_change(a, b) < crate::funcspace::norms::CONVERGENCE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{make_grid, parse_fn, GridConfig};

    fn spec(u: &str, v: &str, phi: &str, m: u32, alpha: f64) -> OperatorSpec {
        OperatorSpec::new(
            parse_fn(u).unwrap(),
            parse_fn(v).unwrap(),
            parse_fn(phi).unwrap(),
            m,
            alpha,
        )
        .unwrap()
    }

    fn grid() -> DiskGrid {
        make_grid(&GridConfig::default()).unwrap()
    }

    fn tail() -> TailConfig {
        TailConfig::for_precision(Precision::Double)
    }

    #[test]
    fn identity_alpha_two_is_bounded_with_unit_q2() {
        let g = grid();
        let a = Analysis::<f64>::new(&spec("1", "0", "z", 4, 2.0), &g, tail()).unwrap();
        let q = a.criterion_iii();
        let q2 = q.iter().find(|s| s.k == 2).unwrap();
        assert!((q2.estimate.value - 1.0).abs() < 1e-12);
        assert!(q.iter().filter(|s| s.k != 2).all(|s| s.estimate.value == 0.0));
        assert_eq!(a.boundedness_iii(), Boundedness::Bounded);
        let f = a.f_traces();
        let f2 = f.iter().find(|t| t.k == 2).unwrap();
        assert!((f2.limsup - 1.0).abs() < 1e-12);
        assert_eq!(f2.trend, TailTrend::Persistent);
    }

    #[test]
    fn identity_alpha_one_diverges() {
        let g = grid();
        let a = Analysis::<f64>::new(&spec("1", "0", "z", 4, 1.0), &g, tail()).unwrap();
        assert_eq!(a.boundedness_iii(), Boundedness::Unbounded);
        assert!(matches!(a.require_bounded(), Err(Error::Unbounded(_))));
    }

    #[test]
    fn contractive_symbol_has_empty_tail() {
        let g = grid();
        let a = Analysis::<f64>::new(&spec("poly(1,1)", "z", "z/2", 2, 1.0), &g, tail()).unwrap();
        assert_eq!(a.boundedness_iii(), Boundedness::Bounded);
        for t in a.f_traces() {
            assert_eq!(t.limsup, 0.0);
            assert!(t.values.iter().all(Option::is_none));
            assert_eq!(t.trend, TailTrend::Vanishing);
        }
        for row in a.third_split_check() {
            assert!(row.pass, "{row:?}");
        }
    }

    #[test]
    fn q_dominates_u_and_f_below_q() {
        let g = grid();
        let a = Analysis::<f64>::new(
            &spec("poly(0.5,0.3)", "poly(0,0.2)", "poly(0.5,0.5)", 1, 2.0),
            &g,
            tail(),
        )
        .unwrap();
        let q = a.criterion_iii();
        let u = a.unweighted_sups();
        let f = a.f_traces();
        for ((qs, us), ft) in q.iter().zip(&u).zip(&f) {
            assert!(qs.estimate.value >= us.estimate.value);
            assert!(ft.limsup <= qs.estimate.value);
        }
    }

    #[test]
    fn scaling_symbols_scales_q() {
        let g = grid();
        let a = Analysis::<f64>::new(&spec("poly(1,0.5)", "z", "poly(0.1,0.7)", 3, 2.0), &g, tail()).unwrap();
        let b = Analysis::<f64>::new(&spec("poly(2,1)", "poly(0,2)", "poly(0.1,0.7)", 3, 2.0), &g, tail()).unwrap();
        for (x, y) in a.criterion_iii().iter().zip(b.criterion_iii()) {
            assert!((2.0 * x.estimate.value - y.estimate.value).abs() <= 1e-12 * y.estimate.value.max(1e-300));
        }
    }

    #[test]
    fn levels_and_radii() {
        let t = tail();
        assert_eq!(t.levels(), vec![4, 6, 8, 10, 12, 14, 16]);
        assert_eq!(t.annuli().len(), 13);
        let r = t.a_radii();
        assert_eq!(r[0], 0.0);
        assert_eq!(*r.last().unwrap(), 1.0 - (-16f64).exp2());
        let bad = TailConfig { n_max: 24, ..t };
        assert!(bad.validate(&grid()).is_err());
    }

    #[test]
    fn band_width_ignores_zeros() {
        assert_eq!(band_width(&[0.0, 2.0, 8.0]), Some(4.0));
        assert_eq!(band_width(&[0.0]), None);
    }
}
