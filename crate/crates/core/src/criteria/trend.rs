//! Three-valued readings of refinement traces.

use serde::{Deserialize, Serialize};

use crate::funcspace::norms::{rel_change, CONVERGENCE_TOL};

/// Growth factor per refinement that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 2.0;
/// Deepest-annulus value below which a tail counts as vanished.
pub const VANISH_TOL: f64 = 1e-6;
/// Per-annulus ratio separating decay from persistence.
pub const DECAY_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupTrend {
    Converged,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailTrend {
    Vanishing,
    Persistent,
    Inconclusive,
}

/// Converged when the last two entries differ by less than the relative
/// tolerance (or all vanish); diverging when each of the last two steps
/// grows by at least [`DIVERGENCE_FACTOR`].
pub fn classify_sup(trace: &[f64]) -> SupTrend {
    if trace.iter().all(|v| *v == 0.0) {
        return SupTrend::Converged;
    }
    let n = trace.len();
    if n >= 3 {
        let grows = |a: f64, b: f64| a > 0.0 && b >= DIVERGENCE_FACTOR * a;
        if grows(trace[n - 3], trace[n - 2]) && grows(trace[n - 2], trace[n - 1]) {
            return SupTrend::Diverging;
        }
    }
    if n >= 2 && rel_change(trace[n - 2], trace[n - 1]) < CONVERGENCE_TOL {
        return SupTrend::Converged;
    }
    SupTrend::Inconclusive
}

/// How strictly a per-annulus tail must vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Only a deepest value at or below [`VANISH_TOL`] counts as vanishing.
    Absolute,
    /// Geometric decay over the last three annuli also counts.
    Decay,
}

/// Reads the last three available annuli. `None` marks an empty annulus;
/// an empty deepest annulus means the family is eventually empty.
pub fn classify_tail(values: &[Option<f64>], rule: TailRule) -> TailTrend {
    match values.last() {
        None | Some(None) => return TailTrend::Vanishing,
        Some(Some(v)) if *v <= VANISH_TOL => return TailTrend::Vanishing,
        _ => {}
    }
    let tail: Vec<f64> = values.iter().rev().take(3).map_while(|v| *v).collect();
    if tail.len() < 3 {
        return TailTrend::Inconclusive;
    }
    // tail is deepest-first
    let ratios = [tail[0] / tail[1], tail[1] / tail[2]];
    if ratios.iter().all(|r| *r >= DECAY_RATIO) {
        return TailTrend::Persistent;
    }
    if rule == TailRule::Decay && ratios.iter().all(|r| *r <= DECAY_RATIO) {
        return TailTrend::Vanishing;
    }
    TailTrend::Inconclusive
}

/// Max over the last three available annuli; zero if the deepest annulus is
/// empty.
pub fn tail_limsup(values: &[Option<f64>]) -> f64 {
    match values.last() {
        None | Some(None) => 0.0,
        Some(Some(_)) => values.iter().rev().take(3).flatten().fold(0.0, |a, b| a.max(*b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_classification() {
        assert_eq!(classify_sup(&[1.0, 1.0, 1.0]), SupTrend::Converged);
        assert_eq!(classify_sup(&[0.0, 0.0]), SupTrend::Converged);
        assert_eq!(classify_sup(&[1.0, 4.0, 16.0]), SupTrend::Diverging);
        assert_eq!(classify_sup(&[1.0, 1.5, 1.9]), SupTrend::Inconclusive);
    }

    #[test]
    fn tail_classification() {
        let geo: Vec<Option<f64>> = (4..=16).map(|n| Some(0.5f64.powi(n))).collect();
        assert_eq!(classify_tail(&geo, TailRule::Decay), TailTrend::Vanishing);
        assert_eq!(classify_tail(&geo, TailRule::Absolute), TailTrend::Inconclusive);
        let flat = vec![Some(1.0); 5];
        assert_eq!(classify_tail(&flat, TailRule::Absolute), TailTrend::Persistent);
        assert_eq!(
            classify_tail(&[Some(1.0), None], TailRule::Absolute),
            TailTrend::Vanishing
        );
        assert_eq!(classify_tail(&[], TailRule::Absolute), TailTrend::Vanishing);
        assert_eq!(tail_limsup(&[Some(3.0), Some(2.0), Some(1.0), Some(1.5)]), 2.0);
        assert_eq!(tail_limsup(&[Some(3.0), None]), 0.0);
    }
}
