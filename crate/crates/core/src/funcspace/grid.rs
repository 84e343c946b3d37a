//! Polar sample sets that refine geometrically towards the unit circle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::expr::C64;
use crate::error::{Error, Result};

/// Grid parameters. Radii are `0`, `inner_rings - 1` evenly spaced rings
/// below `inner_radius`, then `r = 1 - 2^{-t}(1 - inner_radius)` for
/// `t = 0, 1/L, 2/L, ...` with `L = 2^depth`, and finally `1 - floor`.
/// The angular count at radius `r` is `base_angular * 2^ceil(log2(1/(1-r)))`,
/// capped at `max_angular`; both scale by `2^depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub inner_radius: f64,
    pub inner_rings: usize,
    pub floor: f64,
    pub base_angular: usize,
    pub max_angular: usize,
    pub depth: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            inner_radius: 0.5,
            inner_rings: 4,
            floor: 1e-6,
            base_angular: 16,
            max_angular: 256,
            depth: 0,
        }
    }
}

impl GridConfig {
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    /// The next doubling refinement; its grid is a superset of this one.
    pub fn refined(&self) -> Self {
        Self {
            depth: self.depth + 1,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.floor.is_finite() && self.floor > 0.0) || self.floor < 1e-12 {
            return Err(Error::Config(format!(
                "boundary floor {} is below 1e-12 (precision cliff)",
                self.floor
            )));
        }
        if !(self.inner_radius > 0.0 && self.inner_radius < 1.0) {
            return Err(Error::Config("inner_radius must lie in (0, 1)".into()));
        }
        if self.floor >= 1.0 - self.inner_radius {
            return Err(Error::Config(format!(
                "floor {} leaves no room beyond inner_radius {}",
                self.floor, self.inner_radius
            )));
        }
        if self.inner_rings == 0 || self.base_angular == 0 || self.max_angular < self.base_angular {
            return Err(Error::Config(
                "inner_rings, base_angular must be positive and max_angular >= base_angular".into(),
            ));
        }
        if self.depth > 6 {
            return Err(Error::Config(format!("grid depth {} exceeds 6", self.depth)));
        }
        Ok(())
    }
}

/// One circle of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ring {
    pub radius: f64,
    pub count: usize,
    /// Index of the ring's first point in [`DiskGrid::points`].
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    config: GridConfig,
    rings: Vec<Ring>,
    points: Vec<C64>,
    ring_of: Vec<u32>,
}

/// Builds the grid described by `config`.
pub fn make_grid(config: &GridConfig) -> Result<DiskGrid> {
    config.validate()?;
    let scale = 1usize << config.depth;
    let levels = scale as f64;
    let base = config.base_angular * scale;
    let cap = config.max_angular * scale;

    let mut radii = vec![0.0];
    let inner = config.inner_rings * scale;
    for k in 1..inner {
        radii.push(config.inner_radius * k as f64 / inner as f64);
    }
    let gap = 1.0 - config.inner_radius;
    let mut step = 0u32;
    loop {
        let dist = gap * (-(step as f64) / levels).exp2();
        if dist <= config.floor {
            break;
        }
        radii.push(1.0 - dist);
        step += 1;
    }
    radii.push(1.0 - config.floor);

    let mut rings = Vec::with_capacity(radii.len());
    let mut points = Vec::new();
    let mut ring_of = Vec::new();
    for (idx, &r) in radii.iter().enumerate() {
        let count = if r == 0.0 {
            1
        } else {
            let octaves = (1.0 / (1.0 - r)).log2().ceil().max(0.0) as u32;
            base.saturating_mul(1usize << octaves.min(40)).min(cap)
        };
        rings.push(Ring {
            radius: r,
            count,
            offset: points.len(),
        });
        for k in 0..count {
            let theta = 2.0 * PI * k as f64 / count as f64;
            points.push(C64::from_polar(r, theta));
            ring_of.push(idx as u32);
        }
    }
    Ok(DiskGrid {
        config: config.clone(),
        rings,
        points,
        ring_of,
    })
}

impl DiskGrid {
    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    /// The grid at the next refinement depth.
    pub fn refined(&self) -> Result<DiskGrid> {
        make_grid(&self.config.refined())
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn radii(&self) -> Vec<f64> {
        self.rings.iter().map(|r| r.radius).collect()
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ring(&self, point: usize) -> &Ring {
        &self.rings[self.ring_of[point] as usize]
    }

    /// Radius of the ring holding `point` (exact, unlike `|z|`).
    pub fn radius_of(&self, point: usize) -> f64 {
        self.ring(point).radius
    }

    /// Half the local sample spacing around `point`, used as the initial
    /// step of local refinement.
    pub fn spacing_at(&self, point: usize) -> f64 {
        let idx = self.ring_of[point] as usize;
        let ring = &self.rings[idx];
        let angular = 2.0 * PI * ring.radius / ring.count as f64;
        let radial = match (idx.checked_sub(1), self.rings.get(idx + 1)) {
            (Some(p), Some(n)) => (ring.radius - self.rings[p].radius).max(n.radius - ring.radius),
            (Some(p), None) => ring.radius - self.rings[p].radius,
            (None, Some(n)) => n.radius,
            (None, None) => 0.1,
        };
        0.5 * angular.max(radial)
    }
}
