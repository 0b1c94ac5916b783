use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::{ConvexSet, ProjectionOptions};
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::path::Grid;

/// Rigid motion `c(t)` of a base set: `C(t) = C_0 + c(t)`, `c(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Motion {
    Static,
    Linear { velocity: Vec<f64> },
    /// `c(t) = amplitude * sin(2 pi frequency t)`.
    Oscillating { amplitude: Vec<f64>, frequency: f64 },
}

impl Motion {
    fn offset(&self, t: f64, dim: usize) -> Vec<f64> {
        match self {
            Motion::Static => vec![0.0; dim],
            Motion::Linear { velocity } => velocity.iter().map(|v| v * t).collect(),
            Motion::Oscillating { amplitude, frequency } => {
                let s = (2.0 * PI * frequency * t).sin();
                amplitude.iter().map(|a| a * s).collect()
            }
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Motion::Static => None,
            Motion::Linear { velocity } => Some(velocity.len()),
            Motion::Oscillating { amplitude, .. } => Some(amplitude.len()),
        }
    }

    /// Lipschitz constant of `c`, which bounds `d_H(C(s), C(t)) / |t - s|`.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Motion::Static => 0.0,
            Motion::Linear { velocity } => norm(velocity),
            Motion::Oscillating { amplitude, frequency } => 2.0 * PI * frequency.abs() * norm(amplitude),
        }
    }
}

/// Hausdorff-Hölder modulus `d_H(C(s), C(t)) <= k |t - s|^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hoelder {
    pub k: f64,
    pub alpha: f64,
}

/// Interior-ball verification outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginReport {
    /// `min_t (r_max(t) - r)` over the grid.
    pub min_margin: f64,
    /// Grid time attaining the minimum.
    pub worst_time: f64,
    /// Set when the minimum is negative.
    pub violation_time: Option<f64>,
}

/// A translating convex set with a user-supplied interior selection `gamma`
/// and interior radius `r`. `gamma` moves with the set.
#[derive(Debug, Clone)]
pub struct MovingConvexSet {
    base: Arc<ConvexSet>,
    motion: Motion,
    gamma0: Vec<f64>,
    r: f64,
    hoelder: Option<Hoelder>,
    projection: ProjectionOptions,
}

impl MovingConvexSet {
    pub fn new(base: ConvexSet, motion: Motion, gamma0: Vec<f64>, r: f64) -> Result<Self> {
        let dim = base.dim();
        if let Some(md) = motion.dim() {
            if md != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: md });
            }
        }
        if gamma0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: gamma0.len() });
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter("interior radius must be positive"));
        }
        Ok(Self {
            base: Arc::new(base),
            motion,
            gamma0,
            r,
            hoelder: None,
            projection: ProjectionOptions::default(),
        })
    }

    /// A fixed set.
    pub fn fixed(base: ConvexSet, gamma: Vec<f64>, r: f64) -> Result<Self> {
        Self::new(base, Motion::Static, gamma, r)
    }

    pub fn with_hoelder(mut self, k: f64, alpha: f64) -> Result<Self> {
        if !(k >= 0.0) || !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter("Hölder modulus needs k >= 0 and alpha in (0, 1]"));
        }
        self.hoelder = Some(Hoelder { k, alpha });
        Ok(self)
    }

    pub fn with_projection(mut self, projection: ProjectionOptions) -> Self {
        self.projection = projection;
        self
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &ConvexSet {
        &self.base
    }

    pub fn motion(&self) -> &Motion {
        &self.motion
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn projection(&self) -> &ProjectionOptions {
        &self.projection
    }

    /// Declared modulus, or the Lipschitz modulus of the motion.
    pub fn hoelder(&self) -> Hoelder {
        self.hoelder.unwrap_or(Hoelder { k: self.motion.lipschitz(), alpha: 1.0 })
    }

    /// `C(t)`.
    pub fn at(&self, t: f64) -> ConvexSet {
        ConvexSet::Translated { base: Arc::clone(&self.base), shift: self.motion.offset(t, self.dim()) }
    }

    /// `C(t) - h`.
    pub fn at_minus(&self, t: f64, h: &[f64]) -> ConvexSet {
        let inner = self.at(t);
        ConvexSet::Translated { base: Arc::new(inner), shift: h.iter().map(|x| -x).collect() }
    }

    /// `gamma(t)`.
    pub fn gamma(&self, t: f64) -> Vec<f64> {
        let mut g = self.motion.offset(t, self.dim());
        g.iter_mut().zip(&self.gamma0).for_each(|(a, b)| *a += b);
        g
    }

    pub fn project_at(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.at(t).project_with(x, &self.projection)
    }

    pub fn distance_at(&self, t: f64, x: &[f64]) -> Result<f64> {
        self.at(t).distance_with(x, &self.projection)
    }

    /// Largest diameter of `C(t)`; translations preserve it.
    pub fn diameter_sup(&self) -> f64 {
        self.base.diameter()
    }

    /// Checks `B(gamma(t), r) ⊆ C(t)` on every grid time.
    pub fn verify_interior_ball(&self, grid: &Grid) -> MarginReport {
        let mut worst = MarginReport { min_margin: f64::INFINITY, worst_time: 0.0, violation_time: None };
        for &t in grid.times() {
            let margin = self.at(t).margin(&self.gamma(t)) - self.r;
            if margin < worst.min_margin {
                worst.min_margin = margin;
                worst.worst_time = t;
            }
        }
        if worst.min_margin < 0.0 {
            worst.violation_time = Some(worst.worst_time);
        }
        worst
    }
}
