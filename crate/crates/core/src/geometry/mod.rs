//! Convex compact sets, Euclidean projections and moving constraint sets.

mod moving;
mod polytope;

pub use moving::{Hoelder, MarginReport, Motion, MovingConvexSet};
pub use polytope::{Halfspace, Polytope, ProjectionOptions};

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm};

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Axis-aligned box. Bounds may be infinite, which lets half-lines and slabs
/// be expressed; everything else in the crate assumes compact sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Cuboid {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Cuboid {
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Ball(Ball),
    Box(Cuboid),
    Polytope(Polytope),
    /// `base + shift`.
    Translated { base: Arc<ConvexSet>, shift: Vec<f64> },
}

impl ConvexSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSet("ball center must be a finite point"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidSet("ball radius must be positive"));
        }
        Ok(ConvexSet::Ball(Ball { center, radius }))
    }

    pub fn cuboid(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidSet("box bounds must have equal, nonzero length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || l.is_nan() || u.is_nan()) {
            return Err(Error::InvalidSet("box needs lower < upper componentwise"));
        }
        if lower.contains(&f64::INFINITY) || upper.contains(&f64::NEG_INFINITY) {
            return Err(Error::InvalidSet("box is empty"));
        }
        Ok(ConvexSet::Box(Cuboid { lower, upper }))
    }

    pub fn polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        Polytope::new(halfspaces).map(ConvexSet::Polytope)
    }

    pub fn translated(base: impl Into<Arc<ConvexSet>>, shift: Vec<f64>) -> Result<Self> {
        let base = base.into();
        if shift.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: shift.len() });
        }
        Ok(ConvexSet::Translated { base, shift })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball(b) => b.center.len(),
            ConvexSet::Box(b) => b.lower.len(),
            ConvexSet::Polytope(p) => p.dim(),
            ConvexSet::Translated { base, .. } => base.dim(),
        }
    }

    /// Innermost non-translated set together with the accumulated shift.
    pub fn flatten(&self) -> (&ConvexSet, Option<Vec<f64>>) {
        match self {
            ConvexSet::Translated { base, shift } => {
                let (root, inner) = base.flatten();
                let total = match inner {
                    Some(mut s) => {
                        s.iter_mut().zip(shift).for_each(|(a, b)| *a += b);
                        s
                    }
                    None => shift.clone(),
                };
                (root, Some(total))
            }
            other => (other, None),
        }
    }

    /// Returns an equivalent set without `Translated` layers.
    pub fn materialize(&self) -> ConvexSet {
        let (root, shift) = self.flatten();
        let Some(s) = shift else { return root.clone() };
        match root {
            ConvexSet::Ball(b) => ConvexSet::Ball(Ball {
                center: b.center.iter().zip(&s).map(|(c, d)| c + d).collect(),
                radius: b.radius,
            }),
            ConvexSet::Box(b) => ConvexSet::Box(Cuboid {
                lower: b.lower.iter().zip(&s).map(|(c, d)| c + d).collect(),
                upper: b.upper.iter().zip(&s).map(|(c, d)| c + d).collect(),
            }),
            ConvexSet::Polytope(p) => {
                let hs = p
                    .halfspaces()
                    .map(|h| {
                        let offset = h.offset + dot(&h.normal, &s);
                        Halfspace { normal: h.normal, offset }
                    })
                    .collect();
                // The shifted copy of a valid polytope is valid.
                ConvexSet::Polytope(Polytope::new(hs).expect("translate of a valid polytope"))
            }
            ConvexSet::Translated { .. } => unreachable!("flatten strips translations"),
        }
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.project_with(x, &ProjectionOptions::default())
    }

    /// Nearest point of the set to `x`. Points already inside are returned
    /// unchanged. Translations are folded into the set's parameters rather
    /// than applied to `x`.
    pub fn project_with(&self, x: &[f64], opts: &ProjectionOptions) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let (root, shift) = self.flatten();
        let s = shift.as_deref();
        Ok(match root {
            ConvexSet::Ball(b) => {
                let c: Vec<f64> = match s {
                    Some(s) => b.center.iter().zip(s).map(|(c, d)| c + d).collect(),
                    None => b.center.clone(),
                };
                let r = dist(x, &c);
                if r <= b.radius {
                    x.to_vec()
                } else {
                    let scale = b.radius / r;
                    c.iter().zip(x).map(|(c, x)| c + (x - c) * scale).collect()
                }
            }
            ConvexSet::Box(b) => x
                .iter()
                .enumerate()
                .map(|(i, &xi)| {
                    let (lo, hi) = match s {
                        Some(s) => (b.lower[i] + s[i], b.upper[i] + s[i]),
                        None => (b.lower[i], b.upper[i]),
                    };
                    if xi < lo {
                        lo
                    } else if xi > hi {
                        hi
                    } else {
                        xi
                    }
                })
                .collect(),
            ConvexSet::Polytope(p) => p.project(x, s, opts)?,
            ConvexSet::Translated { .. } => unreachable!("flatten strips translations"),
        })
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.distance_with(x, &ProjectionOptions::default())
    }

    pub fn distance_with(&self, x: &[f64], opts: &ProjectionOptions) -> Result<f64> {
        Ok(dist(x, &self.project_with(x, opts)?))
    }

    /// Radius of the largest closed ball centred at `p` contained in the set;
    /// negative when `p` lies outside (for balls, minus the distance).
    pub fn margin(&self, p: &[f64]) -> f64 {
        let (root, shift) = self.flatten();
        let s = shift.as_deref();
        let at = |i: usize, v: f64| s.map_or(v, |s| v + s[i]);
        match root {
            ConvexSet::Ball(b) => {
                let c: Vec<f64> = b.center.iter().enumerate().map(|(i, &c)| at(i, c)).collect();
                b.radius - dist(p, &c)
            }
            ConvexSet::Box(b) => (0..p.len())
                .map(|i| (p[i] - at(i, b.lower[i])).min(at(i, b.upper[i]) - p[i]))
                .fold(f64::INFINITY, f64::min),
            ConvexSet::Polytope(poly) => poly.margin(p, s),
            ConvexSet::Translated { .. } => unreachable!("flatten strips translations"),
        }
    }

    /// Membership up to `tol` on the constraint slack.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.margin(p) >= -tol
    }

    /// Support function `sup_{x in C} <u, x>`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match self {
            ConvexSet::Ball(b) => dot(&b.center, u) + b.radius * norm(u),
            ConvexSet::Box(b) => u
                .iter()
                .enumerate()
                .map(|(i, &ui)| match ui {
                    _ if ui > 0.0 => ui * b.upper[i],
                    _ if ui < 0.0 => ui * b.lower[i],
                    _ => 0.0,
                })
                .sum(),
            ConvexSet::Polytope(p) => p.support(u),
            ConvexSet::Translated { base, shift } => base.support(u) + dot(shift, u),
        }
    }

    /// Largest distance between two points of the set.
    pub fn diameter(&self) -> f64 {
        match self {
            ConvexSet::Ball(b) => 2.0 * b.radius,
            ConvexSet::Box(b) => dist(&b.lower, &b.upper),
            ConvexSet::Polytope(p) => {
                let vs: Vec<&[f64]> = p.vertices().collect();
                let mut best: f64 = 0.0;
                for (i, a) in vs.iter().enumerate() {
                    for b in &vs[i + 1..] {
                        best = best.max(dist(a, b));
                    }
                }
                best
            }
            ConvexSet::Translated { base, .. } => base.diameter(),
        }
    }

    /// A reference point inside the set.
    pub fn center(&self) -> Vec<f64> {
        match self.materialize() {
            ConvexSet::Ball(b) => b.center,
            ConvexSet::Box(b) => b
                .lower
                .iter()
                .zip(&b.upper)
                .map(|(&l, &u)| match (l.is_finite(), u.is_finite()) {
                    (true, true) => 0.5 * (l + u),
                    (true, false) => l + 1.0,
                    (false, true) => u - 1.0,
                    (false, false) => 0.0,
                })
                .collect(),
            ConvexSet::Polytope(p) => p.interior_point().to_vec(),
            ConvexSet::Translated { .. } => unreachable!(),
        }
    }

    /// Largest distance from `p` to a point of the set.
    fn farthest_distance(&self, p: &[f64]) -> f64 {
        match self.materialize() {
            ConvexSet::Ball(b) => dist(&b.center, p) + b.radius,
            ConvexSet::Box(b) => (0..p.len())
                .map(|i| {
                    let a = (p[i] - b.lower[i]).abs().max((b.upper[i] - p[i]).abs());
                    a * a
                })
                .sum::<f64>()
                .sqrt(),
            ConvexSet::Polytope(poly) => poly.vertices().map(|v| dist(v, p)).fold(0.0, f64::max),
            ConvexSet::Translated { .. } => unreachable!(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }
}

/// Result of [`hausdorff`]: exact for matching families, otherwise an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffEstimate {
    pub value: f64,
    pub is_exact: bool,
}

/// Number of support directions used for pairs without a closed form.
pub const SUPPORT_DIRECTIONS: usize = 256;

/// Chord covering radius of the 3-d Fibonacci direction set of size
/// [`SUPPORT_DIRECTIONS`]; checked against dense sampling in the tests.
const FIBONACCI_COVERING: f64 = 0.2;

/// Hausdorff distance between two sets.
///
/// Ball/ball, box/box and two translates of the same base have closed forms.
/// Any other pair is bounded from above through the support functions:
/// `d_H = sup_{|u|=1} |h_A(u) - h_B(u)|`, sampled on a direction net and
/// inflated by the net's covering radius times the Lipschitz constant of the
/// support difference.
pub fn hausdorff(a: &ConvexSet, b: &ConvexSet) -> HausdorffEstimate {
    let exact = |value| HausdorffEstimate { value, is_exact: true };
    let (ra, sa) = a.flatten();
    let (rb, sb) = b.flatten();
    if ra == rb {
        let d = a.dim();
        let za = sa.unwrap_or_else(|| vec![0.0; d]);
        let zb = sb.unwrap_or_else(|| vec![0.0; d]);
        return exact(dist(&za, &zb));
    }
    match (a.materialize(), b.materialize()) {
        (ConvexSet::Ball(x), ConvexSet::Ball(y)) => {
            exact(dist(&x.center, &y.center) + (x.radius - y.radius).abs())
        }
        (ConvexSet::Box(x), ConvexSet::Box(y)) => {
            let one_sided = |p: &Cuboid, q: &Cuboid| {
                // sup over q of the distance to p separates by coordinate.
                (0..p.lower.len())
                    .map(|i| {
                        let e = (p.lower[i] - q.lower[i]).max(q.upper[i] - p.upper[i]).max(0.0);
                        e * e
                    })
                    .sum::<f64>()
                    .sqrt()
            };
            exact(one_sided(&x, &y).max(one_sided(&y, &x)))
        }
        (ma, mb) => support_bound(&ma, &mb),
    }
}

fn support_bound(a: &ConvexSet, b: &ConvexSet) -> HausdorffEstimate {
    let d = a.dim();
    let (dirs, covering) = direction_net(d);
    let origin = a.center();
    let sampled = dirs
        .chunks_exact(d)
        .map(|u| (a.support(u) - b.support(u)).abs())
        .fold(0.0, f64::max);
    if covering == 0.0 {
        return HausdorffEstimate { value: sampled, is_exact: true };
    }
    // |h_A(u) - h_A(v)| <= sup_{x in A} |x - o| |u - v| once both sets are
    // recentred at a common origin o, which leaves h_A - h_B unchanged.
    let lip = a.farthest_distance(&origin) + b.farthest_distance(&origin);
    HausdorffEstimate { value: sampled + covering * lip, is_exact: false }
}

/// Unit directions and their chord covering radius.
fn direction_net(d: usize) -> (Vec<f64>, f64) {
    match d {
        1 => (vec![1.0, -1.0], 0.0),
        2 => {
            let n = SUPPORT_DIRECTIONS;
            let dirs = (0..n)
                .flat_map(|k| {
                    let th = 2.0 * PI * k as f64 / n as f64;
                    [th.cos(), th.sin()]
                })
                .collect();
            // Angle to the nearest direction is at most pi/n, and chord <= angle.
            (dirs, PI / n as f64)
        }
        3 => (fibonacci_sphere(SUPPORT_DIRECTIONS), FIBONACCI_COVERING),
        _ => {
            // Signed coordinate axes: every unit vector has |u_i| >= 1/sqrt(d)
            // for some i, so its chord distance to +-e_i is at most
            // sqrt(2 - 2/sqrt(d)).
            let mut dirs = vec![0.0; 2 * d * d];
            for i in 0..d {
                dirs[(2 * i) * d + i] = 1.0;
                dirs[(2 * i + 1) * d + i] = -1.0;
            }
            let cover = (2.0 - 2.0 / (d as f64).sqrt()).sqrt();
            (dirs, cover)
        }
    }
}

pub(crate) fn fibonacci_sphere(n: usize) -> Vec<f64> {
    let golden = PI * (3.0 - 5.0.sqrt());
    (0..n)
        .flat_map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let th = golden * k as f64;
            [rho * th.cos(), rho * th.sin(), z]
        })
        .collect()
}
