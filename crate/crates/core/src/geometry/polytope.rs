//! Bounded polytopes in halfspace representation.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, orthogonal_direction, rank, solve};

/// Tolerances for iterative projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    /// Dykstra stops once a full sweep moves the iterate by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_sweeps: 10_000 }
    }
}

/// Closed halfspace `<normal, x> <= offset` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    /// Normalizes `normal` to unit length and rescales `offset` accordingly.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidSet("halfspace normal must be finite and nonzero"));
        }
        Ok(Self { normal: normal.iter().map(|x| x / n).collect(), offset: offset / n })
    }
}

/// Intersection of finitely many halfspaces, verified bounded and full-dimensional.
///
/// Vertices are enumerated once at construction; they give the support
/// function, the diameter and the interior probe point. Enumeration visits
/// every `dim`-subset of constraints, so this is meant for small dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    normals: Vec<f64>,
    offsets: Vec<f64>,
    vertices: Vec<f64>,
    interior: Vec<f64>,
}

impl Polytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let dim = halfspaces.first().map(|h| h.normal.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidSet("polytope needs at least one halfspace"));
        }
        if halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(Error::InvalidSet("halfspace normals differ in dimension"));
        }
        let m = halfspaces.len();
        let normals: Vec<f64> = halfspaces.iter().flat_map(|h| h.normal.iter().copied()).collect();
        let offsets: Vec<f64> = halfspaces.iter().map(|h| h.offset).collect();

        if !recession_cone_is_trivial(&normals, m, dim) {
            return Err(Error::InvalidSet("polytope is unbounded"));
        }
        let vertices = enumerate_vertices(&normals, &offsets, dim);
        let count = vertices.len() / dim;
        if count == 0 {
            return Err(Error::InvalidSet("polytope is empty"));
        }
        let mut interior = vec![0.0; dim];
        for v in vertices.chunks_exact(dim) {
            interior.iter_mut().zip(v).for_each(|(c, x)| *c += x / count as f64);
        }
        let poly = Self { dim, normals, offsets, vertices, interior };
        if poly.margin(&poly.interior, None) <= 1e-9 {
            return Err(Error::InvalidSet("polytope has empty interior"));
        }
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn halfspaces(&self) -> impl Iterator<Item = Halfspace> + '_ {
        self.normals
            .chunks_exact(self.dim)
            .zip(&self.offsets)
            .map(|(n, &b)| Halfspace { normal: n.to_vec(), offset: b })
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.vertices.chunks_exact(self.dim)
    }

    /// Vertex centroid; strictly interior by construction.
    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    fn offset(&self, i: usize, shift: Option<&[f64]>) -> f64 {
        let b = self.offsets[i];
        match shift {
            Some(s) => b + dot(&self.normals[i * self.dim..(i + 1) * self.dim], s),
            None => b,
        }
    }

    /// Minimum constraint slack at `p`; the radius of the largest ball centred
    /// at `p` inside the (shifted) polytope when positive.
    pub fn margin(&self, p: &[f64], shift: Option<&[f64]>) -> f64 {
        (0..self.len())
            .map(|i| self.offset(i, shift) - dot(&self.normals[i * self.dim..(i + 1) * self.dim], p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Dykstra's alternating projections onto the halfspaces.
    pub fn project(&self, x: &[f64], shift: Option<&[f64]>, opts: &ProjectionOptions) -> Result<Vec<f64>> {
        let d = self.dim;
        let m = self.len();
        let offsets: Vec<f64> = (0..m).map(|i| self.offset(i, shift)).collect();
        let inside = (0..m).all(|i| dot(&self.normals[i * d..(i + 1) * d], x) <= offsets[i]);
        if inside {
            return Ok(x.to_vec());
        }

        let mut y = x.to_vec();
        let mut increments = vec![0.0; m * d];
        let mut prev = vec![0.0; d];
        let mut trial = vec![0.0; d];
        let mut change = f64::INFINITY;
        for _ in 0..opts.max_sweeps {
            prev.copy_from_slice(&y);
            for i in 0..m {
                let n = &self.normals[i * d..(i + 1) * d];
                let inc = &mut increments[i * d..(i + 1) * d];
                for k in 0..d {
                    trial[k] = y[k] + inc[k];
                }
                let excess = dot(n, &trial) - offsets[i];
                for k in 0..d {
                    let projected = if excess > 0.0 { trial[k] - excess * n[k] } else { trial[k] };
                    inc[k] = trial[k] - projected;
                    y[k] = projected;
                }
            }
            change = prev.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if change < opts.tol {
                return Ok(y);
            }
        }
        Err(Error::PolytopeNonConvergence { sweeps: opts.max_sweeps, last_change: change })
    }
}

/// The recession cone `{d : N d <= 0}` is `{0}` iff the normals have full
/// rank and no extreme ray exists. Candidate rays are orthogonal to `dim - 1`
/// of the normals.
fn recession_cone_is_trivial(normals: &[f64], m: usize, dim: usize) -> bool {
    if rank(normals, m, dim, 1e-12) < dim {
        return false;
    }
    let feasible_ray = |d: &[f64]| (0..m).all(|i| dot(&normals[i * dim..(i + 1) * dim], d) <= 1e-12);
    if dim == 1 {
        return !feasible_ray(&[1.0]) && !feasible_ray(&[-1.0]);
    }
    let mut rows = vec![0.0; (dim - 1) * dim];
    for subset in Combinations::new(m, dim - 1) {
        for (r, &i) in subset.iter().enumerate() {
            rows[r * dim..(r + 1) * dim].copy_from_slice(&normals[i * dim..(i + 1) * dim]);
        }
        if let Some(mut d) = orthogonal_direction(&rows, dim - 1, dim) {
            if feasible_ray(&d) {
                return false;
            }
            d.iter_mut().for_each(|x| *x = -*x);
            if feasible_ray(&d) {
                return false;
            }
        }
    }
    true
}

fn enumerate_vertices(normals: &[f64], offsets: &[f64], dim: usize) -> Vec<f64> {
    let m = offsets.len();
    let mut out: Vec<f64> = Vec::new();
    let mut a = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    for subset in Combinations::new(m, dim) {
        for (r, &i) in subset.iter().enumerate() {
            a[r * dim..(r + 1) * dim].copy_from_slice(&normals[i * dim..(i + 1) * dim]);
            b[r] = offsets[i];
        }
        if solve(&mut a, &mut b).is_none() {
            continue;
        }
        let feasible = (0..m).all(|i| dot(&normals[i * dim..(i + 1) * dim], &b) <= offsets[i] + 1e-9);
        let duplicate = out
            .chunks_exact(dim)
            .any(|v| v.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs())));
        if feasible && !duplicate {
            out.extend_from_slice(&b);
        }
    }
    out
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    }
}
