//! Time grids, sampled paths and variation seminorms.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::dist;

/// Strictly increasing times `0 = t_0 < ... < t_n = T` with `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    times: Vec<f64>,
}

impl Grid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid("a grid needs at least two points"));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidGrid("a grid starts at t = 0"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) || !times[times.len() - 1].is_finite() {
            return Err(Error::InvalidGrid("grid times must be finite and strictly increasing"));
        }
        Ok(Self { times })
    }

    /// `n` steps of size `horizon / n`; the last point is exactly `horizon`.
    pub fn uniform(horizon: f64, n: usize) -> Result<Self> {
        if n == 0 || !(horizon > 0.0) {
            return Err(Error::InvalidGrid("uniform grid needs n >= 1 and a positive horizon"));
        }
        let mut times: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
        times[n] = horizon;
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Number of steps.
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn mesh(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Every `stride`-th point; `stride` must divide the step count.
    pub fn subsample(&self, stride: usize) -> Result<Grid> {
        if stride == 0 || !self.steps().is_multiple_of(stride) {
            return Err(Error::NonNestedLadder);
        }
        Ok(Grid { times: self.times.iter().step_by(stride).copied().collect() })
    }
}

/// A path in `R^dim` sampled at the points of a grid, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: Grid,
    dim: usize,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: Grid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("path dimension must be positive"));
        }
        if values.len() != grid.len() * dim {
            return Err(Error::DimensionMismatch { expected: grid.len() * dim, found: values.len() });
        }
        Ok(Self { grid, dim, values })
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        let values = vec![0.0; grid.len() * dim];
        Self { grid, dim, values }
    }

    /// Samples `f` at every grid time.
    pub fn from_fn(grid: Grid, dim: usize, mut f: impl FnMut(f64, &mut [f64])) -> Self {
        let mut values = vec![0.0; grid.len() * dim];
        for (t, row) in grid.times().iter().zip(values.chunks_exact_mut(dim)) {
            f(*t, row);
        }
        Self { grid, dim, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// `x(s, t) = x(t_t) - x(t_s)` for grid indices.
    pub fn increment(&self, s: usize, t: usize) -> Vec<f64> {
        self.at(t).iter().zip(self.at(s)).map(|(b, a)| b - a).collect()
    }

    /// Sup norm over the grid.
    pub fn sup_norm(&self) -> f64 {
        self.points().map(crate::linalg::norm).fold(0.0, f64::max)
    }

    /// `max_k |self(t_k) - other(t_k)|`.
    pub fn sup_distance(&self, other: &SamplePath) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.points().zip(other.points()).map(|(a, b)| dist(a, b)).fold(0.0, f64::max))
    }

    /// Keeps every `stride`-th sample.
    pub fn subsample(&self, stride: usize) -> Result<SamplePath> {
        let grid = self.grid.subsample(stride)?;
        let values = self.points().step_by(stride).flat_map(|p| p.iter().copied()).collect();
        SamplePath::new(grid, self.dim, values)
    }

    /// Keeps the listed coordinates, in order.
    pub fn select(&self, coords: &[usize]) -> Result<SamplePath> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: bad + 1 });
        }
        let values = self.points().flat_map(|p| coords.iter().map(move |&c| p[c])).collect();
        SamplePath::new(self.grid.clone(), coords.len(), values)
    }

    pub(crate) fn check_same_grid(&self, other: &SamplePath) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Optimal dissection for the p-variation over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PVariation {
    pub value: f64,
    /// Grid indices of a maximizing dissection, endpoints included.
    pub dissection: Vec<usize>,
}

/// Exact p-variation over the grid window `[s, t]` of a two-parameter
/// function given through its norms `incr(i, j)`, `i < j`.
///
/// `best(j) = max_{s <= i < j} best(i) + incr(i, j)^p`; `O(m^2)` in the
/// window length.
pub fn p_variation_by(
    s: usize,
    t: usize,
    p: f64,
    mut incr: impl FnMut(usize, usize) -> f64,
) -> Result<PVariation> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if s >= t {
        return Err(Error::InvalidParameter("p-variation window needs s < t"));
    }
    let m = t - s + 1;
    let mut best = vec![0.0f64; m];
    let mut prev = vec![0usize; m];
    for j in 1..m {
        let mut top = f64::NEG_INFINITY;
        let mut arg = 0;
        for i in 0..j {
            let v = best[i] + incr(s + i, s + j).powf(p);
            if v > top {
                top = v;
                arg = i;
            }
        }
        best[j] = top;
        prev[j] = arg;
    }
    let mut dissection = vec![t];
    let mut j = m - 1;
    while j > 0 {
        j = prev[j];
        dissection.push(s + j);
    }
    dissection.reverse();
    Ok(PVariation { value: best[m - 1].powf(1.0 / p), dissection })
}

/// `||x||_{p-var, s, t}` over grid indices `s < t`.
pub fn p_variation(x: &SamplePath, p: f64, s: usize, t: usize) -> Result<f64> {
    p_variation_full(x, p, s, t).map(|v| v.value)
}

pub fn p_variation_full(x: &SamplePath, p: f64, s: usize, t: usize) -> Result<PVariation> {
    if t >= x.len() {
        return Err(Error::InvalidParameter("p-variation window exceeds the grid"));
    }
    if p == 1.0 {
        // Consecutive increments are optimal for p = 1 by the triangle inequality.
        let value = (s..t).map(|k| dist(x.at(k), x.at(k + 1))).sum();
        return Ok(PVariation { value, dissection: (s..=t).collect() });
    }
    p_variation_by(s, t, p, |i, j| dist(x.at(i), x.at(j)))
}

/// Total variation over the whole grid.
pub fn one_variation(x: &SamplePath) -> f64 {
    x.points().zip(x.points().skip(1)).map(|(a, b)| dist(a, b)).sum()
}

/// Worst super-additivity defect of a sampled two-parameter function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperadditivityReport {
    /// `max(w(s,u) + w(u,t) - w(s,t))` over grid triples, clamped at zero.
    pub worst_violation: f64,
    pub worst_triple: Option<(usize, usize, usize)>,
    pub tol: f64,
    pub satisfied: bool,
}

/// Checks `w(s,u) + w(u,t) <= w(s,t) + tol` for every grid triple
/// `s <= u <= t` among `n` grid points, with
/// `tol = 1e-12 (1 + |w(0, n-1)|)`. Cubic in `n`.
pub fn check_control_superadditive(n: usize, w: impl Fn(usize, usize) -> f64) -> SuperadditivityReport {
    let mut table = vec![0.0; n * n];
    for s in 0..n {
        for t in s..n {
            table[s * n + t] = w(s, t);
        }
    }
    let tol = 1e-12 * (1.0 + table[n - 1].abs());
    let mut worst = 0.0;
    let mut worst_triple = None;
    for s in 0..n {
        for u in s..n {
            for t in u..n {
                let defect = table[s * n + u] + table[u * n + t] - table[s * n + t];
                if defect > worst {
                    worst = defect;
                    worst_triple = Some((s, u, t));
                }
            }
        }
    }
    SuperadditivityReport { worst_violation: worst, worst_triple, tol, satisfied: worst <= tol }
}

/// `l(s, S)`: bound on the variation of a catching-up trajectory started at
/// distance `S` from the centre of an interior ball of radius `s`.
pub fn valadier_l(s: f64, big_s: f64, dim: usize) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter("interior radius s must be positive"));
    }
    Ok(if dim > 1 { ((big_s * big_s - s * s) / (2.0 * s)).max(0.0) } else { (big_s - s).max(0.0) })
}

/// `N sup diam(C)^2 / (2 rho)`.
pub fn bound_m_rho(n_windows: usize, rho: f64, diam_sup: f64) -> Result<f64> {
    if n_windows == 0 || !(rho > 0.0) {
        return Err(Error::InvalidParameter("need N >= 1 and rho > 0"));
    }
    Ok(n_windows as f64 * diam_sup * diam_sup / (2.0 * rho))
}

/// `N (|gamma|_inf + sup |X|_inf + phi(0,T))^2 / R`.
pub fn bound_m_nr(n_windows: usize, r_window: f64, gamma_sup: f64, x_sup: f64, phi_t: f64) -> Result<f64> {
    if n_windows == 0 || !(r_window > 0.0) {
        return Err(Error::InvalidParameter("need N >= 1 and R > 0"));
    }
    let s = gamma_sup + x_sup + phi_t;
    Ok(n_windows as f64 * s * s / r_window)
}

/// Parameters of the variation bounds on the reflection term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationBoundParams {
    /// Interior radius for the catching-up bound.
    pub r: f64,
    /// Initial distance to the interior-ball centre.
    pub s_init: f64,
    pub dim: usize,
    /// Number of interior-ball windows.
    pub n_windows: usize,
    /// Window radius.
    pub r_window: f64,
    /// Oscillation bound on the perturbation.
    pub rho: f64,
}
