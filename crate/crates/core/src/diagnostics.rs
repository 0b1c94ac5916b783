//! Post-hoc checks on computed runs.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::geometry::MovingConvexSet;
use crate::linalg::{dist, dot, norm};
use crate::path::{bound_m_nr, bound_m_rho, one_variation, SamplePath, VariationBoundParams};
use crate::solvers::SweepingRun;

/// Largest distance from `X(t_k)` to `C(t_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub max_violation: f64,
    pub worst_index: usize,
}

pub fn feasibility_report(run: &SweepingRun, m: &MovingConvexSet) -> Result<FeasibilityReport> {
    let mut report = FeasibilityReport { max_violation: 0.0, worst_index: 0 };
    for (k, &t) in run.grid().times().iter().enumerate() {
        let d = m.distance_at(t, run.x.at(k))?;
        if d > report.max_violation {
            report = FeasibilityReport { max_violation: d, worst_index: k };
        }
    }
    Ok(report)
}

/// Grid indices `τ_0 = 0 < … < τ_N = n` such that on each window
/// `B(γ(τ_i), R) ⊆ C(u)` and `|H(u) - H(τ_i)| <= R/2` at every grid `u`
/// in `[τ_i, τ_{i+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowDissection {
    pub breakpoints: Vec<usize>,
    pub r_window: f64,
}

impl WindowDissection {
    pub fn n_windows(&self) -> usize {
        self.breakpoints.len() - 1
    }
}

/// Greedy dissection for a fixed `R`, or `None` if some window cannot
/// cover even one step.
pub fn window_dissection(m: &MovingConvexSet, h: &SamplePath, r_window: f64) -> Option<WindowDissection> {
    let times = h.grid().times();
    let last = times.len() - 1;
    let admissible = |start: usize, u: usize, gamma: &[f64]| {
        m.at(times[u]).margin(gamma) >= r_window && dist(h.at(u), h.at(start)) <= 0.5 * r_window
    };
    let mut breakpoints = vec![0];
    let mut start = 0;
    while start < last {
        let gamma = m.gamma(times[start]);
        if !admissible(start, start, &gamma) {
            return None;
        }
        let mut end = start;
        while end < last && admissible(start, end + 1, &gamma) {
            end += 1;
        }
        if end == start {
            return None;
        }
        breakpoints.push(end);
        start = end;
    }
    Some(WindowDissection { breakpoints, r_window })
}

/// Tries `R = r / 2^j` for `j = 0..24` and keeps the dissection with the
/// smallest `N / R`.
pub fn best_window_dissection(m: &MovingConvexSet, h: &SamplePath) -> Option<WindowDissection> {
    let mut best: Option<WindowDissection> = None;
    let mut r_window = m.radius();
    for _ in 0..24 {
        if let Some(d) = window_dissection(m, h, r_window) {
            let score = d.n_windows() as f64 / d.r_window;
            if best.as_ref().is_none_or(|b| score < b.n_windows() as f64 / b.r_window) {
                best = Some(d);
            }
        }
        r_window *= 0.5;
    }
    best
}

/// `sup_k |H(t_k) - H(0)|`, the grid surrogate for the modulus `φ(0, T)`.
pub fn perturbation_oscillation(h: &SamplePath) -> f64 {
    h.points().map(|p| dist(p, h.at(0))).fold(0.0, f64::max)
}

/// Variation-bound parameters for a run: window data from
/// [`best_window_dissection`], `s_init = |a - γ(0)|`, `rho = R/2`.
pub fn variation_params(m: &MovingConvexSet, run: &SweepingRun) -> Option<VariationBoundParams> {
    let dissection = best_window_dissection(m, &run.h)?;
    Some(VariationBoundParams {
        r: m.radius(),
        s_init: dist(run.y.at(0), &m.gamma(0.0)),
        dim: m.dim(),
        n_windows: dissection.n_windows(),
        r_window: dissection.r_window,
        rho: 0.5 * dissection.r_window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariationBound {
    /// `N (|γ|_∞ + |X|_∞ + φ(0,T))^2 / R`.
    Windows { gamma_sup: f64 },
    /// `N sup diam(C)^2 / (2 rho)`.
    Oscillation { diam_sup: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationReport {
    pub y_var: f64,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn variation_bound_check(
    run: &SweepingRun,
    params: &VariationBoundParams,
    which: VariationBound,
) -> Result<VariationReport> {
    let y_var = one_variation(&run.y);
    let bound = match which {
        VariationBound::Windows { gamma_sup } => bound_m_nr(
            params.n_windows,
            params.r_window,
            gamma_sup,
            run.x.sup_norm(),
            perturbation_oscillation(&run.h),
        )?,
        VariationBound::Oscillation { diam_sup } => bound_m_rho(params.n_windows, params.rho, diam_sup)?,
    };
    Ok(VariationReport { y_var, bound, satisfied: y_var <= bound })
}

/// `sup_k |γ(t_k)|` on the run's grid.
pub fn gamma_sup(m: &MovingConvexSet, run: &SweepingRun) -> f64 {
    run.grid().times().iter().map(|&t| norm(&m.gamma(t))).fold(0.0, f64::max)
}

/// Worst defect of `<z, Y(t) - Y(s)> >= ½(|Y(t)|^2 - |Y(s)|^2)` over dyadic
/// windows, for probes `z` lying in `C(τ) - H(τ)` at every grid `τ` of the
/// window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalConeReport {
    /// Largest `½(|Y(t)|^2 - |Y(s)|^2) - <z, Y(t) - Y(s)>`; may be negative.
    pub worst_defect: f64,
    pub worst_window: (usize, usize),
    pub windows: usize,
    pub probes: usize,
    pub tol: f64,
    pub satisfied: bool,
}

/// Probe candidates per window: `γ(τ) - H(τ)` at the first, middle and last
/// point, their offsets by `±r/2` along each axis, and `Y(s)`, `Y(t)`.
/// Candidates outside some `C(τ) - H(τ)` are dropped, so the check is
/// sampled rather than exhaustive.
pub fn normal_cone_check(run: &SweepingRun, m: &MovingConvexSet) -> NormalConeReport {
    let times = run.grid().times();
    let n = times.len() - 1;
    let e = m.dim();
    let y_sup = run.y.sup_norm();
    let tol = 1e-8 * (1.0 + y_sup * y_sup);
    let sets: Vec<_> = (0..=n).map(|k| m.at_minus(times[k], run.h.at(k))).collect();
    let mut report = NormalConeReport {
        worst_defect: f64::NEG_INFINITY,
        worst_window: (0, 0),
        windows: 0,
        probes: 0,
        tol,
        satisfied: true,
    };
    let mut width = 1;
    while width <= n {
        let mut s = 0;
        while s < n {
            let t = (s + width).min(n);
            let mut candidates: Vec<Vec<f64>> = vec![run.y.at(s).to_vec(), run.y.at(t).to_vec()];
            for tau in [s, (s + t) / 2, t] {
                let centre: Vec<f64> = m.gamma(times[tau]).iter().zip(run.h.at(tau)).map(|(g, h)| g - h).collect();
                for i in 0..e {
                    for sign in [-0.5, 0.5] {
                        let mut p = centre.clone();
                        p[i] += sign * m.radius();
                        candidates.push(p);
                    }
                }
                candidates.push(centre);
            }
            let (ys, yt) = (run.y.at(s), run.y.at(t));
            let rhs = 0.5 * (dot(yt, yt) - dot(ys, ys));
            let dy: Vec<f64> = yt.iter().zip(ys).map(|(a, b)| a - b).collect();
            for z in candidates.iter().filter(|z| sets[s..=t].iter().all(|c| c.margin(z) >= 0.0)) {
                let defect = rhs - dot(z, &dy);
                report.probes += 1;
                if defect > report.worst_defect {
                    report.worst_defect = defect;
                    report.worst_window = (s, t);
                }
            }
            report.windows += 1;
            s += width;
        }
        width *= 2;
    }
    report.satisfied = !(report.worst_defect > tol);
    report
}

/// Which windows `[u, v]` a uniqueness functional is maximized over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSampling {
    /// `v = u + 2^j`, every grid anchor `u`.
    Dyadic,
    /// Every pair `u < v`.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessReport {
    pub max_value: f64,
    pub window: (usize, usize),
    /// `1e-6 (1 + |Y|_{1-var} |X|_∞)`, larger of the two runs.
    pub tol: f64,
    pub consistent: bool,
}

/// `max_{u<v} Σ_{u<=k<v} <(X(t_k) - X(u)) - (X*(t_k) - X*(u)), ΔY_k - ΔY*_k>`.
pub fn uniqueness_functional_young(
    a: &SweepingRun,
    b: &SweepingRun,
    sampling: WindowSampling,
) -> Result<UniquenessReport> {
    uniqueness_functional(a, b, None::<(&crate::field::Field, &SamplePath)>, sampling)
}

/// Same pairing with the remainders `R_X(u, t_k) = X(u, t_k) - f(X(u)) z(u, t_k)`
/// in place of the state increments.
pub fn uniqueness_functional_rough<F: VectorField + ?Sized>(
    a: &SweepingRun,
    b: &SweepingRun,
    f: &F,
    z: &SamplePath,
    sampling: WindowSampling,
) -> Result<UniquenessReport> {
    uniqueness_functional(a, b, Some((f, z)), sampling)
}

fn uniqueness_functional<F: VectorField + ?Sized>(
    a: &SweepingRun,
    b: &SweepingRun,
    rough: Option<(&F, &SamplePath)>,
    sampling: WindowSampling,
) -> Result<UniquenessReport> {
    a.x.check_same_grid(&b.x)?;
    if a.x.dim() != b.x.dim() {
        return Err(Error::DimensionMismatch { expected: a.x.dim(), found: b.x.dim() });
    }
    let e = a.x.dim();
    let n = a.x.len();
    // D_k = X_k - X*_k, G_k = Y_k - Y*_k, E_k = ΔY_k - ΔY*_k.
    let diff = |p: &SamplePath, q: &SamplePath, k: usize| -> Vec<f64> {
        p.at(k).iter().zip(q.at(k)).map(|(x, y)| x - y).collect::<Vec<f64>>()
    };
    let step = |k: usize| -> Vec<f64> {
        (0..e).map(|i| (a.y.at(k + 1)[i] - a.y.at(k)[i]) - (b.y.at(k + 1)[i] - b.y.at(k)[i])).collect()
    };
    // Prefix sums over k < v of <D_k, E_k>, E_k, and E_k ⊗ z_k.
    let d_noise = rough.map_or(0, |(_, z)| z.dim());
    if let Some((f, z)) = rough {
        a.x.check_same_grid(z)?;
        if f.state_dim() != e || f.noise_dim() != z.dim() {
            return Err(Error::DimensionMismatch { expected: e, found: f.state_dim() });
        }
    }
    let mut pair = vec![0.0; n];
    let mut g = vec![0.0; n * e];
    let mut outer = vec![0.0; n * e * d_noise];
    for k in 0..n - 1 {
        let ek = step(k);
        pair[k + 1] = pair[k] + dot(&diff(&a.x, &b.x, k), &ek);
        for i in 0..e {
            g[(k + 1) * e + i] = g[k * e + i] + ek[i];
        }
        if let Some((_, z)) = rough {
            let zk = z.at(k);
            let len = e * d_noise;
            for i in 0..e {
                for j in 0..d_noise {
                    outer[(k + 1) * len + i * d_noise + j] = outer[k * len + i * d_noise + j] + ek[i] * zk[j];
                }
            }
        }
    }
    let mut fa = vec![0.0; e * d_noise];
    let mut fb = vec![0.0; e * d_noise];
    let mut value_at = |u: usize, vs: &mut dyn Iterator<Item = usize>, best: &mut (f64, (usize, usize))| {
        let du = diff(&a.x, &b.x, u);
        let m: Vec<f64> = match rough {
            Some((f, _)) => {
                f.eval(a.x.at(u), &mut fa);
                f.eval(b.x.at(u), &mut fb);
                fa.iter().zip(&fb).map(|(x, y)| x - y).collect()
            }
            None => Vec::new(),
        };
        for v in vs {
            let dg: Vec<f64> = (0..e).map(|i| g[v * e + i] - g[u * e + i]).collect();
            let mut value = (pair[v] - pair[u]) - dot(&du, &dg);
            if let Some((_, z)) = rough {
                let len = e * d_noise;
                let zu = z.at(u);
                for i in 0..e {
                    for j in 0..d_noise {
                        let mij = m[i * d_noise + j];
                        let sum_ez = outer[v * len + i * d_noise + j] - outer[u * len + i * d_noise + j];
                        value -= mij * (sum_ez - zu[j] * dg[i]);
                    }
                }
            }
            if value > best.0 {
                *best = (value, (u, v));
            }
        }
    };
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for u in 0..n - 1 {
        match sampling {
            WindowSampling::Dyadic => {
                let mut it = core::iter::successors(Some(1usize), |w| w.checked_mul(2))
                    .map(|w| u + w)
                    .take_while(|&v| v < n);
                value_at(u, &mut it, &mut best);
            }
            WindowSampling::All => value_at(u, &mut (u + 1..n), &mut best),
        }
    }
    let scale = |r: &SweepingRun| one_variation(&r.y) * r.x.sup_norm();
    let tol = 1e-6 * (1.0 + scale(a).max(scale(b)));
    let max_value = if best.0.is_finite() { best.0 } else { 0.0 };
    Ok(UniquenessReport { max_value, window: best.1, tol, consistent: max_value <= tol })
}

/// Sup gaps between consecutive members of a nested grid ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Coarse size of each compared pair.
    pub grid_sizes: Vec<usize>,
    /// `|X^{n_i} - X^{n_{i+1}}|_∞` at the coarse grid points.
    pub sup_gaps: Vec<f64>,
    /// `sup_gaps[i] / sup_gaps[i-1]`; `None` for the first entry.
    pub ratios: Vec<Option<f64>>,
    /// Negated least-squares slope of `log gap` against `log n`.
    pub empirical_order: Option<f64>,
    pub theory_order: f64,
}

/// `α ∧ 1/q`.
pub fn theory_order(alpha: f64, q: f64) -> f64 {
    alpha.min(1.0 / q)
}

/// Each size must divide the next.
pub fn check_ladder(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() || n_list.contains(&0) || n_list.windows(2).any(|w| w[1] % w[0] != 0) {
        return Err(Error::NonNestedLadder);
    }
    Ok(())
}

/// Report for runs already computed on the grids of `n_list`.
pub fn ladder_report(n_list: &[usize], runs: &[SweepingRun], theory_order: f64) -> Result<ConvergenceReport> {
    check_ladder(n_list)?;
    if runs.len() != n_list.len() {
        return Err(Error::InvalidParameter("one run per ladder member is required"));
    }
    let mut sup_gaps = Vec::with_capacity(n_list.len().saturating_sub(1));
    for (i, pair) in runs.windows(2).enumerate() {
        let stride = n_list[i + 1] / n_list[i];
        let fine = pair[1].x.subsample(stride)?;
        sup_gaps.push(pair[0].x.sup_distance(&fine)?);
    }
    let ratios = (0..sup_gaps.len()).map(|i| if i == 0 { None } else { Some(sup_gaps[i] / sup_gaps[i - 1]) }).collect();
    let grid_sizes = n_list[..sup_gaps.len()].to_vec();
    let empirical_order = fit_order(&grid_sizes, &sup_gaps);
    Ok(ConvergenceReport { grid_sizes, sup_gaps, ratios, empirical_order, theory_order })
}

fn fit_order(sizes: &[usize], gaps: &[f64]) -> Option<f64> {
    if gaps.len() < 2 || gaps.iter().any(|&g| !(g > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(-sxy / sxx)
}

/// Runs `run_at(n)` for each ladder member in order and reports the gaps.
/// `run_at` is expected to restrict one fine driver realization to the
/// grid of size `n`.
pub fn convergence_study(
    n_list: &[usize],
    theory_order: f64,
    mut run_at: impl FnMut(usize) -> Result<SweepingRun>,
) -> Result<ConvergenceReport> {
    check_ladder(n_list)?;
    let runs = n_list.iter().map(|&n| run_at(n)).collect::<Result<Vec<_>>>()?;
    ladder_report(n_list, &runs, theory_order)
}

#[cfg(test)]
mod tests;
