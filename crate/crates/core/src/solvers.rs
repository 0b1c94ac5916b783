//! Trajectory-producing schemes for sweeping processes.
//!
//! Every scheme stores the state as `X = H + Y`, where `H` is the
//! perturbation and `Y` the reflected part produced by the projection
//! recursion `Y_{k+1} = p_{C(t_{k+1}) - H(t_{k+1})}(Y_k)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::geometry::MovingConvexSet;
use crate::path::{Grid, SamplePath};
use crate::rough::{compose_controlled, rough_integral, young_integral, ControlledPath, RoughLift};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    CatchingUp,
    Skorokhod,
    Euler,
    PicardYoung,
    PicardRough,
}

impl Scheme {
    pub const ALL: [Scheme; 5] =
        [Scheme::CatchingUp, Scheme::Skorokhod, Scheme::Euler, Scheme::PicardYoung, Scheme::PicardRough];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::CatchingUp => "catching_up",
            Scheme::Skorokhod => "skorokhod",
            Scheme::Euler => "euler",
            Scheme::PicardYoung => "picard_young",
            Scheme::PicardRough => "picard_rough",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepingRun {
    pub scheme: Scheme,
    pub x: SamplePath,
    pub h: SamplePath,
    pub y: SamplePath,
    /// Picard sweeps performed; zero for direct schemes.
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm change of the last Picard sweep; zero for direct schemes.
    pub last_gap: f64,
}

impl SweepingRun {
    pub fn grid(&self) -> &Grid {
        self.x.grid()
    }

    /// `X == H + Y` entrywise, compared bitwise.
    pub fn identity_holds(&self) -> bool {
        self.x
            .values()
            .iter()
            .zip(self.h.values().iter().zip(self.y.values()))
            .all(|(x, (h, y))| *x == h + y)
    }
}

/// Stopping rule and initialization for the Picard schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub init: PicardInit,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200, init: PicardInit::CatchingUp }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardInit {
    /// `X_0` is the unperturbed catching-up trajectory.
    CatchingUp,
    /// `X_0 ≡ a`.
    Constant,
}

fn check_start(m: &MovingConvexSet, a: &[f64]) -> Result<()> {
    if a.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: a.len() });
    }
    let distance = m.distance_at(0.0, a)?;
    if distance > m.projection().tol {
        return Err(Error::InfeasibleStart { distance });
    }
    Ok(())
}

fn assemble(scheme: Scheme, h: SamplePath, y: SamplePath) -> SweepingRun {
    let x_values: Vec<f64> = h.values().iter().zip(y.values()).map(|(h, y)| h + y).collect();
    let x = SamplePath::new(h.grid().clone(), h.dim(), x_values).expect("same shape as h");
    SweepingRun { scheme, x, h, y, iterations: 0, converged: true, last_gap: 0.0 }
}

/// Reflected part for a given perturbation; `h(0)` must vanish.
fn reflect(m: &MovingConvexSet, a: &[f64], h: &SamplePath) -> Result<SamplePath> {
    let e = m.dim();
    let times = h.grid().times();
    let mut y = vec![0.0; times.len() * e];
    y[..e].copy_from_slice(a);
    for k in 0..times.len() - 1 {
        let next = m.at_minus(times[k + 1], h.at(k + 1)).project_with(&y[k * e..(k + 1) * e], m.projection())?;
        y[(k + 1) * e..(k + 2) * e].copy_from_slice(&next);
    }
    SamplePath::new(h.grid().clone(), e, y)
}

/// `Y_0 = a`, `Y_{k+1} = p_{C(t_{k+1})}(Y_k)`, `H ≡ 0`.
pub fn catching_up(m: &MovingConvexSet, a: &[f64], grid: &Grid) -> Result<SweepingRun> {
    check_start(m, a)?;
    let h = SamplePath::zeros(grid.clone(), m.dim());
    let y = reflect(m, a, &h)?;
    Ok(assemble(Scheme::CatchingUp, h, y))
}

/// Discrete Skorokhod decomposition `X = h + w` with
/// `w_{k+1} = p_{C(t_{k+1}) - h(t_{k+1})}(w_k)`.
pub fn skorokhod_decompose(m: &MovingConvexSet, a: &[f64], h: &SamplePath) -> Result<SweepingRun> {
    if h.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: h.dim() });
    }
    if h.at(0).iter().any(|&v| v != 0.0) {
        return Err(Error::UnanchoredPerturbation);
    }
    check_start(m, a)?;
    let y = reflect(m, a, h)?;
    Ok(assemble(Scheme::Skorokhod, h.clone(), y))
}

/// `X_{k+1} = p_{C(t_{k+1})}(X_k + b(X_k) Δt_k + W(t_k, t_{k+1}))` for a
/// drift `b` (a field with one noise column) and an additive signal `W`.
///
/// The recursion runs on `Y = X - H` with
/// `H(t_k) = Σ_{i<k} b(X_i) Δt_i + W(t_k)`, which is the same map.
pub fn euler_catching_up<F: VectorField + ?Sized>(
    m: &MovingConvexSet,
    a: &[f64],
    drift: &F,
    w: &SamplePath,
) -> Result<SweepingRun> {
    let e = m.dim();
    if drift.state_dim() != e || drift.noise_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: e, found: drift.value_len() });
    }
    if w.dim() != e {
        return Err(Error::DimensionMismatch { expected: e, found: w.dim() });
    }
    if w.at(0).iter().any(|&v| v != 0.0) {
        return Err(Error::UnanchoredPerturbation);
    }
    check_start(m, a)?;
    let times = w.grid().times();
    let n = times.len();
    let mut h = vec![0.0; n * e];
    let mut y = vec![0.0; n * e];
    let mut x = a.to_vec();
    let mut drift_sum = vec![0.0; e];
    let mut b = vec![0.0; e];
    y[..e].copy_from_slice(a);
    for k in 0..n - 1 {
        drift.eval(&x, &mut b);
        let dt = times[k + 1] - times[k];
        let wk = w.at(k + 1);
        for i in 0..e {
            drift_sum[i] += b[i] * dt;
            h[(k + 1) * e + i] = drift_sum[i] + wk[i];
        }
        let hk = &h[(k + 1) * e..(k + 2) * e];
        let next = m.at_minus(times[k + 1], hk).project_with(&y[k * e..(k + 1) * e], m.projection())?;
        for i in 0..e {
            x[i] = hk[i] + next[i];
        }
        y[(k + 1) * e..(k + 2) * e].copy_from_slice(&next);
    }
    let grid = w.grid().clone();
    Ok(assemble(Scheme::Euler, SamplePath::new(grid.clone(), e, h)?, SamplePath::new(grid, e, y)?))
}

fn evaluate_field<F: VectorField + ?Sized>(f: &F, x: &SamplePath) -> SamplePath {
    let len = f.value_len();
    let mut values = vec![0.0; x.len() * len];
    for (k, out) in values.chunks_exact_mut(len).enumerate() {
        f.eval(x.at(k), out);
    }
    SamplePath::new(x.grid().clone(), len, values).expect("consistent sizes")
}

fn check_field<F: VectorField + ?Sized>(m: &MovingConvexSet, f: &F, driver: &SamplePath) -> Result<()> {
    if f.state_dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: f.state_dim() });
    }
    if f.noise_dim() != driver.dim() {
        return Err(Error::DimensionMismatch { expected: driver.dim(), found: f.noise_dim() });
    }
    Ok(())
}

fn initial_guess(m: &MovingConvexSet, a: &[f64], grid: &Grid, init: PicardInit) -> Result<SamplePath> {
    match init {
        PicardInit::CatchingUp => Ok(catching_up(m, a, grid)?.x),
        PicardInit::Constant => {
            check_start(m, a)?;
            Ok(SamplePath::from_fn(grid.clone(), a.len(), |_, out| out.copy_from_slice(a)))
        }
    }
}

fn picard_loop(
    scheme: Scheme,
    m: &MovingConvexSet,
    a: &[f64],
    x0: SamplePath,
    opts: &PicardOptions,
    mut perturbation: impl FnMut(&SamplePath) -> Result<SamplePath>,
) -> Result<SweepingRun> {
    if opts.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1"));
    }
    let mut prev = x0;
    let mut run = None;
    for iteration in 1..=opts.max_iter {
        let h = perturbation(&prev)?;
        let mut next = skorokhod_decompose(m, a, &h)?;
        let gap = next.x.sup_distance(&prev)?;
        next.scheme = scheme;
        next.iterations = iteration;
        next.last_gap = gap;
        next.converged = gap < opts.tol;
        if next.converged {
            return Ok(next);
        }
        prev = next.x.clone();
        run = Some(next);
    }
    Ok(run.expect("at least one iteration"))
}

/// Picard iteration `H_n = ∫ f(X_{n-1}) dz` (left-point Young sums),
/// `X_n = H_n + Y_n` with `Y_n` the reflection of `H_n`.
///
/// Exhausting `max_iter` is not an error: the last iterate is returned with
/// `converged = false`.
pub fn picard_young<F: VectorField + ?Sized>(
    m: &MovingConvexSet,
    a: &[f64],
    f: &F,
    z: &SamplePath,
    opts: &PicardOptions,
) -> Result<SweepingRun> {
    check_field(m, f, z)?;
    let x0 = initial_guess(m, a, z.grid(), opts.init)?;
    picard_loop(Scheme::PicardYoung, m, a, x0, opts, |prev| young_integral(&evaluate_field(f, prev), z))
}

/// Picard iteration with compensated rough sums. At sweep `n` the iterate
/// `X_{n-1}` is controlled with derivative `f(X_{n-2})` (zero on the first
/// sweep), composed with `f` and integrated against the lift.
pub fn picard_rough<F: VectorField + ?Sized>(
    m: &MovingConvexSet,
    a: &[f64],
    f: &F,
    lift: &RoughLift,
    opts: &PicardOptions,
) -> Result<SweepingRun> {
    check_field(m, f, lift.base())?;
    let reference = Arc::new(lift.clone());
    let x0 = initial_guess(m, a, lift.base().grid(), opts.init)?;
    let mut derivative: Option<SamplePath> = None;
    picard_loop(Scheme::PicardRough, m, a, x0, opts, |prev| {
        let controlled = match derivative.take() {
            Some(d) => ControlledPath::new(prev.clone(), d, Arc::clone(&reference))?,
            None => ControlledPath::with_zero_derivative(prev.clone(), Arc::clone(&reference))?,
        };
        let composed = compose_controlled(f, &controlled)?;
        let h = rough_integral(&composed, &reference)?;
        derivative = Some(composed.path().clone());
        Ok(h)
    })
}
