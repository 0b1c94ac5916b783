//! Turns a parsed config into core objects and runs the selected scheme.

use std::path::Path;

use sweep_core::fbm::{build_time_space_signal, FbmSampler, FbmSpec};
use sweep_core::solvers::{self, Scheme, SweepingRun};
use sweep_core::{ConvexSet, Field, Grid, Halfspace, Motion, MovingConvexSet, ProjectionOptions, RoughLift, SamplePath};

use crate::config::{DriverSpec, ExperimentConfig, FieldSpec, MotionSpec, SetFamily};
use crate::csvio;
use crate::error::{invalid, CliError};

/// Sorts core errors into solver failures (exit 3) and bad input (exit 2).
pub fn classify(e: sweep_core::Error) -> CliError {
    use sweep_core::Error as E;
    match e {
        E::InfeasibleStart { .. } | E::NoConvergence { .. } | E::PolytopeNonConvergence { .. } => CliError::Solver(e),
        other => invalid(other),
    }
}

pub fn build_set(cfg: &ExperimentConfig) -> Result<MovingConvexSet, CliError> {
    let s = &cfg.set;
    let base = match &s.family {
        SetFamily::Ball { center, radius } => ConvexSet::ball(center.clone(), *radius),
        SetFamily::Box { lower, upper } => {
            ConvexSet::cuboid(lower.iter().map(|v| v.0).collect(), upper.iter().map(|v| v.0).collect())
        }
        SetFamily::Polytope { halfspaces } => halfspaces
            .iter()
            .map(|h| Halfspace::new(h.normal.clone(), h.offset))
            .collect::<Result<Vec<_>, _>>()
            .and_then(ConvexSet::polytope),
    }
    .map_err(invalid)?;
    let motion = match &s.motion {
        MotionSpec::Static => Motion::Static,
        MotionSpec::Linear { velocity } => Motion::Linear { velocity: velocity.clone() },
        MotionSpec::Oscillating { amplitude, frequency } => {
            Motion::Oscillating { amplitude: amplitude.clone(), frequency: *frequency }
        }
    };
    let mut m = MovingConvexSet::new(base, motion, s.gamma.clone(), s.r).map_err(invalid)?;
    if let Some(h) = s.hoelder {
        m = m.with_hoelder(h.k, h.alpha).map_err(invalid)?;
    }
    let tol = &cfg.tolerances;
    Ok(m.with_projection(ProjectionOptions { tol: tol.proj_tol, max_sweeps: tol.max_sweeps }))
}

/// Samples the configured driver on a grid of `n` steps over `[0, horizon]`.
/// CSV drivers bring their own grid.
pub fn sample_driver(cfg: &ExperimentConfig, n: usize, base_dir: &Path) -> Result<Option<SamplePath>, CliError> {
    let Some(spec) = &cfg.driver else { return Ok(None) };
    let path = match spec {
        DriverSpec::Analytic { slope, amplitude, frequency } => {
            let dims = slope.len();
            let zeros = vec![0.0; dims];
            let amplitude = amplitude.as_ref().unwrap_or(&zeros);
            if dims == 0 || amplitude.len() != dims {
                return Err(CliError::config("analytic driver needs matching non-empty slope and amplitude"));
            }
            let grid = Grid::uniform(cfg.horizon, n).map_err(invalid)?;
            let w = 2.0 * std::f64::consts::PI * frequency;
            SamplePath::from_fn(grid, dims, |t, out| {
                let s = (w * t).sin();
                for i in 0..dims {
                    out[i] = slope[i] * t + amplitude[i] * s;
                }
            })
        }
        DriverSpec::Fbm { hurst, dims, method } => {
            let spec = FbmSpec::new(*hurst, cfg.horizon, n, *dims, cfg.seed).map_err(invalid)?;
            FbmSampler::new(spec, (*method).into()).map_err(invalid)?.sample()
        }
        DriverSpec::Csv { path, columns } => {
            let resolved = base_dir.join(path);
            csvio::read_path(&resolved, Some(columns))?
        }
    };
    Ok(Some(path))
}

/// A configured problem with its driver sampled on the finest grid.
#[derive(Debug, Clone)]
pub struct Problem {
    pub config: ExperimentConfig,
    pub set: MovingConvexSet,
    pub grid: Grid,
    pub driver: Option<SamplePath>,
}

impl Problem {
    /// `base_dir` resolves relative CSV driver paths.
    pub fn new(config: ExperimentConfig, n: usize, base_dir: &Path) -> Result<Self, CliError> {
        let set = build_set(&config)?;
        if config.initial.len() != set.dim() {
            return Err(CliError::config(format!(
                "initial point has {} coordinates, the set lives in dimension {}",
                config.initial.len(),
                set.dim()
            )));
        }
        let driver = sample_driver(&config, n, base_dir)?;
        let grid = match &driver {
            Some(d) => d.grid().clone(),
            None => Grid::uniform(config.horizon, n).map_err(invalid)?,
        };
        Ok(Self { config, set, grid, driver })
    }

    pub fn from_config(config: ExperimentConfig, base_dir: &Path) -> Result<Self, CliError> {
        let n = config.n;
        Self::new(config, n, base_dir)
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    pub fn solve(&self) -> Result<SweepingRun, CliError> {
        self.solve_strided(1)
    }

    /// Solves on every `stride`-th point of the sampled grid.
    pub fn solve_strided(&self, stride: usize) -> Result<SweepingRun, CliError> {
        let grid = self.grid.subsample(stride).map_err(invalid)?;
        let driver = match &self.driver {
            Some(d) => Some(d.subsample(stride).map_err(invalid)?),
            None => None,
        };
        solve_on(&self.config, &self.set, &grid, driver.as_ref())
    }
}

fn zero_driver(grid: &Grid, dim: usize) -> SamplePath {
    SamplePath::zeros(grid.clone(), dim)
}

/// Dispatches one scheme on a fixed grid and driver.
pub fn solve_on(
    cfg: &ExperimentConfig,
    m: &MovingConvexSet,
    grid: &Grid,
    driver: Option<&SamplePath>,
) -> Result<SweepingRun, CliError> {
    let e = m.dim();
    let a = &cfg.initial;
    let field = cfg.field.clone().unwrap_or(FieldSpec::Zero);
    let opts = cfg.picard_options();
    let run = match cfg.scheme() {
        Scheme::CatchingUp => solvers::catching_up(m, a, grid),
        Scheme::Skorokhod => {
            let h = driver.ok_or_else(|| CliError::config("skorokhod needs a driver"))?;
            solvers::skorokhod_decompose(m, a, h)
        }
        Scheme::Euler => {
            let (drift, w) = match &field {
                FieldSpec::TimeSpace { b0, b1, sigma } => {
                    let b = driver.ok_or_else(|| CliError::config("time_space field needs a driver"))?;
                    let drift = Field::affine(e, 1, b0.clone(), b1.clone()).map_err(invalid)?;
                    (drift, scaled(sigma, b, e)?)
                }
                other => {
                    let w = driver.cloned().unwrap_or_else(|| zero_driver(grid, e));
                    (build_field(other, e, 1)?, w)
                }
            };
            solvers::euler_catching_up(m, a, &drift, &w)
        }
        scheme @ (Scheme::PicardYoung | Scheme::PicardRough) => {
            let driver = driver.ok_or_else(|| CliError::config("picard schemes need a driver"))?;
            let (f, z) = match &field {
                FieldSpec::TimeSpace { b0, b1, sigma } => {
                    let f = Field::time_space_affine(e, driver.dim(), b0, b1, sigma).map_err(invalid)?;
                    (f, build_time_space_signal(driver))
                }
                other => (build_field(other, e, driver.dim())?, driver.clone()),
            };
            if scheme == Scheme::PicardYoung {
                solvers::picard_young(m, a, &f, &z, &opts)
            } else {
                solvers::picard_rough(m, a, &f, &RoughLift::piecewise_linear(z), &opts)
            }
        }
    };
    run.map_err(classify)
}

pub fn build_field(spec: &FieldSpec, e: usize, d: usize) -> Result<Field, CliError> {
    match spec {
        FieldSpec::Zero => Ok(Field::zero(e, d)),
        FieldSpec::Constant { matrix } => Field::constant(e, d, matrix.clone()),
        FieldSpec::Linear { offset, slope } => Field::affine(e, d, offset.clone(), slope.clone()),
        FieldSpec::ScalarTrig { amplitude, wave, phase } => Field::cosine(e, d, amplitude.clone(), wave.clone(), *phase),
        FieldSpec::TimeSpace { .. } => Err(sweep_core::Error::InvalidParameter(
            "time_space fields are only used by euler and picard schemes",
        )),
    }
    .map_err(invalid)
}

/// `sigma B` with `sigma` row-major `e x d`.
fn scaled(sigma: &[f64], b: &SamplePath, e: usize) -> Result<SamplePath, CliError> {
    let d = b.dim();
    if sigma.len() != e * d {
        return Err(invalid(sweep_core::Error::DimensionMismatch { expected: e * d, found: sigma.len() }));
    }
    Ok(SamplePath::from_fn(b.grid().clone(), e, {
        let mut k = 0;
        move |_, out| {
            let p = b.at(k);
            for (i, o) in out.iter_mut().enumerate() {
                *o = sigma[i * d..(i + 1) * d].iter().zip(p).map(|(s, v)| s * v).sum();
            }
            k += 1;
        }
    }))
}

/// Rate `α ∧ 1/q`: `α` from the declared Hölder modulus (1 for Lipschitz
/// motions), `q = 1.01 / H` for fBm drivers and 1 otherwise.
pub fn theory_order(cfg: &ExperimentConfig) -> f64 {
    let alpha = cfg.set.hoelder.map_or(1.0, |h| h.alpha);
    let q = match &cfg.driver {
        Some(DriverSpec::Fbm { hurst, .. }) => 1.01 / hurst,
        _ => 1.0,
    };
    sweep_core::diagnostics::theory_order(alpha, q)
}
