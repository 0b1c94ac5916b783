//! Numerical core for sweeping processes driven by Young and rough signals.
//!
//! The crate is `no_std` with `alloc`. It provides convex constraint sets
//! with projections, sampled paths and p-variation, level-2 lifts with
//! Young and rough integration, fractional Brownian motion sampling, the
//! catching-up family of solvers and diagnostics on their output.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons also reject NaN

extern crate alloc;

pub mod diagnostics;
pub mod error;
pub mod fbm;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod path;
pub mod rough;
pub mod solvers;

pub use error::{Error, Result};
pub use field::{Field, FieldBounds, VectorField};
pub use geometry::{ConvexSet, Halfspace, Motion, MovingConvexSet, ProjectionOptions};
pub use path::{Grid, SamplePath};
pub use rough::{ControlledPath, RoughLift};
pub use solvers::{PicardInit, PicardOptions, Scheme, SweepingRun};
