//! Level-2 lifts, Young and rough integrals, controlled paths.
//!
//! Area convention: `Z_{ab}(s, t) = ∫_{s<u<v<t} dz_a(u) dz_b(v)`, stored
//! row-major as a `d x d` block per grid segment.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::linalg::{dot, norm};
use crate::path::{p_variation_by, SamplePath};

#[derive(Debug, Clone, PartialEq)]
pub struct RoughLift {
    base: SamplePath,
    areas: Vec<f64>,
}

impl RoughLift {
    /// Exact iterated integrals of the linear interpolant:
    /// `Z(t_k, t_{k+1}) = ½ Δz_k ⊗ Δz_k`.
    pub fn piecewise_linear(base: SamplePath) -> Self {
        let d = base.dim();
        let mut areas = Vec::with_capacity(base.grid().steps() * d * d);
        for k in 0..base.grid().steps() {
            let dz = base.increment(k, k + 1);
            for a in 0..d {
                for b in 0..d {
                    areas.push(0.5 * dz[a] * dz[b]);
                }
            }
        }
        Self { base, areas }
    }

    /// Lift from externally computed segment areas.
    pub fn from_parts(base: SamplePath, areas: Vec<f64>) -> Result<Self> {
        let d = base.dim();
        let expected = base.grid().steps() * d * d;
        if areas.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: areas.len() });
        }
        Ok(Self { base, areas })
    }

    pub fn base(&self) -> &SamplePath {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn segment_area(&self, k: usize) -> &[f64] {
        let d2 = self.dim() * self.dim();
        &self.areas[k * d2..(k + 1) * d2]
    }

    /// `Z(t_s, t_t)` by folding Chen's relation over the segments.
    pub fn area(&self, s: usize, t: usize) -> Vec<f64> {
        let d = self.dim();
        let mut acc = vec![0.0; d * d];
        for k in s..t {
            let left = self.base.increment(s, k);
            let dz = self.base.increment(k, k + 1);
            let seg = self.segment_area(k);
            for a in 0..d {
                for b in 0..d {
                    acc[a * d + b] += seg[a * d + b] + left[a] * dz[b];
                }
            }
        }
        acc
    }
}

/// `Z(s,t) = Z(s,u) + Z(u,t) + z(s,u) ⊗ z(u,t)` for grid indices `s <= u <= t`.
pub fn chen_combine(lift: &RoughLift, s: usize, u: usize, t: usize) -> Result<Vec<f64>> {
    if !(s <= u && u <= t) || t >= lift.base.len() {
        return Err(Error::InvalidParameter("chen_combine needs s <= u <= t on the grid"));
    }
    if u == s {
        return Ok(lift.area(s, t));
    }
    let d = lift.dim();
    let (left, right) = (lift.area(s, u), lift.area(u, t));
    let (zl, zr) = (lift.base.increment(s, u), lift.base.increment(u, t));
    let mut out = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            out[a * d + b] = left[a * d + b] + right[a * d + b] + zl[a] * zr[b];
        }
    }
    Ok(out)
}

fn integrand_rows(y_dim: usize, d: usize) -> Result<usize> {
    if !y_dim.is_multiple_of(d) {
        return Err(Error::DimensionMismatch { expected: d, found: y_dim });
    }
    Ok(y_dim / d)
}

/// Running left-point Young integral `∫_0^t y dz` on the common grid of a
/// matrix-valued `y` (flattened `e x d`) and `z` in `R^d`.
pub fn young_integral(y: &SamplePath, z: &SamplePath) -> Result<SamplePath> {
    y.check_same_grid(z)?;
    let d = z.dim();
    let e = integrand_rows(y.dim(), d)?;
    let n = z.len();
    let mut out = vec![0.0; n * e];
    let mut dz = vec![0.0; d];
    for k in 0..n - 1 {
        dz.iter_mut().zip(z.at(k + 1).iter().zip(z.at(k))).for_each(|(o, (b, a))| *o = b - a);
        let yk = y.at(k);
        for i in 0..e {
            out[(k + 1) * e + i] = out[k * e + i] + dot(&yk[i * d..(i + 1) * d], &dz);
        }
    }
    SamplePath::new(z.grid().clone(), e, out)
}

/// Left-point sum over the grid window `[s, t]`.
pub fn young_increment(y: &SamplePath, z: &SamplePath, s: usize, t: usize) -> Result<Vec<f64>> {
    y.check_same_grid(z)?;
    let d = z.dim();
    let e = integrand_rows(y.dim(), d)?;
    let mut acc = vec![0.0; e];
    for k in s..t {
        let dz = z.increment(k, k + 1);
        let yk = y.at(k);
        for i in 0..e {
            acc[i] += dot(&yk[i * d..(i + 1) * d], &dz);
        }
    }
    Ok(acc)
}

/// A path `y` with Gubinelli derivative `y'` with respect to a lift:
/// `y(s,t) = y'(s) z(s,t) + R_y(s,t)`.
///
/// Values have `value_dim` entries; the derivative stores a
/// `value_dim x d` matrix per grid point.
#[derive(Debug, Clone)]
pub struct ControlledPath {
    path: SamplePath,
    derivative: SamplePath,
    reference: Arc<RoughLift>,
}

impl ControlledPath {
    pub fn new(path: SamplePath, derivative: SamplePath, reference: Arc<RoughLift>) -> Result<Self> {
        path.check_same_grid(reference.base())?;
        derivative.check_same_grid(reference.base())?;
        let expected = path.dim() * reference.dim();
        if derivative.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: derivative.dim() });
        }
        Ok(Self { path, derivative, reference })
    }

    /// A path with vanishing derivative, e.g. one of bounded variation.
    pub fn with_zero_derivative(path: SamplePath, reference: Arc<RoughLift>) -> Result<Self> {
        let derivative = SamplePath::zeros(path.grid().clone(), path.dim() * reference.dim());
        Self::new(path, derivative, reference)
    }

    pub fn path(&self) -> &SamplePath {
        &self.path
    }

    pub fn derivative(&self) -> &SamplePath {
        &self.derivative
    }

    pub fn reference(&self) -> &Arc<RoughLift> {
        &self.reference
    }

    /// `R_y(s,t) = y(s,t) - y'(s) z(s,t)`.
    pub fn remainder(&self, s: usize, t: usize) -> Vec<f64> {
        let d = self.reference.dim();
        let dz = self.reference.base().increment(s, t);
        let ds = self.derivative.at(s);
        let mut r = self.path.increment(s, t);
        for (v, rv) in r.iter_mut().enumerate() {
            *rv -= dot(&ds[v * d..(v + 1) * d], &dz);
        }
        r
    }

    /// `||R_y||_{q-var}` over the whole grid.
    pub fn remainder_variation(&self, q: f64) -> Result<f64> {
        let n = self.path.len();
        p_variation_by(0, n - 1, q, |s, t| norm(&self.remainder(s, t))).map(|v| v.value)
    }
}

/// Running compensated left-point sum
/// `Σ y(t_k) z(t_k, t_{k+1}) + y'(t_k) Z(t_k, t_{k+1})`.
pub fn rough_integral(y: &ControlledPath, lift: &RoughLift) -> Result<SamplePath> {
    if !(core::ptr::eq(Arc::as_ptr(&y.reference), lift) || *y.reference == *lift) {
        return Err(Error::ReferenceMismatch);
    }
    let d = lift.dim();
    let e = integrand_rows(y.path.dim(), d)?;
    let z = lift.base();
    let n = z.len();
    let mut out = vec![0.0; n * e];
    let mut dz = vec![0.0; d];
    for k in 0..n - 1 {
        dz.iter_mut().zip(z.at(k + 1).iter().zip(z.at(k))).for_each(|(o, (b, a))| *o = b - a);
        let yk = y.path.at(k);
        let dk = y.derivative.at(k);
        let area = lift.segment_area(k);
        for i in 0..e {
            let first = dot(&yk[i * d..(i + 1) * d], &dz);
            // y'_{(ij)k} Z_{kj}
            let mut second = 0.0;
            for j in 0..d {
                let row = &dk[(i * d + j) * d..(i * d + j + 1) * d];
                for (c, r) in row.iter().enumerate() {
                    second += r * area[c * d + j];
                }
            }
            out[(k + 1) * e + i] = out[k * e + i] + (first + second);
        }
    }
    SamplePath::new(z.grid().clone(), e, out)
}

/// `phi(x)` with derivative `D phi(x) x'`.
pub fn compose_controlled<F: VectorField + ?Sized>(phi: &F, x: &ControlledPath) -> Result<ControlledPath> {
    let e = phi.state_dim();
    if x.path.dim() != e {
        return Err(Error::DimensionMismatch { expected: e, found: x.path.dim() });
    }
    let d = x.reference.dim();
    let vlen = phi.value_len();
    let n = x.path.len();
    let mut values = vec![0.0; n * vlen];
    let mut deriv = vec![0.0; n * vlen * d];
    let mut jac = vec![0.0; vlen * e];
    for k in 0..n {
        let xk = x.path.at(k);
        phi.eval(xk, &mut values[k * vlen..(k + 1) * vlen]);
        phi.jacobian(xk, &mut jac);
        let xd = x.derivative.at(k);
        let out = &mut deriv[k * vlen * d..(k + 1) * vlen * d];
        for v in 0..vlen {
            for c in 0..d {
                out[v * d + c] = (0..e).map(|l| jac[v * e + l] * xd[l * d + c]).sum();
            }
        }
    }
    let grid = x.path.grid().clone();
    ControlledPath::new(
        SamplePath::new(grid.clone(), vlen, values)?,
        SamplePath::new(grid, vlen * d, deriv)?,
        Arc::clone(&x.reference),
    )
}

/// Both sides of `||R_{phi(x)}||_{p/2} <= ½ Lip(Dphi) ||x||_p^2 + sup|Dphi| ||R_x||_{p/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderBound {
    pub lhs: f64,
    pub rhs: f64,
    /// The looser `||phi||_Lip (||x||_p^2 + ||R_x||_{p/2})`.
    pub lip_rhs: f64,
}

impl RemainderBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-14
    }
}

/// Evaluates the composition remainder estimate on a controlled path with
/// the field's declared bounds; `p` in `[2, 3)`.
pub fn remainder_bound<F: VectorField + ?Sized>(phi: &F, x: &ControlledPath, p: f64) -> Result<RemainderBound> {
    if !(2.0..3.0).contains(&p) {
        return Err(Error::InvalidParameter("remainder bound needs p in [2, 3)"));
    }
    let composed = compose_controlled(phi, x)?;
    let lhs = composed.remainder_variation(p / 2.0)?;
    let n = x.path.len();
    let x_var = p_variation_by(0, n - 1, p, |s, t| norm(&x.path.increment(s, t)))?.value;
    let rx = x.remainder_variation(p / 2.0)?;
    let b = phi.bounds();
    Ok(RemainderBound {
        lhs,
        rhs: 0.5 * b.lip_jacobian * x_var * x_var + b.sup_jacobian * rx,
        lip_rhs: b.lip_norm() * (x_var * x_var + rx),
    })
}
