//! Vector fields `f: R^e -> M_{e,d}` with their Jacobians.
//!
//! Values are flattened row-major (`i * d + j`); Jacobians are
//! `(e * d) x e` with entry `(i * d + j) * e + l` holding `d f_ij / d x_l`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Declared global bounds, all in Frobenius norms of the flattened arrays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldBounds {
    pub sup_value: f64,
    pub sup_jacobian: f64,
    pub lip_jacobian: f64,
}

impl FieldBounds {
    /// Lipschitz-type norm `max(sup |Df|, Lip(Df))`.
    pub fn lip_norm(&self) -> f64 {
        self.sup_jacobian.max(self.lip_jacobian)
    }
}

pub trait VectorField {
    fn state_dim(&self) -> usize;
    fn noise_dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);
    fn jacobian(&self, x: &[f64], out: &mut [f64]);
    fn bounds(&self) -> FieldBounds;

    fn value_len(&self) -> usize {
        self.state_dim() * self.noise_dim()
    }

    fn is_constant(&self) -> bool {
        false
    }
}

/// Named builtin fields.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Zero { e: usize, d: usize },
    Constant { e: usize, d: usize, matrix: Vec<f64> },
    /// `offset + slope . x`.
    Affine { e: usize, d: usize, offset: Vec<f64>, slope: Vec<f64> },
    /// `f_ij(x) = amplitude_ij cos(<wave, x> + phase)`.
    Cosine { e: usize, d: usize, amplitude: Vec<f64>, wave: Vec<f64>, phase: f64 },
}

impl Field {
    pub fn zero(e: usize, d: usize) -> Self {
        Field::Zero { e, d }
    }

    pub fn constant(e: usize, d: usize, matrix: Vec<f64>) -> Result<Self> {
        check_len(matrix.len(), e * d)?;
        Ok(Field::Constant { e, d, matrix })
    }

    pub fn affine(e: usize, d: usize, offset: Vec<f64>, slope: Vec<f64>) -> Result<Self> {
        check_len(offset.len(), e * d)?;
        check_len(slope.len(), e * d * e)?;
        Ok(Field::Affine { e, d, offset, slope })
    }

    pub fn cosine(e: usize, d: usize, amplitude: Vec<f64>, wave: Vec<f64>, phase: f64) -> Result<Self> {
        check_len(amplitude.len(), e * d)?;
        check_len(wave.len(), e)?;
        Ok(Field::Cosine { e, d, amplitude, wave, phase })
    }

    /// Drift `b` in `R^e` paired with a constant diffusion `sigma` in
    /// `M_{e,d}`, acting on the time-space signal `(t, B)`:
    /// `f(x) (u, v) = b(x) u + sigma v` where `b(x) = b0 + B1 x`.
    pub fn time_space_affine(e: usize, d: usize, b0: &[f64], b1: &[f64], sigma: &[f64]) -> Result<Self> {
        check_len(b0.len(), e)?;
        check_len(b1.len(), e * e)?;
        check_len(sigma.len(), e * d)?;
        let cols = d + 1;
        let mut offset = vec![0.0; e * cols];
        let mut slope = vec![0.0; e * cols * e];
        for i in 0..e {
            offset[i * cols] = b0[i];
            offset[i * cols + 1..(i + 1) * cols].copy_from_slice(&sigma[i * d..(i + 1) * d]);
            slope[(i * cols) * e..(i * cols + 1) * e].copy_from_slice(&b1[i * e..(i + 1) * e]);
        }
        Self::affine(e, cols, offset, slope)
    }
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl VectorField for Field {
    fn state_dim(&self) -> usize {
        match self {
            Field::Zero { e, .. } | Field::Constant { e, .. } | Field::Affine { e, .. } | Field::Cosine { e, .. } => *e,
        }
    }

    fn noise_dim(&self) -> usize {
        match self {
            Field::Zero { d, .. } | Field::Constant { d, .. } | Field::Affine { d, .. } | Field::Cosine { d, .. } => *d,
        }
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Field::Zero { .. } => out.fill(0.0),
            Field::Constant { matrix, .. } => out.copy_from_slice(matrix),
            Field::Affine { e, offset, slope, .. } => {
                for (v, o) in out.iter_mut().enumerate() {
                    *o = offset[v] + dot(&slope[v * e..(v + 1) * e], x);
                }
            }
            Field::Cosine { amplitude, wave, phase, .. } => {
                let c = (dot(wave, x) + phase).cos();
                out.iter_mut().zip(amplitude).for_each(|(o, a)| *o = a * c);
            }
        }
    }

    fn jacobian(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Field::Zero { .. } | Field::Constant { .. } => out.fill(0.0),
            Field::Affine { slope, .. } => out.copy_from_slice(slope),
            Field::Cosine { e, amplitude, wave, phase, .. } => {
                let s = -(dot(wave, x) + phase).sin();
                for (v, a) in amplitude.iter().enumerate() {
                    for l in 0..*e {
                        out[v * e + l] = a * s * wave[l];
                    }
                }
            }
        }
    }

    fn bounds(&self) -> FieldBounds {
        match self {
            Field::Zero { .. } => FieldBounds { sup_value: 0.0, sup_jacobian: 0.0, lip_jacobian: 0.0 },
            Field::Constant { matrix, .. } => {
                FieldBounds { sup_value: norm(matrix), sup_jacobian: 0.0, lip_jacobian: 0.0 }
            }
            Field::Affine { offset, slope, .. } => {
                let sup_value = if slope.iter().all(|&s| s == 0.0) { norm(offset) } else { f64::INFINITY };
                FieldBounds { sup_value, sup_jacobian: norm(slope), lip_jacobian: 0.0 }
            }
            Field::Cosine { amplitude, wave, .. } => {
                let a = norm(amplitude);
                let w = norm(wave);
                FieldBounds { sup_value: a, sup_jacobian: a * w, lip_jacobian: a * w * w }
            }
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Field::Zero { .. } | Field::Constant { .. } => true,
            Field::Affine { slope, .. } => slope.iter().all(|&s| s == 0.0),
            Field::Cosine { amplitude, wave, .. } => {
                amplitude.iter().all(|&a| a == 0.0) || wave.iter().all(|&w| w == 0.0)
            }
        }
    }
}

/// Finite-difference probe of a field's Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianCheck {
    pub max_error: f64,
    pub step: f64,
    /// `max_error <= step (1 + Lip(Df)) + 1e-9`.
    pub consistent: bool,
}

/// Compares forward differences with the declared Jacobian at 32 random
/// points of the ball `B(center, radius)` along random unit directions,
/// with step `1e-5`.
pub fn check_jacobian<F: VectorField + ?Sized>(field: &F, center: &[f64], radius: f64, seed: u64) -> JacobianCheck {
    const PROBES: usize = 32;
    const STEP: f64 = 1e-5;
    let e = field.state_dim();
    let len = field.value_len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let (mut f0, mut f1, mut jac) = (vec![0.0; len], vec![0.0; len], vec![0.0; len * e]);
    let mut worst: f64 = 0.0;
    for _ in 0..PROBES {
        let offset = gaussian(e);
        let scale = radius / (1.0 + norm(&offset));
        let x: Vec<f64> = center.iter().zip(&offset).map(|(c, o)| c + scale * o).collect();
        let mut dir = gaussian(e);
        let n = norm(&dir).max(1e-300);
        dir.iter_mut().for_each(|v| *v /= n);
        let shifted: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + STEP * b).collect();
        field.eval(&x, &mut f0);
        field.eval(&shifted, &mut f1);
        field.jacobian(&x, &mut jac);
        let err = (0..len)
            .map(|v| {
                let fd = (f1[v] - f0[v]) / STEP;
                let an = dot(&jac[v * e..(v + 1) * e], &dir);
                (fd - an) * (fd - an)
            })
            .sum::<f64>()
            .sqrt();
        worst = worst.max(err);
    }
    let lip = field.bounds().lip_jacobian;
    JacobianCheck { max_error: worst, step: STEP, consistent: worst <= STEP * (1.0 + lip) + 1e-9 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_jacobians_match_differences() {
        let fields = [
            Field::zero(2, 3),
            Field::constant(1, 2, vec![0.3, -0.1]).unwrap(),
            Field::affine(2, 1, vec![0.1, 0.2], vec![1.0, -0.5, 0.25, 2.0]).unwrap(),
            Field::cosine(2, 2, vec![0.2, 0.1, -0.3, 0.05], vec![1.0, -2.0], 0.4).unwrap(),
        ];
        for f in &fields {
            let c = vec![0.3; f.state_dim()];
            let check = check_jacobian(f, &c, 1.0, 11);
            assert!(check.consistent, "{f:?}: {check:?}");
        }
    }

    #[test]
    fn wrong_jacobian_is_detected() {
        struct Bad;
        impl VectorField for Bad {
            fn state_dim(&self) -> usize { 1 }
            fn noise_dim(&self) -> usize { 1 }
            fn eval(&self, x: &[f64], out: &mut [f64]) { out[0] = x[0] * x[0]; }
            fn jacobian(&self, x: &[f64], out: &mut [f64]) { out[0] = x[0]; }
            fn bounds(&self) -> FieldBounds {
                FieldBounds { sup_value: f64::INFINITY, sup_jacobian: f64::INFINITY, lip_jacobian: 2.0 }
            }
        }
        assert!(!check_jacobian(&Bad, &[1.0], 0.5, 3).consistent);
    }

    #[test]
    fn time_space_layout() {
        // b(x) = -x, sigma = 0.3 in one dimension: f(x) = [-x, 0.3].
        let f = Field::time_space_affine(1, 1, &[0.0], &[-1.0], &[0.3]).unwrap();
        let mut out = [0.0; 2];
        f.eval(&[2.0], &mut out);
        assert_eq!(out, [-2.0, 0.3]);
        assert_eq!(f.noise_dim(), 2);
    }
}
