//! Fractional Brownian motion on uniform grids.
//!
//! Randomness comes from `ChaCha20Rng::seed_from_u64(seed)` (rand_chacha
//! 0.9); component `k` of a `d`-dimensional path reads stream `k` of that
//! generator, so components are independent and individually reproducible.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::path::{Grid, SamplePath};

/// Generator tag recorded in output metadata.
pub const RNG_DESCRIPTION: &str = "chacha20/seed_from_u64/stream-per-component";

/// Largest grid accepted by the Cholesky reference sampler.
pub const CHOLESKY_MAX_N: usize = 1024;

/// Above this many steps the Hosking coefficients are recomputed per path
/// instead of being stored.
const HOSKING_STORE_MAX_N: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmSpec {
    pub hurst: f64,
    pub horizon: f64,
    pub n: usize,
    pub dims: usize,
    pub seed: u64,
}

impl FbmSpec {
    pub fn new(hurst: f64, horizon: f64, n: usize, dims: usize, seed: u64) -> Result<Self> {
        if !(hurst > 1.0 / 3.0 && hurst < 1.0) {
            return Err(Error::InvalidParameter("Hurst parameter must lie in (1/3, 1)"));
        }
        if !(horizon > 0.0) || n == 0 || dims == 0 {
            return Err(Error::InvalidParameter("fBm needs T > 0, n >= 1 and d >= 1"));
        }
        Ok(Self { hurst, horizon, n, dims, seed })
    }

    pub fn grid(&self) -> Grid {
        Grid::uniform(self.horizon, self.n).expect("validated spec")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbmMethod {
    /// Durbin-Levinson recursion on the increments, `O(n^2)`.
    Hosking,
    /// Cholesky factor of the full covariance, `O(n^3)`, `n <= 1024`.
    Cholesky,
}

impl FbmMethod {
    pub fn name(self) -> &'static str {
        match self {
            FbmMethod::Hosking => "hosking",
            FbmMethod::Cholesky => "cholesky",
        }
    }
}

/// `½(|t|^{2H} + |s|^{2H} - |t-s|^{2H})`.
pub fn fbm_covariance(s: f64, t: f64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t.abs().powf(h2) + s.abs().powf(h2) - (t - s).abs().powf(h2))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Reusable sampler; coefficients are computed once per `(H, T, n)`.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    spec: FbmSpec,
    method: FbmMethod,
    plan: Plan,
}

#[derive(Debug, Clone)]
enum Plan {
    /// Durbin-Levinson rows `phi_i` (length `i`), concatenated, and the
    /// conditional standard deviations.
    HoskingStored { rows: Vec<f64>, sd: Vec<f64> },
    HoskingStreaming { autocov: Vec<f64> },
    /// Lower-triangular Cholesky factor, row-major `n x n`.
    Cholesky { factor: Vec<f64> },
}

impl FbmSampler {
    pub fn new(spec: FbmSpec, method: FbmMethod) -> Result<Self> {
        let n = spec.n;
        let plan = match method {
            FbmMethod::Hosking => {
                let autocov: Vec<f64> = (0..n).map(|k| fgn_autocovariance(k, spec.hurst)).collect();
                if n <= HOSKING_STORE_MAX_N {
                    let mut rows = Vec::with_capacity(n * (n - 1) / 2);
                    let mut sd = Vec::with_capacity(n);
                    durbin_levinson(&autocov, |row, v| {
                        rows.extend_from_slice(row);
                        sd.push(v.sqrt());
                    })?;
                    Plan::HoskingStored { rows, sd }
                } else {
                    durbin_levinson(&autocov, |_, _| {})?;
                    Plan::HoskingStreaming { autocov }
                }
            }
            FbmMethod::Cholesky => {
                if n > CHOLESKY_MAX_N {
                    return Err(Error::InvalidParameter("Cholesky sampling is limited to n <= 1024"));
                }
                let times = spec.grid();
                let t = &times.times()[1..];
                let mut cov = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        cov[i * n + j] = fbm_covariance(t[i], t[j], spec.hurst);
                    }
                }
                Plan::Cholesky { factor: cholesky(&cov, n)? }
            }
        };
        Ok(Self { spec, method, plan })
    }

    pub fn spec(&self) -> &FbmSpec {
        &self.spec
    }

    pub fn method(&self) -> FbmMethod {
        self.method
    }

    /// Path for the seed stored in the [`FbmSpec`].
    pub fn sample(&self) -> SamplePath {
        self.sample_seeded(self.spec.seed)
    }

    /// Path for an explicit seed, with `B(0) = 0`.
    pub fn sample_seeded(&self, seed: u64) -> SamplePath {
        let n = self.spec.n;
        let d = self.spec.dims;
        let mut values = vec![0.0; (n + 1) * d];
        let mut noise = vec![0.0; n];
        let mut component = vec![0.0; n];
        let step_scale = (self.spec.horizon / n as f64).powf(self.spec.hurst);
        for k in 0..d {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            noise.iter_mut().for_each(|z| *z = StandardNormal.sample(&mut rng));
            match &self.plan {
                Plan::HoskingStored { rows, sd } => {
                    let mut offset = 0;
                    for i in 0..n {
                        let row = &rows[offset..offset + i];
                        offset += i;
                        let mean: f64 = row.iter().zip(component[..i].iter().rev()).map(|(p, x)| p * x).sum();
                        component[i] = mean + sd[i] * noise[i];
                    }
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += step_scale * component[i];
                        values[(i + 1) * d + k] = acc;
                    }
                }
                Plan::HoskingStreaming { autocov } => {
                    let mut i = 0;
                    durbin_levinson(autocov, |row, v| {
                        let mean: f64 = row.iter().zip(component[..i].iter().rev()).map(|(p, x)| p * x).sum();
                        component[i] = mean + v.sqrt() * noise[i];
                        i += 1;
                    })
                    .expect("checked when the sampler was built");
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += step_scale * component[i];
                        values[(i + 1) * d + k] = acc;
                    }
                }
                Plan::Cholesky { factor } => {
                    for i in 0..n {
                        let row = &factor[i * n..i * n + i + 1];
                        values[(i + 1) * d + k] = row.iter().zip(&noise).map(|(l, z)| l * z).sum();
                    }
                }
            }
        }
        SamplePath::new(self.spec.grid(), d, values).expect("consistent sizes")
    }
}

/// Runs the Durbin-Levinson recursion, handing each prediction row
/// `(phi_{i,1}, ..., phi_{i,i})` and innovation variance `v_i` to `visit`.
fn durbin_levinson(autocov: &[f64], mut visit: impl FnMut(&[f64], f64)) -> Result<()> {
    let n = autocov.len();
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut next: Vec<f64> = Vec::with_capacity(n);
    let mut v = autocov[0];
    visit(&[], v);
    for i in 1..n {
        let num = autocov[i] - phi.iter().enumerate().map(|(j, p)| p * autocov[i - 1 - j]).sum::<f64>();
        let kappa = num / v;
        next.clear();
        next.extend(phi.iter().enumerate().map(|(j, p)| p - kappa * phi[i - 2 - j]));
        next.push(kappa);
        core::mem::swap(&mut phi, &mut next);
        v *= 1.0 - kappa * kappa;
        if !(v > 1e-12 * autocov[0]) {
            return Err(Error::CovarianceNotPD { index: i, pivot: v });
        }
        visit(&phi, v);
    }
    Ok(())
}

fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let pivot = a[i * n + i] - s;
                if !(pivot > 1e-12) {
                    return Err(Error::CovarianceNotPD { index: i, pivot });
                }
                l[i * n + i] = pivot.sqrt();
            } else {
                l[i * n + j] = (a[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// One path with the default (Hosking) method.
pub fn sample_fbm(spec: &FbmSpec) -> Result<SamplePath> {
    Ok(FbmSampler::new(*spec, FbmMethod::Hosking)?.sample())
}

pub fn sample_fbm_with(spec: &FbmSpec, method: FbmMethod) -> Result<SamplePath> {
    Ok(FbmSampler::new(*spec, method)?.sample())
}

/// `W(t) = t e_1 + Σ_k B_k(t) e_{k+1}`.
pub fn build_time_space_signal(b: &SamplePath) -> SamplePath {
    let d = b.dim();
    let mut values = Vec::with_capacity(b.len() * (d + 1));
    for (t, p) in b.grid().times().iter().zip(b.points()) {
        values.push(*t);
        values.extend_from_slice(p);
    }
    SamplePath::new(b.grid().clone(), d + 1, values).expect("consistent sizes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_examples() {
        assert!((fbm_covariance(1.0, 2.0, 0.5) - 1.0).abs() < 1e-15);
        for h in [0.2, 0.4, 0.7, 0.9] {
            assert!((fbm_covariance(1.0, 1.0, h) - 1.0).abs() < 1e-15);
        }
        assert!((fbm_covariance(1.5, 2.0, 1.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hurst_range_is_enforced() {
        assert!(FbmSpec::new(0.3, 1.0, 8, 1, 0).is_err());
        assert!(FbmSpec::new(1.0, 1.0, 8, 1, 0).is_err());
        assert!(FbmSpec::new(0.5, 1.0, 8, 1, 0).is_ok());
    }

    #[test]
    fn paths_start_at_zero_and_are_deterministic() {
        let spec = FbmSpec::new(0.7, 2.0, 64, 3, 99).unwrap();
        let a = sample_fbm(&spec).unwrap();
        let b = sample_fbm(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.at(0).iter().all(|&x| x == 0.0));
        let c = sample_fbm_with(&spec, FbmMethod::Cholesky).unwrap();
        assert!(c.at(0).iter().all(|&x| x == 0.0));
        assert_eq!(a.grid().horizon(), 2.0);
    }

    #[test]
    fn cholesky_size_limit() {
        let spec = FbmSpec::new(0.7, 1.0, CHOLESKY_MAX_N + 1, 1, 0).unwrap();
        assert!(FbmSampler::new(spec, FbmMethod::Cholesky).is_err());
    }

    #[test]
    fn cholesky_rejects_indefinite_matrix() {
        let a = [1.0, 2.0, 2.0, 1.0];
        assert!(matches!(cholesky(&a, 2), Err(Error::CovarianceNotPD { index: 1, .. })));
    }

    #[test]
    fn streaming_and_stored_hosking_agree() {
        let spec = FbmSpec::new(0.4, 1.0, 40, 2, 5).unwrap();
        let stored = FbmSampler::new(spec, FbmMethod::Hosking).unwrap();
        let autocov: Vec<f64> = (0..40).map(|k| fgn_autocovariance(k, 0.4)).collect();
        let streaming = FbmSampler { spec, method: FbmMethod::Hosking, plan: Plan::HoskingStreaming { autocov } };
        let (a, b) = (stored.sample(), streaming.sample());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn time_space_signal() {
        let grid = Grid::new(vec![0.0, 0.25, 1.0]).unwrap();
        let b = SamplePath::new(grid, 1, vec![0.0, 0.3, -0.1]).unwrap();
        let w = build_time_space_signal(&b);
        assert_eq!(w.dim(), 2);
        assert_eq!(w.at(0), &[0.0, 0.0]);
        assert_eq!(w.at(1), &[0.25, 0.3]);
        let zero = build_time_space_signal(&SamplePath::zeros(Grid::uniform(1.0, 4).unwrap(), 3));
        assert!(zero.points().enumerate().all(|(k, p)| p[0] == k as f64 / 4.0 && p[1..].iter().all(|&x| x == 0.0)));
    }
}
