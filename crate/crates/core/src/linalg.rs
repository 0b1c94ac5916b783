//! Dense helpers on `f64` slices. Points, matrices and tensors are stored flat
//! and row-major throughout the crate.

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Largest absolute entry.
#[inline]
pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `out[i] = m[i, ..] · v` for a `rows × v.len()` matrix.
pub fn mat_vec(m: &[f64], v: &[f64], out: &mut [f64]) {
    let cols = v.len();
    for (row, o) in m.chunks_exact(cols).zip(out.iter_mut()) {
        *o = dot(row, v);
    }
}

/// Solves the square system `a x = b` in place by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot is below `1e-12` in magnitude.
pub fn solve(a: &mut [f64], b: &mut [f64]) -> Option<()> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    Some(())
}

/// Rank of a `rows × cols` matrix by row reduction with tolerance `tol`.
pub fn rank(m: &[f64], rows: usize, cols: usize, tol: f64) -> usize {
    let mut a = m.to_vec();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let pivot = (r..rows)
            .max_by(|&i, &j| a[i * cols + col].abs().total_cmp(&a[j * cols + col].abs()))
            .unwrap();
        if a[pivot * cols + col].abs() <= tol {
            continue;
        }
        for k in 0..cols {
            a.swap(pivot * cols + k, r * cols + k);
        }
        for row in r + 1..rows {
            let factor = a[row * cols + col] / a[r * cols + col];
            for k in col..cols {
                a[row * cols + k] -= factor * a[r * cols + k];
            }
        }
        r += 1;
    }
    r
}

/// A unit vector orthogonal to the `rows` given vectors of length `cols`,
/// when they span a hyperplane (`rows` need not equal `cols - 1`).
pub fn orthogonal_direction(m: &[f64], rows: usize, cols: usize) -> Option<alloc::vec::Vec<f64>> {
    // Gram-Schmidt the rows, then project each canonical basis vector out of
    // their span and keep the largest residual.
    let mut basis: alloc::vec::Vec<alloc::vec::Vec<f64>> = alloc::vec::Vec::new();
    for r in 0..rows {
        let mut v = m[r * cols..(r + 1) * cols].to_vec();
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm(&v);
        if n > 1e-10 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    if basis.len() + 1 != cols {
        return None;
    }
    let mut best: Option<(f64, alloc::vec::Vec<f64>)> = None;
    for k in 0..cols {
        let mut v = alloc::vec![0.0; cols];
        v[k] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm(&v);
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, v));
        }
    }
    best.map(|(n, mut v)| {
        v.iter_mut().for_each(|x| *x /= n);
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let mut a = [2.0, 1.0, 1.0, 3.0];
        let mut b = [3.0, 5.0];
        solve(&mut a, &mut b).unwrap();
        assert!((b[0] - 0.8).abs() < 1e-14 && (b[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn singular_system_is_rejected() {
        let mut a = [1.0, 2.0, 2.0, 4.0];
        let mut b = [1.0, 2.0];
        assert!(solve(&mut a, &mut b).is_none());
    }

    #[test]
    fn orthogonal_direction_in_3d() {
        let m = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let v = orthogonal_direction(&m, 2, 3).unwrap();
        assert!((v[2].abs() - 1.0).abs() < 1e-14);
        assert_eq!(rank(&m, 2, 3, 1e-12), 2);
    }
}
