//! Symmetric tridiagonal kernels with a constant off-diagonal: Sturm counts,
//! bisection and inverse iteration.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let e2 = off * off;
    let floor = f64::MIN_POSITIVE.sqrt() * (1.0 + off.abs());
    let mut count = 0;
    let mut q = 1.0;
    for (i, d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { (d - x) - e2 / q };
        if q == 0.0 {
            q = -floor;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval enclosing the spectrum.
pub fn gershgorin(diag: &[f64], off: f64) -> (f64, f64) {
    let r = 2.0 * off.abs();
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
    (lo, hi)
}

/// `k`-th eigenvalue (0-based) by bisection to the last representable bit.
pub fn bisect_eigenvalue(diag: &[f64], off: f64, k: usize, bounds: (f64, f64)) -> f64 {
    let (mut lo, mut hi) = bounds;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The lowest `count` eigenvalues, bisected in parallel.
pub fn lowest_eigenvalues(diag: &[f64], off: f64, count: usize) -> Vec<f64> {
    let bounds = gershgorin(diag, off);
    (0..count)
        .into_par_iter()
        .map(|k| bisect_eigenvalue(diag, off, k, bounds))
        .collect()
}

/// LU factors of `T - mu I` with partial pivoting.
struct Factors {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

fn factor(diag: &[f64], off: f64, mu: f64, pivot_floor: f64) -> Factors {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|v| v - mu).collect();
    let mut dl = vec![off; n - 1];
    let mut du = vec![off; n - 1];
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = pivot_floor;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    for v in d.iter_mut() {
        if *v == 0.0 {
            *v = pivot_floor;
        }
    }
    Factors {
        dl,
        d,
        du,
        du2,
        swapped,
    }
}

fn solve(f: &Factors, b: &mut [f64]) {
    let n = b.len();
    for i in 0..n - 1 {
        if f.swapped[i] {
            let temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - f.dl[i] * b[i];
        } else {
            b[i + 1] -= f.dl[i] * b[i];
        }
    }
    b[n - 1] /= f.d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - f.du[n - 2] * b[n - 1]) / f.d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - f.du[i] * b[i + 1] - f.du2[i] * b[i + 2]) / f.d[i];
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Deterministic pseudo-random start vector.
fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// `max |T v - lambda v|` for a unit vector `v`.
pub fn residual(diag: &[f64], off: f64, lambda: f64, v: &[f64]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut r = (diag[i] - lambda) * v[i];
            if i > 0 {
                r += off * v[i - 1];
            }
            if i + 1 < n {
                r += off * v[i + 1];
            }
            r.abs()
        })
        .fold(0.0, f64::max)
}

/// Unit eigenvectors for ascending `eigenvalues`, orthogonalized (modified
/// Gram-Schmidt) against every earlier vector on each iteration.
pub fn inverse_iteration(diag: &[f64], off: f64, eigenvalues: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = diag.len();
    let (lo, hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs());
    let pivot_floor = f64::EPSILON * scale;
    let tolerance = 1e-9 * scale;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let lu = factor(diag, off, lambda, pivot_floor);
        let mut v = start_vector(n, k as u64 + 1);
        let mut converged = false;
        for iteration in 0..12 {
            for u in &vectors {
                let c = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
            }
            let s = norm(&v);
            if s == 0.0 || !s.is_finite() {
                break;
            }
            v.iter_mut().for_each(|a| *a /= s);
            solve(&lu, &mut v);
            for u in &vectors {
                let c = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
            }
            let s = norm(&v);
            if s == 0.0 || !s.is_finite() {
                break;
            }
            v.iter_mut().for_each(|a| *a /= s);
            // a few extra sweeps purge the partner of a near-degenerate pair
            if iteration >= 3 && residual(diag, off, lambda, &v) <= tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "inverse iteration stagnated for level index {k}"
            )));
        }
        vectors.push(v);
    }
    Ok(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> (Vec<f64>, f64) {
        (vec![2.0; n], -1.0)
    }

    #[test]
    fn path_graph_eigenvalues_match_closed_form() {
        let n = 200;
        let (d, e) = path_laplacian(n);
        let vals = lowest_eigenvalues(&d, e, 6);
        for (k, v) in vals.iter().enumerate() {
            let t = std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64;
            let exact = 2.0 - 2.0 * t.cos();
            assert!((v - exact).abs() < 1e-14, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn sturm_count_is_monotone() {
        let d: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut last = 0;
        for j in 0..200 {
            let c = sturm_count(&d, 0.3, -2.0 + j as f64 * 0.02);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(sturm_count(&d, 0.3, 10.0), 50);
    }

    #[test]
    fn inverse_iteration_gives_orthonormal_eigenvectors() {
        let n = 300;
        let d: Vec<f64> = (0..n)
            .map(|i| 2.0 + 1e-3 * (i as f64 - 150.0).powi(2))
            .collect();
        let vals = lowest_eigenvalues(&d, -1.0, 5);
        let vecs = inverse_iteration(&d, -1.0, &vals).unwrap();
        for i in 0..5 {
            assert!(residual(&d, -1.0, vals[i], &vecs[i]) < 1e-12);
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&vecs[i], &vecs[j]) - want).abs() < 1e-12);
            }
        }
    }
}
