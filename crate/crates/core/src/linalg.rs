//! Thin layer over `faer` for the dense complex operations the transform needs.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};
use num_complex::Complex64;

use crate::error::{NftError, Result};

pub type CMat = Mat<c64>;

/// Banded Toeplitz matrix `T[r][s] = g[r - s]` for `|r - s| <= N`, zero
/// elsewhere; `g` holds `g[-N..=N]` in ascending order.
pub fn banded_toeplitz(gen: &[Complex64]) -> CMat {
    let size = gen.len();
    let half = (size as i64 - 1) / 2;
    Mat::from_fn(size, size, |r, s| {
        let d = r as i64 - s as i64;
        if d.abs() <= half {
            gen[(d + half) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `T x` for the banded Toeplitz matrix of [`banded_toeplitz`], without
/// forming it.
pub fn banded_toeplitz_apply(gen: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let size = gen.len();
    let half = (size as i64 - 1) / 2;
    (0..size as i64)
        .map(|r| {
            let lo = (r - half).max(0);
            let hi = (r + half).min(size as i64 - 1);
            (lo..=hi).map(|s| gen[(r - s + half) as usize] * x[s as usize]).sum()
        })
        .collect()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm_l2()
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matvec(m: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for j in 0..m.ncols() {
        let xj = x[j];
        if xj == Complex64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * xj;
        }
    }
    out
}

/// Row vector times matrix, `y^T M`.
pub fn vecmat(y: &[Complex64], m: &CMat) -> Vec<Complex64> {
    (0..m.ncols())
        .map(|j| {
            let col = m.col(j);
            y.iter().enumerate().map(|(i, yi)| yi * col[i]).sum()
        })
        .collect()
}

/// Unit Euclidean norm with the largest-magnitude entry rotated onto the
/// positive real axis.
pub fn canonicalize(v: &mut [Complex64]) {
    let norm = norm2(v);
    if norm == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let rot = pivot.conj() / (pivot.norm() * norm);
    for z in v.iter_mut() {
        *z *= rot;
    }
}

/// All eigenvalues and right eigenvectors (columns) of a dense matrix.
pub fn eigen_all(m: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let evd = m.eigen().map_err(|e| NftError::EigenNonConvergence(format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    m.eigenvalues().map_err(|e| NftError::EigenNonConvergence(format!("{e:?}")))
}

/// Right eigenvector of `m` for an eigenvalue already known to working
/// precision, by inverse iteration on `m - lambda I`.
pub fn inverse_iteration(m: &CMat, lambda: Complex64) -> Result<Vec<Complex64>> {
    let size = m.nrows();
    let scale = m.norm_max().max(1.0);
    let mut shift = lambda;
    for attempt in 0..4 {
        let mut shifted = m.clone();
        for i in 0..size {
            shifted[(i, i)] -= shift;
        }
        let lu = shifted.partial_piv_lu();
        let mut x = Mat::<c64>::from_fn(size, 1, |i, _| {
            Complex64::new(1.0, (i as f64 * 0.618_033_988_749_895).fract())
        });
        let mut ok = true;
        for _ in 0..3 {
            lu.solve_in_place(&mut x);
            let norm = x.norm_l2();
            if !norm.is_finite() || norm == 0.0 {
                ok = false;
                break;
            }
            for i in 0..size {
                x[(i, 0)] /= norm;
            }
        }
        if ok {
            let mut v: Vec<Complex64> = (0..size).map(|i| x[(i, 0)]).collect();
            canonicalize(&mut v);
            return Ok(v);
        }
        // exactly singular factorization: nudge the shift off the eigenvalue
        shift = lambda + Complex64::new(1.0, 1.0) * (scale * f64::EPSILON * 10f64.powi(attempt));
    }
    Err(NftError::EigenNonConvergence(format!("inverse iteration failed at lambda = {lambda}")))
}
