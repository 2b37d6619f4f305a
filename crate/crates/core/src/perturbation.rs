//! First-order noise statistics of the discrete spectrum.
//!
//! Noise on the samples enters the collocation matrix linearly,
//! `L^ = L + sigma L~`, with `L~` built from the noise coefficients `c~`
//! exactly as `L` is built from `c` (diagonal blocks excluded). For a
//! simple eigenvalue, Kato's first-order expansions give
//!
//! ```text
//! lambda~ = phi^H L~ psi / (phi^H psi)
//! psi~    = -S L~ psi,       S = (L - lambda I - P)^{-1} (I - P)
//! ```
//!
//! and `L~ psi = Sigma (Re c~; Im c~)` with a coupling matrix `Sigma`
//! that depends only on `psi`. Both perturbations are therefore real-linear
//! maps of the Gaussian vector `(Re c~; Im c~)`, represented by the complex
//! rows `d` and `h`, and their covariances follow in closed form.

use std::path::Path;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NftError, Result};
use crate::fc::{left_right_overlap, FcMode, FcOperator, ShiftedWindows, WindowSpec};
use crate::io::format_matrix_csv;
use crate::linalg::{banded_toeplitz, norm2, CMat};
use crate::signal::TimeGrid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const J: Complex64 = Complex64::new(0.0, 1.0);

fn overlap_checked(psi: &[Complex64], lambda: Complex64) -> Result<Complex64> {
    let ov = left_right_overlap(psi);
    let scale = norm2(psi).powi(2);
    if !(ov.norm() > 1e-10 * scale) {
        return Err(NftError::NearDefective { lambda, overlap: ov.norm() / scale });
    }
    Ok(ov)
}

/// `P = psi phi^H / (phi^H psi)` with `phi^H = psi^T Pi`.
pub fn eigenprojector(psi: &[Complex64], lambda: Complex64) -> Result<CMat> {
    let ov = overlap_checked(psi, lambda)?;
    let dim = psi.len();
    Ok(Mat::from_fn(dim, dim, |i, j| psi[i] * psi[dim - 1 - j] / ov))
}

/// `L - lambda I - P`; invertible exactly when `lambda` is simple.
fn reduced_matrix(l: &CMat, lambda: Complex64, p: &CMat) -> CMat {
    let mut a = l - p;
    for i in 0..a.nrows() {
        a[(i, i)] -= lambda;
    }
    a
}

struct ReducedLu {
    lu: faer::linalg::solvers::PartialPivLu<c64>,
}

impl ReducedLu {
    fn new(l: &CMat, lambda: Complex64, p: &CMat) -> Result<Self> {
        let lu = reduced_matrix(l, lambda, p).partial_piv_lu();
        let u = lu.U();
        let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
        let max = diag.iter().copied().fold(0.0, f64::max);
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 1e-14 * max) {
            return Err(NftError::SingularResolvent(lambda));
        }
        Ok(Self { lu })
    }
}

/// `S = (L - lambda I - P)^{-1} (I - P)` by a single factorization.
pub fn drazin_inverse(l: &CMat, lambda: Complex64, p: &CMat) -> Result<CMat> {
    let dim = l.nrows();
    let fact = ReducedLu::new(l, lambda, p)?;
    let mut rhs = Mat::from_fn(dim, dim, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { ZERO } - p[(i, j)]);
    fact.lu.solve_in_place(&mut rhs);
    if rhs.norm_l2().is_finite() {
        Ok(rhs)
    } else {
        Err(NftError::SingularResolvent(lambda))
    }
}

/// Toeplitz factors `J_1`, `J_2` with `J_i[n][r] = psi_i[n - r]`.
pub fn toeplitz_factors(psi: &[Complex64]) -> (CMat, CMat) {
    let m = psi.len() / 2;
    (banded_toeplitz(&psi[..m]), banded_toeplitz(&psi[m..]))
}

/// `Sigma = [[-j J_2, J_2], [-j J_1 Pi, -J_1 Pi]]`, mapping
/// `(Re c~; Im c~)` to `L~ psi`.
pub fn coupling_matrix(psi: &[Complex64]) -> CMat {
    let m = psi.len() / 2;
    let (j1, j2) = toeplitz_factors(psi);
    Mat::from_fn(2 * m, 2 * m, |r, s| match (r < m, s < m) {
        (true, true) => -J * j2[(r, s)],
        (true, false) => j2[(r, s - m)],
        (false, true) => -J * j1[(r - m, m - 1 - s)],
        (false, false) => -j1[(r - m, 2 * m - 1 - s)],
    })
}

/// `row Sigma` without forming `Sigma`.
pub fn row_times_coupling(row: &[Complex64], psi: &[Complex64]) -> Vec<Complex64> {
    let m = psi.len() / 2;
    let (top, bottom) = row.split_at(m);
    // (top J_2)[r] = sum_n top[n] psi_2[n - r]; (bottom J_1)[r] likewise
    let conv = |x: &[Complex64], v: &[Complex64]| -> Vec<Complex64> {
        let half = (m as i64 - 1) / 2;
        (0..m as i64)
            .map(|r| {
                let lo = (r - half).max(0);
                let hi = (r + half).min(m as i64 - 1);
                (lo..=hi).map(|n| x[n as usize] * v[(n - r + half) as usize]).sum()
            })
            .collect()
    };
    let a2 = conv(top, &psi[m..]);
    let a1 = conv(bottom, &psi[..m]);
    let mut out = vec![ZERO; 2 * m];
    for s in 0..m {
        // column s of J_1 Pi is column m-1-s of J_1
        let a1p = a1[m - 1 - s];
        out[s] = -J * a2[s] - J * a1p;
        out[m + s] = a2[s] - a1p;
    }
    out
}

/// `L~ psi` for an explicit noise draw, assembled from the perturbation matrix.
pub fn perturbation_times(noise: &[Complex64], psi: &[Complex64]) -> Vec<Complex64> {
    let m = noise.len();
    let gamma: Vec<Complex64> = noise.iter().map(|c| -J * c).collect();
    let g = banded_toeplitz(&gamma);
    let mut out = vec![ZERO; 2 * m];
    for r in 0..m {
        for s in 0..m {
            out[r] += g[(r, s)] * psi[m + s];
            out[m + r] -= g[(s, r)].conj() * psi[s];
        }
    }
    out
}

/// Stacked `(Re c~; Im c~)`.
pub fn stack_real(noise: &[Complex64]) -> Vec<f64> {
    noise.iter().map(|z| z.re).chain(noise.iter().map(|z| z.im)).collect()
}

/// `row . x` for a complex row acting on a real vector.
pub fn apply_row(row: &[Complex64], x: &[f64]) -> Complex64 {
    row.iter().zip(x).map(|(r, v)| r * v).sum()
}

/// Sensitivities of one discrete mode.
#[derive(Debug, Clone)]
pub struct ModePerturbationKit {
    pub mode: FcMode,
    pub grid: TimeGrid,
    /// `phi^H psi`.
    pub overlap: Complex64,
    /// `u_1^T psi_1`.
    pub normalization: Complex64,
    /// `lambda~ = d (Re c~; Im c~)`.
    pub d: Vec<Complex64>,
    /// `b~ = h (Re c~; Im c~)`.
    pub h: Vec<Complex64>,
}

impl ModePerturbationKit {
    pub fn new(op: &FcOperator, mode: &FcMode, windows: &WindowSpec) -> Result<Self> {
        let psi = &mode.psi;
        let dim = psi.len();
        let grid = *op.grid();
        let ov = overlap_checked(psi, mode.lambda)?;

        let phi_h: Vec<Complex64> = psi.iter().rev().map(|z| z / ov).collect();
        let d = row_times_coupling(&phi_h, psi);

        let shifted = ShiftedWindows::new(mode.lambda, windows, &grid)?;
        let (norm, _) = shifted.project(psi);
        if norm.norm() < 1e-12 * norm2(&psi[..dim / 2]) {
            return Err(NftError::UnstableNormalization { denominator: norm.norm() });
        }
        let row: Vec<Complex64> =
            shifted.u1.iter().map(|u| mode.b * u / norm).chain(shifted.u2.iter().map(|u| -u / norm)).collect();

        // y = row (L - lambda I - P)^{-1}, then y (I - P), then Sigma
        let p = eigenprojector(psi, mode.lambda)?;
        let fact = ReducedLu::new(op.matrix(), mode.lambda, &p)?;
        let mut y = Mat::from_fn(dim, 1, |i, _| row[i]);
        fact.lu.solve_transpose_in_place(&mut y);
        let y: Vec<Complex64> = (0..dim).map(|i| y[(i, 0)]).collect();
        if norm2(&y).is_nan() || !norm2(&y).is_finite() {
            return Err(NftError::SingularResolvent(mode.lambda));
        }
        let y_psi: Complex64 = y.iter().zip(psi).map(|(a, b)| a * b).sum();
        let projected: Vec<Complex64> = y.iter().zip(&phi_h).map(|(a, f)| a - y_psi * f).collect();
        let h = row_times_coupling(&projected, psi);

        Ok(Self { mode: mode.clone(), grid, overlap: ov, normalization: norm, d, h })
    }

    pub fn projector(&self) -> Result<CMat> {
        eigenprojector(&self.mode.psi, self.mode.lambda)
    }

    pub fn drazin(&self, op: &FcOperator) -> Result<CMat> {
        drazin_inverse(op.matrix(), self.mode.lambda, &self.projector()?)
    }

    pub fn coupling(&self) -> CMat {
        coupling_matrix(&self.mode.psi)
    }

    /// First-order `(lambda~, b~)` for a unit-scale noise draw `c~`.
    pub fn first_order(&self, noise: &[Complex64]) -> (Complex64, Complex64) {
        let x = stack_real(noise);
        (apply_row(&self.d, &x), apply_row(&self.h, &x))
    }
}

pub fn build_kits(op: &FcOperator, modes: &[FcMode], windows: &WindowSpec) -> Result<Vec<ModePerturbationKit>> {
    modes.iter().map(|m| ModePerturbationKit::new(op, m, windows)).collect()
}

/// Unit-noise covariances of `(Re lambda; Im lambda)`, `(Re b; Im b)` and
/// their cross block. Multiply by `sigma^2` for physical values.
#[derive(Debug, Clone)]
pub struct CovarianceReport {
    pub k: usize,
    pub c_lambda: Mat<f64>,
    pub c_b: Mat<f64>,
    pub c_cross: Mat<f64>,
    /// `[[C_lambda, C_cross], [C_cross^T, C_b]]`, ordered
    /// `(Re lambda_1..K, Im lambda_1..K, Re b_1..K, Im b_1..K)`.
    pub c_full: Mat<f64>,
    pub sigma: f64,
}

fn stacked_rows(rows: &[&[Complex64]]) -> Mat<f64> {
    let k = rows.len();
    let dim = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(2 * k, dim, |i, j| if i < k { rows[i][j].re } else { rows[i - k][j].im })
}

fn symmetrize(m: &mut Mat<f64>) {
    for j in 0..m.ncols() {
        for i in 0..j {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Assemble the covariance blocks from the sensitivity rows and the
/// unit-noise covariance `R` of `(Re c~; Im c~)`. `sigma` is recorded for
/// reporting.
pub fn covariance_report(kits: &[ModePerturbationKit], r: &Mat<f64>, sigma: f64) -> CovarianceReport {
    let k = kits.len();
    let a = stacked_rows(&kits.iter().map(|kit| kit.d.as_slice()).collect::<Vec<_>>());
    let b = stacked_rows(&kits.iter().map(|kit| kit.h.as_slice()).collect::<Vec<_>>());
    let (ar, br) = if k == 0 { (a.clone(), b.clone()) } else { (&a * r, &b * r) };
    let mut c_lambda = if k == 0 { Mat::zeros(0, 0) } else { &ar * a.transpose() };
    let mut c_b = if k == 0 { Mat::zeros(0, 0) } else { &br * b.transpose() };
    let c_cross = if k == 0 { Mat::zeros(0, 0) } else { &ar * b.transpose() };
    symmetrize(&mut c_lambda);
    symmetrize(&mut c_b);
    let c_full = Mat::from_fn(4 * k, 4 * k, |i, j| match (i < 2 * k, j < 2 * k) {
        (true, true) => c_lambda[(i, j)],
        (true, false) => c_cross[(i, j - 2 * k)],
        (false, true) => c_cross[(j, i - 2 * k)],
        (false, false) => c_b[(i - 2 * k, j - 2 * k)],
    });
    CovarianceReport { k, c_lambda, c_b, c_cross, c_full, sigma }
}

/// Per-mode scalars `sigma^2 (E[(Re x~)^2] + E[(Im x~)^2])` and the
/// real part of the first cross term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSummary {
    pub sigma: f64,
    pub var_lambda: Vec<f64>,
    pub var_b: Vec<f64>,
    /// `sigma^2 |E[Re l~_1 Re l~_2 + Im l~_1 Im l~_2]|`, absent for `K < 2`.
    pub re_cross_lambda12: Option<f64>,
    pub re_cross_b12: Option<f64>,
}

/// Scalar summaries of a `4K x 4K` covariance in physical units.
pub fn summarize_full(c_full: &Mat<f64>, sigma_sq: f64) -> (Vec<f64>, Vec<f64>, Option<f64>, Option<f64>) {
    let k = c_full.nrows() / 4;
    let var = |off: usize, i: usize| sigma_sq * (c_full[(off + i, off + i)] + c_full[(off + k + i, off + k + i)]);
    let cross =
        |off: usize| sigma_sq * (c_full[(off, off + 1)] + c_full[(off + k, off + k + 1)]).abs();
    let vl = (0..k).map(|i| var(0, i)).collect();
    let vb = (0..k).map(|i| var(2 * k, i)).collect();
    let (cl, cb) = if k >= 2 { (Some(cross(0)), Some(cross(2 * k))) } else { (None, None) };
    (vl, vb, cl, cb)
}

impl CovarianceReport {
    /// `sigma^2 C_full`.
    pub fn physical(&self) -> Mat<f64> {
        let s2 = self.sigma * self.sigma;
        Mat::from_fn(self.c_full.nrows(), self.c_full.ncols(), |i, j| s2 * self.c_full[(i, j)])
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma, ..self.clone() }
    }

    pub fn summary(&self) -> CovarianceSummary {
        let (var_lambda, var_b, re_cross_lambda12, re_cross_b12) =
            summarize_full(&self.c_full, self.sigma * self.sigma);
        CovarianceSummary { sigma: self.sigma, var_lambda, var_b, re_cross_lambda12, re_cross_b12 }
    }

    /// Largest `|C_ij - C_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let c = &self.c_full;
        let mut worst: f64 = 0.0;
        for i in 0..c.nrows() {
            for j in 0..i {
                worst = worst.max((c[(i, j)] - c[(j, i)]).abs());
            }
        }
        worst
    }

    /// Smallest eigenvalue of `C_full`.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_symmetric_eigenvalue(&self.c_full)
    }

    /// `c_lambda.csv`, `c_b.csv`, `c_cross.csv`, `c_full.csv` (unit noise,
    /// rows and columns ordered all real parts first, then all imaginary
    /// parts) and `summary.json`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for (name, m) in
            [("c_lambda", &self.c_lambda), ("c_b", &self.c_b), ("c_cross", &self.c_cross), ("c_full", &self.c_full)]
        {
            std::fs::write(dir.join(format!("{name}.csv")), format_matrix_csv(m))?;
        }
        let json = serde_json::to_string_pretty(&self.summary()).map_err(|e| NftError::Format(e.to_string()))?;
        std::fs::write(dir.join("summary.json"), json)?;
        Ok(())
    }
}

pub fn min_symmetric_eigenvalue(m: &Mat<f64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| NftError::EigenNonConvergence(format!("{e:?}")))?;
    Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fc::{build_operator, fc_modes, FcPolicy};
    use crate::signal::{dft_coefficients, NoiseModel};
    use crate::presets::Preset;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_projector_and_drazin() {
        let l = Mat::<c64>::from_fn(2, 2, |i, j| if i == j { c(2.0 + i as f64, 0.0) } else { ZERO });
        let p = Mat::<c64>::from_fn(2, 2, |i, j| if i == 0 && j == 0 { c(1.0, 0.0) } else { ZERO });
        let s = drazin_inverse(&l, c(2.0, 0.0), &p).unwrap();
        assert!((s[(0, 0)]).norm() < 1e-15);
        assert!((s[(1, 1)] - 1.0).norm() < 1e-15);
        assert!(s[(0, 1)].norm() < 1e-15 && s[(1, 0)].norm() < 1e-15);
        assert!(matches!(
            drazin_inverse(&l, c(2.0, 0.0), &Mat::zeros(2, 2)),
            Err(NftError::SingularResolvent(_))
        ));
    }

    #[test]
    fn near_defective_is_rejected() {
        // psi^T Pi psi = 2 psi_0 psi_1 = 0
        let psi = vec![c(1.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(eigenprojector(&psi, c(0.0, 1.0)), Err(NftError::NearDefective { .. })));
    }

    #[test]
    fn coupling_identities() {
        let psi: Vec<Complex64> = (0..10).map(|i| c((i as f64 * 0.9).cos(), (i as f64 * 0.4).sin())).collect();
        let noise: Vec<Complex64> = (0..5).map(|i| c(0.3 * i as f64 - 0.5, (i as f64).sqrt())).collect();
        let sigma = coupling_matrix(&psi);
        let x = stack_real(&noise);
        let direct = perturbation_times(&noise, &psi);
        for r in 0..10 {
            let via: Complex64 = (0..10).map(|s| sigma[(r, s)] * x[s]).sum();
            assert!((via - direct[r]).norm() < 1e-14);
        }
        let row: Vec<Complex64> = (0..10).map(|i| c(1.0 / (i as f64 + 1.0), 0.2)).collect();
        let fast = row_times_coupling(&row, &psi);
        for s in 0..10 {
            let dense: Complex64 = (0..10).map(|r| row[r] * sigma[(r, s)]).sum();
            assert!((dense - fast[s]).norm() < 1e-14);
        }
        // only psi_2[0] nonzero: J_2 = psi_2[0] I
        let mut single = vec![ZERO; 10];
        single[7] = c(0.5, 0.5);
        let sg = coupling_matrix(&single);
        for r in 0..5 {
            for s in 0..5 {
                let want = if r == s { -J * single[7] } else { ZERO };
                assert_eq!(sg[(r, s)], want);
            }
        }
    }

    #[test]
    fn two_soliton_kit_invariants() {
        let pulse = Preset::TwoSoliton.pulse_on(&Preset::TwoSoliton.grid_with(121).unwrap()).unwrap();
        let coeffs = dft_coefficients(&pulse);
        let op = build_operator(&coeffs);
        let windows = WindowSpec::hann();
        let modes = fc_modes(&coeffs, &FcPolicy::with_expected(2), &windows).unwrap();
        let kits = build_kits(&op, &modes, &windows).unwrap();
        let dim = op.dim();
        for kit in &kits {
            let p = kit.projector().unwrap();
            let pp = &p * &p;
            assert!((&pp - &p).norm_l2() <= 1e-8 * p.norm_l2());
            let mut tr = ZERO;
            for i in 0..dim {
                tr += p[(i, i)];
            }
            assert!((tr - 1.0).norm() < 1e-8);
            let s = kit.drazin(&op).unwrap();
            let mut shifted = op.matrix().clone();
            for i in 0..dim {
                shifted[(i, i)] -= kit.mode.lambda;
            }
            let mut lhs = &s * &shifted;
            for i in 0..dim {
                lhs[(i, i)] -= 1.0;
            }
            let resid = (&lhs + &p).norm_l2();
            assert!(resid <= 1e-8 * s.norm_l2() * shifted.norm_l2(), "Drazin residual {resid}");
            let psi = Mat::from_fn(dim, 1, |i, _| kit.mode.psi[i]);
            assert!((&s * &psi).norm_l2() < 1e-8 * s.norm_l2());
            assert!((&p * &psi - &psi).norm_l2() < 1e-8);

            // h against the explicit S
            let sigma = kit.coupling();
            let shifted_w = ShiftedWindows::new(kit.mode.lambda, &windows, op.grid()).unwrap();
            let row = Mat::from_fn(1, dim, |_, j| {
                let m = dim / 2;
                if j < m {
                    kit.mode.b * shifted_w.u1[j] / kit.normalization
                } else {
                    -shifted_w.u2[j - m] / kit.normalization
                }
            });
            let h_dense = &row * &s * &sigma;
            for j in 0..dim {
                assert!((h_dense[(0, j)] - kit.h[j]).norm() <= 1e-9 * norm2(&kit.h));
            }
        }
        let r = crate::signal::colored_covariance(&NoiseModel::white(1.0), op.grid()).unwrap();
        let rep = covariance_report(&kits, &r, 0.1);
        assert!(rep.asymmetry() <= 1e-10 * rep.c_full.norm_l2());
        assert!(rep.min_eigenvalue().unwrap() >= -1e-10 * rep.c_full.norm_l2());
        let zero = covariance_report(&kits, &Mat::zeros(dim, dim), 0.1);
        assert_eq!(zero.c_full.norm_l2(), 0.0);
    }

    #[test]
    fn first_order_matches_finite_difference() {
        let grid = Preset::TwoSoliton.grid_with(121).unwrap();
        let coeffs = dft_coefficients(&Preset::TwoSoliton.pulse_on(&grid).unwrap());
        let op = build_operator(&coeffs);
        let windows = WindowSpec::hann();
        let policy = FcPolicy::with_expected(2);
        let modes = fc_modes(&coeffs, &policy, &windows).unwrap();
        let kits = build_kits(&op, &modes, &windows).unwrap();
        let noise = NoiseModel::white(1.0).sample_coefficients(&grid, 7).unwrap();
        let eps = 1e-6;
        let plus = fc_modes(&coeffs.perturbed(eps, &noise), &policy, &windows).unwrap();
        let minus = fc_modes(&coeffs.perturbed(-eps, &noise), &policy, &windows).unwrap();
        for (i, kit) in kits.iter().enumerate() {
            let (dl, db) = kit.first_order(&noise);
            let fl = (plus[i].lambda - minus[i].lambda) / (2.0 * eps);
            let fb = (plus[i].b - minus[i].b) / (2.0 * eps);
            assert!((fl - dl).norm() <= 1e-5 * dl.norm().max(1e-3), "lambda {fl} vs {dl}");
            assert!((fb - db).norm() <= 1e-5 * db.norm().max(1e-3), "b {fb} vs {db}");
        }
    }
}
