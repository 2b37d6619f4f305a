use num_complex::Complex64;

use crate::linalg::{banded_toeplitz, CMat};
use crate::signal::{FourierCoefficients, TimeGrid};

/// The `2M x 2M` collocation matrix `L = [[Omega, Gamma], [-Gamma^H, -Omega]]`
/// whose eigenvectors are Fourier coefficients of Zakharov-Shabat solutions.
#[derive(Debug, Clone)]
pub struct FcOperator {
    coeffs: FourierCoefficients,
    matrix: CMat,
}

impl FcOperator {
    pub fn grid(&self) -> &TimeGrid {
        self.coeffs.grid()
    }

    pub fn coefficients(&self) -> &FourierCoefficients {
        &self.coeffs
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Diagonal of `Omega`, `-(2 pi / T) n` for `n = -N..=N`.
    pub fn omega(&self) -> Vec<f64> {
        omega_diag(self.grid())
    }

    /// The Toeplitz block `Gamma`.
    pub fn gamma(&self) -> CMat {
        gamma_block(&self.coeffs)
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.norm_l2()
    }
}

pub(crate) fn omega_diag(grid: &TimeGrid) -> Vec<f64> {
    let w0 = grid.omega0();
    grid.indices().map(|n| -w0 * n as f64).collect()
}

/// `Gamma[r][s] = -j c[r - s]`: first column `-j (c[0], ..., c[N], 0, ...)`,
/// first row `-j (c[0], c[-1], ..., c[-N], 0, ...)`.
pub(crate) fn gamma_block(coeffs: &FourierCoefficients) -> CMat {
    let mj = Complex64::new(0.0, -1.0);
    let gen: Vec<Complex64> = coeffs.coeffs().iter().map(|c| mj * c).collect();
    banded_toeplitz(&gen)
}

pub fn build_operator(coeffs: &FourierCoefficients) -> FcOperator {
    let m = coeffs.grid().len();
    let omega = omega_diag(coeffs.grid());
    let gamma = gamma_block(coeffs);
    let mut l = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        l[(i, i)] = Complex64::new(omega[i], 0.0);
        l[(m + i, m + i)] = Complex64::new(-omega[i], 0.0);
    }
    for s in 0..m {
        for r in 0..m {
            let g = gamma[(r, s)];
            l[(r, m + s)] = g;
            l[(m + s, r)] = -g.conj();
        }
    }
    FcOperator { coeffs: coeffs.clone(), matrix: l }
}
