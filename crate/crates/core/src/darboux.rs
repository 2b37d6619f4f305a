//! Multi-soliton synthesis by the iterated Darboux transform.
//!
//! Starting from the zero potential, each step adds one eigenvalue and
//! updates the Jost solutions of every eigenvalue not yet added, so the
//! output carries both the pulse and `v(t, lambda_k)` sampled on the grid.

use num_complex::Complex64;

use crate::error::{NftError, Result};
use crate::signal::{Pulse, TimeGrid};
use crate::spectrum::DiscreteSpectrum;

/// Largest admissible `|Im(lambda)| T / 2` (natural-log scale of the
/// double-precision range).
pub const EXPONENT_LIMIT: f64 = 700.0;

/// Jost solutions `(v_1, v_2)(t_m, lambda_k)` on the grid points.
#[derive(Debug, Clone)]
pub struct JostSolutions {
    pub grid: TimeGrid,
    pub lambdas: Vec<Complex64>,
    pub v1: Vec<Vec<Complex64>>,
    pub v2: Vec<Vec<Complex64>>,
}

impl JostSolutions {
    /// `v_1(t, lambda_k) e^{j lambda_k t}` and `v_2(t, lambda_k) e^{-j lambda_k t}`,
    /// which tend to `(1, 0)` on the left edge and `(a, b_k) = (0, b_k)` on the right.
    pub fn normalized(&self, k: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let lam = self.lambdas[k];
        let j = Complex64::new(0.0, 1.0);
        let times = self.grid.times();
        let n1 = times.iter().zip(&self.v1[k]).map(|(&t, v)| v * (j * lam * t).exp()).collect();
        let n2 = times.iter().zip(&self.v2[k]).map(|(&t, v)| v * (-j * lam * t).exp()).collect();
        (n1, n2)
    }
}

pub(crate) fn check_exponent(lambdas: impl IntoIterator<Item = Complex64>, half_width: f64) -> Result<()> {
    for lam in lambdas {
        let exponent = lam.im.abs() * half_width;
        if exponent > EXPONENT_LIMIT {
            return Err(NftError::GridTooWide { exponent, limit: EXPONENT_LIMIT });
        }
    }
    Ok(())
}

/// K-soliton pulse and its Jost solutions from a discrete spectrum.
pub fn darboux(spectrum: &DiscreteSpectrum, grid: &TimeGrid) -> Result<(Pulse, JostSolutions)> {
    // re-validate: DiscreteSpectrum can only be built valid, but a
    // deserialized one may bypass the constructor
    let spectrum = DiscreteSpectrum::new(spectrum.entries().to_vec())?;
    check_exponent(spectrum.lambdas(), grid.duration() / 2.0)?;

    let j = Complex64::new(0.0, 1.0);
    let times = grid.times();
    let lambdas = spectrum.lambdas();
    let bs = spectrum.amplitudes();
    let count = lambdas.len();

    let mut v1: Vec<Vec<Complex64>> = lambdas
        .iter()
        .map(|&lam| times.iter().map(|&t| (-j * lam * t).exp()).collect())
        .collect();
    let mut v2: Vec<Vec<Complex64>> = lambdas
        .iter()
        .zip(&bs)
        .map(|(&lam, &b)| times.iter().map(|&t| -b * (j * lam * t).exp()).collect())
        .collect();
    let mut q = vec![Complex64::new(0.0, 0.0); times.len()];

    for i in 0..count {
        let lam_i = lambdas[i];
        let gap = lam_i - lam_i.conj();
        let f1 = v1[i].clone();
        let f2 = v2[i].clone();

        let mut constant = bs[i];
        for k in 0..i {
            constant *= lam_i - lambdas[k];
        }
        for k in i + 1..count {
            constant /= lam_i - lambdas[k].conj();
        }

        for m in 0..times.len() {
            // ratios are scale-free, so work with (f1, f2) / max(|f1|, |f2|)
            let scale = f1[m].norm().max(f2[m].norm());
            let g1 = f1[m] / scale;
            let g2 = f2[m] / scale;
            let den = g1.norm_sqr() + g2.norm_sqr();
            let cross = g2.conj() * g1 / den;
            let w1 = g1.norm_sqr() / den;

            q[m] -= 2.0 * j * gap * cross;

            for k in (0..count).filter(|&k| k != i) {
                let a1 = v1[k][m];
                let a2 = v2[k][m];
                v1[k][m] = (lambdas[k] - lam_i.conj() - gap * w1) * a1 - gap * cross * a2;
                v2[k][m] = -gap * cross.conj() * a1 + (lambdas[k] - lam_i + gap * w1) * a2;
            }

            let factor = constant / (scale * den);
            v1[i][m] = -factor * g2.conj();
            v2[i][m] = factor * g1.conj();
        }
    }

    let pulse = Pulse::new(*grid, q)?;
    Ok((pulse, JostSolutions { grid: *grid, lambdas, v1, v2 }))
}

/// `q(t_m) = amplitude * sech(t_m)`.
pub fn sech_pulse(amplitude: f64, grid: &TimeGrid) -> Result<Pulse> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(NftError::InvalidPulse(format!("sech amplitude must be positive, got {amplitude}")));
    }
    Pulse::from_fn(*grid, |t| Complex64::new(amplitude / t.cosh(), 0.0))
}

/// Eigenvalues `j (A - k + 1/2)` of `A sech(t)` for `k = 1..` while positive.
pub fn sech_eigenvalues(amplitude: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    let mut k = 1.0;
    while amplitude - k + 0.5 > 0.0 {
        out.push(Complex64::new(0.0, amplitude - k + 0.5));
        k += 1.0;
    }
    out
}
