use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NftError, Result};

/// Eigenvalues closer than this are treated as one eigenvalue of higher
/// multiplicity, which the transform and the statistics do not support.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-10;

/// One discrete eigenvalue and its spectral amplitude `b_k = b(lambda_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub lambda: Complex64,
    pub b: Complex64,
}

/// Discrete spectrum `{(lambda_k, b_k)}` in the upper half-plane.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscreteSpectrum {
    entries: Vec<SpectralPair>,
}

impl DiscreteSpectrum {
    pub fn new(entries: Vec<SpectralPair>) -> Result<Self> {
        for e in &entries {
            if !(e.lambda.im > 0.0) || !e.lambda.re.is_finite() || !e.lambda.im.is_finite() {
                return Err(NftError::NotUpperHalfPlane(e.lambda));
            }
            if !(e.b.norm() > 0.0) || !e.b.re.is_finite() || !e.b.im.is_finite() {
                return Err(NftError::InvalidSpectrum(format!(
                    "amplitude b must be finite and nonzero at lambda = {}",
                    e.lambda
                )));
            }
        }
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                if (a.lambda - b.lambda).norm() < COINCIDENCE_TOLERANCE {
                    return Err(NftError::DegenerateSpectrum(format!(
                        "eigenvalues {} and {} coincide",
                        a.lambda, b.lambda
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_pairs(lambdas: &[Complex64], bs: &[Complex64]) -> Result<Self> {
        if lambdas.len() != bs.len() {
            return Err(NftError::InvalidSpectrum(format!(
                "{} eigenvalues but {} amplitudes",
                lambdas.len(),
                bs.len()
            )));
        }
        Self::new(lambdas.iter().zip(bs).map(|(&lambda, &b)| SpectralPair { lambda, b }).collect())
    }

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[SpectralPair] {
        &self.entries
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.b).collect()
    }

    /// Entries reordered by descending imaginary part of the eigenvalue.
    pub fn sorted_by_imag(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| b.lambda.im.total_cmp(&a.lambda.im));
        Self { entries }
    }
}

/// `a(lambda) = prod_k (lambda - lambda_k) / (lambda - lambda_k^*)`, the
/// reflectionless (multi-soliton) spectral coefficient.
pub fn soliton_a_coefficient(spectrum: &DiscreteSpectrum, lambda: Complex64) -> Result<Complex64> {
    let mut a = Complex64::new(1.0, 0.0);
    for e in spectrum.entries() {
        let pole = e.lambda.conj();
        if (lambda - pole).norm() <= f64::EPSILON * pole.norm().max(1.0) {
            return Err(NftError::EvaluationAtPole(lambda));
        }
        a *= (lambda - e.lambda) / (lambda - pole);
    }
    Ok(a)
}

/// Propagation over normalized distance `z`: eigenvalues are invariant and
/// `b_k <- b_k exp(4 j lambda_k^2 z)`.
pub fn evolve_spectrum(spectrum: &DiscreteSpectrum, z: f64) -> DiscreteSpectrum {
    let j4z = Complex64::new(0.0, 4.0 * z);
    let entries = spectrum
        .entries()
        .iter()
        .map(|e| SpectralPair { lambda: e.lambda, b: e.b * (j4z * e.lambda * e.lambda).exp() })
        .collect();
    DiscreteSpectrum { entries }
}
