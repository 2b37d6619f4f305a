//! Spectral-amplitude extraction from an FC eigenvector.
//!
//! The eigenvector halves are tapered in frequency and evaluated at
//! `+-T_k` instead of the window edges, which keeps the estimate of
//! `b_k = v_2(T_k) / v_1(-T_k)` away from the boundary ringing of the
//! truncated Fourier series.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NftError, Result};
use crate::linalg::norm2;
use crate::signal::TimeGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    /// `w[n] = (1 + cos(2 pi n / M)) / 2`.
    Hann,
    Rectangular,
    /// Caller-supplied weights for `n = -N..=N`, each in `[0, 1]`.
    Custom(Vec<f64>),
}

impl WindowKind {
    pub fn weights(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        let m = grid.len() as f64;
        match self {
            WindowKind::Hann => {
                Ok(grid.indices().map(|n| 0.5 * (1.0 + (2.0 * PI * n as f64 / m).cos())).collect())
            }
            WindowKind::Rectangular => Ok(vec![1.0; grid.len()]),
            WindowKind::Custom(w) => {
                if w.len() != grid.len() {
                    return Err(NftError::Config(format!(
                        "window has {} weights, grid has {} frequencies",
                        w.len(),
                        grid.len()
                    )));
                }
                if w.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err(NftError::Config("window weights must lie in [0, 1]".into()));
                }
                Ok(w.clone())
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            WindowKind::Hann => "hann",
            WindowKind::Rectangular => "rect",
            WindowKind::Custom(_) => "custom",
        }
    }
}

/// `T_k = min(exp_constant / Im(lambda), T/2 - tail_fraction * T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub exp_constant: f64,
    pub tail_fraction: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { exp_constant: 12.0, tail_fraction: 0.05 }
    }
}

impl TruncationPolicy {
    /// Evaluate at the window edges, `T_k = T/2`.
    pub fn none() -> Self {
        Self { exp_constant: f64::INFINITY, tail_fraction: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub first: WindowKind,
    pub second: WindowKind,
    pub truncation: TruncationPolicy,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self::hann()
    }
}

impl WindowSpec {
    pub fn hann() -> Self {
        Self { first: WindowKind::Hann, second: WindowKind::Hann, truncation: TruncationPolicy::default() }
    }

    /// No taper and no truncation.
    pub fn plain() -> Self {
        Self {
            first: WindowKind::Rectangular,
            second: WindowKind::Rectangular,
            truncation: TruncationPolicy::none(),
        }
    }
}

pub fn truncation_time(lambda: Complex64, grid: &TimeGrid, policy: &TruncationPolicy) -> f64 {
    let t_exp = policy.exp_constant / lambda.im;
    let t_tail = grid.duration() / 2.0 - policy.tail_fraction * grid.duration();
    t_exp.min(t_tail)
}

/// Record of how an amplitude was extracted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowMeta {
    pub truncation_time: f64,
    pub first: String,
    pub second: String,
}

/// Frequency-shifted windows `u_1[n] = w_1[n] e^{-j n w0 T_k}` and
/// `u_2[n] = w_2[n] e^{+j n w0 T_k}`.
#[derive(Debug, Clone)]
pub struct ShiftedWindows {
    pub u1: Vec<Complex64>,
    pub u2: Vec<Complex64>,
    pub truncation_time: f64,
}

impl ShiftedWindows {
    pub fn new(lambda: Complex64, windows: &WindowSpec, grid: &TimeGrid) -> Result<Self> {
        let t_k = truncation_time(lambda, grid, &windows.truncation);
        let w0 = grid.omega0();
        let w1 = windows.first.weights(grid)?;
        let w2 = windows.second.weights(grid)?;
        let (u1, u2) = grid
            .indices()
            .zip(w1.iter().zip(&w2))
            .map(|(n, (a, b))| {
                let phase = n as f64 * w0 * t_k;
                (Complex64::from_polar(*a, -phase), Complex64::from_polar(*b, phase))
            })
            .unzip();
        Ok(Self { u1, u2, truncation_time: t_k })
    }

    /// `(u_1^T psi_1, u_2^T psi_2)`.
    pub fn project(&self, psi: &[Complex64]) -> (Complex64, Complex64) {
        let m = self.u1.len();
        let den = self.u1.iter().zip(&psi[..m]).map(|(u, p)| u * p).sum();
        let num = self.u2.iter().zip(&psi[m..]).map(|(u, p)| u * p).sum();
        (den, num)
    }
}

/// `b_k = u_2^T psi_2 / u_1^T psi_1`; invariant to the scale and phase of `psi`.
pub fn extract_b(
    psi: &[Complex64],
    lambda: Complex64,
    windows: &WindowSpec,
    grid: &TimeGrid,
) -> Result<(Complex64, WindowMeta)> {
    let shifted = ShiftedWindows::new(lambda, windows, grid)?;
    let (den, num) = shifted.project(psi);
    let m = grid.len();
    if den.norm() < 1e-12 * norm2(&psi[..m]) || den.norm() == 0.0 {
        return Err(NftError::UnstableNormalization { denominator: den.norm() });
    }
    let meta = WindowMeta {
        truncation_time: shifted.truncation_time,
        first: windows.first.label().into(),
        second: windows.second.label().into(),
    };
    Ok((num / den, meta))
}

/// The untapered edge evaluation: normalize with
/// `G_k = e^{-j lambda T/2} sum_n psi_1[n] e^{-j n pi}` and read
/// `b_k = e^{-j lambda T/2} / G_k * sum_n psi_2[n] e^{j n pi}`.
pub fn extract_b_at_edges(psi: &[Complex64], lambda: Complex64, grid: &TimeGrid) -> Result<Complex64> {
    let m = grid.len();
    let half_t = grid.duration() / 2.0;
    let j = Complex64::new(0.0, 1.0);
    let sign = |n: i64| if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let edge1: Complex64 = grid.indices().zip(&psi[..m]).map(|(n, p)| p * sign(n)).sum();
    let edge2: Complex64 = grid.indices().zip(&psi[m..]).map(|(n, p)| p * sign(n)).sum();
    let g = (j * lambda * -half_t).exp() * edge1;
    if g.norm() == 0.0 || edge1.norm() < 1e-12 * norm2(&psi[..m]) {
        return Err(NftError::UnstableNormalization { denominator: edge1.norm() });
    }
    Ok((-j * lambda * half_t).exp() / g * edge2)
}
