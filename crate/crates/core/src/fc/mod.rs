//! Forward NFT by Fourier collocation.
//!
//! The Zakharov-Shabat system is projected onto `M` Fourier modes per
//! component, which turns the bound-state problem into the dense
//! eigenproblem `L psi = lambda psi`. The eigenvalues in the upper
//! half-plane with non-negligible imaginary part are the discrete
//! spectrum; the rest approximate the continuum.

mod operator;
mod window;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use operator::{build_operator, FcOperator};
pub use window::{
    extract_b, extract_b_at_edges, truncation_time, ShiftedWindows, TruncationPolicy, WindowKind,
    WindowMeta, WindowSpec,
};

use crate::error::{NftError, Result};
use crate::linalg::{canonicalize, eigen_all, eigenvalues, inverse_iteration, matvec, norm2, vecmat};
use crate::signal::{dft_coefficients, FourierCoefficients, Pulse};
use crate::spectrum::{DiscreteSpectrum, SpectralPair};

/// An eigenvalue of `L` with its canonicalized right eigenvector.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub lambda: Complex64,
    pub psi: Vec<Complex64>,
}

/// All `2M` eigenpairs of the collocation matrix.
pub fn solve_modes(op: &FcOperator) -> Result<Vec<Eigenpair>> {
    let (values, vectors) = eigen_all(op.matrix())?;
    let dim = op.dim();
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(k, lambda)| {
            let col = vectors.col(k);
            let mut psi: Vec<Complex64> = (0..dim).map(|i| col[i]).collect();
            canonicalize(&mut psi);
            Eigenpair { lambda, psi }
        })
        .collect())
}

/// Which eigenvalues count as discrete spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcPolicy {
    /// Eigenvalues with `Im(lambda) <= tau_im` are treated as spurious.
    pub tau_im: f64,
    /// Keep exactly this many eigenvalues, those of largest imaginary part.
    pub expected: Option<usize>,
}

impl Default for FcPolicy {
    fn default() -> Self {
        Self { tau_im: 1e-2, expected: None }
    }
}

impl FcPolicy {
    pub fn with_expected(count: usize) -> Self {
        Self { expected: Some(count), ..Self::default() }
    }
}

fn select(lambdas: &[Complex64], policy: &FcPolicy) -> Result<Vec<usize>> {
    let mut keep: Vec<usize> = (0..lambdas.len()).filter(|&i| lambdas[i].im > policy.tau_im).collect();
    keep.sort_by(|&a, &b| lambdas[b].im.total_cmp(&lambdas[a].im).then(lambdas[a].re.total_cmp(&lambdas[b].re)));
    if let Some(k) = policy.expected {
        if keep.len() < k {
            return Err(NftError::InsufficientModes { expected: k, found: keep.len() });
        }
        keep.truncate(k);
    }
    Ok(keep)
}

/// Discrete candidates sorted by descending `Im(lambda)`.
pub fn filter_discrete(modes: &[Eigenpair], policy: &FcPolicy) -> Result<Vec<Eigenpair>> {
    let lambdas: Vec<Complex64> = modes.iter().map(|m| m.lambda).collect();
    Ok(select(&lambdas, policy)?.into_iter().map(|i| modes[i].clone()).collect())
}

/// Discrete candidates computed from the eigenvalues alone, with the few
/// eigenvectors that are needed recovered by inverse iteration.
pub fn discrete_modes(op: &FcOperator, policy: &FcPolicy) -> Result<Vec<Eigenpair>> {
    let lambdas = eigenvalues(op.matrix())?;
    select(&lambdas, policy)?
        .into_iter()
        .map(|i| {
            let psi = inverse_iteration(op.matrix(), lambdas[i])?;
            Ok(Eigenpair { lambda: lambdas[i], psi })
        })
        .collect()
}

/// `phi = (psi_2^*[N..-N], psi_1^*[N..-N])`, the left eigenvector for the same eigenvalue.
pub fn left_eigenvector(psi: &[Complex64]) -> Vec<Complex64> {
    psi.iter().rev().map(|z| z.conj()).collect()
}

/// `phi^H psi = psi^T Pi psi`.
pub fn left_right_overlap(psi: &[Complex64]) -> Complex64 {
    psi.iter().zip(psi.iter().rev()).map(|(a, b)| a * b).sum()
}

/// A retained discrete mode with its amplitude.
#[derive(Debug, Clone)]
pub struct FcMode {
    pub lambda: Complex64,
    pub psi: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    pub b: Complex64,
    pub window_meta: WindowMeta,
}

impl FcMode {
    pub fn from_pair(pair: Eigenpair, op: &FcOperator, windows: &WindowSpec) -> Result<Self> {
        let (b, window_meta) = extract_b(&pair.psi, pair.lambda, windows, op.grid())?;
        let phi = left_eigenvector(&pair.psi);
        Ok(Self { lambda: pair.lambda, psi: pair.psi, phi, b, window_meta })
    }

    /// `||L psi - lambda psi|| / (||L||_F ||psi||)`.
    pub fn right_residual(&self, op: &FcOperator) -> f64 {
        let lpsi = matvec(op.matrix(), &self.psi);
        let r: Vec<Complex64> = lpsi.iter().zip(&self.psi).map(|(a, p)| a - p * self.lambda).collect();
        norm2(&r) / (op.frobenius() * norm2(&self.psi))
    }

    /// `||phi^H L - lambda phi^H|| / (||L||_F ||phi||)`.
    pub fn left_residual(&self, op: &FcOperator) -> f64 {
        let row: Vec<Complex64> = self.phi.iter().map(|z| z.conj()).collect();
        let rl = vecmat(&row, op.matrix());
        let r: Vec<Complex64> = rl.iter().zip(&row).map(|(a, p)| a - p * self.lambda).collect();
        norm2(&r) / (op.frobenius() * norm2(&self.phi))
    }

    /// `|v_2(-T_k) e^{j lambda T_k}| / |v_1(-T_k) e^{-j lambda T_k}|` from the
    /// windowed eigenvector, which should vanish for a genuine bound state.
    pub fn left_boundary_residual(&self, windows: &WindowSpec, grid: &crate::signal::TimeGrid) -> Result<f64> {
        let t_k = self.window_meta.truncation_time;
        let w0 = grid.omega0();
        let w1 = windows.first.weights(grid)?;
        let w2 = windows.second.weights(grid)?;
        let m = grid.len();
        let (mut v1, mut v2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (i, n) in grid.indices().enumerate() {
            let e = Complex64::from_polar(1.0, -(n as f64) * w0 * t_k);
            v1 += e * w1[i] * self.psi[i];
            v2 += e * w2[i] * self.psi[m + i];
        }
        let j = Complex64::new(0.0, 1.0);
        Ok((v2 / v1 * (2.0 * j * self.lambda * t_k).exp()).norm())
    }
}

/// Retained modes of a set of Fourier coefficients.
pub fn fc_modes(coeffs: &FourierCoefficients, policy: &FcPolicy, windows: &WindowSpec) -> Result<Vec<FcMode>> {
    let op = build_operator(coeffs);
    discrete_modes(&op, policy)?.into_iter().map(|p| FcMode::from_pair(p, &op, windows)).collect()
}

pub fn forward_nft_coefficients(
    coeffs: &FourierCoefficients,
    policy: &FcPolicy,
    windows: &WindowSpec,
) -> Result<DiscreteSpectrum> {
    let modes = fc_modes(coeffs, policy, windows)?;
    DiscreteSpectrum::new(modes.iter().map(|m| SpectralPair { lambda: m.lambda, b: m.b }).collect())
}

/// Discrete spectrum of a sampled pulse.
pub fn forward_nft(pulse: &Pulse, policy: &FcPolicy, windows: &WindowSpec) -> Result<DiscreteSpectrum> {
    forward_nft_coefficients(&dft_coefficients(pulse), policy, windows)
}

/// Distance from `lambda^*` to the nearest eigenvalue in `spectrum`.
pub fn conjugate_pair_distance(spectrum: &[Complex64], lambda: Complex64) -> f64 {
    spectrum.iter().map(|z| (z - lambda.conj()).norm()).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{darboux, sech_pulse};
    use crate::signal::TimeGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_soliton(m: usize) -> (DiscreteSpectrum, Pulse) {
        let s = DiscreteSpectrum::from_pairs(&[c(0.0, 0.6), c(0.0, 0.3)], &[c(0.0, 1.0 / 3.0); 2]).unwrap();
        let (p, _) = darboux(&s, &TimeGrid::new(35.34, m).unwrap()).unwrap();
        (s, p)
    }

    #[test]
    fn flip_rule() {
        let mut psi = vec![c(0.0, 0.0); 6];
        psi[0] = c(0.0, 1.0);
        let phi = left_eigenvector(&psi);
        assert_eq!(phi[5], c(0.0, -1.0));
        assert!(phi[..5].iter().all(|z| z.norm() == 0.0));
        let psi: Vec<Complex64> = (0..6).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        assert_eq!(left_eigenvector(&left_eigenvector(&psi)), psi);
        let phi = left_eigenvector(&psi);
        let direct: Complex64 = phi.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
        assert_eq!(direct, left_right_overlap(&psi));
    }

    #[test]
    fn zero_pulse_has_no_discrete_spectrum() {
        let grid = TimeGrid::new(10.0, 31).unwrap();
        let s = forward_nft(&Pulse::zeros(grid), &FcPolicy::default(), &WindowSpec::hann()).unwrap();
        assert!(s.is_empty());
        assert!(matches!(
            forward_nft(&Pulse::zeros(grid), &FcPolicy::with_expected(1), &WindowSpec::hann()),
            Err(NftError::InsufficientModes { expected: 1, found: 0 })
        ));
    }

    #[test]
    fn two_soliton_modes_and_residuals() {
        let (s, p) = two_soliton(183);
        let op = build_operator(&dft_coefficients(&p));
        let all = solve_modes(&op).unwrap();
        let eigs: Vec<Complex64> = all.iter().map(|m| m.lambda).collect();
        let kept = filter_discrete(&all, &FcPolicy::default()).unwrap();
        assert_eq!(kept.len(), 2);
        for (pair, want) in kept.iter().zip(s.lambdas()) {
            assert!((pair.lambda - want).norm() < 1e-3 * want.norm());
            assert!(conjugate_pair_distance(&eigs, pair.lambda) < 1e-6);
        }
        let fast = discrete_modes(&op, &FcPolicy::default()).unwrap();
        for (a, b) in kept.iter().zip(&fast) {
            assert!((a.lambda - b.lambda).norm() < 1e-10);
            let mode_a = FcMode::from_pair(a.clone(), &op, &WindowSpec::hann()).unwrap();
            let mode_b = FcMode::from_pair(b.clone(), &op, &WindowSpec::hann()).unwrap();
            assert!((mode_a.b - mode_b.b).norm() < 1e-9 * mode_a.b.norm());
            for mode in [mode_a, mode_b] {
                assert!(mode.right_residual(&op) < 1e-8);
                assert!(mode.left_residual(&op) < 1e-8);
                let r = mode.left_boundary_residual(&WindowSpec::hann(), op.grid()).unwrap();
                assert!(r < 1e-3, "boundary residual {r}");
            }
        }
    }

    #[test]
    fn global_phase_rotates_amplitudes() {
        let (_, p) = two_soliton(183);
        let rot = Complex64::from_polar(1.0, 0.7);
        let base = forward_nft(&p, &FcPolicy::with_expected(2), &WindowSpec::hann()).unwrap();
        let turned = forward_nft(&p.scaled(rot), &FcPolicy::with_expected(2), &WindowSpec::hann()).unwrap();
        for (a, b) in base.entries().iter().zip(turned.entries()) {
            assert!((a.lambda - b.lambda).norm() < 1e-9);
            // q -> q e^{j theta} maps v_2 -> v_2 e^{-j theta}, hence b -> b e^{-j theta}
            assert!((b.b - a.b * rot.conj()).norm() < 1e-7 * a.b.norm());
        }
    }

    #[test]
    fn weak_sech_has_no_bound_state() {
        // the periodized window carries a band-edge eigenvalue near
        // j ln(2 / |a(0)|) / T, so the window must be wide enough to push it
        // under the threshold
        let grid = TimeGrid::new(256.0, 769).unwrap();
        let s = forward_nft(&sech_pulse(0.4, &grid).unwrap(), &FcPolicy::default(), &WindowSpec::hann()).unwrap();
        assert!(s.is_empty(), "{:?}", s.lambdas());
    }
}
