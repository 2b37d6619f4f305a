//! Transfer-matrix reference for the scattering data.
//!
//! Each sample `q[m]` is held constant over the cell
//! `[t_m - h/2, t_m + h/2]`, `h = T/M`, so the cells tile `[-T/2, T/2]`
//! exactly. Over a cell the Zakharov-Shabat system has the constant matrix
//! `A = [[-j lambda, q], [-q^*, j lambda]]` and the propagator is the exact
//! exponential `exp(A h) = cosh(kappa h) I + sinh(kappa h) / kappa A`,
//! `kappa^2 = -lambda^2 - |q|^2`. The scheme is second-order accurate in `h`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::darboux::check_exponent;
use crate::error::Result;
use crate::signal::Pulse;

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const J: Complex64 = Complex64::new(0.0, 1.0);

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

/// `f = cosh(kappa h)`, `g = sinh(kappa h) / kappa` and their derivatives
/// with respect to `z = kappa^2`.
fn cell_functions(z: Complex64, h: f64) -> (Complex64, Complex64, Complex64, Complex64) {
    let x = z * h * h;
    if x.norm() < 1e-3 {
        let f = ONE + x / 2.0 + x * x / 24.0 + x * x * x / 720.0;
        let g = (ONE + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0) * h;
        let df = g * (h / 2.0);
        let dg = (ONE / 6.0 + x / 60.0 + x * x / 1680.0) * (h * h * h);
        (f, g, df, dg)
    } else {
        let kappa = z.sqrt();
        let f = (kappa * h).cosh();
        let g = (kappa * h).sinh() / kappa;
        let df = g * (h / 2.0);
        let dg = (f * h - g) / (z * 2.0);
        (f, g, df, dg)
    }
}

/// Cell propagator and its derivative in `lambda`.
fn cell(q: Complex64, lambda: Complex64, h: f64) -> (Mat2, Mat2) {
    let a: Mat2 = [[-J * lambda, q], [-q.conj(), J * lambda]];
    let z = -lambda * lambda - q.norm_sqr();
    let (f, g, df, dg) = cell_functions(z, h);
    let e = [[f + g * a[0][0], g * a[0][1]], [g * a[1][0], f + g * a[1][1]]];
    // dz/dlambda = -2 lambda, dA/dlambda = diag(-j, j)
    let dz = -lambda * 2.0;
    let dfl = df * dz;
    let dgl = dg * dz;
    let de = [
        [dfl + dgl * a[0][0] - g * J, dgl * a[0][1]],
        [dgl * a[1][0], dfl + dgl * a[1][1] + g * J],
    ];
    (e, de)
}

/// Scattering data at one spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringState {
    pub lambda: Complex64,
    /// `(v_1, v_2)` at `T/2` for the Jost solution normalized at `-T/2`.
    pub v: [Complex64; 2],
    pub a_hat: Complex64,
    pub b_hat: Complex64,
    pub a_lambda_hat: Complex64,
}

/// Propagate the Jost solution `v(-T/2) = (e^{j lambda T/2}, 0)` across the
/// window and read `a = v_1 e^{j lambda T/2}`, `b = v_2 e^{-j lambda T/2}`.
pub fn propagate(pulse: &Pulse, lambda: Complex64) -> Result<ScatteringState> {
    let grid = pulse.grid();
    let half = grid.duration() / 2.0;
    check_exponent([lambda], half)?;
    let h = grid.step();

    let mut phi: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
    let mut dphi: Mat2 = [[ZERO, ZERO], [ZERO, ZERO]];
    for &q in pulse.samples() {
        let (e, de) = cell(q, lambda, h);
        dphi = add(&mul(&de, &phi), &mul(&e, &dphi));
        phi = mul(&e, &phi);
    }

    let start = (J * lambda * half).exp();
    let v = [phi[0][0] * start, phi[1][0] * start];
    let full = (J * lambda * grid.duration()).exp();
    let a_hat = phi[0][0] * full;
    let b_hat = phi[1][0];
    let a_lambda_hat = (dphi[0][0] + J * grid.duration() * phi[0][0]) * full;
    Ok(ScatteringState { lambda, v, a_hat, b_hat, a_lambda_hat })
}

/// Newton settings for [`find_eigenvalues`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub step_tolerance: f64,
    pub max_iterations: usize,
    pub dedup_tolerance: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { step_tolerance: 1e-12, max_iterations: 50, dedup_tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RootFailure {
    /// The initial guess was not in the upper half-plane.
    RejectedGuess,
    /// The iterate left the upper half-plane.
    LeftUpperHalfPlane,
    /// `a'(lambda)` vanished or the step was not finite.
    Stalled,
    NoConvergence,
    Numerical(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootAttempt {
    pub guess: Complex64,
    pub root: Option<Complex64>,
    pub iterations: usize,
    pub failure: Option<RootFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRoots {
    /// Distinct converged roots, in order of first appearance.
    pub roots: Vec<Complex64>,
    pub attempts: Vec<RootAttempt>,
}

fn newton(pulse: &Pulse, guess: Complex64, cfg: &NewtonConfig) -> RootAttempt {
    let fail = |iterations, failure| RootAttempt { guess, root: None, iterations, failure: Some(failure) };
    if !(guess.im > 0.0) {
        return fail(0, RootFailure::RejectedGuess);
    }
    let mut lambda = guess;
    for it in 1..=cfg.max_iterations {
        let state = match propagate(pulse, lambda) {
            Ok(s) => s,
            Err(e) => return fail(it, RootFailure::Numerical(e.to_string())),
        };
        let step = state.a_hat / state.a_lambda_hat;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return fail(it, RootFailure::Stalled);
        }
        lambda -= step;
        if !(lambda.im > 0.0) {
            return fail(it, RootFailure::LeftUpperHalfPlane);
        }
        if step.norm() < cfg.step_tolerance {
            return RootAttempt { guess, root: Some(lambda), iterations: it, failure: None };
        }
    }
    fail(cfg.max_iterations, RootFailure::NoConvergence)
}

/// Zeros of `a(lambda)` reached by Newton iteration from each guess.
/// Failures are recorded per guess.
pub fn find_eigenvalues(pulse: &Pulse, guesses: &[Complex64], cfg: &NewtonConfig) -> OracleRoots {
    let attempts: Vec<RootAttempt> = guesses.iter().map(|&g| newton(pulse, g, cfg)).collect();
    let mut roots: Vec<Complex64> = Vec::new();
    for r in attempts.iter().filter_map(|a| a.root) {
        if roots.iter().all(|x| (x - r).norm() >= cfg.dedup_tolerance) {
            roots.push(r);
        }
    }
    OracleRoots { roots, attempts }
}

/// `b(lambda)` by forward propagation. Accuracy degrades as
/// `Im(lambda) T` grows, because `b` is read from a component that has
/// grown by `e^{Im(lambda) T}` relative to its rounding error.
pub fn oracle_b(pulse: &Pulse, lambda: Complex64) -> Result<Complex64> {
    Ok(propagate(pulse, lambda)?.b_hat)
}

/// `max_i | |a(xi_i)|^2 - 1 |` over real spectral parameters.
pub fn unimodularity_defect(pulse: &Pulse, xis: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &xi in xis {
        let a = propagate(pulse, Complex64::new(xi, 0.0))?.a_hat;
        worst = worst.max((a.norm_sqr() - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::darboux;
    use crate::signal::TimeGrid;
    use crate::spectrum::{soliton_a_coefficient, DiscreteSpectrum};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn soliton(lambdas: &[Complex64], bs: &[Complex64], t: f64, m: usize) -> (DiscreteSpectrum, Pulse) {
        let s = DiscreteSpectrum::from_pairs(lambdas, bs).unwrap();
        let (p, _) = darboux(&s, &TimeGrid::new(t, m).unwrap()).unwrap();
        (s, p)
    }

    #[test]
    fn zero_pulse() {
        let p = Pulse::zeros(TimeGrid::new(10.0, 65).unwrap());
        for lam in [c(0.3, 0.0), c(-1.0, 0.0), c(0.2, 0.5)] {
            let s = propagate(&p, lam).unwrap();
            assert!((s.a_hat - 1.0).norm() < 1e-13);
            assert_eq!(s.b_hat, c(0.0, 0.0));
        }
        let roots = find_eigenvalues(&p, &[c(0.0, 0.5), c(0.0, -0.5)], &NewtonConfig::default());
        assert!(roots.roots.is_empty());
        assert!(roots.attempts.iter().all(|a| a.failure.is_some()));
        assert_eq!(roots.attempts[1].failure, Some(RootFailure::RejectedGuess));
        assert_eq!(oracle_b(&p, c(0.0, 0.5)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (_, p) = soliton(&[c(0.0, 0.6), c(0.0, 0.3)], &[c(0.0, 1.0 / 3.0); 2], 35.34, 365);
        let lam = c(0.1, 0.45);
        let d = propagate(&p, lam).unwrap().a_lambda_hat;
        let eps = 1e-6;
        let fd = (propagate(&p, lam + eps).unwrap().a_hat - propagate(&p, lam - eps).unwrap().a_hat) / (2.0 * eps);
        assert!((d - fd).norm() < 1e-6 * d.norm(), "{d} vs {fd}");
    }

    #[test]
    fn two_soliton_scattering_data() {
        let (s, p) = soliton(&[c(0.0, 0.6), c(0.0, 0.3)], &[c(0.0, 1.0 / 3.0); 2], 35.34, 4095);
        let a = propagate(&p, c(0.0, 1.0)).unwrap().a_hat;
        assert!((a - soliton_a_coefficient(&s, c(0.0, 1.0)).unwrap()).norm() <= 1e-4);
        let roots = find_eigenvalues(&p, &[c(0.01, 0.59), c(0.0, 0.31), c(0.0, 0.6)], &NewtonConfig::default());
        assert_eq!(roots.roots.len(), 2);
        for (root, want) in roots.roots.iter().zip([c(0.0, 0.6), c(0.0, 0.3)]) {
            // converged onto a zero of the discretized a, which sits O(h^2) from the exact one
            let state = propagate(&p, *root).unwrap();
            assert!(state.a_hat.norm() <= 1e-9 * state.a_lambda_hat.norm());
            assert!((root - want).norm() < 2e-5, "{root}");
        }
        let xis: Vec<f64> = (0..64).map(|i| -2.0 + 4.0 * i as f64 / 63.0).collect();
        assert!(unimodularity_defect(&p, &xis).unwrap() <= 1e-4);

        let (_, fine) = soliton(&[c(0.0, 0.6), c(0.0, 0.3)], &[c(0.0, 1.0 / 3.0); 2], 35.34, 8191);
        assert!(propagate(&fine, c(0.0, 0.6)).unwrap().a_hat.norm() <= 1e-6);
    }

    #[test]
    fn single_soliton_b() {
        let (_, p) = soliton(&[c(0.0, 0.5)], &[c(1.0, 0.0)], 30.0, 8191);
        let b = oracle_b(&p, c(0.0, 0.5)).unwrap();
        assert!((b - 1.0).norm() <= 1e-4, "{b}");
    }

    #[test]
    fn second_order_convergence() {
        // fitted slope of log(err) against log(M)
        let errs: Vec<(f64, f64)> = [255usize, 511, 1023, 2047]
            .iter()
            .map(|&m| {
                let (_, p) = soliton(&[c(0.0, 0.5)], &[c(1.0, 0.0)], 30.0, m);
                let r = find_eigenvalues(&p, &[c(0.0, 0.49)], &NewtonConfig::default());
                ((m as f64).ln(), (r.roots[0] - c(0.0, 0.5)).norm().ln())
            })
            .collect();
        let n = errs.len() as f64;
        let mx = errs.iter().map(|e| e.0).sum::<f64>() / n;
        let my = errs.iter().map(|e| e.1).sum::<f64>() / n;
        let slope = errs.iter().map(|e| (e.0 - mx) * (e.1 - my)).sum::<f64>()
            / errs.iter().map(|e| (e.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 2.0).abs() <= 0.3, "slope {slope}");
    }
}
