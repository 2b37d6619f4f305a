//! Uniform time grids, sampled pulses, their Fourier coefficients and the
//! additive Gaussian noise model.
//!
//! Every array indexed by a time sample `m` or a frequency `n` is stored in
//! ascending logical order `-N, ..., N`, so element `i` holds index `i - N`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{NftError, Result};

/// `M = 2N + 1` samples `t_m = m T / M` strictly inside `[-T/2, T/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    duration: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(duration: f64, samples: usize) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(NftError::InvalidGrid(format!(
                "duration must be positive and finite, got {duration}"
            )));
        }
        if samples < 3 || samples.is_multiple_of(2) {
            return Err(NftError::InvalidGrid(format!(
                "sample count must be odd and >= 3, got {samples}"
            )));
        }
        Ok(Self { duration, samples })
    }

    /// Window length `T`.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Sample count `M`.
    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half-bandwidth index `N = (M - 1) / 2`.
    pub fn half(&self) -> usize {
        (self.samples - 1) / 2
    }

    /// Sample spacing `T / M`.
    pub fn step(&self) -> f64 {
        self.duration / self.samples as f64
    }

    /// Fundamental angular frequency `2 pi / T`.
    pub fn omega0(&self) -> f64 {
        2.0 * PI / self.duration
    }

    /// Logical indices `-N..=N`.
    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let n = self.half() as i64;
        -n..=n
    }

    pub fn time(&self, m: i64) -> f64 {
        m as f64 * self.step()
    }

    pub fn times(&self) -> Vec<f64> {
        self.indices().map(|m| self.time(m)).collect()
    }
}

/// Complex samples `q[m] = q(t_m)` on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    grid: TimeGrid,
    samples: Vec<Complex64>,
}

impl Pulse {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(NftError::InvalidPulse(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(NftError::InvalidPulse(format!(
                "non-finite sample at m = {}",
                i as i64 - grid.half() as i64
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f(t_m)` of an analytic function.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = grid.indices().map(|m| f(grid.time(m))).collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// `sum_m |q[m]|^2`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|z| z * factor).collect() }
    }

    /// `q[m] + sigma * noise[m]`.
    pub fn with_noise(&self, sigma: f64, noise: &[Complex64]) -> Result<Self> {
        if noise.len() != self.samples.len() {
            return Err(NftError::InvalidPulse("noise length does not match pulse".into()));
        }
        let samples = self.samples.iter().zip(noise).map(|(q, w)| q + w * sigma).collect();
        Self::new(self.grid, samples)
    }
}

/// Fourier-series coefficients `c[n]`, `n = -N..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    grid: TimeGrid,
    coeffs: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn new(grid: TimeGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(NftError::InvalidPulse(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c[n]` for `|n| <= N`, zero outside the band.
    pub fn at(&self, n: i64) -> Complex64 {
        let half = self.grid.half() as i64;
        if n.abs() > half {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + half) as usize]
        }
    }

    /// `c[n] + sigma * noise[n]`.
    pub fn perturbed(&self, sigma: f64, noise: &[Complex64]) -> Self {
        let coeffs = self.coeffs.iter().zip(noise).map(|(c, w)| c + w * sigma).collect();
        Self { grid: self.grid, coeffs }
    }

    /// Inverse transform back to the samples `q[m] = sum_n c[n] e^{j 2 pi m n / M}`.
    pub fn to_pulse(&self) -> Result<Pulse> {
        Pulse::new(self.grid, idft(&self.grid, &self.coeffs))
    }
}

fn twiddles(m: usize, sign: f64) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / m as f64))
        .collect()
}

fn transform(grid: &TimeGrid, input: &[Complex64], sign: f64, scale: f64) -> Vec<Complex64> {
    let len = grid.len() as i64;
    let half = grid.half() as i64;
    let table = twiddles(grid.len(), sign);
    (-half..=half)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, x) in input.iter().enumerate() {
                let m = i as i64 - half;
                let k = (m * n).rem_euclid(len) as usize;
                acc += x * table[k];
            }
            acc * scale
        })
        .collect()
}

/// `c[n] = (1/M) sum_m q[m] e^{-j 2 pi m n / M}` by direct summation.
pub fn dft(grid: &TimeGrid, samples: &[Complex64]) -> Vec<Complex64> {
    transform(grid, samples, -1.0, 1.0 / grid.len() as f64)
}

/// Inverse of [`dft`].
pub fn idft(grid: &TimeGrid, coeffs: &[Complex64]) -> Vec<Complex64> {
    transform(grid, coeffs, 1.0, 1.0)
}

pub fn dft_coefficients(pulse: &Pulse) -> FourierCoefficients {
    FourierCoefficients { grid: pulse.grid, coeffs: dft(&pulse.grid, &pulse.samples) }
}

/// I.i.d. circularly-symmetric complex Gaussian samples with `E|x|^2 = 1`.
pub fn sample_awgn(grid: &TimeGrid, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..grid.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// Noise scale such that `SNR = sum |q[m]|^2 / (M sigma^2)` equals `snr_db`.
pub fn sigma_from_snr(pulse: &Pulse, snr_db: f64) -> Result<f64> {
    let energy = pulse.energy();
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(NftError::DegeneratePulse(format!("pulse energy is {energy}")));
    }
    if !snr_db.is_finite() {
        return Err(NftError::Config(format!("SNR must be finite, got {snr_db}")));
    }
    let linear = 10f64.powf(snr_db / 10.0);
    Ok((energy / (pulse.grid.len() as f64 * linear)).sqrt())
}

/// Inverse of [`sigma_from_snr`], in dB.
pub fn snr_db(pulse: &Pulse, sigma: f64) -> f64 {
    10.0 * (pulse.energy() / (pulse.grid.len() as f64 * sigma * sigma)).log10()
}

/// Spectral shape of the noise on `(Re c~; Im c~)`.
#[derive(Debug, Clone)]
pub enum NoiseKind {
    White,
    /// Real `2M x 2M` shaping matrix `G` with `tr(G G^T) = 2M`.
    Colored(Mat<f64>),
}

#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub sigma: f64,
    pub kind: NoiseKind,
}

impl NoiseModel {
    pub fn white(sigma: f64) -> Self {
        Self { sigma, kind: NoiseKind::White }
    }

    pub fn colored(sigma: f64, shaping: Mat<f64>) -> Self {
        Self { sigma, kind: NoiseKind::Colored(shaping) }
    }

    fn check(&self, grid: &TimeGrid) -> Result<()> {
        if let NoiseKind::Colored(g) = &self.kind {
            let dim = 2 * grid.len();
            if g.nrows() != dim || g.ncols() != dim {
                return Err(NftError::InvalidShapingMatrix(format!(
                    "expected {dim}x{dim}, got {}x{}",
                    g.nrows(),
                    g.ncols()
                )));
            }
            let trace = g.norm_l2().powi(2);
            if ((trace - dim as f64) / dim as f64).abs() > 1e-9 {
                return Err(NftError::InvalidShapingMatrix(format!(
                    "tr(G G^T) = {trace}, expected {dim}"
                )));
            }
        }
        Ok(())
    }

    /// Unit-noise coefficient draw `c~`: white time-domain noise is
    /// transformed, then shaped by `G` when colored.
    pub fn sample_coefficients(&self, grid: &TimeGrid, seed: u64) -> Result<Vec<Complex64>> {
        self.check(grid)?;
        let white = dft(grid, &sample_awgn(grid, seed));
        match &self.kind {
            NoiseKind::White => Ok(white),
            NoiseKind::Colored(g) => {
                let m = grid.len();
                let stacked = Mat::<f64>::from_fn(2 * m, 1, |i, _| {
                    if i < m {
                        white[i].re
                    } else {
                        white[i - m].im
                    }
                });
                let shaped = g * &stacked;
                Ok((0..m).map(|i| Complex64::new(shaped[(i, 0)], shaped[(i + m, 0)])).collect())
            }
        }
    }
}

/// Covariance `R_c~` of `(Re c~; Im c~)` for unit `sigma`.
pub fn colored_covariance(noise: &NoiseModel, grid: &TimeGrid) -> Result<Mat<f64>> {
    noise.check(grid)?;
    let dim = 2 * grid.len();
    let scale = 1.0 / dim as f64;
    Ok(match &noise.kind {
        NoiseKind::White => Mat::from_fn(dim, dim, |i, j| if i == j { scale } else { 0.0 }),
        NoiseKind::Colored(g) => {
            let mut r = g * g.transpose();
            for j in 0..dim {
                for i in 0..dim {
                    r[(i, j)] *= scale;
                }
            }
            // exact symmetry
            for j in 0..dim {
                for i in 0..j {
                    let avg = 0.5 * (r[(i, j)] + r[(j, i)]);
                    r[(i, j)] = avg;
                    r[(j, i)] = avg;
                }
            }
            r
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize) -> TimeGrid {
        TimeGrid::new(10.0, m).unwrap()
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(TimeGrid::new(1.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 5).is_err());
        assert!(TimeGrid::new(f64::NAN, 5).is_err());
        let g = TimeGrid::new(35.34, 365).unwrap();
        assert_eq!(g.half(), 182);
        assert!(g.time(-182) > -35.34 / 2.0);
        assert!(g.time(182) < 35.34 / 2.0);
    }

    #[test]
    fn dft_of_zero_and_dc() {
        let g = grid(7);
        let zero = Pulse::zeros(g);
        assert!(dft_coefficients(&zero).coeffs().iter().all(|c| c.norm() == 0.0));
        let dc = Pulse::new(g, vec![Complex64::new(1.0, 0.0); 7]).unwrap();
        let c = dft_coefficients(&dc);
        assert!((c.at(0) - 1.0).norm() < 1e-15);
        for n in [-3, -2, -1, 1, 2, 3] {
            assert!(c.at(n).norm() < 1e-15);
        }
        assert_eq!(c.at(4), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dft_matches_definition_for_single_tone() {
        // q[m] = e^{j 2 pi m n0 / M} has c[n0] = 1 exactly
        let g = grid(9);
        let n0 = 3;
        let pulse =
            Pulse::from_fn(g, |t| Complex64::from_polar(1.0, g.omega0() * n0 as f64 * t)).unwrap();
        let c = dft_coefficients(&pulse);
        for n in g.indices() {
            let expected = if n == n0 { 1.0 } else { 0.0 };
            assert!((c.at(n) - expected).norm() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn pulse_rejects_nan_and_length() {
        let g = grid(5);
        let mut s = vec![Complex64::new(0.0, 0.0); 5];
        s[2].im = f64::NAN;
        assert!(Pulse::new(g, s).is_err());
        assert!(Pulse::new(g, vec![Complex64::new(0.0, 0.0); 4]).is_err());
    }

    #[test]
    fn awgn_is_deterministic_and_unit_power() {
        let g = TimeGrid::new(1.0, 1_000_001).unwrap();
        let a = sample_awgn(&g, 17);
        let b = sample_awgn(&g, 17);
        assert_eq!(a, b);
        assert_ne!(a, sample_awgn(&g, 18));
        let power = a.iter().map(|z| z.norm_sqr()).sum::<f64>() / a.len() as f64;
        assert!((power - 1.0).abs() < 5e-3, "power {power}");
        let re = a.iter().map(|z| z.re * z.re).sum::<f64>() / a.len() as f64;
        assert!((re - 0.5).abs() < 5e-3);
    }

    #[test]
    fn sigma_from_snr_formula() {
        let g = grid(5);
        let unit = Pulse::new(g, vec![Complex64::new(1.0, 0.0); 5]).unwrap();
        assert!((sigma_from_snr(&unit, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((sigma_from_snr(&unit, 10.0).unwrap() - 10f64.powf(-0.5)).abs() < 1e-15);
        assert!(matches!(
            sigma_from_snr(&Pulse::zeros(g), 3.0),
            Err(NftError::DegeneratePulse(_))
        ));
        let s = sigma_from_snr(&unit, 7.25).unwrap();
        assert!((snr_db(&unit, s) - 7.25).abs() < 1e-12);
    }

    #[test]
    fn white_covariance_is_scaled_identity() {
        let g = TimeGrid::new(1.0, 3).unwrap();
        let r = colored_covariance(&NoiseModel::white(1.0), &g).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == j { 1.0 / 6.0 } else { 0.0 };
                assert_eq!(r[(i, j)], expected);
            }
        }
        let eye = Mat::<f64>::from_fn(6, 6, |i, j| if i == j { 1.0 } else { 0.0 });
        let rc = colored_covariance(&NoiseModel::colored(1.0, eye), &g).unwrap();
        assert_eq!(r, rc);
    }

    #[test]
    fn shaping_trace_is_enforced() {
        let g = TimeGrid::new(1.0, 3).unwrap();
        let bad = Mat::<f64>::from_fn(6, 6, |i, j| if i == j { 2.0 } else { 0.0 });
        assert!(matches!(
            colored_covariance(&NoiseModel::colored(1.0, bad), &g),
            Err(NftError::InvalidShapingMatrix(_))
        ));
    }
}
