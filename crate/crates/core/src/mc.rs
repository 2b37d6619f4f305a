//! Monte-Carlo estimation of discrete-spectrum statistics and the
//! resolution sweep.
//!
//! Each realization perturbs the Fourier coefficients of the noiseless
//! pulse, reruns the collocation eigensolver, and tracks every reference
//! eigenvalue to its nearest perturbed counterpart. `b` is read with the
//! reference truncation times so that its perturbation matches the
//! linearized model. Moments are taken about the reference spectrum.

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::darboux::{darboux, sech_pulse};
use crate::error::{NftError, Result};
use crate::fc::{discrete_modes, fc_modes, FcPolicy, ShiftedWindows, WindowSpec};
use crate::linalg::norm2;
use crate::metrics::rel_err;
use crate::oracle::{find_eigenvalues, oracle_b, NewtonConfig};
use crate::perturbation::{summarize_full, CovarianceSummary};
use crate::presets::{Preset, SECH_AMPLITUDE};
use crate::signal::{dft_coefficients, sigma_from_snr, NoiseKind, NoiseModel, Pulse, TimeGrid};
use crate::spectrum::DiscreteSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseLevel {
    SnrDb(f64),
    Sigma(f64),
}

impl NoiseLevel {
    pub fn sigma(self, pulse: &Pulse) -> Result<f64> {
        match self {
            NoiseLevel::SnrDb(snr) => sigma_from_snr(pulse, snr),
            NoiseLevel::Sigma(s) if s >= 0.0 && s.is_finite() => Ok(s),
            NoiseLevel::Sigma(s) => Err(NftError::Config(format!("sigma must be finite and >= 0, got {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierPolicy {
    /// A match farther than `radius_factor * min_k Im(lambda_k)` rejects the realization.
    pub radius_factor: f64,
    /// Outlier fraction above which the result is flagged.
    pub max_fraction: f64,
}

impl Default for OutlierPolicy {
    fn default() -> Self {
        Self { radius_factor: 0.5, max_fraction: 0.1 }
    }
}

#[derive(Debug, Clone)]
pub struct MCConfig {
    pub realizations: usize,
    pub level: NoiseLevel,
    pub seed: u64,
    pub noise: NoiseKind,
    /// Threshold for perturbed eigenvalue candidates.
    pub tau_im: f64,
    pub outliers: OutlierPolicy,
    /// Worker cap; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl MCConfig {
    pub fn new(realizations: usize, snr_db: f64, seed: u64) -> Self {
        Self {
            realizations,
            level: NoiseLevel::SnrDb(snr_db),
            seed,
            noise: NoiseKind::White,
            tau_im: FcPolicy::default().tau_im,
            outliers: OutlierPolicy::default(),
            threads: None,
        }
    }
}

/// Greedy single-claim matching by ascending distance. Entry `k` is the
/// claimed candidate index and its distance, or `None` when candidates ran out.
pub fn match_greedy(reference: &[Complex64], candidates: &[Complex64]) -> Vec<Option<(usize, f64)>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(reference.len() * candidates.len());
    for (k, r) in reference.iter().enumerate() {
        for (j, c) in candidates.iter().enumerate() {
            pairs.push(((r - c).norm(), k, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![None; reference.len()];
    let mut taken = vec![false; candidates.len()];
    for (d, k, j) in pairs {
        if out[k].is_none() && !taken[j] {
            out[k] = Some((j, d));
            taken[j] = true;
        }
    }
    out
}

fn match_radius(reference: &[Complex64], factor: f64) -> f64 {
    factor * reference.iter().map(|l| l.im).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outlier {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Accepted {
    lambdas: Vec<Complex64>,
    bs: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct MCResult {
    pub k: usize,
    pub sigma: f64,
    pub realizations: usize,
    /// `lambda_samples[k][i]` is mode `k` in the `i`-th accepted realization.
    pub lambda_samples: Vec<Vec<Complex64>>,
    pub b_samples: Vec<Vec<Complex64>>,
    /// Second moments about the reference, physical units, ordered
    /// `(Re lambda, Im lambda, Re b, Im b)` with all modes in each block.
    pub covariance: Mat<f64>,
    /// Mean offset from the reference in the same layout.
    pub bias: Vec<f64>,
    pub outliers: Vec<Outlier>,
    /// Outlier fraction exceeded the policy limit.
    pub flagged: bool,
}

/// Reduction is sequential in realization order, so covariance entries are
/// bit-identical for any worker count.
pub const REDUCTION_ORDER: &str = "sequential by realization index (bit-identical across thread counts)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCSummary {
    pub k: usize,
    pub sigma: f64,
    pub realizations: usize,
    pub accepted: usize,
    pub outliers: usize,
    pub outlier_fraction: f64,
    pub flagged: bool,
    pub warning: Option<String>,
    pub var_lambda: Vec<f64>,
    pub var_b: Vec<f64>,
    pub re_cross_lambda12: Option<f64>,
    pub re_cross_b12: Option<f64>,
    pub bias: Vec<f64>,
    pub reduction: String,
}

impl MCResult {
    pub fn accepted(&self) -> usize {
        self.lambda_samples.first().map_or(0, |s| s.len())
    }

    pub fn outlier_fraction(&self) -> f64 {
        self.outliers.len() as f64 / self.realizations as f64
    }

    pub fn summary(&self) -> MCSummary {
        let (var_lambda, var_b, re_cross_lambda12, re_cross_b12) = summarize_full(&self.covariance, 1.0);
        let warning = if self.flagged {
            Some("regime outside first-order validity: outlier fraction above limit".to_string())
        } else if self.accepted() < 32 {
            Some(format!("only {} accepted realizations; estimates have wide error", self.accepted()))
        } else {
            None
        };
        MCSummary {
            k: self.k,
            sigma: self.sigma,
            realizations: self.realizations,
            accepted: self.accepted(),
            outliers: self.outliers.len(),
            outlier_fraction: self.outlier_fraction(),
            flagged: self.flagged,
            warning,
            var_lambda,
            var_b,
            re_cross_lambda12,
            re_cross_b12,
            bias: self.bias.clone(),
            reduction: REDUCTION_ORDER.to_string(),
        }
    }
}

fn realization(
    pulse: &Pulse,
    reference: &[Complex64],
    shifted: &[ShiftedWindows],
    model: &NoiseModel,
    config: &MCConfig,
    seed: u64,
) -> std::result::Result<Accepted, String> {
    let grid = pulse.grid();
    let noise = model.sample_coefficients(grid, seed).map_err(|e| e.to_string())?;
    let coeffs = dft_coefficients(pulse).perturbed(model.sigma, &noise);
    let op = crate::fc::build_operator(&coeffs);
    let policy = FcPolicy { tau_im: config.tau_im, expected: None };
    let modes = discrete_modes(&op, &policy).map_err(|e| e.to_string())?;
    let candidates: Vec<Complex64> = modes.iter().map(|m| m.lambda).collect();
    let radius = match_radius(reference, config.outliers.radius_factor);
    let mut lambdas = Vec::with_capacity(reference.len());
    let mut bs = Vec::with_capacity(reference.len());
    for (k, m) in match_greedy(reference, &candidates).into_iter().enumerate() {
        let (j, d) = m.ok_or_else(|| format!("mode {k} unmatched: {} candidates", candidates.len()))?;
        if d > radius {
            return Err(format!("mode {k} matched at distance {d:.3e} > {radius:.3e}"));
        }
        let psi = &modes[j].psi;
        let (den, num) = shifted[k].project(psi);
        if den.norm() < 1e-12 * norm2(&psi[..psi.len() / 2]) {
            return Err(format!("mode {k}: vanishing b denominator"));
        }
        lambdas.push(modes[j].lambda);
        bs.push(num / den);
    }
    Ok(Accepted { lambdas, bs })
}

/// Monte-Carlo statistics of the discrete spectrum of `pulse` around the
/// noiseless `reference`.
pub fn run_mc(pulse: &Pulse, reference: &DiscreteSpectrum, config: &MCConfig, windows: &WindowSpec) -> Result<MCResult> {
    if config.realizations < 2 {
        return Err(NftError::Config(format!("need at least 2 realizations, got {}", config.realizations)));
    }
    let k = reference.len();
    if k == 0 {
        return Err(NftError::Config("empty reference spectrum".into()));
    }
    let sigma = config.level.sigma(pulse)?;
    let model = NoiseModel { sigma, kind: config.noise.clone() };
    // validates the shaping matrix before any work
    model.sample_coefficients(pulse.grid(), config.seed)?;
    let ref_l = reference.lambdas();
    let ref_b = reference.amplitudes();
    let shifted: Vec<ShiftedWindows> =
        ref_l.iter().map(|&l| ShiftedWindows::new(l, windows, pulse.grid())).collect::<Result<_>>()?;

    let run = || -> Vec<std::result::Result<Accepted, String>> {
        (0..config.realizations)
            .into_par_iter()
            .map(|i| realization(pulse, &ref_l, &shifted, &model, config, config.seed.wrapping_add(i as u64)))
            .collect()
    };
    let outcomes = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| NftError::Config(e.to_string()))?
            .install(run),
        None => run(),
    };

    let dim = 4 * k;
    let mut sum = vec![0.0; dim];
    let mut outer = Mat::<f64>::zeros(dim, dim);
    let mut lambda_samples = vec![Vec::new(); k];
    let mut b_samples = vec![Vec::new(); k];
    let mut outliers = Vec::new();
    let mut x = vec![0.0; dim];
    for (i, out) in outcomes.into_iter().enumerate() {
        let acc = match out {
            Ok(a) => a,
            Err(reason) => {
                outliers.push(Outlier { index: i, seed: config.seed.wrapping_add(i as u64), reason });
                continue;
            }
        };
        for m in 0..k {
            let dl = acc.lambdas[m] - ref_l[m];
            let db = acc.bs[m] - ref_b[m];
            x[m] = dl.re;
            x[k + m] = dl.im;
            x[2 * k + m] = db.re;
            x[3 * k + m] = db.im;
            lambda_samples[m].push(acc.lambdas[m]);
            b_samples[m].push(acc.bs[m]);
        }
        for a in 0..dim {
            sum[a] += x[a];
            for b in 0..=a {
                outer[(a, b)] += x[a] * x[b];
            }
        }
    }
    let n = lambda_samples[0].len();
    let scale = if n > 0 { 1.0 / n as f64 } else { f64::NAN };
    let covariance = Mat::from_fn(dim, dim, |a, b| scale * if a >= b { outer[(a, b)] } else { outer[(b, a)] });
    let bias = sum.iter().map(|s| s * scale).collect();
    let flagged = outliers.len() as f64 > config.outliers.max_fraction * config.realizations as f64;
    Ok(MCResult { k, sigma, realizations: config.realizations, lambda_samples, b_samples, covariance, bias, outliers, flagged })
}

/// Empirical-vs-analytic covariance agreement, both in physical units.
#[derive(Debug, Clone)]
pub struct Comparison {
    /// `||C_emp - C_an||_F / ||C_emp||_F`.
    pub frobenius_rel: f64,
    /// `||C_emp - C_an||_F^2 / ||C_emp||_F^2`.
    pub frobenius_rel_squared: f64,
    /// `|C_emp - C_an| / |C_an|` per entry; entries with negligible analytic
    /// value are normalized by `max |C_an|` instead.
    pub per_entry_rel: Mat<f64>,
    pub empirical: CovarianceSummary,
    pub analytic: CovarianceSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub frobenius_rel: f64,
    pub frobenius_rel_squared: f64,
    pub max_entry_rel: f64,
    pub var_lambda_rel: Vec<f64>,
    pub var_b_rel: Vec<f64>,
    pub re_cross_lambda12_rel: Option<f64>,
    pub re_cross_b12_rel: Option<f64>,
}

fn rel(truth: f64, est: f64) -> f64 {
    (est - truth).abs() / truth.abs()
}

pub fn compare(empirical: &Mat<f64>, analytic: &Mat<f64>, sigma: f64) -> Comparison {
    let diff = empirical - analytic;
    let num = diff.norm_l2();
    let den = empirical.norm_l2();
    let floor = 1e-6 * analytic.norm_max();
    let per_entry_rel = Mat::from_fn(diff.nrows(), diff.ncols(), |i, j| {
        diff[(i, j)].abs() / analytic[(i, j)].abs().max(floor)
    });
    let summarize = |m: &Mat<f64>| {
        let (var_lambda, var_b, re_cross_lambda12, re_cross_b12) = summarize_full(m, 1.0);
        CovarianceSummary { sigma, var_lambda, var_b, re_cross_lambda12, re_cross_b12 }
    };
    Comparison {
        frobenius_rel: num / den,
        frobenius_rel_squared: (num / den).powi(2),
        per_entry_rel,
        empirical: summarize(empirical),
        analytic: summarize(analytic),
    }
}

impl Comparison {
    pub fn summary(&self) -> ComparisonSummary {
        let (e, a) = (&self.empirical, &self.analytic);
        let pair = |x: Option<f64>, y: Option<f64>| x.zip(y).map(|(t, s)| rel(t, s));
        ComparisonSummary {
            frobenius_rel: self.frobenius_rel,
            frobenius_rel_squared: self.frobenius_rel_squared,
            max_entry_rel: self.per_entry_rel.norm_max(),
            var_lambda_rel: a.var_lambda.iter().zip(&e.var_lambda).map(|(t, s)| rel(*t, *s)).collect(),
            var_b_rel: a.var_b.iter().zip(&e.var_b).map(|(t, s)| rel(*t, *s)).collect(),
            re_cross_lambda12_rel: pair(a.re_cross_lambda12, e.re_cross_lambda12),
            re_cross_b12_rel: pair(a.re_cross_b12, e.re_cross_b12),
        }
    }
}

/// Standard error of a sample second moment `C_ij` from `n` Gaussian draws,
/// `sqrt((C_ii C_jj + C_ij^2) / n)`.
pub fn covariance_standard_error(c: &Mat<f64>, n: usize) -> Mat<f64> {
    Mat::from_fn(c.nrows(), c.ncols(), |i, j| ((c[(i, i)] * c[(j, j)] + c[(i, j)].powi(2)) / n as f64).sqrt())
}

/// Sample skewness.
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// How a sweep regenerates its pulse at each resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseSource {
    Darboux,
    Sech { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTarget {
    pub truth: DiscreteSpectrum,
    pub duration: f64,
    pub source: PulseSource,
}

impl SweepTarget {
    pub fn preset(p: Preset) -> Self {
        let source = match p {
            Preset::Sech22 => PulseSource::Sech { amplitude: SECH_AMPLITUDE },
            _ => PulseSource::Darboux,
        };
        Self { truth: p.spectrum(), duration: p.duration(), source }
    }

    pub fn pulse(&self, samples: usize) -> Result<Pulse> {
        let grid = TimeGrid::new(self.duration, samples)?;
        match self.source {
            PulseSource::Darboux => darboux(&self.truth, &grid).map(|(p, _)| p),
            PulseSource::Sech { amplitude } => sech_pulse(amplitude, &grid),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fc,
    Oracle,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Fc => "fc",
            Algorithm::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub algorithm: Algorithm,
    /// 1-based mode index in descending `Im(lambda)`.
    pub k: usize,
    pub err_lambda: Option<f64>,
    pub err_b: Option<f64>,
    /// `None` on success, otherwise the failure reason.
    pub failure: Option<String>,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub policy: FcPolicy,
    pub windows: WindowSpec,
    pub oracle: Option<NewtonConfig>,
    pub outliers: OutlierPolicy,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            policy: FcPolicy::default(),
            windows: WindowSpec::hann(),
            oracle: Some(NewtonConfig::default()),
            outliers: OutlierPolicy::default(),
        }
    }
}

fn matched_rows(
    m: usize,
    algorithm: Algorithm,
    truth: &DiscreteSpectrum,
    radius: f64,
    found: std::result::Result<Vec<(Complex64, Result<Complex64>)>, String>,
) -> Vec<SweepRow> {
    let k = truth.len();
    let fail = |i: usize, why: String| SweepRow { m, algorithm, k: i + 1, err_lambda: None, err_b: None, failure: Some(why) };
    let found = match found {
        Ok(f) => f,
        Err(why) => return (0..k).map(|i| fail(i, why.clone())).collect(),
    };
    let candidates: Vec<Complex64> = found.iter().map(|f| f.0).collect();
    let entries = truth.entries();
    let mut rows: Vec<SweepRow> = match_greedy(&truth.lambdas(), &candidates)
        .into_iter()
        .enumerate()
        .map(|(i, hit)| match hit {
            None => fail(i, "no eigenvalue found".into()),
            Some((_, d)) if d > radius => fail(i, format!("nearest eigenvalue at distance {d:.3e}")),
            Some((j, _)) => match &found[j].1 {
                Ok(b) => SweepRow {
                    m,
                    algorithm,
                    k: i + 1,
                    err_lambda: Some(rel_err(entries[i].lambda, found[j].0)),
                    err_b: Some(rel_err(entries[i].b, *b)),
                    failure: None,
                },
                Err(e) => SweepRow {
                    err_lambda: Some(rel_err(entries[i].lambda, found[j].0)),
                    ..fail(i, format!("b: {e}"))
                },
            },
        })
        .collect();
    // a partially resolved spectrum is not a valid point on the curve
    let resolved = rows.iter().filter(|r| r.err_lambda.is_some()).count();
    if resolved < k {
        for r in rows.iter_mut().filter(|r| r.failure.is_none()) {
            r.failure = Some(format!("resolved {resolved} of {k} modes"));
        }
    }
    rows
}

/// Relative errors of FC and, optionally, the oracle against `target.truth`
/// for every sample count. Failures are recorded per row.
pub fn error_sweep(target: &SweepTarget, samples: &[usize], options: &SweepOptions) -> Vec<SweepRow> {
    let truth = &target.truth;
    let radius = match_radius(&truth.lambdas(), options.outliers.radius_factor);
    let mut rows = Vec::new();
    for &m in samples {
        let pulse = target.pulse(m);
        let fc = pulse.as_ref().map_err(|e| e.to_string()).and_then(|p| {
            fc_modes(&dft_coefficients(p), &options.policy, &options.windows)
                .map(|modes| modes.into_iter().map(|md| (md.lambda, Ok(md.b))).collect())
                .map_err(|e| e.to_string())
        });
        rows.extend(matched_rows(m, Algorithm::Fc, truth, radius, fc));
        if let Some(cfg) = &options.oracle {
            let or = pulse.as_ref().map_err(|e| e.to_string()).map(|p| {
                find_eigenvalues(p, &truth.lambdas(), cfg)
                    .roots
                    .into_iter()
                    .map(|r| (r, oracle_b(p, r)))
                    .collect()
            });
            rows.extend(matched_rows(m, Algorithm::Oracle, truth, radius, or));
        }
    }
    rows
}

fn opt(x: Option<f64>) -> String {
    x.map(crate::io::fmt_f64).unwrap_or_default()
}

/// `M,algorithm,k,err_lambda,err_b,status`; failed rows leave the error
/// fields empty and carry the reason in `status`.
pub fn format_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("M,algorithm,k,err_lambda,err_b,status\n");
    for r in rows {
        let status = match &r.failure {
            None => "ok".to_string(),
            Some(why) => format!("\"failed: {}\"", why.replace('"', "'")),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.m,
            r.algorithm.label(),
            r.k,
            opt(r.err_lambda),
            opt(r.err_b),
            status
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn greedy_matching_claims_once() {
        let reference = [c(0.0, 0.6), c(0.0, 0.3)];
        let m = match_greedy(&reference, &[c(0.0, 0.31), c(0.0, 0.58), c(0.0, 0.45)]);
        assert_eq!(m[0].unwrap().0, 1);
        assert_eq!(m[1].unwrap().0, 0);
        // one candidate closest to both: the nearer reference wins it
        let m = match_greedy(&reference, &[c(0.0, 0.5), c(0.0, 0.1)]);
        assert_eq!(m[0].unwrap().0, 0);
        assert_eq!(m[1].unwrap().0, 1);
        assert!(match_greedy(&reference, &[c(0.0, 0.5)])[1].is_none());
    }

    fn small_two_soliton() -> (Pulse, DiscreteSpectrum) {
        let pulse = Preset::TwoSoliton.pulse_on(&Preset::TwoSoliton.grid_with(101).unwrap()).unwrap();
        let reference = crate::fc::forward_nft(&pulse, &FcPolicy::with_expected(2), &WindowSpec::hann()).unwrap();
        (pulse, reference)
    }

    #[test]
    fn zero_noise_reproduces_reference() {
        let (pulse, reference) = small_two_soliton();
        let mut cfg = MCConfig::new(3, 0.0, 1);
        cfg.level = NoiseLevel::Sigma(0.0);
        let r = run_mc(&pulse, &reference, &cfg, &WindowSpec::hann()).unwrap();
        assert_eq!(r.accepted(), 3);
        assert!(r.covariance.norm_max() == 0.0);
        for k in 0..2 {
            assert!(r.lambda_samples[k].iter().all(|&l| l == reference.entries()[k].lambda));
            assert!(r.b_samples[k].iter().all(|&b| b == reference.entries()[k].b));
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let (pulse, reference) = small_two_soliton();
        let mut cfg = MCConfig::new(6, 15.0, 42);
        cfg.threads = Some(1);
        let a = run_mc(&pulse, &reference, &cfg, &WindowSpec::hann()).unwrap();
        cfg.threads = Some(3);
        let b = run_mc(&pulse, &reference, &cfg, &WindowSpec::hann()).unwrap();
        assert_eq!(a.covariance, b.covariance);
        assert_eq!(a.lambda_samples, b.lambda_samples);
        assert!(a.outliers.is_empty());
        assert!(crate::perturbation::min_symmetric_eigenvalue(&a.covariance).unwrap() >= -1e-12 * a.covariance.norm_l2());
    }

    #[test]
    fn too_few_realizations_is_config_error() {
        let (pulse, reference) = small_two_soliton();
        assert!(matches!(
            run_mc(&pulse, &reference, &MCConfig::new(1, 10.0, 0), &WindowSpec::hann()),
            Err(NftError::Config(_))
        ));
    }

    #[test]
    fn tiny_grid_fails_every_row() {
        let rows = error_sweep(&SweepTarget::preset(Preset::TwoSoliton), &[3], &SweepOptions::default());
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(SweepRow::failed), "{rows:?}");
        let csv = format_sweep_csv(&rows);
        assert!(csv.starts_with("M,algorithm,k,err_lambda,err_b,status\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn skewness_of_symmetric_data_is_zero() {
        assert!(skewness(&[-2.0, -1.0, 0.0, 1.0, 2.0]).abs() < 1e-15);
        assert!(skewness(&[0.0, 0.0, 0.0, 10.0]) > 1.0);
    }
}
