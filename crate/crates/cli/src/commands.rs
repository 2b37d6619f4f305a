use anyhow::{Context, Result};
use nft_core::fc::{build_operator, fc_modes, FcMode};
use nft_core::io::{format_matrix_csv, format_pulse, format_spectrum, parse_matrix_csv};
use nft_core::mc::{compare, error_sweep, format_sweep_csv, MCConfig, NoiseLevel, OutlierPolicy, SweepOptions, SweepTarget};
use nft_core::oracle::NewtonConfig;
use nft_core::perturbation::{build_kits, covariance_report, min_symmetric_eigenvalue};
use nft_core::presets::{two_soliton_with_phase, SECH_AMPLITUDE};
use nft_core::spectrum::SpectralPair;
use nft_core::{
    colored_covariance, darboux, dft_coefficients, read_pulse, read_spectrum, rel_err, run_mc, sech_pulse,
    sigma_from_snr, Complex64, DiscreteSpectrum, FcPolicy, NoiseKind, NoiseModel, Preset, Pulse, TimeGrid,
    TruncationPolicy, WindowKind, WindowSpec,
};
use serde::Serialize;
use serde_json::json;

use crate::output::OutputDir;
use crate::{usage, Cli, Command, FcArgs, McArgs, NftArgs, NoiseArgs, NoiseChoice, PulseInput, StatsArgs, SweepArgs, SynthArgs, WindowChoice};

pub fn run(cli: &Cli) -> Result<()> {
    let out = OutputDir::create(&cli.out_dir)?;
    match &cli.command {
        Command::Synth(a) => synth(cli, a, out),
        Command::Nft(a) => nft(cli, a, out),
        Command::Stats(a) => stats(cli, a, out),
        Command::Mc(a) => mc(cli, a, out),
        Command::Sweep(a) => sweep(cli, a, out),
    }
}

fn globals(cli: &Cli) -> serde_json::Value {
    json!({ "out_dir": cli.out_dir, "threads": cli.threads })
}

fn progress(cli: &Cli, msg: impl AsRef<str>) {
    if cli.verbose > 0 {
        eprintln!("{}", msg.as_ref());
    }
}

struct LoadedPulse {
    pulse: Pulse,
    /// Exact spectrum when the pulse came from a preset.
    truth: Option<DiscreteSpectrum>,
}

fn preset_pulse(preset: Preset, grid: &TimeGrid, alpha: Option<f64>) -> Result<LoadedPulse> {
    let (pulse, truth) = match (preset, alpha) {
        (Preset::TwoSoliton, Some(a)) => {
            let spectrum = two_soliton_with_phase(a);
            (darboux(&spectrum, grid)?.0, spectrum)
        }
        (_, Some(_)) => return Err(usage("--alpha applies only to the 2sol preset")),
        (p, None) => (p.pulse_on(grid)?, p.spectrum()),
    };
    Ok(LoadedPulse { pulse, truth: Some(truth) })
}

fn load_pulse(input: &PulseInput) -> Result<LoadedPulse> {
    match (&input.pulse, input.preset) {
        (Some(path), _) => Ok(LoadedPulse {
            pulse: read_pulse(path).with_context(|| format!("reading {}", path.display()))?,
            truth: None,
        }),
        (None, Some(p)) => {
            let grid = p.grid_with(input.samples.unwrap_or(p.default_samples()))?;
            preset_pulse(p, &grid, input.alpha)
        }
        (None, None) => Err(usage("one of --pulse or --preset is required")),
    }
}

fn policy(fc: &FcArgs, truth: Option<&DiscreteSpectrum>) -> FcPolicy {
    FcPolicy { tau_im: fc.tau, expected: fc.expected.or(truth.map(|t| t.len())) }
}

fn windows(fc: &FcArgs) -> WindowSpec {
    let kind = match fc.window {
        WindowChoice::Hann => WindowKind::Hann,
        WindowChoice::Rect => WindowKind::Rectangular,
    };
    let truncation = if fc.no_truncate { TruncationPolicy::none() } else { TruncationPolicy::default() };
    WindowSpec { first: kind.clone(), second: kind, truncation }
}

fn noise_kind(args: &NoiseArgs) -> Result<NoiseKind> {
    match (args.noise, &args.shaping) {
        (NoiseChoice::White, None) => Ok(NoiseKind::White),
        (NoiseChoice::White, Some(_)) => Err(usage("--shaping requires --noise colored")),
        (NoiseChoice::Colored, None) => Err(usage("--noise colored requires --shaping")),
        (NoiseChoice::Colored, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(NoiseKind::Colored(parse_matrix_csv(&text)?))
        }
    }
}

fn spectrum_of(modes: &[FcMode]) -> Result<DiscreteSpectrum> {
    Ok(DiscreteSpectrum::new(modes.iter().map(|m| SpectralPair { lambda: m.lambda, b: m.b }).collect())?)
}

fn synth(cli: &Cli, a: &SynthArgs, mut out: OutputDir) -> Result<()> {
    let grid_or = |dur: f64, m: usize| TimeGrid::new(a.duration.unwrap_or(dur), a.samples.unwrap_or(m));
    let (pulse, jost) = if let Some(path) = &a.spectrum {
        let spectrum = read_spectrum(path).with_context(|| format!("reading {}", path.display()))?;
        let (Some(t), Some(m)) = (a.duration, a.samples) else {
            return Err(usage("--spectrum requires --duration and --samples"));
        };
        let (p, j) = darboux(&spectrum, &TimeGrid::new(t, m)?)?;
        (p, Some(j))
    } else if let Some(p) = a.preset {
        let grid = grid_or(p.duration(), p.default_samples())?;
        let loaded = preset_pulse(p, &grid, a.alpha)?;
        let jost = match p.is_multisoliton() {
            true => Some(darboux(loaded.truth.as_ref().expect("preset truth"), &grid)?.1),
            false => None,
        };
        (loaded.pulse, jost)
    } else if let Some(amp) = a.sech {
        let p = Preset::Sech22;
        (sech_pulse(amp, &grid_or(p.duration(), p.default_samples())?)?, None)
    } else {
        return Err(usage("one of --spectrum, --preset or --sech is required"));
    };
    out.write("pulse.txt", format_pulse(&pulse))?;
    if a.jost {
        let Some(jost) = jost else {
            return Err(usage("--jost is available only for multi-soliton pulses"));
        };
        let mut csv = String::from("t,k,re_v1,im_v1,re_v2,im_v2\n");
        let times = jost.grid.times();
        for k in 0..jost.lambdas.len() {
            let (v1, v2) = jost.normalized(k);
            for (i, t) in times.iter().enumerate() {
                csv.push_str(&format!("{t:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e}\n", k + 1, v1[i].re, v1[i].im, v2[i].re, v2[i].im));
            }
        }
        out.write("jost.csv", csv)?;
    }
    progress(cli, format!("wrote {} samples, T = {}", pulse.grid().len(), pulse.grid().duration()));
    let extra = json!({ "global": globals(cli), "sech_default_amplitude": SECH_AMPLITUDE });
    out.finish("synth", a, extra)
}

#[derive(Serialize)]
struct ModeDiagnostics {
    k: usize,
    lambda: Complex64,
    b: Complex64,
    truncation_time: f64,
    window_first: String,
    window_second: String,
    right_residual: f64,
    left_residual: f64,
    boundary_residual: Option<f64>,
    err_lambda: Option<f64>,
    err_b: Option<f64>,
}

fn nft(cli: &Cli, a: &NftArgs, mut out: OutputDir) -> Result<()> {
    let loaded = load_pulse(&a.input)?;
    let coeffs = dft_coefficients(&loaded.pulse);
    let windows = windows(&a.fc);
    let policy = FcPolicy { tau_im: a.fc.tau, expected: a.fc.expected };
    let modes = fc_modes(&coeffs, &policy, &windows)?;
    let spectrum = spectrum_of(&modes)?;
    let op = build_operator(&coeffs);
    let truth = loaded.truth.as_ref().filter(|t| t.len() == modes.len());
    let diagnostics: Vec<ModeDiagnostics> = modes
        .iter()
        .enumerate()
        .map(|(i, m)| ModeDiagnostics {
            k: i + 1,
            lambda: m.lambda,
            b: m.b,
            truncation_time: m.window_meta.truncation_time,
            window_first: m.window_meta.first.clone(),
            window_second: m.window_meta.second.clone(),
            right_residual: m.right_residual(&op),
            left_residual: m.left_residual(&op),
            boundary_residual: m.left_boundary_residual(&windows, op.grid()).ok(),
            err_lambda: truth.map(|t| rel_err(t.entries()[i].lambda, m.lambda)),
            err_b: truth.map(|t| rel_err(t.entries()[i].b, m.b)),
        })
        .collect();
    out.write("spectrum.txt", format_spectrum(&spectrum))?;
    out.write_json(
        "nft_diagnostics.json",
        &json!({ "samples": op.grid().len(), "duration": op.grid().duration(), "tau_im": policy.tau_im, "modes": diagnostics }),
    )?;
    for d in &diagnostics {
        println!("{} lambda = {:.12e} {:+.12e}j  b = {:.12e} {:+.12e}j", d.k, d.lambda.re, d.lambda.im, d.b.re, d.b.im);
    }
    progress(cli, format!("{} modes above tau = {}", modes.len(), policy.tau_im));
    out.finish("nft", a, json!({ "global": globals(cli) }))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.17e}")).unwrap_or_default()
}

fn stats(cli: &Cli, a: &StatsArgs, mut out: OutputDir) -> Result<()> {
    if a.snr.is_empty() {
        return Err(usage("--snr needs at least one value"));
    }
    let loaded = load_pulse(&a.input)?;
    let kind = noise_kind(&a.noise)?;
    let coeffs = dft_coefficients(&loaded.pulse);
    let windows = windows(&a.fc);
    let modes = fc_modes(&coeffs, &policy(&a.fc, loaded.truth.as_ref()), &windows)?;
    let op = build_operator(&coeffs);
    let kits = build_kits(&op, &modes, &windows)?;
    let r = colored_covariance(&NoiseModel { sigma: 1.0, kind }, op.grid())?;
    let unit = covariance_report(&kits, &r, 1.0);
    let min_eig = min_symmetric_eigenvalue(&unit.c_full)?;
    if min_eig < -1e-10 * unit.c_full.norm_l2() {
        eprintln!("warning: analytic covariance has eigenvalue {min_eig:.3e}");
    }
    let mut csv = String::from("snr_db,sigma,k,var_lambda,var_b,re_cross_lambda12,re_cross_b12\n");
    let mut summaries = Vec::new();
    for &snr in &a.snr {
        let report = unit.with_sigma(sigma_from_snr(&loaded.pulse, snr)?);
        let dir = format!("snr_{snr}");
        report.export(out.path(&dir))?;
        out.record(["c_lambda.csv", "c_b.csv", "c_cross.csv", "c_full.csv", "summary.json"].map(|f| format!("{dir}/{f}")));
        let s = report.summary();
        for k in 0..unit.k {
            csv.push_str(&format!(
                "{snr},{:.17e},{},{:.17e},{:.17e},{},{}\n",
                s.sigma,
                k + 1,
                s.var_lambda[k],
                s.var_b[k],
                opt(s.re_cross_lambda12),
                opt(s.re_cross_b12)
            ));
        }
        progress(cli, format!("SNR {snr} dB: sigma = {:.6e}", s.sigma));
        summaries.push(json!({ "snr_db": snr, "summary": s }));
    }
    out.write("stats_summary.csv", csv)?;
    out.write_json("stats_summary.json", &summaries)?;
    out.finish("stats", a, json!({ "global": globals(cli), "modes": unit.k, "min_eigenvalue_unit": min_eig }))
}

fn mc(cli: &Cli, a: &McArgs, mut out: OutputDir) -> Result<()> {
    let loaded = load_pulse(&a.input)?;
    let kind = noise_kind(&a.noise)?;
    let coeffs = dft_coefficients(&loaded.pulse);
    let windows = windows(&a.fc);
    let modes = fc_modes(&coeffs, &policy(&a.fc, loaded.truth.as_ref()), &windows)?;
    let reference = spectrum_of(&modes)?;
    let op = build_operator(&coeffs);
    let sigma = sigma_from_snr(&loaded.pulse, a.snr)?;
    let kits = build_kits(&op, &modes, &windows)?;
    let r = colored_covariance(&NoiseModel { sigma: 1.0, kind: kind.clone() }, op.grid())?;
    let analytic = covariance_report(&kits, &r, sigma).physical();

    let config = MCConfig {
        realizations: a.realizations,
        level: NoiseLevel::SnrDb(a.snr),
        seed: a.seed,
        noise: kind,
        tau_im: a.fc.tau,
        outliers: OutlierPolicy { radius_factor: a.radius_factor, max_fraction: a.max_outlier_fraction },
        threads: cli.threads,
    };
    progress(cli, format!("{} realizations at SNR {} dB (sigma = {sigma:.6e})", a.realizations, a.snr));
    let result = run_mc(&loaded.pulse, &reference, &config, &windows)?;
    let comparison = compare(&result.covariance, &analytic, sigma);
    let summary = result.summary();
    if let Some(w) = &summary.warning {
        eprintln!("warning: {w}");
    }

    let (emp, an) = (&comparison.empirical, &comparison.analytic);
    let mut csv = String::from("k,var_lambda_mc,var_lambda_analytic,var_b_mc,var_b_analytic\n");
    for k in 0..result.k {
        csv.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            k + 1,
            emp.var_lambda[k],
            an.var_lambda[k],
            emp.var_b[k],
            an.var_b[k]
        ));
    }
    csv.push_str(&format!("# re_cross_lambda12,{},{}\n", opt(emp.re_cross_lambda12), opt(an.re_cross_lambda12)));
    csv.push_str(&format!("# re_cross_b12,{},{}\n", opt(emp.re_cross_b12), opt(an.re_cross_b12)));
    csv.push_str(&format!("# outliers,{},{}\n", result.outliers.len(), result.realizations));

    let mut samples = String::from("sample,k,re_lambda,im_lambda,re_b,im_b\n");
    for k in 0..result.k {
        for (i, (l, b)) in result.lambda_samples[k].iter().zip(&result.b_samples[k]).enumerate() {
            samples.push_str(&format!("{i},{},{:.17e},{:.17e},{:.17e},{:.17e}\n", k + 1, l.re, l.im, b.re, b.im));
        }
    }

    out.write("mc_summary.csv", csv)?;
    out.write("mc_samples.csv", samples)?;
    out.write("empirical_covariance.csv", format_matrix_csv(&result.covariance))?;
    out.write("analytic_covariance.csv", format_matrix_csv(&analytic))?;
    out.write("per_entry_relative_error.csv", format_matrix_csv(&comparison.per_entry_rel))?;
    out.write_json(
        "mc_summary.json",
        &json!({
            "mc": summary,
            "comparison": comparison.summary(),
            "empirical": emp,
            "analytic": an,
            "outliers": result.outliers,
            "reference": reference,
        }),
    )?;
    let cs = comparison.summary();
    println!("accepted {} of {} realizations, {} outliers", result.accepted(), result.realizations, result.outliers.len());
    for k in 0..result.k {
        println!(
            "mode {}: var_lambda mc {:.4e} analytic {:.4e}; var_b mc {:.4e} analytic {:.4e}",
            k + 1,
            emp.var_lambda[k],
            an.var_lambda[k],
            emp.var_b[k],
            an.var_b[k]
        );
    }
    println!("frobenius relative error {:.4e} (squared {:.4e})", cs.frobenius_rel, cs.frobenius_rel_squared);
    out.finish("mc", a, json!({ "global": globals(cli), "sigma": sigma, "reduction": summary.reduction }))
}

fn default_sweep(preset: Option<Preset>) -> Vec<usize> {
    match preset {
        Some(Preset::Sech22) => vec![33, 47, 65, 91, 129, 183, 257, 329, 513, 725, 1025],
        _ => vec![47, 65, 91, 129, 183, 257, 365, 515, 729, 1031, 1455],
    }
}

fn sweep(cli: &Cli, a: &SweepArgs, mut out: OutputDir) -> Result<()> {
    let target = match (a.preset, &a.spectrum) {
        (Some(p), _) => SweepTarget::preset(p),
        (None, Some(path)) => SweepTarget {
            truth: read_spectrum(path).with_context(|| format!("reading {}", path.display()))?,
            duration: a.duration.ok_or_else(|| usage("--spectrum requires --duration"))?,
            source: nft_core::mc::PulseSource::Darboux,
        },
        (None, None) => return Err(usage("one of --preset or --spectrum is required")),
    };
    let samples = a.samples.clone().unwrap_or_else(|| default_sweep(a.preset));
    let options = SweepOptions {
        policy: FcPolicy { tau_im: a.fc.tau, expected: a.fc.expected },
        windows: windows(&a.fc),
        oracle: (!a.no_oracle).then(NewtonConfig::default),
        outliers: OutlierPolicy::default(),
    };
    let mut rows = Vec::new();
    for &m in &samples {
        progress(cli, format!("M = {m}"));
        rows.extend(error_sweep(&target, &[m], &options));
    }
    let failed = rows.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        eprintln!("note: {failed} of {} rows failed; see the status column", rows.len());
    }
    out.write("sweep.csv", format_sweep_csv(&rows))?;
    out.finish("sweep", a, json!({ "global": globals(cli), "samples": samples, "failed_rows": failed }))
}
