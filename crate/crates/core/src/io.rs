//! Text formats for pulses and discrete spectra.
//!
//! ```text
//! # nft-pulse v1 T=<duration> M=<samples>
//! <t>,<re>,<im>            (M lines, m = -N..N)
//!
//! # nft-spectrum v1 K=<count>
//! <re_lambda>,<im_lambda>,<re_b>,<im_b>   (K lines)
//! ```
//!
//! Numbers are written with 17 significant digits, so files round-trip
//! bit-exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{NftError, Result};
use crate::signal::{Pulse, TimeGrid};
use crate::spectrum::{DiscreteSpectrum, SpectralPair};

const PULSE_MAGIC: &str = "# nft-pulse v1";
const SPECTRUM_MAGIC: &str = "# nft-spectrum v1";

/// Shortest-form `{:e}` with a 17-significant-digit mantissa.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header_field<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| NftError::Format(format!("header lacks {key}=")))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| NftError::Format(format!("line {line}: cannot parse number {tok:?}")))?;
    if !v.is_finite() {
        return Err(NftError::Format(format!("line {line}: non-finite value {tok:?}")));
    }
    Ok(v)
}

fn parse_row(line: &str, lineno: usize, width: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != width {
        return Err(NftError::Format(format!("line {lineno}: expected {width} fields, got {}", fields.len())));
    }
    fields.iter().map(|f| parse_f64(f, lineno)).collect()
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().skip(1).map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

pub fn format_pulse(pulse: &Pulse) -> String {
    let grid = pulse.grid();
    let mut out = format!("{PULSE_MAGIC} T={} M={}\n", fmt_f64(grid.duration()), grid.len());
    for (t, q) in grid.times().iter().zip(pulse.samples()) {
        out.push_str(&format!("{},{},{}\n", fmt_f64(*t), fmt_f64(q.re), fmt_f64(q.im)));
    }
    out
}

pub fn parse_pulse(text: &str) -> Result<Pulse> {
    let header = text.lines().next().ok_or_else(|| NftError::Format("empty pulse file".into()))?;
    if !header.starts_with(PULSE_MAGIC) {
        return Err(NftError::Format(format!("expected header {PULSE_MAGIC:?}")));
    }
    let duration = parse_f64(header_field(header, "T")?, 1)?;
    let samples: usize = header_field(header, "M")?
        .parse()
        .map_err(|_| NftError::Format("M must be a non-negative integer".into()))?;
    let grid = TimeGrid::new(duration, samples).map_err(|e| NftError::Format(e.to_string()))?;
    let mut q = Vec::with_capacity(samples);
    for (lineno, line) in data_lines(text) {
        let row = parse_row(line, lineno, 3)?;
        q.push(Complex64::new(row[1], row[2]));
    }
    if q.len() != samples {
        return Err(NftError::Format(format!("header says M={samples}, found {} samples", q.len())));
    }
    Pulse::new(grid, q)
}

pub fn format_spectrum(spectrum: &DiscreteSpectrum) -> String {
    let mut out = format!("{SPECTRUM_MAGIC} K={}\n", spectrum.len());
    for e in spectrum.entries() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(e.lambda.re),
            fmt_f64(e.lambda.im),
            fmt_f64(e.b.re),
            fmt_f64(e.b.im)
        ));
    }
    out
}

pub fn parse_spectrum(text: &str) -> Result<DiscreteSpectrum> {
    let header = text.lines().next().ok_or_else(|| NftError::Format("empty spectrum file".into()))?;
    if !header.starts_with(SPECTRUM_MAGIC) {
        return Err(NftError::Format(format!("expected header {SPECTRUM_MAGIC:?}")));
    }
    let count: usize = header_field(header, "K")?
        .parse()
        .map_err(|_| NftError::Format("K must be a non-negative integer".into()))?;
    let mut entries = Vec::with_capacity(count);
    for (lineno, line) in data_lines(text) {
        let r = parse_row(line, lineno, 4)?;
        entries.push(SpectralPair { lambda: Complex64::new(r[0], r[1]), b: Complex64::new(r[2], r[3]) });
    }
    if entries.len() != count {
        return Err(NftError::Format(format!("header says K={count}, found {} rows", entries.len())));
    }
    DiscreteSpectrum::new(entries)
}

pub fn write_pulse(pulse: &Pulse, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, format_pulse(pulse))?)
}

pub fn read_pulse(path: impl AsRef<Path>) -> Result<Pulse> {
    parse_pulse(&fs::read_to_string(path)?)
}

pub fn write_spectrum(spectrum: &DiscreteSpectrum, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, format_spectrum(spectrum))?)
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<DiscreteSpectrum> {
    parse_spectrum(&fs::read_to_string(path)?)
}

/// Row-major CSV of a real matrix, one row per line.
pub fn format_matrix_csv(m: &faer::Mat<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_f64(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<faer::Mat<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.split(',').map(|t| parse_f64(t, i + 1)).collect())
        .collect::<Result<_>>()?;
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(NftError::Format("ragged matrix".into()));
    }
    Ok(faer::Mat::from_fn(rows.len(), n, |i, j| rows[i][j]))
}
