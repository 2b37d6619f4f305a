//! Reference pulses: two multi-solitons and a sech pulse with
//! continuous spectrum.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::darboux::{darboux, sech_pulse};
use crate::error::{NftError, Result};
use crate::signal::{Pulse, TimeGrid};
use crate::spectrum::DiscreteSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "2sol")]
    TwoSoliton,
    #[serde(rename = "5sol")]
    FiveSoliton,
    #[serde(rename = "sech22")]
    Sech22,
}

pub const SECH_AMPLITUDE: f64 = 2.2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::TwoSoliton, Preset::FiveSoliton, Preset::Sech22];

    pub fn name(self) -> &'static str {
        match self {
            Preset::TwoSoliton => "2sol",
            Preset::FiveSoliton => "5sol",
            Preset::Sech22 => "sech22",
        }
    }

    pub fn duration(self) -> f64 {
        match self {
            Preset::TwoSoliton | Preset::FiveSoliton => 35.34,
            Preset::Sech22 => 24.0,
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            Preset::TwoSoliton => 365,
            Preset::FiveSoliton => 909,
            Preset::Sech22 => 329,
        }
    }

    pub fn grid(self) -> TimeGrid {
        self.grid_with(self.default_samples()).expect("preset grid is valid")
    }

    pub fn grid_with(self, samples: usize) -> Result<TimeGrid> {
        TimeGrid::new(self.duration(), samples)
    }

    /// Exact discrete spectrum, ordered by descending `Im(lambda)`.
    pub fn spectrum(self) -> DiscreteSpectrum {
        let (lambdas, bs): (Vec<Complex64>, Vec<Complex64>) = match self {
            Preset::TwoSoliton => (vec![c(0.0, 0.6), c(0.0, 0.3)], vec![c(0.0, 1.0 / 3.0); 2]),
            Preset::FiveSoliton => (
                vec![c(0.0, 1.5), c(0.0, 1.2), c(0.0, 0.9), c(0.0, 0.6), c(0.0, 0.3)],
                vec![
                    c(0.8855, 0.1109),
                    c(-1.4293, -0.6778),
                    c(1.0701, 0.2486),
                    c(-0.0965, 1.0385),
                    c(0.3345, 0.8551),
                ],
            ),
            Preset::Sech22 => (vec![c(0.0, 1.7), c(0.0, 0.7)], vec![c(-1.0, 0.0), c(1.0, 0.0)]),
        };
        DiscreteSpectrum::from_pairs(&lambdas, &bs).expect("preset spectrum is valid")
    }

    /// Whether the pulse is reflectionless, i.e. fully described by its
    /// discrete spectrum.
    pub fn is_multisoliton(self) -> bool {
        !matches!(self, Preset::Sech22)
    }

    pub fn pulse(self) -> Pulse {
        self.pulse_on(&self.grid()).expect("preset synthesis succeeds on its default grid")
    }

    pub fn pulse_on(self, grid: &TimeGrid) -> Result<Pulse> {
        match self {
            Preset::Sech22 => sech_pulse(SECH_AMPLITUDE, grid),
            _ => darboux(&self.spectrum(), grid).map(|(p, _)| p),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = NftError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| NftError::Config(format!("unknown preset {s:?}; expected 2sol, 5sol or sech22")))
    }
}

/// Two-soliton with `b = [j/3, j/3 e^{j alpha}]`.
pub fn two_soliton_with_phase(alpha: f64) -> DiscreteSpectrum {
    let b1 = c(0.0, 1.0 / 3.0);
    DiscreteSpectrum::from_pairs(&[c(0.0, 0.6), c(0.0, 0.3)], &[b1, b1 * Complex64::from_polar(1.0, alpha)])
        .expect("valid spectrum")
}
