//! Discrete nonlinear Fourier spectrum of sampled pulses by Fourier
//! collocation, with closed-form first-order noise statistics.
//!
//! The crate covers the full loop used to validate those statistics:
//! multi-soliton synthesis ([`darboux`]), the forward transform ([`fc`]),
//! first-order covariance prediction ([`perturbation`]), Monte-Carlo
//! estimation ([`mc`]) and an independent transfer-matrix reference
//! ([`oracle`]).

pub mod darboux;
pub mod error;
pub mod fc;
pub mod io;
pub mod linalg;
pub mod mc;
pub mod metrics;
pub mod oracle;
pub mod perturbation;
pub mod presets;
pub mod signal;
pub mod spectrum;

pub use num_complex::Complex64;

pub use darboux::{darboux, sech_eigenvalues, sech_pulse, JostSolutions};
pub use error::{NftError, Result};
pub use fc::{
    build_operator, extract_b, forward_nft, left_eigenvector, solve_modes, truncation_time, FcMode,
    FcOperator, FcPolicy, TruncationPolicy, WindowKind, WindowSpec,
};
pub use io::{read_pulse, read_spectrum, write_pulse, write_spectrum};
pub use mc::{error_sweep, run_mc, MCConfig, MCResult};
pub use metrics::rel_err;
pub use perturbation::{covariance_report, CovarianceReport, ModePerturbationKit};
pub use presets::Preset;
pub use signal::{
    colored_covariance, dft_coefficients, sample_awgn, sigma_from_snr, FourierCoefficients, NoiseKind,
    NoiseModel, Pulse, TimeGrid,
};
pub use spectrum::{evolve_spectrum, soliton_a_coefficient, DiscreteSpectrum, SpectralPair};
