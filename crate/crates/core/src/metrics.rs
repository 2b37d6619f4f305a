use num_complex::Complex64;

/// `|estimate - truth| / |truth|`.
pub fn rel_err(truth: Complex64, estimate: Complex64) -> f64 {
    (estimate - truth).norm() / truth.norm()
}

/// Relative error of a real scalar.
pub fn rel_err_real(truth: f64, estimate: f64) -> f64 {
    (estimate - truth).abs() / truth.abs()
}
