use std::f64::consts::PI;

use crate::{Error, Result};

/// Warped phase of the first-order all-pass with coefficient `alpha`:
/// `theta + 2 atan(alpha sin(theta) / (1 - alpha cos(theta)))`.
///
/// This is the continuous branch of
/// `atan(((1 - alpha^2) sin theta) / ((1 + alpha^2) cos theta - 2 alpha))`:
/// it maps [0, pi] onto itself, fixes both ends and is strictly increasing.
/// Requires `|alpha| < 1`.
pub fn phase_warp(theta: f64, alpha: f64) -> f64 {
    debug_assert!(alpha.abs() < 1.0, "all-pass coefficient {alpha} outside (-1, 1)");
    let (s, c) = theta.sin_cos();
    theta + 2.0 * (alpha * s / (1.0 - alpha * c)).atan()
}

/// `d phase_warp / d alpha` at fixed `theta`.
pub fn phase_warp_dalpha(theta: f64, alpha: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    2.0 * s / (1.0 - 2.0 * alpha * c + alpha * alpha)
}

/// Maps a frequency in Hz through the warp: `(f_s / 2 pi) phase_warp(2 pi f / f_s, alpha)`.
pub fn warp_frequency(f_hz: f64, alpha: f64, sample_rate_hz: f64) -> f64 {
    sample_rate_hz / (2.0 * PI) * phase_warp(2.0 * PI * f_hz / sample_rate_hz, alpha)
}

/// Warp factor that moves a source formant frequency onto a target one:
/// `sin(pi (f_src - f_tgt) / f_s) / cos(pi (f_src + f_tgt) / f_s)`.
pub fn alpha_from_freqs(f_src: f64, f_tgt: f64, sample_rate_hz: f64) -> Result<f64> {
    let nyquist = sample_rate_hz / 2.0;
    for (name, f) in [("source", f_src), ("target", f_tgt)] {
        if !(f > 0.0 && f < nyquist) {
            return Err(Error::InvalidArgument(format!(
                "{name} frequency {f} Hz outside (0, {nyquist})"
            )));
        }
    }
    let denom = (PI * (f_src + f_tgt) / sample_rate_hz).cos();
    if denom.abs() < 1e-9 {
        return Err(Error::DegenerateDenominator(denom));
    }
    let alpha = (PI * (f_src - f_tgt) / sample_rate_hz).sin() / denom;
    if alpha.abs() >= 1.0 {
        return Err(Error::WarpOutOfRange(format!(
            "{f_src} Hz -> {f_tgt} Hz gives alpha = {alpha}"
        )));
    }
    Ok(alpha)
}
