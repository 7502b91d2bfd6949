use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::allpass::{phase_warp, phase_warp_dalpha};
use crate::dsp::hz_to_mel;
use crate::features::Dct;
use crate::{Error, Result};

/// How a cepstral coefficient `m` is turned into a value at FFT bin `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Cosine series on the mel-band axis. Bin `k` sits at phase
    /// `phi(theta_k)`, the position of its frequency among the mel bands in
    /// DCT-II units, so `D* c` is the smoothed log spectrum at bin `k`. The
    /// warp moves the bin frequency, `theta_k -> phase_warp(theta_k, alpha)`,
    /// before the mel mapping. Columns carry the orthonormal DCT weights.
    #[default]
    MelAxis,
    /// `D*[k, m] = cos(m theta_km)` with `theta_km = 2 pi f_m k / f_s`
    /// folded into [0, pi], `f_m` the mel band centres. Unweighted.
    BandCenter,
}

/// Everything the warp matrices depend on apart from the warp factor.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpGeometry {
    pub basis: Basis,
    pub fft_size: usize,
    pub n_coeffs: usize,
    pub sample_rate_hz: u32,
    /// Mel band centres of the analysis filterbank.
    pub mel_center_freqs: Vec<f64>,
}

/// One warp factor for every column, or one per mel band.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpFactor {
    Scalar(f64),
    PerBand(Vec<f64>),
}

impl WarpFactor {
    pub fn identity() -> Self {
        WarpFactor::Scalar(0.0)
    }

    pub fn alpha(&self, band: usize) -> f64 {
        match self {
            WarpFactor::Scalar(a) => *a,
            WarpFactor::PerBand(a) => a[band],
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            WarpFactor::Scalar(a) => vec![*a],
            WarpFactor::PerBand(a) => a.clone(),
        }
    }

    pub(crate) fn check(&self, n_coeffs: usize) -> Result<()> {
        let values = self.values();
        if let WarpFactor::PerBand(a) = self {
            if a.len() != n_coeffs {
                return Err(Error::DimMismatch {
                    what: "per-band warp factors vs cepstral order",
                    left: a.len(),
                    right: n_coeffs,
                });
            }
        }
        if let Some(a) = values.iter().find(|a| !(a.abs() < 1.0)) {
            return Err(Error::WarpOutOfRange(format!("|alpha| = {} is not < 1", a.abs())));
        }
        Ok(())
    }
}

/// Folds a phase into [0, pi]: reduce mod 2 pi, then reflect the upper half.
pub fn fold_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        2.0 * PI - t
    } else {
        t
    }
}

impl WarpGeometry {
    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn n_mels(&self) -> usize {
        self.mel_center_freqs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.fft_size < 2 || !self.fft_size.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "fft size {} is not a power of two",
                self.fft_size
            )));
        }
        if self.sample_rate_hz == 0 {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        if self.n_coeffs == 0 || self.n_coeffs > self.n_mels() {
            return Err(Error::DimMismatch {
                what: "cepstral order vs mel band count",
                left: self.n_coeffs,
                right: self.n_mels(),
            });
        }
        let nyquist = self.sample_rate_hz as f64 / 2.0;
        if self.mel_center_freqs.iter().any(|&f| !(f > 0.0 && f <= nyquist)) {
            return Err(Error::InvalidArgument(format!(
                "mel centre frequencies must lie in (0, {nyquist}]"
            )));
        }
        Ok(())
    }

    /// Phase of bin `k` on the linear frequency axis, in [0, pi].
    fn bin_phase(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.fft_size as f64
    }

    /// Linear phase -> phase on the mel-band cosine axis. Band `j` (centre
    /// at mel edge `j + 1`) maps to `pi (j + 1/2) / n_mels`.
    fn mel_axis_phase(&self, omega: f64) -> f64 {
        let fs = self.sample_rate_hz as f64;
        let bands = self.n_mels() as f64;
        let f = omega * fs / (2.0 * PI);
        let position = hz_to_mel(f) / hz_to_mel(fs / 2.0) * (bands + 1.0);
        PI * (position - 0.5) / bands
    }

    fn mel_axis_phase_slope(&self, omega: f64) -> f64 {
        let fs = self.sample_rate_hz as f64;
        let bands = self.n_mels() as f64;
        let f = omega * fs / (2.0 * PI);
        let dmel_df = 2595.0 / (std::f64::consts::LN_10 * (700.0 + f));
        PI * (bands + 1.0) / (bands * hz_to_mel(fs / 2.0)) * dmel_df * fs / (2.0 * PI)
    }

    fn band_center_phase(&self, k: usize, m: usize) -> f64 {
        let fm = self.mel_center_freqs[m];
        fold_phase(2.0 * PI * fm * k as f64 / self.sample_rate_hz as f64)
    }

    fn column_weight(&self, m: usize) -> f64 {
        match self.basis {
            Basis::MelAxis => Dct::weight(m, self.n_mels()),
            Basis::BandCenter => 1.0,
        }
    }

    /// Matrix entry at `(k, m)` for warp factor `alpha`.
    fn entry(&self, k: usize, m: usize, alpha: f64) -> f64 {
        let order = m as f64;
        match self.basis {
            Basis::MelAxis => {
                let warped = phase_warp(self.bin_phase(k), alpha);
                self.column_weight(m) * (order * self.mel_axis_phase(warped)).cos()
            }
            Basis::BandCenter => (order * phase_warp(self.band_center_phase(k, m), alpha)).cos(),
        }
    }

    /// `d entry / d alpha`.
    fn entry_dalpha(&self, k: usize, m: usize, alpha: f64) -> f64 {
        let order = m as f64;
        match self.basis {
            Basis::MelAxis => {
                let theta = self.bin_phase(k);
                let warped = phase_warp(theta, alpha);
                -self.column_weight(m)
                    * order
                    * (order * self.mel_axis_phase(warped)).sin()
                    * self.mel_axis_phase_slope(warped)
                    * phase_warp_dalpha(theta, alpha)
            }
            Basis::BandCenter => {
                let theta = self.band_center_phase(k, m);
                -order * (order * phase_warp(theta, alpha)).sin() * phase_warp_dalpha(theta, alpha)
            }
        }
    }

    pub(crate) fn column(&self, m: usize, alpha: f64) -> Vec<f64> {
        (0..self.n_bins()).map(|k| self.entry(k, m, alpha)).collect()
    }

    pub(crate) fn column_dalpha(&self, m: usize, alpha: f64) -> Vec<f64> {
        (0..self.n_bins()).map(|k| self.entry_dalpha(k, m, alpha)).collect()
    }
}

/// Reference matrix `D*`, (N/2 + 1) x M: the unwarped basis.
pub fn build_reference_matrix(geometry: &WarpGeometry) -> Result<Array2<f64>> {
    geometry.validate()?;
    Ok(Array2::from_shape_fn(
        (geometry.n_bins(), geometry.n_coeffs),
        |(k, m)| match geometry.basis {
            Basis::MelAxis => {
                geometry.column_weight(m) * (m as f64 * geometry.mel_axis_phase(geometry.bin_phase(k))).cos()
            }
            Basis::BandCenter => (m as f64 * geometry.band_center_phase(k, m)).cos(),
        },
    ))
}

/// Warp matrix `D[k, m] = cos(m * warped phase)`, (N/2 + 1) x M.
pub fn build_warp_matrix(geometry: &WarpGeometry, factor: &WarpFactor) -> Result<Array2<f64>> {
    geometry.validate()?;
    factor.check(geometry.n_coeffs)?;
    Ok(Array2::from_shape_fn(
        (geometry.n_bins(), geometry.n_coeffs),
        |(k, m)| geometry.entry(k, m, factor.alpha(m)),
    ))
}
