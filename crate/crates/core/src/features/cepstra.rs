use ndarray::{Array1, Array2};

use super::Dct;
use crate::audio_io::{FeatureFile, Waveform};
use crate::dsp::stft::StftEngine;
use crate::dsp::{mel_filterbank, Spectrogram, StftConfig};
use crate::{Error, Result};

/// Natural-log floor applied to mel energies, `ln(1e-10)`.
pub const LOG_FLOOR: f64 = -23.025850929940457;

/// Mel cepstra, one row per frame: row `t` holds `c_0 .. c_{M-1}`, the
/// leading orthonormal DCT-II coefficients of the frame's log-mel spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MelCepstra {
    pub coeffs: Array2<f64>,
    pub config: StftConfig,
    pub n_mels: usize,
    pub center_freqs: Vec<f64>,
    pub sample_rate_hz: u32,
}

impl MelCepstra {
    pub fn n_frames(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn n_coeffs(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn to_feature_file(&self) -> FeatureFile {
        FeatureFile {
            frame_shift_ms: self.config.hop_ms as f32,
            sample_rate_hz: self.sample_rate_hz,
            data: self.coeffs.mapv(|v| v as f32),
        }
    }

    /// Rebuilds cepstra from a feature file; the analysis settings the file
    /// does not carry (FFT size, window) come from `config`.
    pub fn from_feature_file(file: &FeatureFile, config: StftConfig) -> Result<Self> {
        if (file.frame_shift_ms as f64 - config.hop_ms).abs() > 1e-3 {
            return Err(Error::ConfigMismatch(format!(
                "feature file frame shift {} ms vs analysis hop {} ms",
                file.frame_shift_ms, config.hop_ms
            )));
        }
        let n_mels = file.dim().max(80);
        let fb = mel_filterbank(n_mels, &config, file.sample_rate_hz)?;
        Ok(Self {
            coeffs: file.data.mapv(|v| v as f64),
            config,
            n_mels,
            center_freqs: fb.center_freqs,
            sample_rate_hz: file.sample_rate_hz,
        })
    }
}

/// Extracts `n_coeffs` mel cepstral coefficients per frame, using
/// `max(80, n_coeffs)` mel bands internally.
pub fn extract_mel_cepstra(w: &Waveform, n_coeffs: usize, cfg: &StftConfig) -> Result<MelCepstra> {
    extract_with_spectrum(w, n_coeffs, cfg).map(|(c, _)| c)
}

/// As [`extract_mel_cepstra`], also returning the magnitude spectrogram the
/// cepstra were computed from.
pub fn extract_with_spectrum(w: &Waveform, n_coeffs: usize, cfg: &StftConfig) -> Result<(MelCepstra, Spectrogram)> {
    if n_coeffs < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 cepstral coefficients, got {n_coeffs}"
        )));
    }
    let fs = w.sample_rate_hz();
    let n_mels = n_coeffs.max(80);
    let engine = StftEngine::new(*cfg, fs)?;
    let fb = mel_filterbank(n_mels, cfg, fs)?;
    let dct = Dct::new(n_mels);
    let mag = engine.analyze(w.samples())?.mapv(|c| c.norm());

    let mut coeffs = Array2::zeros((mag.nrows(), n_coeffs));
    for (t, frame) in mag.outer_iter().enumerate() {
        let frame = frame.to_vec();
        let log_mel: Array1<f64> = fb.apply(&frame).into_iter().map(|e| e.max(1e-10).ln()).collect();
        let c = dct.forward(log_mel.view());
        coeffs.row_mut(t).assign(&c.slice(ndarray::s![..n_coeffs]));
    }
    let cepstra = MelCepstra {
        coeffs,
        config: *cfg,
        n_mels,
        center_freqs: fb.center_freqs,
        sample_rate_hz: fs,
    };
    let spectrum = Spectrogram {
        frames: mag,
        config: *cfg,
        sample_rate_hz: fs,
    };
    Ok((cepstra, spectrum))
}
