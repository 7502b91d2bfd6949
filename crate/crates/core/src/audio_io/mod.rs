//! Audio and feature-file I/O.
//!
//! WAV files are read as mono 16-bit PCM or 32-bit float and written as mono
//! 16-bit PCM. Feature matrices use the little-endian `VCFEAT01` layout, see
//! [`FeatureFile`].

mod vcf;
mod wav;

pub use vcf::{read_features, write_features, FeatureFile, FEATURE_MAGIC};
pub use wav::{read_wav, read_wav_bytes, wav_bytes, write_wav};

use crate::{Error, Result};

/// Mono audio at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl Waveform {
    /// Samples are expected in [-1, 1]; values outside are clipped on write.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64).sqrt()
    }
}

/// Linear-interpolation resampler.
///
/// The output has `round(len * target / source)` samples and the first and
/// last samples of input and output coincide, so a ramp stays a ramp. Equal
/// rates return the input unchanged. No anti-alias filtering is applied.
pub fn resample_linear(w: &Waveform, target_hz: u32) -> Result<Waveform> {
    if target_hz == 0 {
        return Err(Error::InvalidArgument("target rate must be positive".into()));
    }
    let source_hz = w.sample_rate_hz();
    if source_hz == target_hz {
        return Ok(w.clone());
    }
    let input = w.samples();
    let out_len = (input.len() as f64 * target_hz as f64 / source_hz as f64).round() as usize;
    let samples = match (input.len(), out_len) {
        (_, 0) => Vec::new(),
        (0, _) => vec![0.0; out_len],
        (1, _) => vec![input[0]; out_len],
        (_, 1) => vec![input[0]],
        (n, m) => {
            let step = (n - 1) as f64 / (m - 1) as f64;
            (0..m)
                .map(|i| {
                    let pos = i as f64 * step;
                    let left = (pos.floor() as usize).min(n - 2);
                    let frac = pos - left as f64;
                    input[left] + (input[left + 1] - input[left]) * frac
                })
                .collect()
        }
    };
    Waveform::new(samples, target_hz)
}
