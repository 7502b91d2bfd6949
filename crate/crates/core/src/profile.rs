//! Named analysis settings shared by the library entry points and the CLI.

use serde::{Deserialize, Serialize};

use crate::dsp::StftConfig;
use crate::features::F0Range;
use crate::{Error, Result};

/// Environment variable naming the default profile.
pub const PROFILE_ENV: &str = "VCWARP_PROFILE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    pub sample_rate_hz: u32,
    pub fft_size: usize,
    pub window_ms: f64,
    pub hop_ms: f64,
    pub n_mels: usize,
    pub n_coeffs: usize,
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
    pub gl_iters: usize,
}

impl Profile {
    pub const NAMES: [&'static str; 2] = ["warp80", "mcd36"];

    /// Warp learning and resynthesis: 80 coefficients over 80 mel bands,
    /// FFT 1024 with a 256-sample hop at 16 kHz. The 25 ms window keeps the
    /// log-mel spectrum an envelope rather than resolving individual
    /// harmonics, which do not move under a formant warp.
    pub fn warp80() -> Self {
        Self {
            name: "warp80".into(),
            sample_rate_hz: 16_000,
            fft_size: 1024,
            window_ms: 25.0,
            hop_ms: 16.0,
            n_mels: 80,
            n_coeffs: 80,
            f0_min_hz: 60.0,
            f0_max_hz: 500.0,
            gl_iters: 60,
        }
    }

    /// Evaluation: 36 coefficients at a 5 ms hop.
    pub fn mcd36() -> Self {
        Self {
            name: "mcd36".into(),
            sample_rate_hz: 16_000,
            fft_size: 1024,
            window_ms: 25.0,
            hop_ms: 5.0,
            n_mels: 80,
            n_coeffs: 36,
            f0_min_hz: 60.0,
            f0_max_hz: 500.0,
            gl_iters: 60,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "warp80" => Ok(Self::warp80()),
            "mcd36" => Ok(Self::mcd36()),
            other => Err(Error::InvalidArgument(format!(
                "unknown profile `{other}` (expected one of {})",
                Self::NAMES.join(", ")
            ))),
        }
    }

    /// The profile named by `VCWARP_PROFILE`, or `fallback` when unset.
    pub fn from_env_or(fallback: &str) -> Result<Self> {
        match std::env::var(PROFILE_ENV) {
            Ok(name) if !name.is_empty() => Self::from_name(&name),
            _ => Self::from_name(fallback),
        }
    }

    pub fn stft_config(&self) -> StftConfig {
        StftConfig::new(self.fft_size, self.window_ms, self.hop_ms)
    }

    pub fn f0_range(&self) -> F0Range {
        F0Range {
            min_hz: self.f0_min_hz,
            max_hz: self.f0_max_hz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.stft_config().validate(self.sample_rate_hz)?;
        if self.n_mels != self.n_coeffs.max(80) {
            return Err(Error::InvalidArgument(format!(
                "profile `{}`: n_mels must be max(80, n_coeffs) = {}",
                self.name,
                self.n_coeffs.max(80)
            )));
        }
        if !(self.f0_min_hz > 0.0
            && self.f0_min_hz < self.f0_max_hz
            && self.f0_max_hz < self.sample_rate_hz as f64 / 2.0)
        {
            return Err(Error::InvalidArgument(format!("profile `{}`: bad F0 range", self.name)));
        }
        if self.gl_iters == 0 {
            return Err(Error::InvalidArgument("gl_iters must be at least 1".into()));
        }
        Ok(())
    }
}
