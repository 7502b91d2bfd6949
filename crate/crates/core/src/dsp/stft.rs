use std::sync::Arc;

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio_io::Waveform;
use crate::{Error, Result};

/// STFT geometry. Window and hop are given in milliseconds and converted to
/// samples at the signal's rate; the window is periodic Hann, zero-padded to
/// `fft_size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StftConfig {
    pub fft_size: usize,
    pub window_ms: f64,
    pub hop_ms: f64,
}

impl StftConfig {
    pub fn new(fft_size: usize, window_ms: f64, hop_ms: f64) -> Self {
        Self {
            fft_size,
            window_ms,
            hop_ms,
        }
    }

    /// 1024-point FFT with a 1024-sample window and 256-sample hop at 16 kHz.
    pub fn mel80() -> Self {
        Self::new(1024, 64.0, 16.0)
    }

    /// 50 ms window, 12.5 ms hop in a 1024-point FFT.
    pub fn grif50() -> Self {
        Self::new(1024, 50.0, 12.5)
    }

    pub fn window_len(&self, sample_rate_hz: u32) -> usize {
        (self.window_ms * sample_rate_hz as f64 / 1000.0).round() as usize
    }

    pub fn hop_len(&self, sample_rate_hz: u32) -> usize {
        (self.hop_ms * sample_rate_hz as f64 / 1000.0).round() as usize
    }

    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn validate(&self, sample_rate_hz: u32) -> Result<()> {
        if self.fft_size < 2 || !self.fft_size.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "fft size {} is not a power of two >= 2",
                self.fft_size
            )));
        }
        if !(self.window_ms > 0.0 && self.hop_ms > 0.0) {
            return Err(Error::InvalidArgument("window and hop must be positive".into()));
        }
        if self.hop_ms > self.window_ms {
            return Err(Error::InvalidArgument(format!(
                "hop {} ms exceeds window {} ms",
                self.hop_ms, self.window_ms
            )));
        }
        let win = self.window_len(sample_rate_hz);
        if win == 0 || self.hop_len(sample_rate_hz) == 0 {
            return Err(Error::InvalidArgument("window or hop rounds to zero samples".into()));
        }
        if win > self.fft_size {
            return Err(Error::InvalidArgument(format!(
                "window of {win} samples does not fit in fft size {}",
                self.fft_size
            )));
        }
        Ok(())
    }

    /// Number of full frames in a signal of `len` samples.
    pub fn frame_count(&self, len: usize, sample_rate_hz: u32) -> usize {
        let win = self.window_len(sample_rate_hz);
        let hop = self.hop_len(sample_rate_hz);
        if len < win {
            0
        } else {
            1 + (len - win) / hop
        }
    }
}

/// Periodic Hann window of length `len`.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram {
    /// T x (N/2 + 1)
    pub frames: Array2<Complex64>,
    pub config: StftConfig,
    pub sample_rate_hz: u32,
}

/// Magnitude spectrogram, T x (N/2 + 1), all entries non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub frames: Array2<f64>,
    pub config: StftConfig,
    pub sample_rate_hz: u32,
}

impl ComplexSpectrogram {
    pub fn magnitude(&self) -> Spectrogram {
        Spectrogram {
            frames: self.frames.mapv(|c| c.norm()),
            config: self.config,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.frames.nrows()
    }
}

impl Spectrogram {
    pub fn n_frames(&self) -> usize {
        self.frames.nrows()
    }
}

/// Reusable FFT plans and window for one configuration.
pub(crate) struct StftEngine {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    pub(crate) window: Vec<f64>,
    pub(crate) hop: usize,
    pub(crate) n_fft: usize,
}

impl StftEngine {
    pub(crate) fn new(config: StftConfig, sample_rate_hz: u32) -> Result<Self> {
        config.validate(sample_rate_hz)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            forward: planner.plan_fft_forward(config.fft_size),
            inverse: planner.plan_fft_inverse(config.fft_size),
            window: hann_window(config.window_len(sample_rate_hz)),
            hop: config.hop_len(sample_rate_hz),
            n_fft: config.fft_size,
        })
    }

    pub(crate) fn win_len(&self) -> usize {
        self.window.len()
    }

    /// Length of the signal covered by `frames` frames.
    pub(crate) fn span(&self, frames: usize) -> usize {
        if frames == 0 {
            0
        } else {
            (frames - 1) * self.hop + self.win_len()
        }
    }

    pub(crate) fn analyze(&self, samples: &[f64]) -> Result<Array2<Complex64>> {
        let win = self.win_len();
        if samples.len() < win {
            return Err(Error::SignalTooShort {
                len: samples.len(),
                needed: win,
            });
        }
        let frames = 1 + (samples.len() - win) / self.hop;
        let bins = self.n_fft / 2 + 1;
        let mut out = Array2::zeros((frames, bins));
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n_fft];
        for t in 0..frames {
            let start = t * self.hop;
            buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            for (n, w) in self.window.iter().enumerate() {
                buf[n].re = samples[start + n] * w;
            }
            self.forward.process(&mut buf);
            for k in 0..bins {
                out[[t, k]] = buf[k];
            }
        }
        Ok(out)
    }

    /// Weighted overlap-add with window-squared normalisation. Output has
    /// `span(T)` samples; samples no window covers are zero.
    pub(crate) fn synthesize(&self, frames: &Array2<Complex64>) -> Result<Vec<f64>> {
        let bins = self.n_fft / 2 + 1;
        if frames.ncols() != bins {
            return Err(Error::DimMismatch {
                what: "spectrogram bins vs fft_size/2+1",
                left: frames.ncols(),
                right: bins,
            });
        }
        let win = self.win_len();
        let len = self.span(frames.nrows());
        let mut out = vec![0.0; len];
        let mut norm = vec![0.0; len];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n_fft];
        let scale = 1.0 / self.n_fft as f64;
        for (t, row) in frames.outer_iter().enumerate() {
            // Hermitian extension of the half spectrum; DC and Nyquist are real.
            buf[0] = Complex64::new(row[0].re, 0.0);
            for k in 1..bins - 1 {
                buf[k] = row[k];
                buf[self.n_fft - k] = row[k].conj();
            }
            buf[bins - 1] = Complex64::new(row[bins - 1].re, 0.0);
            self.inverse.process(&mut buf);
            let start = t * self.hop;
            for n in 0..win {
                let w = self.window[n];
                out[start + n] += buf[n].re * scale * w;
                norm[start + n] += w * w;
            }
        }
        for (o, w2) in out.iter_mut().zip(&norm) {
            *o = if *w2 > 1e-12 { *o / w2 } else { 0.0 };
        }
        Ok(out)
    }
}

/// Hann-windowed STFT; frame `t` starts at sample `t * hop`.
pub fn stft(w: &Waveform, cfg: &StftConfig) -> Result<ComplexSpectrogram> {
    let engine = StftEngine::new(*cfg, w.sample_rate_hz())?;
    Ok(ComplexSpectrogram {
        frames: engine.analyze(w.samples())?,
        config: *cfg,
        sample_rate_hz: w.sample_rate_hz(),
    })
}

/// Inverse of [`stft`] by least-squares overlap-add.
pub fn istft(spec: &ComplexSpectrogram) -> Result<Waveform> {
    let engine = StftEngine::new(spec.config, spec.sample_rate_hz)?;
    Waveform::new(engine.synthesize(&spec.frames)?, spec.sample_rate_hz)
}
