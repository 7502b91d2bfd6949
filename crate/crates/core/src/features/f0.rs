use crate::audio_io::{FeatureFile, Waveform};
use crate::dsp::StftConfig;
use crate::{Error, Result};

use ndarray::Array2;

/// Search range for F0 in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0Range {
    pub min_hz: f64,
    pub max_hz: f64,
}

impl Default for F0Range {
    fn default() -> Self {
        Self {
            min_hz: 60.0,
            max_hz: 500.0,
        }
    }
}

/// Per-frame F0; `f0_hz[t] == 0` exactly when frame `t` is unvoiced.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Contour {
    pub f0_hz: Vec<f64>,
    pub voiced: Vec<bool>,
    pub frame_shift_ms: f64,
}

impl F0Contour {
    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn voiced_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.f0_hz.iter().zip(&self.voiced).filter(|(_, &v)| v).map(|(&f, _)| f)
    }

    /// Serialises as a two-column feature file: f0 in Hz, voiced flag 0/1.
    pub fn to_feature_file(&self, sample_rate_hz: u32) -> FeatureFile {
        let data = Array2::from_shape_fn((self.len(), 2), |(t, d)| match d {
            0 => self.f0_hz[t] as f32,
            _ => f32::from(u8::from(self.voiced[t])),
        });
        FeatureFile {
            frame_shift_ms: self.frame_shift_ms as f32,
            sample_rate_hz,
            data,
        }
    }

    pub fn from_feature_file(file: &FeatureFile) -> Result<Self> {
        if file.dim() != 2 {
            return Err(Error::DimMismatch {
                what: "F0 feature file dim",
                left: file.dim(),
                right: 2,
            });
        }
        let voiced: Vec<bool> = file.data.column(1).iter().map(|&v| v > 0.5).collect();
        let f0_hz = file
            .data
            .column(0)
            .iter()
            .zip(&voiced)
            .map(|(&f, &v)| if v { f as f64 } else { 0.0 })
            .collect();
        Ok(Self {
            f0_hz,
            voiced,
            frame_shift_ms: file.frame_shift_ms as f64,
        })
    }
}

const VOICING_THRESHOLD: f64 = 0.3;
const RMS_THRESHOLD: f64 = 1e-4;
// Earliest lag whose peak reaches this fraction of the best one wins,
// which keeps sub-harmonic lags from beating the true period.
const OCTAVE_RATIO: f64 = 0.9;

/// Normalised autocorrelation pitch tracker.
///
/// Frames line up with the STFT frames of `cfg`: frame `t` is centred on
/// `t * hop + window / 2`, but the analysis span is widened to three periods
/// of `range.min_hz` when the STFT window is shorter.
pub fn estimate_f0(w: &Waveform, range: F0Range, cfg: &StftConfig) -> Result<F0Contour> {
    let fs = w.sample_rate_hz() as f64;
    if !(range.min_hz > 0.0 && range.min_hz < range.max_hz && range.max_hz < fs / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < f0_min ({}) < f0_max ({}) < fs/2 ({})",
            range.min_hz,
            range.max_hz,
            fs / 2.0
        )));
    }
    cfg.validate(w.sample_rate_hz())?;
    let win = cfg.window_len(w.sample_rate_hz());
    let hop = cfg.hop_len(w.sample_rate_hz());
    let frames = cfg.frame_count(w.len(), w.sample_rate_hz());

    let min_lag = ((fs / range.max_hz).floor() as usize).max(2);
    let max_lag = (fs / range.min_hz).ceil() as usize;
    let span = win.max(3 * max_lag);
    let x = w.samples();

    let mut f0_hz = Vec::with_capacity(frames);
    let mut voiced = Vec::with_capacity(frames);
    let mut segment = vec![0.0; span];
    for t in 0..frames {
        let centre = (t * hop + win / 2) as isize;
        let start = centre - (span / 2) as isize;
        let mut energy = 0.0;
        let mut present = 0usize;
        for (i, s) in segment.iter_mut().enumerate() {
            let n = start + i as isize;
            *s = if n >= 0 && (n as usize) < x.len() {
                present += 1;
                x[n as usize]
            } else {
                0.0
            };
            energy += *s * *s;
        }
        let rms = if present > 0 {
            (energy / present as f64).sqrt()
        } else {
            0.0
        };
        let estimate = if rms >= RMS_THRESHOLD {
            pick_period(&segment, min_lag, max_lag)
        } else {
            None
        };
        match estimate {
            Some(lag) => {
                f0_hz.push((fs / lag).clamp(range.min_hz, range.max_hz));
                voiced.push(true);
            }
            None => {
                f0_hz.push(0.0);
                voiced.push(false);
            }
        }
    }
    Ok(F0Contour {
        f0_hz,
        voiced,
        frame_shift_ms: cfg.hop_ms,
    })
}

fn normalized_autocorrelation(x: &[f64], lag: usize) -> f64 {
    if lag >= x.len() {
        return 0.0;
    }
    let (head, tail) = (&x[..x.len() - lag], &x[lag..]);
    let mut cross = 0.0;
    let mut e0 = 0.0;
    let mut e1 = 0.0;
    for (a, b) in head.iter().zip(tail) {
        cross += a * b;
        e0 += a * a;
        e1 += b * b;
    }
    let denom = (e0 * e1).sqrt();
    if denom > 0.0 {
        cross / denom
    } else {
        0.0
    }
}

/// Best period in samples (fractional), or `None` when unvoiced.
fn pick_period(x: &[f64], min_lag: usize, max_lag: usize) -> Option<f64> {
    let lo = min_lag - 1;
    let r: Vec<f64> = (lo..=max_lag + 1)
        .map(|lag| normalized_autocorrelation(x, lag))
        .collect();
    let at = |lag: usize| r[lag - lo];
    let peaks: Vec<usize> = (min_lag..=max_lag)
        .filter(|&lag| at(lag) >= at(lag - 1) && at(lag) >= at(lag + 1))
        .collect();
    let best = peaks.iter().map(|&l| at(l)).fold(f64::NEG_INFINITY, f64::max);
    if !(best >= VOICING_THRESHOLD) {
        return None;
    }
    let lag = *peaks.iter().find(|&&l| at(l) >= OCTAVE_RATIO * best)?;
    let (a, b, c) = (at(lag - 1), at(lag), at(lag + 1));
    let curvature = a - 2.0 * b + c;
    let shift = if curvature < 0.0 {
        (0.5 * (a - c) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Some(lag as f64 + shift)
}
