//! Synthetic voices with a known spectral warp between them.
//!
//! A voice is an impulse train at `f0` through a cascade of second-order
//! resonators. Its warped partner runs the same excitation through the same
//! cascade with every delay `z^-1` replaced by the all-pass
//! `(z^-1 - alpha) / (1 - alpha z^-1)`, so the target's response is exactly
//! the source's response read through the warp: a formant at `f` moves to
//! `warp_frequency(f, -alpha)`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::audio_io::Waveform;
use crate::warp::warp_frequency;
use crate::{Error, Result};

/// Largest planted warp factor accepted by [`gen_warped_pair`].
pub const MAX_PLANTED_ALPHA: f64 = 0.3;
/// Noise level relative to the voiced signal's RMS (-40 dB).
const NOISE_RATIO: f64 = 0.01;
/// Peak amplitude after normalisation.
const PEAK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub f0_hz: f64,
    pub formants: Vec<Formant>,
    pub duration_s: f64,
    pub sample_rate_hz: u32,
    pub seed: u64,
}

impl SynthSpec {
    /// An open vowel at 120 Hz, one second at 16 kHz.
    pub fn vowel(seed: u64) -> Self {
        let formants = [(730.0, 90.0), (1090.0, 110.0), (2440.0, 170.0), (3400.0, 250.0)]
            .into_iter()
            .map(|(center_hz, bandwidth_hz)| Formant {
                center_hz,
                bandwidth_hz,
            })
            .collect();
        Self {
            f0_hz: 120.0,
            formants,
            duration_s: 1.0,
            sample_rate_hz: 16_000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate_hz == 0 {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        if !(60.0..=500.0).contains(&self.f0_hz) {
            return Err(Error::InvalidArgument(format!(
                "f0 {} Hz outside [60, 500]",
                self.f0_hz
            )));
        }
        if !(self.duration_s >= 0.3) {
            return Err(Error::InvalidArgument(format!(
                "duration {} s is shorter than 0.3 s",
                self.duration_s
            )));
        }
        let nyquist = self.sample_rate_hz as f64 / 2.0;
        for f in &self.formants {
            if !(f.center_hz > 0.0 && f.center_hz < nyquist && f.bandwidth_hz > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "formant {} Hz / {} Hz must have centre in (0, {nyquist}) and positive bandwidth",
                    f.center_hz, f.bandwidth_hz
                )));
            }
        }
        Ok(())
    }

    fn n_samples(&self) -> usize {
        (self.duration_s * self.sample_rate_hz as f64).round() as usize
    }
}

/// Resonator `b0 / (1 + a1 z^-1 + a2 z^-2)` with unit gain at DC, after
/// substituting the all-pass for `z^-1`. Returns normalised `(b, a)`.
fn warped_resonator(f: &Formant, fs: f64, alpha: f64) -> ([f64; 3], [f64; 3]) {
    let r = (-PI * f.bandwidth_hz / fs).exp();
    let theta = 2.0 * PI * f.center_hz / fs;
    let (a1, a2) = (-2.0 * r * theta.cos(), r * r);
    let b0 = 1.0 + a1 + a2;
    let aa = alpha * alpha;
    let den = [
        1.0 - a1 * alpha + a2 * aa,
        -2.0 * alpha + a1 * (1.0 + aa) - 2.0 * a2 * alpha,
        aa - a1 * alpha + a2,
    ];
    let num = [b0, -2.0 * alpha * b0, aa * b0];
    let g = den[0];
    (num.map(|v| v / g), den.map(|v| v / g))
}

fn filter(x: &mut [f64], b: [f64; 3], a: [f64; 3]) {
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    for s in x.iter_mut() {
        let y = b[0] * *s + b[1] * x1 + b[2] * x2 - a[1] * y1 - a[2] * y2;
        x2 = x1;
        x1 = *s;
        y2 = y1;
        y1 = y;
        *s = y;
    }
}

fn impulse_train(spec: &SynthSpec) -> Vec<f64> {
    let fs = spec.sample_rate_hz as f64;
    let mut x = vec![0.0; spec.n_samples()];
    let period = fs / spec.f0_hz;
    let mut k = 0usize;
    loop {
        let n = (k as f64 * period).round() as usize;
        if n >= x.len() {
            break;
        }
        x[n] = 1.0;
        k += 1;
    }
    x
}

fn voiced(spec: &SynthSpec, alpha: f64) -> Vec<f64> {
    let fs = spec.sample_rate_hz as f64;
    let mut x = impulse_train(spec);
    for f in &spec.formants {
        let (b, a) = warped_resonator(f, fs, alpha);
        filter(&mut x, b, a);
    }
    x
}

fn noise(spec: &SynthSpec, len: usize, std: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            std * z
        })
        .collect()
}

fn peak(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt()
}

/// Mixes scaled voiced signals with one shared seeded noise sequence at
/// -40 dB relative to the first signal.
fn finish(spec: &SynthSpec, signals: Vec<Vec<f64>>) -> Result<Vec<Waveform>> {
    let gain = PEAK / signals.iter().map(|s| peak(s)).fold(f64::MIN_POSITIVE, f64::max);
    let noise = noise(spec, signals[0].len(), NOISE_RATIO * gain * rms(&signals[0]));
    signals
        .into_iter()
        .map(|s| {
            let samples = s.iter().zip(&noise).map(|(v, n)| gain * v + n).collect();
            Waveform::new(samples, spec.sample_rate_hz)
        })
        .collect()
}

/// Synthesises the voice described by `spec`. Deterministic in `spec.seed`.
pub fn gen_voice(spec: &SynthSpec) -> Result<Waveform> {
    spec.validate()?;
    Ok(finish(spec, vec![voiced(spec, 0.0)])?.remove(0))
}

/// A source voice and the same voice with its spectrum warped by
/// `alpha_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedPair {
    pub source: Waveform,
    pub target: Waveform,
    /// The source spec with every formant moved through the warp.
    pub target_spec: SynthSpec,
    pub alpha_star: f64,
}

/// Formant of the warped voice: centre at `warp_frequency(f, -alpha)` and
/// bandwidth the distance between the mapped band edges.
pub fn warp_formant(f: &Formant, alpha: f64, sample_rate_hz: u32) -> Formant {
    let fs = sample_rate_hz as f64;
    let map = |hz: f64| warp_frequency(hz.clamp(0.0, fs / 2.0), -alpha, fs);
    Formant {
        center_hz: map(f.center_hz),
        bandwidth_hz: map(f.center_hz + f.bandwidth_hz / 2.0) - map(f.center_hz - f.bandwidth_hz / 2.0),
    }
}

/// Generates a source voice from `spec` and a target whose spectral
/// response is the source's seen through the all-pass warp `alpha_star`.
/// Both share the excitation, the noise and one normalisation gain, and the
/// source is peak-normalised together with the target.
pub fn gen_warped_pair(spec: &SynthSpec, alpha_star: f64) -> Result<WarpedPair> {
    spec.validate()?;
    if !(alpha_star.abs() <= MAX_PLANTED_ALPHA) {
        return Err(Error::WarpOutOfRange(format!(
            "planted alpha {alpha_star} outside [-{MAX_PLANTED_ALPHA}, {MAX_PLANTED_ALPHA}]"
        )));
    }
    let target_spec = if alpha_star == 0.0 {
        spec.clone()
    } else {
        SynthSpec {
            formants: spec
                .formants
                .iter()
                .map(|f| warp_formant(f, alpha_star, spec.sample_rate_hz))
                .collect(),
            ..spec.clone()
        }
    };
    let mut out = finish(spec, vec![voiced(spec, 0.0), voiced(spec, alpha_star)])?;
    let target = out.pop().expect("two signals");
    let source = out.pop().expect("two signals");
    Ok(WarpedPair {
        source,
        target,
        target_spec,
        alpha_star,
    })
}
