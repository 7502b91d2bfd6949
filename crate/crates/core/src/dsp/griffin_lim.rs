use ndarray::{Array2, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use super::stft::StftEngine;
use super::Spectrogram;
use crate::audio_io::Waveform;
use crate::{Error, Result};

/// Extrapolation weight of the accelerated Griffin-Lim step.
const MOMENTUM: f64 = 0.99;

/// Initial phase for Griffin-Lim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitPhase {
    #[default]
    Zero,
    Random {
        seed: u64,
    },
}

/// `||(|a| - mag)||_F / ||mag||_F` with bins weighted as in the full
/// two-sided spectrum, so the norm matches the time-domain one.
fn convergence(estimate: &Array2<Complex64>, mag: &Array2<f64>) -> f64 {
    let last = mag.ncols() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, row) in mag.outer_iter().enumerate() {
        for (k, &m) in row.iter().enumerate() {
            let weight = if k == 0 || k == last { 1.0 } else { 2.0 };
            let d = estimate[[t, k]].norm() - m;
            num += weight * d * d;
            den += weight * m * m;
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Replaces the magnitudes of `estimate` with `target`, keeping phases.
fn project(estimate: &Array2<Complex64>, target: &Array2<f64>) -> Array2<Complex64> {
    let mut out = estimate.clone();
    Zip::from(&mut out).and(target).for_each(|s, &m| {
        let norm = s.norm();
        *s = if norm > 0.0 {
            *s * (m / norm)
        } else {
            Complex64::new(m, 0.0)
        };
    });
    out
}

/// Spectral convergence of `x` against a target magnitude spectrogram.
pub fn spectral_convergence(x: &Waveform, mag: &Spectrogram) -> Result<f64> {
    let engine = StftEngine::new(mag.config, mag.sample_rate_hz)?;
    let est = engine.analyze(x.samples())?;
    if est.dim() != mag.frames.dim() {
        return Err(Error::DimMismatch {
            what: "frames of signal vs target spectrogram",
            left: est.nrows(),
            right: mag.frames.nrows(),
        });
    }
    Ok(convergence(&est, &mag.frames))
}

/// Griffin-Lim phase reconstruction; returns the final waveform.
pub fn griffin_lim(mag: &Spectrogram, iters: usize, init: InitPhase) -> Result<Waveform> {
    griffin_lim_with_history(mag, iters, init).map(|(w, _)| w)
}

/// Like [`griffin_lim`], also returning the spectral convergence of the
/// signal produced by every iteration.
///
/// Each iteration first tries an accelerated step, extrapolating the
/// magnitude-projected spectrogram along its change since the previous
/// iteration, and keeps it only if the spectral convergence does not get
/// worse. Otherwise it takes the plain step (resynthesise the projection),
/// which never increases the error. The returned sequence is therefore
/// non-increasing, while typically converging well ahead of the plain
/// alternation.
pub fn griffin_lim_with_history(mag: &Spectrogram, iters: usize, init: InitPhase) -> Result<(Waveform, Vec<f64>)> {
    if iters == 0 {
        return Err(Error::InvalidArgument(
            "Griffin-Lim needs at least one iteration".into(),
        ));
    }
    let engine = StftEngine::new(mag.config, mag.sample_rate_hz)?;
    let target = &mag.frames;
    if target.ncols() != mag.config.n_bins() {
        return Err(Error::DimMismatch {
            what: "spectrogram bins vs fft_size/2+1",
            left: target.ncols(),
            right: mag.config.n_bins(),
        });
    }
    if target.nrows() == 0 {
        return Err(Error::EmptySequence("magnitude spectrogram has no frames"));
    }
    if target.iter().any(|&m| !(m >= 0.0 && m.is_finite())) {
        return Err(Error::InvalidArgument(
            "magnitudes must be finite and non-negative".into(),
        ));
    }

    let initial: Array2<Complex64> = match init {
        InitPhase::Zero => target.mapv(|m| Complex64::new(m, 0.0)),
        InitPhase::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            target.mapv(|m| Complex64::from_polar(m, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
        }
    };
    let mut history = Vec::with_capacity(iters);
    let mut signal = engine.synthesize(&initial)?;
    let mut rebuilt = engine.analyze(&signal)?;
    let mut error = convergence(&rebuilt, target);
    history.push(error);
    let mut previous: Option<Array2<Complex64>> = None;
    for _ in 1..iters {
        let projected = project(&rebuilt, target);
        let mut accepted = false;
        if let Some(prev) = &previous {
            let mut candidate = projected.clone();
            Zip::from(&mut candidate)
                .and(prev)
                .for_each(|c, &p| *c += (*c - p) * MOMENTUM);
            let cand_signal = engine.synthesize(&candidate)?;
            let cand_rebuilt = engine.analyze(&cand_signal)?;
            let cand_error = convergence(&cand_rebuilt, target);
            if cand_error <= error {
                (signal, rebuilt, error) = (cand_signal, cand_rebuilt, cand_error);
                accepted = true;
            }
        }
        if !accepted {
            signal = engine.synthesize(&projected)?;
            rebuilt = engine.analyze(&signal)?;
            error = convergence(&rebuilt, target);
        }
        previous = Some(projected);
        history.push(error);
    }
    Ok((Waveform::new(signal, mag.sample_rate_hz)?, history))
}
