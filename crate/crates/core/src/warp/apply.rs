use ndarray::Array2;

use super::model::WarpModel;
use crate::audio_io::Waveform;
use crate::dsp::{griffin_lim, InitPhase, Spectrogram};
use crate::features::{extract_with_spectrum, MelCepstra};
use crate::{Error, Result};

/// Floor for log-magnitudes of individual bins, matching the mel floor.
const LOG_MAG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplyOptions {
    pub gl_iters: usize,
    pub init: InitPhase,
    /// Keep the excitation fine structure: only the cepstral envelope is
    /// warped and the residual `log|X| - D* c` (harmonics, noise) is added
    /// back unchanged. When false the output magnitude is the warped
    /// envelope alone.
    pub fine_structure: bool,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        Self {
            gl_iters: 60,
            init: InitPhase::Zero,
            fine_structure: true,
        }
    }
}

/// Row `t` is `D c_t`: the warped smoothed log spectrum of frame `t`.
pub fn apply_warp_to_cepstra(model: &WarpModel, conv: &MelCepstra) -> Result<Array2<f64>> {
    if conv.n_coeffs() != model.n_coeffs() {
        return Err(Error::DimMismatch {
            what: "cepstral order vs warp model order",
            left: conv.n_coeffs(),
            right: model.n_coeffs(),
        });
    }
    Ok(conv.coeffs.dot(&model.d().t()))
}

/// The log-magnitude spectrogram `apply_warp` resynthesises: `D c` per frame,
/// plus `log|X| - D* c` when keeping fine structure.
pub fn warped_log_spectrogram(
    model: &WarpModel,
    cepstra: &MelCepstra,
    spectrum: &Spectrogram,
    fine_structure: bool,
) -> Result<Array2<f64>> {
    let mut log_spec = apply_warp_to_cepstra(model, cepstra)?;
    if log_spec.dim() != spectrum.frames.dim() {
        return Err(Error::DimMismatch {
            what: "cepstral frames vs spectrogram frames",
            left: log_spec.nrows(),
            right: spectrum.frames.nrows(),
        });
    }
    if fine_structure {
        let envelope = cepstra.coeffs.dot(&model.d_star().t());
        log_spec
            .iter_mut()
            .zip(envelope.iter().zip(spectrum.frames.iter()))
            .for_each(|(s, (e, x))| *s += x.max(LOG_MAG_FLOOR).ln() - e);
    }
    Ok(log_spec)
}

fn check_model_fits(model: &WarpModel, w: &Waveform) -> Result<()> {
    let g = model.geometry();
    if w.sample_rate_hz() != g.sample_rate_hz {
        return Err(Error::ConfigMismatch(format!(
            "audio at {} Hz, warp model at {} Hz",
            w.sample_rate_hz(),
            g.sample_rate_hz
        )));
    }
    Ok(())
}

/// Warps the spectral envelope of `conv` and resynthesises it with
/// Griffin-Lim. The output has the input's length.
pub fn apply_warp(model: &WarpModel, conv: &Waveform, opts: &ApplyOptions) -> Result<Waveform> {
    check_model_fits(model, conv)?;
    let (cepstra, spectrum) = extract_with_spectrum(conv, model.n_coeffs(), model.analysis())?;
    if cepstra.center_freqs != model.geometry().mel_center_freqs {
        return Err(Error::ConfigMismatch(format!(
            "audio analysis gives {} mel bands, warp model expects {}",
            cepstra.n_mels,
            model.geometry().n_mels()
        )));
    }
    let log_spec = warped_log_spectrogram(model, &cepstra, &spectrum, opts.fine_structure)?;
    let magnitude = Spectrogram {
        frames: log_spec.mapv(f64::exp),
        config: spectrum.config,
        sample_rate_hz: spectrum.sample_rate_hz,
    };
    let out = griffin_lim(&magnitude, opts.gl_iters, opts.init)?;
    let mut samples = out.into_samples();
    samples.resize(conv.len(), 0.0);
    Waveform::new(samples, conv.sample_rate_hz())
}
