//! Learn a warp from a converted/reference pair, apply it to the converted
//! audio, and evaluate before and after.

use serde::{Deserialize, Serialize};

use crate::audio_io::{resample_linear, Waveform};
use crate::dsp::InitPhase;
use crate::features::extract_mel_cepstra;
use crate::metrics::{evaluate_pair, EvalReport};
use crate::warp::{apply_warp, learn_warp, ApplyOptions, LearnOptions, WarpFactor, WarpMode, WarpModel};
use crate::{Profile, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    /// Analysis used to learn and apply the warp.
    pub warp_profile: Profile,
    /// Analysis used for the before/after evaluation.
    pub eval_profile: Profile,
    pub learn: LearnOptions,
    pub init: InitPhase,
    pub fine_structure: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            warp_profile: Profile::warp80(),
            eval_profile: Profile::mcd36(),
            learn: LearnOptions::default(),
            init: InitPhase::Zero,
            fine_structure: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub mode: WarpMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    pub mcd_before: f64,
    pub mcd_after: f64,
    pub f0_rmse_before: f64,
    pub f0_rmse_after: f64,
    pub before: EvalReport,
    pub after: EvalReport,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        text
    }
}

/// Output of [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub model: WarpModel,
    pub warped: Waveform,
    pub report: PipelineReport,
}

/// Learns the warp from `conv` towards `reference` under the warp profile,
/// resynthesises `conv` through it and reports MCD and F0 RMSE of both the
/// original and the warped audio against `reference`.
pub fn run_pipeline(conv: &Waveform, reference: &Waveform, opts: &PipelineOptions) -> Result<PipelineOutput> {
    let wp = &opts.warp_profile;
    wp.validate()?;
    let cfg = wp.stft_config();
    let conv_w = resample_linear(conv, wp.sample_rate_hz)?;
    let ref_w = resample_linear(reference, wp.sample_rate_hz)?;
    let ca = extract_mel_cepstra(&conv_w, wp.n_coeffs, &cfg)?;
    let cb = extract_mel_cepstra(&ref_w, wp.n_coeffs, &cfg)?;
    let model = learn_warp(&ca, &cb, &opts.learn)?;
    let apply = ApplyOptions {
        gl_iters: wp.gl_iters,
        init: opts.init,
        fine_structure: opts.fine_structure,
    };
    let warped = apply_warp(&model, &conv_w, &apply)?;

    let before = evaluate_pair(conv, reference, &opts.eval_profile)?;
    let after = evaluate_pair(&warped, reference, &opts.eval_profile)?;
    let (alpha, alphas) = match model.factor() {
        WarpFactor::Scalar(a) => (Some(*a), None),
        WarpFactor::PerBand(a) => (None, Some(a.clone())),
    };
    let report = PipelineReport {
        mode: model.mode(),
        alpha,
        alphas,
        mcd_before: before.mcd_db,
        mcd_after: after.mcd_db,
        f0_rmse_before: before.f0_rmse_norm,
        f0_rmse_after: after.f0_rmse_norm,
        before,
        after,
    };
    Ok(PipelineOutput { model, warped, report })
}
