//! Mel-cepstral distortion and normalised F0 RMSE between converted and
//! reference speech.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::align::{dtw_align, AlignmentPath};
use crate::audio_io::{resample_linear, Waveform};
use crate::features::{estimate_f0, extract_mel_cepstra, F0Contour, MelCepstra};
use crate::{Error, Profile, Result};

/// `10 / ln 10 * sqrt(2)`: the frame MCD of a unit difference in one
/// coefficient.
pub const MCD_UNIT_DB: f64 = 10.0 / LN_10 * std::f64::consts::SQRT_2;

/// `(10 / ln 10) sqrt(2 sum_{m >= 1} (c_m - c_ref_m)^2)`, in dB. `c_0` is
/// ignored.
pub fn mcd_frame(c: &[f64], c_ref: &[f64]) -> Result<f64> {
    if c.len() != c_ref.len() {
        return Err(Error::DimMismatch {
            what: "frame cepstral order",
            left: c.len(),
            right: c_ref.len(),
        });
    }
    if c.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 coefficients per frame, got {}",
            c.len()
        )));
    }
    let sq: f64 = c.iter().zip(c_ref).skip(1).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(10.0 / LN_10 * (2.0 * sq).sqrt())
}

/// Mean frame MCD along a given alignment.
pub fn mcd_along(conv: &MelCepstra, reference: &MelCepstra, path: &AlignmentPath) -> Result<f64> {
    if path.is_empty() {
        return Err(Error::EmptySequence("alignment path"));
    }
    let mut total = 0.0;
    for &(i, j) in &path.pairs {
        let (Some(a), Some(b)) = (conv.coeffs.row(i).to_slice(), reference.coeffs.row(j).to_slice()) else {
            unreachable!("cepstra rows are contiguous");
        };
        total += mcd_frame(a, b)?;
    }
    Ok(total / path.len() as f64)
}

/// DTW-aligns the two sequences (without `c_0`) and averages the frame MCD
/// over the path.
pub fn mcd(conv: &MelCepstra, reference: &MelCepstra) -> Result<f64> {
    let path = dtw_align(conv, reference, true)?;
    mcd_along(conv, reference, &path)
}

/// Result of [`f0_rmse_normalized`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F0Rmse {
    pub value: f64,
    pub n_covoiced: usize,
    /// No aligned pair was voiced on both sides; `value` is then 0.
    pub degenerate: bool,
}

fn z_scores(contour: &F0Contour) -> Vec<f64> {
    let voiced: Vec<f64> = contour.voiced_values().collect();
    if voiced.is_empty() {
        return vec![0.0; contour.len()];
    }
    let n = voiced.len() as f64;
    let mean = voiced.iter().sum::<f64>() / n;
    let std = (voiced.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    contour
        .f0_hz
        .iter()
        .map(|&f| if std > 0.0 { (f - mean) / std } else { 0.0 })
        .collect()
}

/// RMSE between per-utterance z-normalised F0 contours over aligned pairs
/// that are voiced on both sides. Each contour is normalised with the mean
/// and (population) standard deviation of its own voiced frames; a contour
/// with zero spread normalises to all zeros. Pairs outside either contour
/// count as unvoiced.
pub fn f0_rmse_normalized(conv: &F0Contour, reference: &F0Contour, path: &AlignmentPath) -> F0Rmse {
    let (za, zb) = (z_scores(conv), z_scores(reference));
    let voiced = |c: &F0Contour, t: usize| c.voiced.get(t).copied().unwrap_or(false);
    let mut sum = 0.0;
    let mut n = 0usize;
    for &(i, j) in &path.pairs {
        if voiced(conv, i) && voiced(reference, j) {
            sum += (za[i] - zb[j]).powi(2);
            n += 1;
        }
    }
    if n == 0 {
        return F0Rmse {
            value: 0.0,
            n_covoiced: 0,
            degenerate: true,
        };
    }
    F0Rmse {
        value: (sum / n as f64).sqrt(),
        n_covoiced: n,
        degenerate: false,
    }
}

/// Evaluation of one converted/reference pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converted: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    pub mcd_db: f64,
    pub f0_rmse_norm: f64,
    pub n_aligned_frames: usize,
    pub n_covoiced_frames: usize,
    pub f0_degenerate: bool,
    pub dtw_cost: f64,
    pub profile: Profile,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str =
        "converted,reference,mcd_db,f0_rmse_norm,n_aligned_frames,n_covoiced_frames,f0_degenerate";

    pub fn with_paths(mut self, converted: impl Into<String>, reference: impl Into<String>) -> Self {
        self.converted = Some(converted.into());
        self.reference = Some(reference.into());
        self
    }

    /// One CSV line matching [`Self::CSV_HEADER`], numbers at full precision.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            csv_field(self.converted.as_deref().unwrap_or("")),
            csv_field(self.reference.as_deref().unwrap_or("")),
            self.mcd_db,
            self.f0_rmse_norm,
            self.n_aligned_frames,
            self.n_covoiced_frames,
            self.f0_degenerate
        )
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        text
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Brings both signals to the profile rate, extracts cepstra and F0 with the
/// profile settings, aligns by DTW and computes MCD and normalised F0 RMSE.
pub fn evaluate_pair(conv: &Waveform, reference: &Waveform, profile: &Profile) -> Result<EvalReport> {
    profile.validate()?;
    let cfg = profile.stft_config();
    let conv = resample_linear(conv, profile.sample_rate_hz)?;
    let reference = resample_linear(reference, profile.sample_rate_hz)?;
    let ca = extract_mel_cepstra(&conv, profile.n_coeffs, &cfg)?;
    let cb = extract_mel_cepstra(&reference, profile.n_coeffs, &cfg)?;
    let path = dtw_align(&ca, &cb, true)?;
    let mcd_db = mcd_along(&ca, &cb, &path)?;
    let fa = estimate_f0(&conv, profile.f0_range(), &cfg)?;
    let fb = estimate_f0(&reference, profile.f0_range(), &cfg)?;
    let f0 = f0_rmse_normalized(&fa, &fb, &path);
    Ok(EvalReport {
        converted: None,
        reference: None,
        mcd_db,
        f0_rmse_norm: f0.value,
        n_aligned_frames: path.len(),
        n_covoiced_frames: f0.n_covoiced,
        f0_degenerate: f0.degenerate,
        dtw_cost: path.cost,
        profile: profile.clone(),
    })
}
