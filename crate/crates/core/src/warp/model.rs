use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::basis::{build_reference_matrix, build_warp_matrix, Basis, WarpFactor, WarpGeometry};
use super::learn::WarpMode;
use crate::dsp::StftConfig;
use crate::{Error, Result};

/// A learned warp: the factor(s), the geometry they apply to, the analysis
/// settings of the features it was learned on, and the matrices `D`, `D*`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpModel {
    factor: WarpFactor,
    geometry: WarpGeometry,
    analysis: StftConfig,
    d: Array2<f64>,
    d_star: Array2<f64>,
}

/// On-disk form. The matrices are rebuilt on load.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    mode: WarpMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphas: Option<Vec<f64>>,
    #[serde(default)]
    basis: Basis,
    fft_size: usize,
    n_coeffs: usize,
    sample_rate_hz: u32,
    window_ms: f64,
    hop_ms: f64,
    mel_center_freqs: Vec<f64>,
}

impl WarpModel {
    pub fn new(factor: WarpFactor, geometry: WarpGeometry, analysis: StftConfig) -> Result<Self> {
        if analysis.fft_size != geometry.fft_size {
            return Err(Error::ConfigMismatch(format!(
                "analysis FFT size {} vs warp FFT size {}",
                analysis.fft_size, geometry.fft_size
            )));
        }
        analysis.validate(geometry.sample_rate_hz)?;
        if geometry.mel_center_freqs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "mel centre frequencies must be strictly increasing".into(),
            ));
        }
        let d = build_warp_matrix(&geometry, &factor)?;
        let d_star = build_reference_matrix(&geometry)?;
        Ok(Self {
            factor,
            geometry,
            analysis,
            d,
            d_star,
        })
    }

    /// The identity warp for the given geometry.
    pub fn identity(geometry: WarpGeometry, analysis: StftConfig) -> Result<Self> {
        Self::new(WarpFactor::identity(), geometry, analysis)
    }

    pub fn mode(&self) -> WarpMode {
        match self.factor {
            WarpFactor::Scalar(_) => WarpMode::Scalar,
            WarpFactor::PerBand(_) => WarpMode::PerBand,
        }
    }

    pub fn factor(&self) -> &WarpFactor {
        &self.factor
    }

    /// Warp factor acting on coefficient `band`.
    pub fn alpha(&self, band: usize) -> f64 {
        self.factor.alpha(band)
    }

    pub fn geometry(&self) -> &WarpGeometry {
        &self.geometry
    }

    pub fn analysis(&self) -> &StftConfig {
        &self.analysis
    }

    pub fn n_coeffs(&self) -> usize {
        self.geometry.n_coeffs
    }

    pub fn d(&self) -> &Array2<f64> {
        &self.d
    }

    pub fn d_star(&self) -> &Array2<f64> {
        &self.d_star
    }

    pub fn to_json(&self) -> String {
        let (alpha, alphas) = match &self.factor {
            WarpFactor::Scalar(a) => (Some(*a), None),
            WarpFactor::PerBand(a) => (None, Some(a.clone())),
        };
        let doc = Document {
            mode: self.mode(),
            alpha,
            alphas,
            basis: self.geometry.basis,
            fft_size: self.geometry.fft_size,
            n_coeffs: self.geometry.n_coeffs,
            sample_rate_hz: self.geometry.sample_rate_hz,
            window_ms: self.analysis.window_ms,
            hop_ms: self.analysis.hop_ms,
            mel_center_freqs: self.geometry.mel_center_freqs.clone(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("warp document serialises");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text)?;
        let factor = match (doc.mode, doc.alpha, doc.alphas) {
            (WarpMode::Scalar, Some(a), None) => WarpFactor::Scalar(a),
            (WarpMode::PerBand, None, Some(a)) => WarpFactor::PerBand(a),
            (mode, _, _) => {
                let field = if mode == WarpMode::Scalar { "alpha" } else { "alphas" };
                return Err(Error::InvalidArgument(format!(
                    "{mode:?} warp document must carry exactly the `{field}` field"
                )));
            }
        };
        let geometry = WarpGeometry {
            basis: doc.basis,
            fft_size: doc.fft_size,
            n_coeffs: doc.n_coeffs,
            sample_rate_hz: doc.sample_rate_hz,
            mel_center_freqs: doc.mel_center_freqs,
        };
        let analysis = StftConfig::new(doc.fft_size, doc.window_ms, doc.hop_ms);
        Self::new(factor, geometry, analysis)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
