use ndarray::Array2;

use super::StftConfig;
use crate::{Error, Result};

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular mel filterbank over the bins of an `fft_size`-point FFT.
///
/// `n_mels + 2` edge points are spaced evenly on the mel scale between 0 and
/// f_s/2; filter `j` rises from edge `j` to its centre at edge `j + 1` and
/// falls to edge `j + 2`. Each filter is normalised to unit sum so that a
/// flat magnitude spectrum maps to the same value in every band.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    pub weights: Array2<f64>,
    pub center_freqs: Vec<f64>,
    pub sample_rate_hz: u32,
}

impl MelFilterbank {
    pub fn n_mels(&self) -> usize {
        self.center_freqs.len()
    }

    /// Applies the bank to one magnitude frame.
    pub fn apply(&self, magnitude: &[f64]) -> Vec<f64> {
        self.weights
            .outer_iter()
            .map(|row| row.iter().zip(magnitude).map(|(w, m)| w * m).sum())
            .collect()
    }
}

pub fn mel_filterbank(n_mels: usize, cfg: &StftConfig, sample_rate_hz: u32) -> Result<MelFilterbank> {
    if n_mels < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 mel bands, got {n_mels}"
        )));
    }
    if sample_rate_hz == 0 || cfg.fft_size < 2 {
        return Err(Error::InvalidArgument("bad sample rate or fft size".into()));
    }
    let nyquist = sample_rate_hz as f64 / 2.0;
    let mel_top = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(mel_top * i as f64 / (n_mels + 1) as f64))
        .collect();
    let n_bins = cfg.n_bins();
    let bin_hz = sample_rate_hz as f64 / cfg.fft_size as f64;
    let mut weights = Array2::zeros((n_mels, n_bins));
    for j in 0..n_mels {
        let (lo, mid, hi) = (edges[j], edges[j + 1], edges[j + 2]);
        for k in 0..n_bins {
            let f = k as f64 * bin_hz;
            let w = ((f - lo) / (mid - lo)).min((hi - f) / (hi - mid));
            if w > 0.0 {
                weights[[j, k]] = w;
            }
        }
        let mut row = weights.row_mut(j);
        let sum: f64 = row.sum();
        if sum > 0.0 {
            row /= sum;
        } else {
            // Band narrower than a bin: take the bin nearest the centre.
            let k = ((mid / bin_hz).round() as usize).min(n_bins - 1);
            row[k] = 1.0;
        }
    }
    Ok(MelFilterbank {
        weights,
        center_freqs: edges[1..=n_mels].to_vec(),
        sample_rate_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mel_formula_round_trip() {
        assert_eq!(hz_to_mel(0.0), 0.0);
        assert!((hz_to_mel(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-12);
        for f in [10.0, 440.0, 1000.0, 7999.0] {
            assert!((mel_to_hz(hz_to_mel(f)) - f).abs() < 1e-9);
        }
    }

    #[test]
    fn two_band_centres() {
        let fb = mel_filterbank(2, &StftConfig::new(512, 32.0, 8.0), 16_000).unwrap();
        // Hand evaluation: mel(8000) = 2595 log10(1 + 8000/700) = 2840.023...;
        // centres at 1/3 and 2/3 of it mapped back through the inverse.
        let top = 2595.0 * (1.0f64 + 8000.0 / 700.0).log10();
        let c1 = 700.0 * (10f64.powf(top / 3.0 / 2595.0) - 1.0);
        let c2 = 700.0 * (10f64.powf(2.0 * top / 3.0 / 2595.0) - 1.0);
        assert!((fb.center_freqs[0] - c1).abs() < 1e-9);
        assert!((fb.center_freqs[1] - c2).abs() < 1e-9);
        assert!((c1 - 921.456).abs() < 1e-3 && (c2 - 3055.884).abs() < 1e-3, "{c1} {c2}");
    }

    #[test]
    fn centres_increase_and_filters_nonempty() {
        for &(n_fft, fs) in &[(1024usize, 16_000u32), (512, 16_000), (2048, 44_100), (256, 8_000)] {
            let cfg = StftConfig::new(n_fft, 10.0, 5.0);
            for n_mels in 2..=128 {
                let fb = mel_filterbank(n_mels, &cfg, fs).unwrap();
                assert!(fb.center_freqs.windows(2).all(|p| p[0] < p[1]));
                assert!(fb.center_freqs[0] > 0.0);
                assert!(*fb.center_freqs.last().unwrap() <= fs as f64 / 2.0);
                for row in fb.weights.outer_iter() {
                    assert!(row.iter().all(|&w| w >= 0.0));
                    assert!((row.sum() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_single_band() {
        assert!(mel_filterbank(1, &StftConfig::mel80(), 16_000).is_err());
    }
}
