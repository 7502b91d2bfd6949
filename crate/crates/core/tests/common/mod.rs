//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcwarp::dsp::{mel_filterbank, StftConfig};
use vcwarp::features::MelCepstra;

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Euclidean distance computed independently of the library.
fn distance(a: &[f64], b: &[f64], skip: usize) -> f64 {
    a[skip..]
        .iter()
        .zip(&b[skip..])
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Minimum summed local distance over every monotone path from `(0, 0)` to
/// the far corner, by exhaustive enumeration.
pub fn brute_force_dtw(a: &Array2<f64>, b: &Array2<f64>, exclude_c0: bool) -> f64 {
    fn walk(a: &Array2<f64>, b: &Array2<f64>, skip: usize, i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + distance(a.row(i).as_slice().unwrap(), b.row(j).as_slice().unwrap(), skip);
        if i + 1 == a.nrows() && j + 1 == b.nrows() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < a.nrows() && j + 1 < b.nrows() {
            walk(a, b, skip, i + 1, j + 1, acc, best);
        }
        if i + 1 < a.nrows() {
            walk(a, b, skip, i + 1, j, acc, best);
        }
        if j + 1 < b.nrows() {
            walk(a, b, skip, i, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, usize::from(exclude_c0), 0, 0, 0.0, &mut best);
    best
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0))
}

/// Random cepstra with decaying coefficient scale and real filterbank
/// metadata for the given analysis.
pub fn random_cepstra(seed: u64, frames: usize, n_coeffs: usize, cfg: StftConfig) -> MelCepstra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_mels = n_coeffs.max(80);
    MelCepstra {
        coeffs: Array2::from_shape_fn((frames, n_coeffs), |(_, m)| {
            rng.random_range(-1.0..1.0) * 3.0 / (1.0 + m as f64)
        }),
        config: cfg,
        n_mels,
        center_freqs: mel_filterbank(n_mels, &cfg, 16_000).unwrap().center_freqs,
        sample_rate_hz: 16_000,
    }
}
