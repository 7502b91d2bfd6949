//! Dynamic time warping between two cepstral sequences.

use std::fmt::Write as _;

use ndarray::ArrayView2;

use crate::features::MelCepstra;
use crate::{Error, Result};

/// Monotone frame pairing from `(0, 0)` to `(T_a - 1, T_b - 1)` using steps
/// (1,0), (0,1) and (1,1).
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPath {
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

impl AlignmentPath {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The identity pairing of two equal-length sequences.
    pub fn diagonal(frames: usize) -> Self {
        Self {
            pairs: (0..frames).map(|t| (t, t)).collect(),
            cost: 0.0,
        }
    }

    /// One `i,j` line per pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.pairs.len() * 8);
        for (i, j) in &self.pairs {
            let _ = writeln!(out, "{i},{j}");
        }
        out
    }

    pub fn is_valid_for(&self, len_a: usize, len_b: usize) -> bool {
        let (Some(first), Some(last)) = (self.pairs.first(), self.pairs.last()) else {
            return false;
        };
        *first == (0, 0)
            && *last == (len_a - 1, len_b - 1)
            && self.pairs.windows(2).all(|w| {
                let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
                matches!((di, dj), (1, 0) | (0, 1) | (1, 1))
            })
    }
}

/// Euclidean distance between two coefficient rows, skipping `c_0` if asked.
pub fn frame_distance(a: &[f64], b: &[f64], exclude_c0: bool) -> f64 {
    let skip = usize::from(exclude_c0);
    a.iter()
        .zip(b)
        .skip(skip)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Globally optimal DTW path between the rows of `a` and `b`.
///
/// Path cost is the sum of local distances along the path. Ties during
/// backtracking prefer the diagonal step, then (1,0), then (0,1).
pub fn dtw(a: ArrayView2<f64>, b: ArrayView2<f64>, exclude_c0: bool) -> Result<AlignmentPath> {
    if a.nrows() == 0 || b.nrows() == 0 {
        return Err(Error::EmptySequence("DTW input has no frames"));
    }
    if a.ncols() != b.ncols() {
        return Err(Error::DimMismatch {
            what: "DTW coefficient count",
            left: a.ncols(),
            right: b.ncols(),
        });
    }
    let (ta, tb) = (a.nrows(), b.nrows());
    let rows_a: Vec<Vec<f64>> = a.outer_iter().map(|r| r.to_vec()).collect();
    let rows_b: Vec<Vec<f64>> = b.outer_iter().map(|r| r.to_vec()).collect();

    let mut acc = vec![f64::INFINITY; ta * tb];
    let idx = |i: usize, j: usize| i * tb + j;
    for i in 0..ta {
        for j in 0..tb {
            let d = frame_distance(&rows_a[i], &rows_b[j], exclude_c0);
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 {
                    acc[idx(i - 1, j - 1)]
                } else {
                    f64::INFINITY
                };
                let up = if i > 0 { acc[idx(i - 1, j)] } else { f64::INFINITY };
                let left = if j > 0 { acc[idx(i, j - 1)] } else { f64::INFINITY };
                diag.min(up).min(left)
            };
            acc[idx(i, j)] = prev + d;
        }
    }

    let mut pairs = vec![(ta - 1, tb - 1)];
    let (mut i, mut j) = (ta - 1, tb - 1);
    while (i, j) != (0, 0) {
        let candidates = [
            (i > 0 && j > 0).then(|| (i - 1, j - 1)),
            (i > 0).then(|| (i - 1, j)),
            (j > 0).then(|| (i, j - 1)),
        ];
        let mut best: Option<(usize, usize)> = None;
        for c in candidates.into_iter().flatten() {
            // strict comparison keeps the earlier (preferred) step on ties
            if best.is_none_or(|b| acc[idx(c.0, c.1)] < acc[idx(b.0, b.1)]) {
                best = Some(c);
            }
        }
        (i, j) = best.expect("at least one predecessor exists");
        pairs.push((i, j));
    }
    pairs.reverse();
    Ok(AlignmentPath {
        pairs,
        cost: acc[idx(ta - 1, tb - 1)],
    })
}

/// DTW on two cepstral sequences; `c_0` is normally left out so that level
/// differences do not steer the alignment.
pub fn dtw_align(a: &MelCepstra, b: &MelCepstra, exclude_c0: bool) -> Result<AlignmentPath> {
    dtw(a.coeffs.view(), b.coeffs.view(), exclude_c0)
}
