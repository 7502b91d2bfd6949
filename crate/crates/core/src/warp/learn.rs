use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{Basis, WarpFactor, WarpGeometry};
use super::model::WarpModel;
use super::objective::WarpObjective;
use crate::align::{dtw_align, AlignmentPath};
use crate::features::MelCepstra;
use crate::{Error, Result};

/// Largest warp factor magnitude the learner will consider.
pub const ALPHA_LIMIT: f64 = 0.95;
const GRID_STEP: f64 = 0.01;
/// Grid points on each side of zero; the last one sits inside the open box.
const GRID_HALF_WIDTH: i64 = 94;
const GOLDEN_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarpMode {
    /// One warp factor shared by every cepstral coefficient.
    #[default]
    Scalar,
    /// One warp factor per coefficient, refined from the scalar solution.
    PerBand,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnOptions {
    pub mode: WarpMode,
    pub basis: Basis,
    /// Upper bound on coordinate-descent sweeps in per-band mode.
    pub max_sweeps: usize,
}

impl Default for LearnOptions {
    fn default() -> Self {
        Self {
            mode: WarpMode::Scalar,
            basis: Basis::MelAxis,
            max_sweeps: 50,
        }
    }
}

/// Learns a warp taking `conv` towards `reference`. The frames are aligned
/// once, by DTW on the unwarped cepstra without `c_0`, and the alignment is
/// held fixed while the warp factor is optimised.
pub fn learn_warp(conv: &MelCepstra, reference: &MelCepstra, opts: &LearnOptions) -> Result<WarpModel> {
    let path = dtw_align(conv, reference, true)?;
    learn_warp_along(conv, reference, &path, opts)
}

/// As [`learn_warp`] with a caller-supplied alignment.
pub fn learn_warp_along(
    conv: &MelCepstra,
    reference: &MelCepstra,
    path: &AlignmentPath,
    opts: &LearnOptions,
) -> Result<WarpModel> {
    check_compatible(conv, reference)?;
    let geometry = WarpGeometry {
        basis: opts.basis,
        fft_size: conv.config.fft_size,
        n_coeffs: conv.n_coeffs(),
        sample_rate_hz: conv.sample_rate_hz,
        mel_center_freqs: conv.center_freqs.clone(),
    };
    let objective = WarpObjective::new(geometry, conv.coeffs.view(), reference.coeffs.view(), path)?;
    let (alpha, _) = minimize_scalar(&objective)?;
    let factor = match opts.mode {
        WarpMode::Scalar => WarpFactor::Scalar(alpha),
        WarpMode::PerBand => WarpFactor::PerBand(refine_per_band(
            &objective,
            vec![alpha; conv.n_coeffs()],
            opts.max_sweeps,
        )?),
    };
    WarpModel::new(factor, objective.geometry().clone(), conv.config)
}

fn check_compatible(conv: &MelCepstra, reference: &MelCepstra) -> Result<()> {
    if conv.n_coeffs() != reference.n_coeffs() {
        return Err(Error::DimMismatch {
            what: "converted vs reference cepstral order",
            left: conv.n_coeffs(),
            right: reference.n_coeffs(),
        });
    }
    if conv.n_frames() == 0 || reference.n_frames() == 0 {
        return Err(Error::EmptySequence("cepstral sequence"));
    }
    if conv.sample_rate_hz != reference.sample_rate_hz
        || conv.center_freqs != reference.center_freqs
        || conv.config.fft_size != reference.config.fft_size
    {
        return Err(Error::ConfigMismatch(format!(
            "converted analysis ({} Hz, FFT {}, {} mels) differs from reference ({} Hz, FFT {}, {} mels)",
            conv.sample_rate_hz,
            conv.config.fft_size,
            conv.n_mels,
            reference.sample_rate_hz,
            reference.config.fft_size,
            reference.n_mels
        )));
    }
    Ok(())
}

/// Global 1-D search: grid over (-0.95, 0.95) in steps of 0.01, then
/// golden-section refinement around the best grid point. The grid contains
/// zero and the better of grid and refined point is returned, so the
/// result never costs more than the identity warp.
pub(crate) fn minimize_scalar(objective: &WarpObjective) -> Result<(f64, f64)> {
    let grid: Vec<f64> = (-GRID_HALF_WIDTH..=GRID_HALF_WIDTH)
        .map(|i| i as f64 * GRID_STEP)
        .collect();
    let costs = grid
        .par_iter()
        .map(|&a| objective.cost(&WarpFactor::Scalar(a)))
        .collect::<Result<Vec<f64>>>()?;
    let (mut best_alpha, mut best_cost) = (grid[0], costs[0]);
    for (&a, &c) in grid.iter().zip(&costs).skip(1) {
        if c < best_cost {
            best_alpha = a;
            best_cost = c;
        }
    }

    let f = |a: f64| objective.cost(&WarpFactor::Scalar(a));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (
        (best_alpha - GRID_STEP).max(-ALPHA_LIMIT),
        (best_alpha + GRID_STEP).min(ALPHA_LIMIT),
    );
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo >= GOLDEN_TOLERANCE {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    let mid_cost = f(mid)?;
    if mid_cost < best_cost {
        best_alpha = mid;
        best_cost = mid_cost;
    }
    Ok((best_alpha, best_cost))
}

/// Coordinate descent on the per-band factors with an Armijo backtracking
/// line search per coordinate. The residual is updated in place when a
/// column changes, so each trial costs one pass over the residual.
pub(crate) fn refine_per_band(objective: &WarpObjective, mut alphas: Vec<f64>, max_sweeps: usize) -> Result<Vec<f64>> {
    const ARMIJO: f64 = 1e-4;
    const MAX_HALVINGS: usize = 40;
    let geometry = objective.geometry();
    let d = super::basis::build_warp_matrix(geometry, &WarpFactor::PerBand(alphas.clone()))?;
    let mut residual = objective.residual(&d);
    let mut cost = objective.residual_cost(&residual);
    if !cost.is_finite() {
        return Err(Error::NonFiniteCost(cost));
    }
    let source = objective.source().clone();
    let mut step: Vec<Option<f64>> = vec![None; alphas.len()];

    for _ in 0..max_sweeps {
        let sweep_start = cost;
        for m in 0..alphas.len() {
            let g = objective.band_gradient(&residual, m, alphas[m]);
            if g == 0.0 || !g.is_finite() {
                continue;
            }
            let old_col = geometry.column(m, alphas[m]);
            let weights = source.column(m);
            let mut t = step[m].unwrap_or(GRID_STEP / g.abs());
            for _ in 0..MAX_HALVINGS {
                let trial = (alphas[m] - t * g).clamp(-ALPHA_LIMIT, ALPHA_LIMIT);
                let delta: Vec<f64> = geometry
                    .column(m, trial)
                    .iter()
                    .zip(&old_col)
                    .map(|(n, o)| n - o)
                    .collect();
                let mut trial_cost = 0.0;
                for (row, &w) in residual.outer_iter().zip(weights.iter()) {
                    trial_cost += row.iter().zip(&delta).map(|(r, dl)| (r + w * dl).powi(2)).sum::<f64>();
                }
                trial_cost /= objective.n_pairs() as f64;
                let moved = alphas[m] - trial;
                if trial_cost <= cost - ARMIJO * g * moved {
                    for (mut row, &w) in residual.outer_iter_mut().zip(weights.iter()) {
                        row.iter_mut().zip(&delta).for_each(|(r, dl)| *r += w * dl);
                    }
                    alphas[m] = trial;
                    cost = trial_cost;
                    step[m] = Some(2.0 * t);
                    break;
                }
                t *= 0.5;
                step[m] = Some(t);
            }
        }
        if !cost.is_finite() {
            return Err(Error::NonFiniteCost(cost));
        }
        if sweep_start - cost <= 1e-10 * sweep_start.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(alphas)
}
