use ndarray::{Array2, ArrayView2, Axis};

use super::basis::{build_reference_matrix, build_warp_matrix, WarpFactor, WarpGeometry};
use crate::align::AlignmentPath;
use crate::features::MelCepstra;
use crate::{Error, Result};

/// Squared spectral mismatch between warped converted cepstra and reference
/// cepstra, averaged over the aligned frame pairs:
///
/// `E = (1/P) sum_(i,j) sum_k (sum_m D[k,m] c_i[m] - sum_m D*[k,m] c*_j[m])^2`.
pub fn warp_cost(
    d: &Array2<f64>,
    d_star: &Array2<f64>,
    conv: &MelCepstra,
    reference: &MelCepstra,
    path: &AlignmentPath,
) -> Result<f64> {
    check_dims(d, d_star, conv.coeffs.view(), reference.coeffs.view(), path)?;
    let target = gather(reference.coeffs.view(), path, |p| p.1).dot(&d_star.t());
    let source = gather(conv.coeffs.view(), path, |p| p.0);
    let residual = source.dot(&d.t()) - &target;
    Ok(mean_sq(&residual))
}

fn check_dims(
    d: &Array2<f64>,
    d_star: &Array2<f64>,
    conv: ArrayView2<f64>,
    reference: ArrayView2<f64>,
    path: &AlignmentPath,
) -> Result<()> {
    if d.dim() != d_star.dim() {
        return Err(Error::DimMismatch {
            what: "warp matrix rows vs reference matrix rows",
            left: d.nrows(),
            right: d_star.nrows(),
        });
    }
    for (what, cols) in [
        ("warp matrix columns vs converted cepstral order", conv.ncols()),
        ("warp matrix columns vs reference cepstral order", reference.ncols()),
    ] {
        if d.ncols() != cols {
            return Err(Error::DimMismatch {
                what,
                left: d.ncols(),
                right: cols,
            });
        }
    }
    if path.is_empty() {
        return Err(Error::EmptySequence("alignment path"));
    }
    if let Some(&(i, j)) = path
        .pairs
        .iter()
        .find(|&&(i, j)| i >= conv.nrows() || j >= reference.nrows())
    {
        return Err(Error::InvalidArgument(format!(
            "alignment pair ({i}, {j}) outside {} x {} frames",
            conv.nrows(),
            reference.nrows()
        )));
    }
    Ok(())
}

fn gather(frames: ArrayView2<f64>, path: &AlignmentPath, pick: impl Fn(&(usize, usize)) -> usize) -> Array2<f64> {
    let rows: Vec<usize> = path.pairs.iter().map(pick).collect();
    frames.select(Axis(0), &rows)
}

fn mean_sq(residual: &Array2<f64>) -> f64 {
    residual.iter().map(|r| r * r).sum::<f64>() / residual.nrows() as f64
}

/// The warp cost as a function of the warp factor, with the alignment and
/// the reference spectra fixed. Used by the learner and exposed for
/// checking its analytic gradient.
#[derive(Debug, Clone)]
pub struct WarpObjective {
    geometry: WarpGeometry,
    /// Converted cepstra gathered along the path, P x M.
    source: Array2<f64>,
    /// `D* c*` for each aligned reference frame, P x K.
    target: Array2<f64>,
}

impl WarpObjective {
    pub fn new(
        geometry: WarpGeometry,
        conv: ArrayView2<f64>,
        reference: ArrayView2<f64>,
        path: &AlignmentPath,
    ) -> Result<Self> {
        let d_star = build_reference_matrix(&geometry)?;
        check_dims(&d_star, &d_star, conv, reference, path)?;
        let target = gather(reference, path, |p| p.1).dot(&d_star.t());
        let source = gather(conv, path, |p| p.0);
        Ok(Self {
            geometry,
            source,
            target,
        })
    }

    pub fn geometry(&self) -> &WarpGeometry {
        &self.geometry
    }

    pub fn n_pairs(&self) -> usize {
        self.source.nrows()
    }

    /// `C D^T - R`, one row per aligned pair.
    pub(crate) fn residual(&self, d: &Array2<f64>) -> Array2<f64> {
        self.source.dot(&d.t()) - &self.target
    }

    pub(crate) fn residual_cost(&self, residual: &Array2<f64>) -> f64 {
        mean_sq(residual)
    }

    pub(crate) fn source(&self) -> &Array2<f64> {
        &self.source
    }

    pub fn cost(&self, factor: &WarpFactor) -> Result<f64> {
        let d = build_warp_matrix(&self.geometry, factor)?;
        let cost = self.residual_cost(&self.residual(&d));
        if !cost.is_finite() {
            return Err(Error::NonFiniteCost(cost));
        }
        Ok(cost)
    }

    /// `dE / d alpha_m` for every column `m`. For a scalar factor the
    /// derivative with respect to the shared alpha is the sum of the entries.
    pub fn gradient(&self, factor: &WarpFactor) -> Result<Vec<f64>> {
        let d = build_warp_matrix(&self.geometry, factor)?;
        let residual = self.residual(&d);
        Ok((0..self.geometry.n_coeffs)
            .map(|m| self.band_gradient(&residual, m, factor.alpha(m)))
            .collect())
    }

    /// `(2/P) sum_k dD[k,m] sum_p Res[p,k] C[p,m]`.
    pub(crate) fn band_gradient(&self, residual: &Array2<f64>, m: usize, alpha: f64) -> f64 {
        let dcol = self.geometry.column_dalpha(m, alpha);
        let weights = self.source.column(m);
        let mut total = 0.0;
        for (row, &w) in residual.outer_iter().zip(weights.iter()) {
            if w != 0.0 {
                total += w * row.iter().zip(&dcol).map(|(r, dd)| r * dd).sum::<f64>();
            }
        }
        2.0 * total / self.n_pairs() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::StftConfig;
    use crate::warp::Basis;
    use ndarray::array;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cepstra(coeffs: Array2<f64>, centres: Vec<f64>) -> MelCepstra {
        MelCepstra {
            coeffs,
            config: StftConfig::new(4, 0.25, 0.25),
            n_mels: centres.len(),
            center_freqs: centres,
            sample_rate_hz: 16_000,
        }
    }

    fn small_geometry() -> WarpGeometry {
        WarpGeometry {
            basis: Basis::BandCenter,
            fft_size: 4,
            n_coeffs: 2,
            sample_rate_hz: 16_000,
            mel_center_freqs: vec![1000.0, 2000.0],
        }
    }

    #[test]
    fn hand_computed_three_by_two_instance() {
        // N = 4 gives bins k = 0, 1, 2; column 1 holds cos(2 pi 2000 k / 16000).
        let g = small_geometry();
        let d_star = build_reference_matrix(&g).unwrap();
        assert_eq!(d_star.column(0).to_vec(), vec![1.0, 1.0, 1.0]);
        assert!((d_star[[1, 1]] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(d_star[[2, 1]].abs() < 1e-15);

        let conv = cepstra(array![[1.0, 2.0], [1.0, 2.0]], vec![1000.0, 2000.0]);
        let reference = cepstra(array![[0.5, 1.0], [0.5, 1.0]], vec![1000.0, 2000.0]);
        let path = AlignmentPath::diagonal(2);
        let d = build_warp_matrix(&g, &WarpFactor::identity()).unwrap();
        let e = warp_cost(&d, &d_star, &conv, &reference, &path).unwrap();
        // per frame: (3 - 1.5)^2 + (1 + sqrt2 - 0.5 - sqrt2/2)^2 + (1 - 0.5)^2
        let per_frame = 1.5f64.powi(2) + (0.5 + FRAC_1_SQRT_2).powi(2) + 0.25;
        assert!((e - per_frame).abs() < 1e-12, "{e} vs {per_frame}");
    }

    #[test]
    fn identical_inputs_cost_zero() {
        let g = small_geometry();
        let x = cepstra(array![[0.3, -1.0], [2.0, 0.1], [0.0, 1.0]], vec![1000.0, 2000.0]);
        let d = build_warp_matrix(&g, &WarpFactor::identity()).unwrap();
        let e = warp_cost(&d, &d, &x, &x, &AlignmentPath::diagonal(3)).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn objective_matches_free_function() {
        let g = small_geometry();
        let conv = cepstra(array![[1.0, -2.0], [0.5, 0.7]], vec![1000.0, 2000.0]);
        let reference = cepstra(array![[0.1, 0.2], [0.0, 1.0], [1.0, 1.0]], vec![1000.0, 2000.0]);
        let path = AlignmentPath {
            pairs: vec![(0, 0), (0, 1), (1, 2)],
            cost: 0.0,
        };
        let obj = WarpObjective::new(g.clone(), conv.coeffs.view(), reference.coeffs.view(), &path).unwrap();
        let factor = WarpFactor::PerBand(vec![0.0, 0.3]);
        let d = build_warp_matrix(&g, &factor).unwrap();
        let d_star = build_reference_matrix(&g).unwrap();
        let direct = warp_cost(&d, &d_star, &conv, &reference, &path).unwrap();
        assert!((obj.cost(&factor).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let g = small_geometry();
        let d = build_reference_matrix(&g).unwrap();
        let conv = cepstra(array![[1.0, 2.0, 3.0]], vec![1000.0, 2000.0, 3000.0]);
        let reference = cepstra(array![[1.0, 2.0]], vec![1000.0, 2000.0]);
        let err = warp_cost(&d, &d, &conv, &reference, &AlignmentPath::diagonal(1)).unwrap_err();
        assert!(matches!(err, Error::DimMismatch { left: 2, right: 3, .. }));
        let err = warp_cost(&d, &d, &reference, &reference, &AlignmentPath::diagonal(0)).unwrap_err();
        assert!(matches!(err, Error::EmptySequence(_)));
    }
}
