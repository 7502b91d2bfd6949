use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView1};

/// Orthonormal DCT-II of a fixed length, as a dense matrix.
#[derive(Debug, Clone)]
pub struct Dct {
    // basis[[m, j]] = w_m cos(pi m (j + 1/2) / n)
    basis: Array2<f64>,
}

impl Dct {
    pub fn new(n: usize) -> Self {
        let basis = Array2::from_shape_fn((n, n), |(m, j)| {
            Self::weight(m, n) * (PI * m as f64 * (j as f64 + 0.5) / n as f64).cos()
        });
        Self { basis }
    }

    /// Normalisation factor of coefficient `m` in a length-`n` orthonormal DCT-II.
    pub fn weight(m: usize, n: usize) -> f64 {
        if m == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        }
    }

    pub fn len(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.nrows() == 0
    }

    pub fn forward(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.basis.dot(&x)
    }

    /// Inverse (DCT-III). Shorter coefficient vectors are zero-extended,
    /// which gives the truncated-cepstrum smoothing of the log-mel curve.
    pub fn inverse(&self, c: ArrayView1<f64>) -> Array1<f64> {
        let used = c.len().min(self.len());
        let mut out = Array1::zeros(self.len());
        for m in 0..used {
            out.scaled_add(c[m], &self.basis.row(m));
        }
        out
    }
}
