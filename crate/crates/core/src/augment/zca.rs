//! ZCA whitening fitted on a training split.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// `x ↦ W (x − μ)` with `W = U diag(1/√(λ + ε)) Uᵀ`.
#[derive(Debug, Clone)]
pub struct ZcaWhitener {
    pub epsilon: f64,
    mean: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl ZcaWhitener {
    pub fn fit(images: &Tensor, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                domain: "(0, inf)",
            });
        }
        let (n, d) = (images.batch(), images.item_len());
        if n < 2 {
            return Err(Error::Precondition("zca needs at least two images".into()));
        }
        let x = DMatrix::from_row_slice(
            n,
            d,
            &images.data().iter().map(|&v| v as f64).collect::<Vec<_>>(),
        );
        let mean: Vec<f64> = (0..d).map(|j| x.column(j).mean()).collect();
        let mut centered = x;
        for j in 0..d {
            centered.column_mut(j).add_scalar_mut(-mean[j]);
        }
        let cov = centered.tr_mul(&centered) / n as f64;
        let eig = SymmetricEigen::new(cov);
        let scale =
            DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / (l.max(0.0) + epsilon).sqrt()));
        let matrix = &eig.eigenvectors * scale * eig.eigenvectors.transpose();
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(
                "zca whitening matrix is not finite".into(),
            ));
        }
        Ok(Self {
            epsilon,
            mean,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, images: &Tensor) -> Result<Tensor> {
        let (n, d) = (images.batch(), images.item_len());
        if d != self.dim() {
            return Err(Error::Validation(format!(
                "zca fitted on {}-dim images, got {d}",
                self.dim()
            )));
        }
        let mut x = DMatrix::from_row_slice(
            n,
            d,
            &images.data().iter().map(|&v| v as f64).collect::<Vec<_>>(),
        );
        for j in 0..d {
            x.column_mut(j).add_scalar_mut(-self.mean[j]);
        }
        // W is symmetric, so rows transform as x W.
        let y = x * &self.matrix;
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            data.extend(y.row(i).iter().map(|&v| v as f32));
        }
        Tensor::new(images.shape().to_vec(), data)
    }
}
