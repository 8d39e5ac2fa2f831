//! Scaled unscented transform and the matrix square-root kit used by the
//! filter engine: sigma-point generation, weighted propagation, Cholesky
//! factorization, and the QR covariance square root.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum UnscentedError {
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("invalid unscented parameters: n + mu = {n_plus_mu} must be positive")]
    InvalidScaling { n_plus_mu: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Scaled unscented transform parameters.
///
/// `mu = alpha^2 (n + lambda) - n` controls the sigma-point spread; only
/// `n + mu <= 0` is rejected. Negative center weights are ordinary scaled-UT
/// behavior and are allowed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UtParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda_free: f64,
}

impl Default for UtParams {
    fn default() -> Self {
        UtParams {
            alpha: 1e-2,
            beta: 1.0,
            lambda_free: 0.0,
        }
    }
}

impl UtParams {
    pub fn mu(&self, n: usize) -> f64 {
        self.alpha * self.alpha * (n as f64 + self.lambda_free) - n as f64
    }

    pub fn validate(&self, n: usize) -> Result<(), UnscentedError> {
        let n_plus_mu = n as f64 + self.mu(n);
        if n_plus_mu <= 0.0 {
            return Err(UnscentedError::InvalidScaling { n_plus_mu });
        }
        Ok(())
    }
}

/// A 2n+1 sigma-point set with its mean and covariance weights.
#[derive(Debug, Clone)]
pub struct SigmaSet {
    pub points: Vec<DVector<f64>>,
    pub mean_weights: DVector<f64>,
    pub cov_weights: DVector<f64>,
}

impl SigmaSet {
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// Only the lower triangle of `m` is read. A non-positive pivot aborts with
/// the failing index so callers can decide on a fallback.
pub fn chol_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>, UnscentedError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(UnscentedError::Dimension(format!(
            "cholesky needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(UnscentedError::NotPositiveDefinite { pivot: j });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Generate the 2n+1 scaled sigma points of `(mean, cov)`.
pub fn sigma_points(
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    p: &UtParams,
) -> Result<SigmaSet, UnscentedError> {
    let n = mean.len();
    p.validate(n)?;
    let mu = p.mu(n);
    let n_plus_mu = n as f64 + mu;
    let factor = chol_factor(cov)?;
    let scale = n_plus_mu.sqrt();

    let mut points = Vec::with_capacity(2 * n + 1);
    points.push(mean.clone());
    for a in 0..n {
        let col = factor.column(a) * scale;
        points.push(mean + &col);
    }
    for a in 0..n {
        let col = factor.column(a) * scale;
        points.push(mean - &col);
    }

    let mut mean_weights = DVector::zeros(2 * n + 1);
    let mut cov_weights = DVector::zeros(2 * n + 1);
    mean_weights[0] = mu / n_plus_mu;
    cov_weights[0] = mu / n_plus_mu + (1.0 - p.alpha * p.alpha + p.beta);
    let side = 1.0 / (2.0 * n_plus_mu);
    for a in 1..=2 * n {
        mean_weights[a] = side;
        cov_weights[a] = side;
    }
    Ok(SigmaSet {
        points,
        mean_weights,
        cov_weights,
    })
}

/// Propagate a sigma set through `f`, returning the weighted mean, covariance
/// (plus `additive_cov` when given), and the input/output cross-covariance.
pub fn ut_propagate<F>(
    s: &SigmaSet,
    f: F,
    additive_cov: Option<&DMatrix<f64>>,
) -> (DVector<f64>, DMatrix<f64>, DMatrix<f64>)
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let images: Vec<DVector<f64>> = s.points.iter().map(|p| f(p)).collect();
    let out_dim = images[0].len();
    let in_dim = s.dim();

    let mut mean = DVector::zeros(out_dim);
    for (a, img) in images.iter().enumerate() {
        mean += img * s.mean_weights[a];
    }

    let mut cov = match additive_cov {
        Some(m) => m.clone(),
        None => DMatrix::zeros(out_dim, out_dim),
    };
    let mut cross = DMatrix::zeros(in_dim, out_dim);
    let input_mean = &s.points[0];
    for (a, img) in images.iter().enumerate() {
        let dy = img - &mean;
        let w = s.cov_weights[a];
        cov.syger(w, &dy, &dy, 1.0);
        let dx = &s.points[a] - input_mean;
        cross.ger(w, &dx, &dy, 1.0);
    }
    // syger fills one triangle; mirror it.
    for i in 0..out_dim {
        for j in (i + 1)..out_dim {
            cov[(i, j)] = cov[(j, i)];
        }
    }
    (mean, cov, cross)
}

/// Upper-triangular `A` with `A^T A = S S^T`, computed by QR-decomposing
/// `S^T`. The sign convention (nonnegative diagonal) makes `A` deterministic.
/// QR places no positivity requirement on `S`, which is the point: it stays
/// defined where a Cholesky of the assembled product would fail.
pub fn qr_cov_sqrt(s: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let qr = s.transpose().qr();
    let mut a = qr.r();
    debug_assert_eq!(a.nrows(), n);
    for i in 0..n {
        if a[(i, i)] < 0.0 {
            for j in 0..a.ncols() {
                a[(i, j)] = -a[(i, j)];
            }
        }
    }
    a
}
