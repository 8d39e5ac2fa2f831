//! Information-theoretic learning criteria: the generalized Gaussian kernel,
//! the GMMEEF cost, and the weight matrices driving the fixed-point
//! measurement update. MCC, MEE, and MEEF fall out as configurations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CriterionError {
    #[error("invalid kernel: shape and bandwidth must be positive (got {shape}, {bandwidth})")]
    InvalidKernel { shape: f64, bandwidth: f64 },
    #[error("invalid criterion: {0}")]
    InvalidConfig(String),
    #[error("singular weight: |e|^(alpha-2) diverges at zero gap with alpha = {shape} and no epsilon floor")]
    SingularWeight { shape: f64 },
}

/// Generalized Gaussian kernel parameters: shape `alpha` and bandwidth `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub shape: f64,
    pub bandwidth: f64,
}

impl KernelParams {
    pub fn new(shape: f64, bandwidth: f64) -> Result<Self, CriterionError> {
        let k = KernelParams { shape, bandwidth };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), CriterionError> {
        if !(self.shape > 0.0 && self.bandwidth > 0.0)
            || !self.normalizer().is_finite()
        {
            return Err(CriterionError::InvalidKernel {
                shape: self.shape,
                bandwidth: self.bandwidth,
            });
        }
        Ok(())
    }

    /// Normalization constant alpha / (2 beta Gamma(1/alpha)).
    pub fn normalizer(&self) -> f64 {
        self.shape / (2.0 * self.bandwidth * gamma(1.0 / self.shape))
    }
}

/// `G_{alpha,beta}(e) = alpha / (2 beta Gamma(1/alpha)) * exp(-|e|^alpha / beta)`.
pub fn gg_kernel(e: f64, k: &KernelParams) -> f64 {
    k.normalizer() * (-(e.abs().powf(k.shape)) / k.bandwidth).exp()
}

/// Which printed prefactor the diagonal fiducial weights use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LambdaPrefactor {
    /// `alpha / beta^alpha`, as printed in the weight derivation.
    #[default]
    AsPrinted,
    /// `alpha / beta`, the gradient the kernel definition itself implies.
    KernelGradient,
}

/// Reporting tag; the weight construction is shared across all modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMode {
    Gmmeef,
    Meef,
    Mee,
    Mcc,
    Gaussian,
}

/// Every free coefficient of the mixture-entropy criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionConfig {
    /// Scaling between the fiducial (correntropy) term and the entropy term.
    pub kappa: f64,
    /// Mixture coefficient between the two fiducial kernels.
    pub phi: f64,
    pub fiducial_kernel_1: KernelParams,
    pub fiducial_kernel_2: KernelParams,
    pub entropy_kernel: KernelParams,
    pub mode: CriterionMode,
    pub lambda_prefactor: LambdaPrefactor,
    /// Gap floor for entropy shapes below 2; `None` disables the floor.
    pub epsilon_floor: Option<f64>,
}

impl CriterionConfig {
    pub fn validate(&self) -> Result<(), CriterionError> {
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(CriterionError::InvalidConfig(format!(
                "kappa must lie in [0, 1], got {}",
                self.kappa
            )));
        }
        if !(0.0..=1.0).contains(&self.phi) {
            return Err(CriterionError::InvalidConfig(format!(
                "phi must lie in [0, 1], got {}",
                self.phi
            )));
        }
        self.fiducial_kernel_1.validate()?;
        self.fiducial_kernel_2.validate()?;
        self.entropy_kernel.validate()?;
        Ok(())
    }

    /// The coefficient set reported for the proposed criterion.
    pub fn paper_defaults() -> Self {
        CriterionConfig {
            kappa: 0.5,
            phi: 0.5,
            fiducial_kernel_1: KernelParams {
                shape: 2.1,
                bandwidth: 6.3,
            },
            fiducial_kernel_2: KernelParams {
                shape: 2.1,
                bandwidth: 6.3,
            },
            entropy_kernel: KernelParams {
                shape: 2.9,
                bandwidth: 3.2,
            },
            mode: CriterionMode::Gmmeef,
            lambda_prefactor: LambdaPrefactor::AsPrinted,
            epsilon_floor: Some(1e-8),
        }
    }
}

/// Cost `kappa sum_i [phi G1(e_i) + (1-phi) G2(e_i)]
///      + (1-kappa) sum_i sum_j G3(e_j - e_i)`.
pub fn gmmeef_cost(errors: &DVector<f64>, c: &CriterionConfig) -> f64 {
    let mut fiducial = 0.0;
    for &e in errors.iter() {
        fiducial += c.phi * gg_kernel(e, &c.fiducial_kernel_1)
            + (1.0 - c.phi) * gg_kernel(e, &c.fiducial_kernel_2);
    }
    let mut entropy = 0.0;
    for &ei in errors.iter() {
        for &ej in errors.iter() {
            entropy += gg_kernel(ej - ei, &c.entropy_kernel);
        }
    }
    c.kappa * fiducial + (1.0 - c.kappa) * entropy
}

/// The diagonal, entropy, and combined weight matrices of the fixed-point
/// update over an error vector of length n + m.
#[derive(Debug, Clone)]
pub struct WeightMatrices {
    /// Diagonal fiducial weights.
    pub lambda: DVector<f64>,
    /// Diagonal entropy weights (row sums of `xi`).
    pub phi: DVector<f64>,
    /// Symmetric entropy kernel matrix.
    pub xi: DMatrix<f64>,
    /// `kappa * diag(lambda) + (1 - kappa) * (diag(phi) - xi)`.
    pub omega: DMatrix<f64>,
}

/// `|gap|^(shape - 2)` with the zero-gap conventions: exactly 0 for
/// shape > 2, exactly 1 for shape = 2, and epsilon-floored below 2.
fn gap_power(gap: f64, shape: f64, floor: Option<f64>) -> Result<f64, CriterionError> {
    let expo = shape - 2.0;
    if expo == 0.0 {
        return Ok(1.0);
    }
    let mut g = gap.abs();
    if expo < 0.0 {
        match floor {
            Some(eps) => g = g.max(eps),
            None => {
                if g == 0.0 {
                    return Err(CriterionError::SingularWeight { shape });
                }
            }
        }
    }
    Ok(g.powf(expo))
}

/// Build the weight matrices for one fixed-point iteration.
pub fn weight_matrices(
    errors: &DVector<f64>,
    c: &CriterionConfig,
) -> Result<WeightMatrices, CriterionError> {
    let n = errors.len();
    let mixtures = [
        (c.phi, &c.fiducial_kernel_1),
        (1.0 - c.phi, &c.fiducial_kernel_2),
    ];

    let mut lambda = DVector::zeros(n);
    for i in 0..n {
        let e = errors[i];
        let mut w = 0.0;
        for (mix, k) in &mixtures {
            let prefactor = match c.lambda_prefactor {
                LambdaPrefactor::AsPrinted => k.shape / k.bandwidth.powf(k.shape),
                LambdaPrefactor::KernelGradient => k.shape / k.bandwidth,
            };
            w += mix * prefactor * gg_kernel(e, k) * gap_power(e, k.shape, c.epsilon_floor)?;
        }
        lambda[i] = w.max(0.0);
    }

    let k3 = &c.entropy_kernel;
    let norm3 = k3.normalizer();
    let mut xi = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let gap = errors[j] - errors[i];
            let pw = gap_power(gap, k3.shape, c.epsilon_floor)?;
            // |gap|^alpha = |gap|^(alpha-2) * gap^2 spares a second powf,
            // except at shape 2 where the floored power is not |gap|^0.
            let gap_alpha = if k3.shape == 2.0 {
                gap * gap
            } else {
                pw * gap * gap
            };
            let w = (norm3 * (-gap_alpha / k3.bandwidth).exp() * pw).max(0.0);
            xi[(i, j)] = w;
            xi[(j, i)] = w;
        }
    }
    let phi = DVector::from_fn(n, |i, _| xi.row(i).iter().sum());

    let kappa = c.kappa;
    let mut omega = &xi * -(1.0 - kappa);
    for i in 0..n {
        omega[(i, i)] += kappa * lambda[i] + (1.0 - kappa) * phi[i];
    }
    Ok(WeightMatrices {
        lambda,
        phi,
        xi,
        omega,
    })
}

/// Row sums of `diag(phi) - xi`; zero by construction, kept as a structural
/// diagnostic for tests.
pub fn diag_weight_row_sums(w: &WeightMatrices) -> DVector<f64> {
    let n = w.phi.len();
    DVector::from_fn(n, |i, _| {
        let row_sum: f64 = w.xi.row(i).iter().sum();
        w.phi[i] - row_sum
    })
}
