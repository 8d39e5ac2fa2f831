//! The filter engine: unscented time/measurement updates, the augmented
//! regression error model, the mixture-entropy fixed-point measurement
//! update with its gain, the QR-form covariance update, and Sage-Husa noise
//! adaptation. The plain UKF, AUKF, and the MCC/MEE/MEEF baselines are
//! criterion and adaptation configurations of this same engine.

use crate::criteria::{
    weight_matrices, CriterionConfig, CriterionError, CriterionMode, KernelParams,
};
use crate::psmodel::{holt_predict, HoltState, ModelError};
use crate::unscented::{
    chol_factor, qr_cov_sqrt, sigma_points, ut_propagate, SigmaSet, UnscentedError, UtParams,
};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("step {step}: {source}")]
    Decomposition {
        step: usize,
        #[source]
        source: UnscentedError,
    },
    #[error("step {step}: fixed-point iteration exceeded {iterations} iterations (relative change {last_rel_change:.3e})")]
    Divergence {
        step: usize,
        iterations: usize,
        last_rel_change: f64,
    },
    #[error("step {step}: {source}")]
    Criterion {
        step: usize,
        #[source]
        source: CriterionError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid filter config: {0}")]
    InvalidConfig(String),
}

/// Anything the filter can measure: the power system binding lives in
/// `psmodel`, test fixtures supply small closures.
pub trait MeasurementModel: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, u: &DVector<f64>) -> DVector<f64>;
}

/// Measurement model from an explicit matrix, useful for toy systems.
pub struct LinearModel {
    pub h: DMatrix<f64>,
}

impl MeasurementModel for LinearModel {
    fn dim(&self) -> usize {
        self.h.nrows()
    }
    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.h * u
    }
}

/// Sage-Husa update coefficient: a fixed value or the forgetting-factor
/// recursion `theta_t = (1 - s) / (1 - s^(t+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum ThetaMode {
    Constant(f64),
    Forgetting(f64),
}

impl ThetaMode {
    pub fn theta_at(&self, t: usize) -> f64 {
        match *self {
            ThetaMode::Constant(theta) => theta,
            ThetaMode::Forgetting(s) => (1.0 - s) / (1.0 - s.powi(t as i32 + 1)),
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        let v = match *self {
            ThetaMode::Constant(v) | ThetaMode::Forgetting(v) => v,
        };
        if !(v > 0.0 && v < 1.0) {
            return Err(FilterError::InvalidConfig(format!(
                "theta/forgetting factor must lie in (0, 1), got {v}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterConfig {
    pub ut: UtParams,
    pub criterion: CriterionConfig,
    pub adapt_noise: bool,
    pub theta: ThetaMode,
    /// Fixed-point convergence threshold delta.
    pub fixed_point_tol: f64,
    pub fixed_point_max_iters: usize,
    /// Fall back to the plain-UKF update when the fixed point diverges.
    pub divergence_fallback: bool,
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        if self.fixed_point_tol <= 0.0 {
            return Err(FilterError::InvalidConfig(
                "fixed_point_tol must be positive".into(),
            ));
        }
        if self.fixed_point_max_iters == 0 {
            return Err(FilterError::InvalidConfig(
                "fixed_point_max_iters must be at least 1".into(),
            ));
        }
        self.theta.validate()?;
        self.criterion
            .validate()
            .map_err(|source| FilterError::Criterion { step: 0, source })?;
        Ok(())
    }

    fn gaussian_base() -> Self {
        FilterConfig {
            ut: UtParams::default(),
            criterion: CriterionConfig {
                mode: CriterionMode::Gaussian,
                ..CriterionConfig::paper_defaults()
            },
            adapt_noise: false,
            theta: ThetaMode::Forgetting(0.5),
            fixed_point_tol: 1e-6,
            fixed_point_max_iters: 100,
            divergence_fallback: true,
        }
    }

    /// Plain UKF: Gaussian update, no noise adaptation.
    pub fn ukf() -> Self {
        Self::gaussian_base()
    }

    /// Adaptive UKF: Gaussian update with Sage-Husa adaptation.
    pub fn aukf() -> Self {
        FilterConfig {
            adapt_noise: true,
            ..Self::gaussian_base()
        }
    }

    fn gaussian_kernel(sigma: f64) -> KernelParams {
        // G_sigma(x) = exp(-x^2 / (2 sigma^2)) maps to shape 2, bandwidth
        // 2 sigma^2 in the generalized form.
        KernelParams {
            shape: 2.0,
            bandwidth: 2.0 * sigma * sigma,
        }
    }

    /// Correntropy baseline: kappa = 1 with a single Gaussian kernel.
    pub fn mcc_ukf(sigma: f64) -> Self {
        let k = Self::gaussian_kernel(sigma);
        FilterConfig {
            criterion: CriterionConfig {
                kappa: 1.0,
                phi: 1.0,
                fiducial_kernel_1: k,
                fiducial_kernel_2: k,
                entropy_kernel: k,
                mode: CriterionMode::Mcc,
                ..CriterionConfig::paper_defaults()
            },
            ..Self::gaussian_base()
        }
    }

    /// Error-entropy baseline: kappa = 0 with a Gaussian entropy kernel.
    pub fn mee_ukf(sigma: f64) -> Self {
        let k = Self::gaussian_kernel(sigma);
        FilterConfig {
            criterion: CriterionConfig {
                kappa: 0.0,
                phi: 1.0,
                fiducial_kernel_1: k,
                fiducial_kernel_2: k,
                entropy_kernel: k,
                mode: CriterionMode::Mee,
                ..CriterionConfig::paper_defaults()
            },
            ..Self::gaussian_base()
        }
    }

    /// Entropy-with-fiducial-points baseline: Gaussian kernels, kappa = 0.5.
    pub fn meef_ukf(sigma: f64) -> Self {
        let k = Self::gaussian_kernel(sigma);
        FilterConfig {
            criterion: CriterionConfig {
                kappa: 0.5,
                phi: 1.0,
                fiducial_kernel_1: k,
                fiducial_kernel_2: k,
                entropy_kernel: k,
                mode: CriterionMode::Meef,
                ..CriterionConfig::paper_defaults()
            },
            ..Self::gaussian_base()
        }
    }

    /// The proposed filter with its reported coefficient set.
    pub fn gmmeef_aukf() -> Self {
        FilterConfig {
            criterion: CriterionConfig::paper_defaults(),
            adapt_noise: true,
            ..Self::gaussian_base()
        }
    }

    fn is_gaussian(&self) -> bool {
        self.criterion.mode == CriterionMode::Gaussian
    }
}

/// Posterior state of one filter instance.
#[derive(Debug, Clone)]
pub struct FilterState {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    /// Diagonal of the adaptive process noise estimate.
    pub qhat: DVector<f64>,
    /// Diagonal of the adaptive measurement noise estimate.
    pub rhat: DVector<f64>,
    pub holt: HoltState,
    pub step_index: usize,
}

impl FilterState {
    pub fn init(
        u0: &DVector<f64>,
        p0: f64,
        q0: f64,
        r0: f64,
        m: usize,
        level_coeff: f64,
        trend_coeff: f64,
    ) -> Result<Self, ModelError> {
        let n = u0.len();
        Ok(FilterState {
            mean: u0.clone(),
            cov: DMatrix::identity(n, n) * p0,
            qhat: DVector::from_element(n, q0),
            rhat: DVector::from_element(m, r0),
            holt: HoltState::new(u0, level_coeff, trend_coeff)?,
            step_index: 0,
        })
    }
}

/// What one `step` reports besides the new state.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepDiagnostics {
    /// Fixed-point iterations used (0 on the Gaussian path).
    pub iterations: usize,
    /// True when the step fell back to the plain-UKF update.
    pub fallback: bool,
    /// Cholesky jitter retries used during the step.
    pub jitter_events: usize,
}

/// Prior produced by the time update.
#[derive(Debug, Clone)]
pub struct Prior {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub sigma: SigmaSet,
    pub holt_next: HoltState,
}

/// Measurement-side UT statistics.
#[derive(Debug, Clone)]
pub struct MeasurementStats {
    pub vhat: DVector<f64>,
    pub p_uv: DMatrix<f64>,
    pub p_vv: DMatrix<f64>,
}

/// The augmented regression error model built around the prior.
#[derive(Debug, Clone)]
pub struct AremSystem {
    /// Lower-triangular Cholesky factor of the prior covariance.
    pub b_p: DMatrix<f64>,
    /// Diagonal of the measurement noise square root.
    pub b_r: DVector<f64>,
    /// Measurement slope matrix (m x n).
    pub slope: DMatrix<f64>,
    /// Whitened regression targets, length n + m.
    pub targets: DVector<f64>,
    /// Whitened regression matrix, (n + m) x n.
    pub regressors: DMatrix<f64>,
    pub prior_mean: DVector<f64>,
    pub prior_measurement: DVector<f64>,
}

fn jitter_chol(
    m: &DMatrix<f64>,
    step: usize,
) -> Result<(DMatrix<f64>, usize), FilterError> {
    match chol_factor(m) {
        Ok(l) => Ok((l, 0)),
        Err(UnscentedError::NotPositiveDefinite { .. }) => {
            let n = m.nrows();
            let jitter = 1e-10 * m.trace().abs().max(1e-30) / n as f64;
            let mut repaired = m.clone();
            for i in 0..n {
                repaired[(i, i)] += jitter;
            }
            match chol_factor(&repaired) {
                Ok(l) => Ok((l, 1)),
                Err(source) => Err(FilterError::Decomposition { step, source }),
            }
        }
        Err(source) => Err(FilterError::Decomposition { step, source }),
    }
}

/// Sigma points from the posterior, propagated through the Holt transition,
/// plus the current process noise estimate.
pub fn time_update(state: &FilterState, cfg: &FilterConfig) -> Result<(Prior, usize), FilterError> {
    let step = state.step_index + 1;
    let (cov_for_sigma, jitter) = repair_for_chol(&state.cov, step)?;
    let sigma = sigma_points(&state.mean, &cov_for_sigma, &cfg.ut)
        .map_err(|source| FilterError::Decomposition { step, source })?;
    let (slope, offset) = state.holt.affine_map();
    let q = DMatrix::from_diagonal(&state.qhat);
    let (mean, cov, _) = ut_propagate(&sigma, |x| x * slope + &offset, Some(&q));
    let (_, holt_next) = holt_predict(&state.mean, &state.holt)?;
    Ok((
        Prior {
            mean,
            cov,
            sigma,
            holt_next,
        },
        jitter,
    ))
}

/// Second unscented pass: prior measurement mean, cross-covariance, and the
/// measurement self-covariance including the current noise estimate.
pub fn measurement_stats(
    prior: &Prior,
    model: &dyn MeasurementModel,
    cfg: &FilterConfig,
    rhat: &DVector<f64>,
    step: usize,
) -> Result<(MeasurementStats, usize), FilterError> {
    let (cov_for_sigma, jitter) = repair_for_chol(&prior.cov, step)?;
    let sigma = sigma_points(&prior.mean, &cov_for_sigma, &cfg.ut)
        .map_err(|source| FilterError::Decomposition { step, source })?;
    let r = DMatrix::from_diagonal(rhat);
    let (vhat, p_vv, p_uv) = ut_propagate(&sigma, |x| model.eval(x), Some(&r));
    Ok((MeasurementStats { vhat, p_uv, p_vv }, jitter))
}

fn repair_for_chol(m: &DMatrix<f64>, step: usize) -> Result<(DMatrix<f64>, usize), FilterError> {
    match chol_factor(m) {
        Ok(_) => Ok((m.clone(), 0)),
        Err(_) => {
            let n = m.nrows();
            let jitter = 1e-10 * m.trace().abs().max(1e-30) / n as f64;
            let mut repaired = m.clone();
            for i in 0..n {
                repaired[(i, i)] += jitter;
            }
            match chol_factor(&repaired) {
                Ok(_) => Ok((repaired, 1)),
                Err(source) => Err(FilterError::Decomposition { step, source }),
            }
        }
    }
}

/// Assemble the whitened regression: slope, block square roots, targets, and
/// regressors. All inverse applications are triangular solves.
pub fn build_arem(
    prior: &Prior,
    stats: &MeasurementStats,
    v_t: &DVector<f64>,
    rhat: &DVector<f64>,
    step: usize,
) -> Result<(AremSystem, usize), FilterError> {
    let n = prior.mean.len();
    let m = v_t.len();
    let (b_p, jitter) = jitter_chol(&prior.cov, step)?;
    let b_r = rhat.map(|r| r.max(1e-12).sqrt());

    // U = (P^{-1} P_uv)^T via two triangular solves.
    let y = b_p
        .solve_lower_triangular(&stats.p_uv)
        .expect("nonsingular Cholesky factor");
    let x = b_p
        .transpose()
        .solve_upper_triangular(&y)
        .expect("nonsingular Cholesky factor");
    let slope = x.transpose();

    // Whitened targets L = B^{-1} [u_prior; v - vhat + U u_prior].
    let top = b_p
        .solve_lower_triangular(&prior.mean)
        .expect("nonsingular Cholesky factor");
    let raw_bottom = v_t - &stats.vhat + &slope * &prior.mean;
    let mut targets = DVector::zeros(n + m);
    targets.rows_mut(0, n).copy_from(&top);
    for i in 0..m {
        targets[n + i] = raw_bottom[i] / b_r[i];
    }

    // Whitened regressors D = B^{-1} [I; U].
    let eye = DMatrix::identity(n, n);
    let d_top = b_p
        .solve_lower_triangular(&eye)
        .expect("nonsingular Cholesky factor");
    let mut regressors = DMatrix::zeros(n + m, n);
    regressors.rows_mut(0, n).copy_from(&d_top);
    for i in 0..m {
        for j in 0..n {
            regressors[(n + i, j)] = slope[(i, j)] / b_r[i];
        }
    }

    Ok((
        AremSystem {
            b_p,
            b_r,
            slope,
            targets,
            regressors,
            prior_mean: prior.mean.clone(),
            prior_measurement: stats.vhat.clone(),
        },
        jitter,
    ))
}

/// Result of the fixed-point measurement update.
#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub mean: DVector<f64>,
    pub gain: DMatrix<f64>,
    pub iterations: usize,
}

/// Iterate the weighted regression update until the relative change falls
/// below `cfg.fixed_point_tol`.
pub fn fixed_point_update(
    arem: &AremSystem,
    v_t: &DVector<f64>,
    cfg: &FilterConfig,
    step: usize,
) -> Result<FixedPointResult, FilterError> {
    let n = arem.prior_mean.len();
    let m = v_t.len();
    let innovation = v_t - &arem.prior_measurement;
    let mut mean = arem.prior_mean.clone();
    let mut last_rel = f64::INFINITY;

    for k in 1..=cfg.fixed_point_max_iters {
        let errors = &arem.targets - &arem.regressors * &mean;
        let weights = weight_matrices(&errors, &cfg.criterion)
            .map_err(|source| FilterError::Criterion { step, source })?;
        let gain = gain_from_weights(&weights.omega, arem, n, m, step)?;
        let candidate = &arem.prior_mean + &gain * &innovation;
        let denom = mean.norm();
        let rel = if denom > 0.0 {
            (&candidate - &mean).norm() / denom
        } else {
            (&candidate - &mean).norm()
        };
        mean = candidate;
        last_rel = rel;
        if rel <= cfg.fixed_point_tol {
            return Ok(FixedPointResult {
                mean,
                gain,
                iterations: k,
            });
        }
    }
    Err(FilterError::Divergence {
        step,
        iterations: cfg.fixed_point_max_iters,
        last_rel_change: last_rel,
    })
}

/// Gain `K = (P_uu + U^T P_uv + P_vu U + U^T R_vv U)^{-1} (P_vu + U^T R_vv)`
/// with the tilde blocks formed by triangular solves against the AREM square
/// roots.
fn gain_from_weights(
    omega: &DMatrix<f64>,
    arem: &AremSystem,
    n: usize,
    m: usize,
    step: usize,
) -> Result<DMatrix<f64>, FilterError> {
    let b_p_t = arem.b_p.transpose();

    let omega_uu = omega.view((0, 0), (n, n)).clone_owned();
    let omega_uv = omega.view((n, 0), (m, n)).clone_owned();
    let omega_vv = omega.view((n, n), (m, m)).clone_owned();

    // P_uu~ = B_P^{-T} Omega_uu B_P^{-1}
    let t1 = b_p_t
        .solve_upper_triangular(&omega_uu)
        .expect("nonsingular Cholesky factor");
    let p_uu = b_p_t
        .solve_upper_triangular(&t1.transpose())
        .expect("nonsingular Cholesky factor")
        .transpose();

    // P_uv~ = B_R^{-T} Omega_uv B_P^{-1}  (m x n); P_vu~ is its transpose.
    let mut scaled = omega_uv;
    for i in 0..m {
        let inv = 1.0 / arem.b_r[i];
        for j in 0..n {
            scaled[(i, j)] *= inv;
        }
    }
    let p_uv = b_p_t
        .solve_upper_triangular(&scaled.transpose())
        .expect("nonsingular Cholesky factor")
        .transpose();
    let p_vu = p_uv.transpose();

    // R_vv~ = B_R^{-T} Omega_vv B_R^{-1} (diagonal scaling on both sides).
    let mut r_vv = omega_vv;
    for i in 0..m {
        let ri = 1.0 / arem.b_r[i];
        for j in 0..m {
            r_vv[(i, j)] *= ri / arem.b_r[j];
        }
    }

    let ut_puv = arem.slope.transpose() * &p_uv;
    let ut_rvv = arem.slope.transpose() * &r_vv;
    let h = &p_uu + &ut_puv + ut_puv.transpose() + &ut_rvv * &arem.slope;
    let g = p_vu + ut_rvv;

    solve_spd(&h, &g, step)
}

/// Solve `h x = g` for symmetric positive semidefinite `h`, with jitter and
/// an LU fallback for the nearly singular weight collapses the optimizer can
/// probe.
fn solve_spd(h: &DMatrix<f64>, g: &DMatrix<f64>, step: usize) -> Result<DMatrix<f64>, FilterError> {
    let (l, _) = jitter_chol(h, step)?;
    let y = l
        .solve_lower_triangular(g)
        .expect("nonsingular Cholesky factor");
    Ok(l.transpose()
        .solve_upper_triangular(&y)
        .expect("nonsingular Cholesky factor"))
}

/// Standard Kalman gain `K = P_uv P_vv^{-1}`; this path is the UKF/AUKF
/// baseline.
pub fn gaussian_gain(
    stats: &MeasurementStats,
    step: usize,
) -> Result<DMatrix<f64>, FilterError> {
    let (l, _) = jitter_chol(&stats.p_vv, step)?;
    let y = l
        .solve_lower_triangular(&stats.p_uv.transpose())
        .expect("nonsingular Cholesky factor");
    let kt = l
        .transpose()
        .solve_upper_triangular(&y)
        .expect("nonsingular Cholesky factor");
    Ok(kt.transpose())
}

/// Joseph-form posterior covariance through the QR square root:
/// `P = A^T A` with `A` from QR of `[(I - K U) B_P, K B_R]^T`.
pub fn covariance_update(
    arem: &AremSystem,
    gain: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = arem.prior_mean.len();
    let m = arem.b_r.len();
    let left = DMatrix::identity(n, n) - gain * &arem.slope;
    let left_block = &left * &arem.b_p;
    let mut s = DMatrix::zeros(n, n + m);
    s.view_mut((0, 0), (n, n)).copy_from(&left_block);
    for j in 0..m {
        for i in 0..n {
            s[(i, n + j)] = gain[(i, j)] * arem.b_r[j];
        }
    }
    let a = qr_cov_sqrt(&s);
    a.transpose() * a
}

/// Raw Sage-Husa recursions before the diagonal revision. Exposed for tests
/// and diagnostics.
pub fn adapt_noise_raw(
    qhat: &DVector<f64>,
    rhat: &DVector<f64>,
    theta: f64,
    innovation: &DVector<f64>,
    gain: &DMatrix<f64>,
    p_post: &DMatrix<f64>,
    p_prior: &DMatrix<f64>,
    p_vv: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = qhat.len();
    let m = rhat.len();
    let q_prev = DMatrix::from_diagonal(qhat);
    let r_prev = DMatrix::from_diagonal(rhat);
    let kv = gain * innovation;
    let mut q_full = &q_prev * (1.0 - theta);
    {
        let mut inner = DMatrix::zeros(n, n);
        inner.ger(1.0, &kv, &kv, 0.0);
        inner += p_post;
        inner -= p_prior;
        inner += &q_prev;
        q_full += inner * theta;
    }
    let mut r_full = &r_prev * (1.0 - theta);
    {
        let mut inner = DMatrix::zeros(m, m);
        inner.ger(1.0, innovation, innovation, 0.0);
        inner -= p_vv;
        inner += &r_prev;
        r_full += inner * theta;
    }
    (q_full, r_full)
}

/// Diagonal revision: entry i becomes the 2-norm of row i, i.e.
/// `sqrt(diag(M M^T))`, guaranteeing nonnegative diagonal estimates.
pub fn row_norm_diagonal(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(m.nrows(), |i, _| m.row(i).norm())
}

/// Sage-Husa noise adaptation with the diagonal revision applied.
#[allow(clippy::too_many_arguments)]
pub fn adapt_noise(
    qhat: &DVector<f64>,
    rhat: &DVector<f64>,
    theta: f64,
    innovation: &DVector<f64>,
    gain: &DMatrix<f64>,
    p_post: &DMatrix<f64>,
    p_prior: &DMatrix<f64>,
    p_vv: &DMatrix<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let (q_full, r_full) = adapt_noise_raw(
        qhat, rhat, theta, innovation, gain, p_post, p_prior, p_vv,
    );
    (row_norm_diagonal(&q_full), row_norm_diagonal(&r_full))
}

/// One full filter step in the pseudocode order: time update, measurement
/// statistics, regression assembly, measurement update (fixed point or
/// Gaussian), QR covariance update, optional noise adaptation.
pub fn step(
    state: &FilterState,
    v_t: &DVector<f64>,
    model: &dyn MeasurementModel,
    cfg: &FilterConfig,
) -> Result<(FilterState, StepDiagnostics), FilterError> {
    let t = state.step_index + 1;
    let mut diag = StepDiagnostics::default();

    let (prior, j1) = time_update(state, cfg)?;
    diag.jitter_events += j1;

    let (stats, j2) = measurement_stats(&prior, model, cfg, &state.rhat, t)?;
    diag.jitter_events += j2;

    let (arem, j3) = build_arem(&prior, &stats, v_t, &state.rhat, t)?;
    diag.jitter_events += j3;

    let innovation = v_t - &stats.vhat;
    let (mean, gain) = if cfg.is_gaussian() {
        let k = gaussian_gain(&stats, t)?;
        (&prior.mean + &k * &innovation, k)
    } else {
        match fixed_point_update(&arem, v_t, cfg, t) {
            Ok(res) => {
                diag.iterations = res.iterations;
                (res.mean, res.gain)
            }
            Err(FilterError::Divergence { .. }) if cfg.divergence_fallback => {
                diag.fallback = true;
                let k = gaussian_gain(&stats, t)?;
                (&prior.mean + &k * &innovation, k)
            }
            Err(e) => return Err(e),
        }
    };

    let cov = covariance_update(&arem, &gain);

    let (qhat, rhat) = if cfg.adapt_noise {
        let theta = cfg.theta.theta_at(t);
        adapt_noise(
            &state.qhat,
            &state.rhat,
            theta,
            &innovation,
            &gain,
            &cov,
            &prior.cov,
            &stats.p_vv,
        )
    } else {
        (state.qhat.clone(), state.rhat.clone())
    };

    Ok((
        FilterState {
            mean,
            cov,
            qhat,
            rhat,
            holt: prior.holt_next,
            step_index: t,
        },
        diag,
    ))
}
