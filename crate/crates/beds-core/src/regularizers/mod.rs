//! The fundamental loss over belief coordinates and its decomposition,
//! baseline regularizers (Ridge and the variance/covariance family),
//! gradient and natural-gradient optimizers, and graduated non-convexity
//! continuation with a dissipative coupling term.

mod gnc;
mod optim;

pub use gnc::{
    effective_temperature, gauss_hermite, gnc_objective, run_gnc, GncRun, GncSchedule, GncStage,
};
pub use optim::{
    gradient_step, natural_gradient_step, optimize, DataObjective, NaturalStep, OptimizationRun,
    OptimizeMethod, ZeroData, POSITIVE_FLOOR,
};

use thiserror::Error;

use crate::dynamics::{BedsState, DynamicsError};
use crate::geometry::GeometryError;

/// Finite stand-in for the singular coherence term at the κ = 0 boundary,
/// used by the optimizers to keep runs alive there.
pub const DEGENERATE_COHERENCE_PENALTY: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegularizerError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("coherence term is singular at kappa = 0")]
    DegenerateCoherence,
    #[error("parameter out of domain: {what}")]
    Domain { what: String },
    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("non-finite loss at step {step}")]
    NumericFailure { step: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Reference state θ* the loss regularizes toward.
#[derive(Debug, Clone, PartialEq)]
pub struct BedsTarget {
    pub state_star: BedsState,
}

impl BedsTarget {
    pub fn new(state_star: BedsState) -> Self {
        Self { state_star }
    }

    pub fn dim(&self) -> usize {
        self.state_star.dim()
    }
}

/// Coordinate decomposition of the loss. The four regularization terms sum
/// with `λ·data` to `total`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub spatial_mu: f64,
    pub spatial_tau: f64,
    pub temporal_phi: f64,
    pub temporal_kappa: f64,
    pub data: f64,
    pub lambda: f64,
    pub total: f64,
}

impl LossBreakdown {
    fn assemble(
        spatial_mu: f64,
        spatial_tau: f64,
        temporal_phi: f64,
        temporal_kappa: f64,
        lambda: f64,
        data: f64,
    ) -> Self {
        Self {
            spatial_mu,
            spatial_tau,
            temporal_phi,
            temporal_kappa,
            data,
            lambda,
            total: spatial_mu + spatial_tau + temporal_phi + temporal_kappa + lambda * data,
        }
    }

    /// Sum of the four regularization terms (no data term).
    pub fn regularization(&self) -> f64 {
        self.spatial_mu + self.spatial_tau + self.temporal_phi + self.temporal_kappa
    }
}

/// Gradient over the coordinates `(μ_i, τ_i, φ, κ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BedsGradient {
    pub mu: Vec<f64>,
    pub tau: Vec<f64>,
    pub phi: f64,
    pub kappa: f64,
}

impl BedsGradient {
    pub fn zeros(dim: usize) -> Self {
        Self {
            mu: vec![0.0; dim],
            tau: vec![0.0; dim],
            phi: 0.0,
            kappa: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

fn check_dims(s: &BedsState, target: &BedsTarget) -> Result<(), RegularizerError> {
    if s.dim() != target.dim() {
        return Err(RegularizerError::DimensionMismatch {
            left: s.dim(),
            right: target.dim(),
        });
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<(), RegularizerError> {
    if !(lambda > 0.0) {
        return Err(RegularizerError::Domain {
            what: format!("lambda must be > 0, got {lambda}"),
        });
    }
    Ok(())
}

/// Loss decomposition at state `s` against `target`:
///
/// ```text
/// Σᵢ τᵢ(μᵢ-μ*ᵢ)²  +  Σᵢ (τᵢ-τ*ᵢ)²/(2τᵢτ*ᵢ)  +  κ(1-cos(φ-φ*))  +  (κ-κ*)²/(2κκ*)  +  λ·data
/// ```
///
/// The phase term is weighted by the current κ. Fails with
/// [`RegularizerError::DegenerateCoherence`] when κ or κ* is zero; the
/// optimizers substitute [`DEGENERATE_COHERENCE_PENALTY`] instead.
pub fn beds_loss(
    s: &BedsState,
    target: &BedsTarget,
    lambda: f64,
    data_loss: f64,
) -> Result<LossBreakdown, RegularizerError> {
    check_dims(s, target)?;
    check_lambda(lambda)?;
    if s.temporal().kappa() == 0.0 || target.state_star.temporal().kappa() == 0.0 {
        return Err(RegularizerError::DegenerateCoherence);
    }
    Ok(beds_loss_penalized(s, target, lambda, data_loss))
}

/// As [`beds_loss`] but substitutes a large finite penalty for the
/// singular coherence term at κ = 0, keeping optimization runs alive on
/// the uniform-distribution boundary. Dimensions must already match.
pub fn beds_loss_penalized(
    s: &BedsState,
    target: &BedsTarget,
    lambda: f64,
    data_loss: f64,
) -> LossBreakdown {
    let star = &target.state_star;
    let mut spatial_mu = 0.0;
    let mut spatial_tau = 0.0;
    for (b, bs) in s.spatial().iter().zip(star.spatial()) {
        let dmu = b.mu() - bs.mu();
        spatial_mu += b.tau() * dmu * dmu;
        let dtau = b.tau() - bs.tau();
        spatial_tau += dtau * dtau / (2.0 * b.tau() * bs.tau());
    }
    let kappa = s.temporal().kappa();
    let kappa_star = star.temporal().kappa();
    let dphi = s.temporal().phi() - star.temporal().phi();
    let temporal_phi = kappa * (1.0 - dphi.cos());
    let temporal_kappa = if kappa == 0.0 || kappa_star == 0.0 {
        if kappa == kappa_star {
            0.0
        } else {
            DEGENERATE_COHERENCE_PENALTY
        }
    } else {
        let dk = kappa - kappa_star;
        dk * dk / (2.0 * kappa * kappa_star)
    };
    LossBreakdown::assemble(spatial_mu, spatial_tau, temporal_phi, temporal_kappa, lambda, data_loss)
}

/// Analytic gradient of [`beds_loss`] plus `λ·data_grad`.
pub fn beds_loss_gradient(
    s: &BedsState,
    target: &BedsTarget,
    lambda: f64,
    data_grad: &BedsGradient,
) -> Result<BedsGradient, RegularizerError> {
    check_dims(s, target)?;
    check_lambda(lambda)?;
    if data_grad.dim() != s.dim() {
        return Err(RegularizerError::DimensionMismatch {
            left: data_grad.dim(),
            right: s.dim(),
        });
    }
    let kappa = s.temporal().kappa();
    let kappa_star = target.state_star.temporal().kappa();
    if kappa == 0.0 || kappa_star == 0.0 {
        return Err(RegularizerError::DegenerateCoherence);
    }
    let star = &target.state_star;
    let mut grad = BedsGradient::zeros(s.dim());
    for (i, (b, bs)) in s.spatial().iter().zip(star.spatial()).enumerate() {
        let dmu = b.mu() - bs.mu();
        grad.mu[i] = 2.0 * b.tau() * dmu + lambda * data_grad.mu[i];
        // d/dτ [τ(μ-μ*)²] + d/dτ [(τ-τ*)²/(2ττ*)]
        grad.tau[i] = dmu * dmu
            + (b.tau() * b.tau() - bs.tau() * bs.tau()) / (2.0 * b.tau() * b.tau() * bs.tau())
            + lambda * data_grad.tau[i];
    }
    let dphi = s.temporal().phi() - star.temporal().phi();
    grad.phi = kappa * dphi.sin() + lambda * data_grad.phi;
    grad.kappa = (1.0 - dphi.cos())
        + (kappa * kappa - kappa_star * kappa_star) / (2.0 * kappa * kappa * kappa_star)
        + lambda * data_grad.kappa;
    Ok(grad)
}

/// Euclidean baseline `‖θ-θ*‖² + λ·data`.
pub fn ridge_loss(
    theta: &[f64],
    theta_star: &[f64],
    lambda: f64,
    data_loss: f64,
) -> Result<f64, RegularizerError> {
    if theta.len() != theta_star.len() {
        return Err(RegularizerError::DimensionMismatch {
            left: theta.len(),
            right: theta_star.len(),
        });
    }
    check_lambda(lambda)?;
    let sq: f64 = theta
        .iter()
        .zip(theta_star)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sq + lambda * data_loss)
}

/// Variance regularizer `-Σ ln σᵢ + α·Σ(σᵢ-1)²`: the log term blocks
/// collapse (σ → 0), the quadratic term blocks explosion. Global minimum 0
/// at σ ≡ 1.
pub fn sigreg_loss(sigmas: &[f64], alpha_reg: f64) -> Result<f64, RegularizerError> {
    if !(alpha_reg > 0.0) {
        return Err(RegularizerError::Domain {
            what: format!("alpha_reg must be > 0, got {alpha_reg}"),
        });
    }
    let mut loss = 0.0;
    for &s in sigmas {
        if !(s > 0.0) {
            return Err(RegularizerError::Domain {
                what: format!("sigmas must be > 0, got {s}"),
            });
        }
        loss += -s.ln() + alpha_reg * (s - 1.0) * (s - 1.0);
    }
    Ok(loss)
}

/// Practical proxy on raw embeddings: squared Frobenius deviation of the
/// empirical covariance from the identity plus the squared mean norm.
/// Rows are samples; needs at least two.
pub fn sigreg_proxy(embeddings: &[Vec<f64>]) -> Result<f64, RegularizerError> {
    let n = embeddings.len();
    if n < 2 {
        return Err(RegularizerError::InsufficientData { needed: 2, got: n });
    }
    let k = embeddings[0].len();
    if embeddings.iter().any(|row| row.len() != k) {
        return Err(RegularizerError::DimensionMismatch {
            left: k,
            right: embeddings.iter().map(Vec::len).find(|&l| l != k).unwrap_or(k),
        });
    }
    let mut mean = vec![0.0; k];
    for row in embeddings {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    // empirical covariance (1/n) Σ (z - z̄)(z - z̄)ᵀ
    let mut frob = 0.0;
    for a in 0..k {
        for b in 0..k {
            let mut c = 0.0;
            for row in embeddings {
                c += (row[a] - mean[a]) * (row[b] - mean[b]);
            }
            c /= n as f64;
            let target = if a == b { 1.0 } else { 0.0 };
            frob += (c - target) * (c - target);
        }
    }
    let mean_sq: f64 = mean.iter().map(|m| m * m).sum();
    Ok(frob + mean_sq)
}
