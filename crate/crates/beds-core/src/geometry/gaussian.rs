//! Fisher–Rao geometry of univariate Gaussian beliefs.
//!
//! In `(μ, τ)` coordinates (τ = 1/σ² the precision) the Fisher metric is
//!
//! ```text
//! ds² = τ dμ² + dτ²/(2τ²)
//! ```
//!
//! which is a scaled Poincaré half-plane: with `x = μ/√2`, `y = σ` it
//! equals twice the standard half-plane metric `(dx² + dy²)/y²`. Distances,
//! geodesics and the KL divergence below all come from that isometry.

use std::f64::consts::SQRT_2;

use super::{GeometryError, MetricTensor2};

/// Spatial belief: position `μ` with precision `τ = 1/σ² > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBelief {
    mu: f64,
    tau: f64,
}

impl GaussianBelief {
    /// Construct from mean and precision. Rejects `τ ≤ 0` and non-finite
    /// inputs.
    pub fn new(mu: f64, tau: f64) -> Result<Self, GeometryError> {
        if !mu.is_finite() || !tau.is_finite() {
            return Err(GeometryError::NonFiniteParameter { name: "mu/tau" });
        }
        if tau <= 0.0 {
            return Err(GeometryError::InvalidPrecision { tau });
        }
        Ok(Self { mu, tau })
    }

    /// Construct from mean and standard deviation `σ > 0`.
    pub fn from_mean_sigma(mu: f64, sigma: f64) -> Result<Self, GeometryError> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(GeometryError::InvalidPrecision { tau: sigma });
        }
        Self::new(mu, 1.0 / (sigma * sigma))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Standard deviation `σ = 1/√τ`.
    pub fn sigma(&self) -> f64 {
        1.0 / self.tau.sqrt()
    }
}

/// Diagonal Fisher metric at `b`: `(g_μμ, g_ττ) = (τ, 1/(2τ²))`.
pub fn gaussian_metric(b: &GaussianBelief) -> MetricTensor2 {
    MetricTensor2 {
        g11: b.tau,
        g22: 1.0 / (2.0 * b.tau * b.tau),
    }
}

/// Fisher–Rao distance between two Gaussian beliefs.
///
/// Closed form of the scaled half-plane,
/// `√2·arccosh(1 + ((Δμ)²/2 + (Δσ)²)/(2σₐσᵦ))`, evaluated through the
/// equivalent `asinh` identity which stays accurate for nearby beliefs.
/// Symmetric, zero iff the beliefs coincide; for equal means it reduces to
/// `|ln(τᵦ/τₐ)|/√2`.
pub fn gaussian_fr_distance(a: &GaussianBelief, b: &GaussianBelief) -> f64 {
    let (sa, sb) = (a.sigma(), b.sigma());
    let dmu = a.mu - b.mu;
    let ds = sa - sb;
    if dmu == 0.0 && ds == 0.0 {
        return 0.0;
    }
    // cosh(d/√2) = 1 + q/2 with q = (Δμ²/2 + Δσ²)/(σₐσᵦ),
    // so d = √2 · 2 asinh(√q / 2).
    let q = (0.5 * dmu * dmu + ds * ds) / (sa * sb);
    SQRT_2 * 2.0 * (0.5 * q.sqrt()).asinh()
}

/// Point at arc-length fraction `s ∈ [0, 1]` along the geodesic from `a`
/// to `b`.
///
/// Vertical geodesics (equal means) are log-linear in τ; otherwise the
/// geodesic is a half-plane semicircle traversed with the arc-length
/// substitution `u = ln tan(θ/2)`.
pub fn gaussian_geodesic(a: &GaussianBelief, b: &GaussianBelief, s: f64) -> GaussianBelief {
    debug_assert!((0.0..=1.0).contains(&s), "geodesic fraction outside [0,1]");
    if s == 0.0 {
        return *a;
    }
    if s == 1.0 {
        return *b;
    }
    // Half-plane chart: x = μ/√2, y = σ.
    let (xa, ya) = (a.mu / SQRT_2, a.sigma());
    let (xb, yb) = (b.mu / SQRT_2, b.sigma());
    let scale = xa.abs().max(xb.abs()).max(1.0);
    if (xa - xb).abs() < 1e-12 * scale {
        // Vertical line: geometric interpolation of τ.
        let tau = a.tau * (b.tau / a.tau).powf(s);
        return GaussianBelief { mu: a.mu, tau };
    }
    // Semicircle centered on the x-axis at c with radius r.
    let c = (xa * xa + ya * ya - xb * xb - yb * yb) / (2.0 * (xa - xb));
    let r = (xa - c).hypot(ya);
    let theta_a = ya.atan2(xa - c);
    let theta_b = yb.atan2(xb - c);
    // u = ln tan(θ/2) is an arc-length parameter along the semicircle.
    let ua = (theta_a / 2.0).tan().ln();
    let ub = (theta_b / 2.0).tan().ln();
    let u = ua + s * (ub - ua);
    let theta = 2.0 * u.exp().atan();
    let x = c + r * theta.cos();
    let y = r * theta.sin();
    GaussianBelief {
        mu: SQRT_2 * x,
        tau: 1.0 / (y * y),
    }
}

/// Kullback–Leibler divergence `D(a ‖ b)` of the two Gaussians.
///
/// Standard closed form `ln(σᵦ/σₐ) + (σₐ² + (μₐ-μᵦ)²)/(2σᵦ²) - 1/2`;
/// asymmetric in general.
pub fn gaussian_kl(a: &GaussianBelief, b: &GaussianBelief) -> f64 {
    let dmu = a.mu - b.mu;
    0.5 * ((a.tau / b.tau).ln() + b.tau / a.tau + b.tau * dmu * dmu - 1.0)
}
