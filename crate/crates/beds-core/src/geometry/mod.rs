//! Fisher–Rao metrics, distances, geodesics and divergences for the
//! Gaussian and von Mises families, plus the product-manifold distance.
//!
//! All operations here are pure functions of their inputs and safe to call
//! concurrently.

mod bessel;
mod gaussian;
mod vonmises;

pub use bessel::{bessel_ratio, bessel_ratio_derivative, bessel_ratio_over_kappa};
pub use gaussian::{
    gaussian_fr_distance, gaussian_geodesic, gaussian_kl, gaussian_metric, GaussianBelief,
};
pub use vonmises::{
    normalize_phase, vonmises_fr_distance, vonmises_fr_distance_with, vonmises_metric,
    wrap_angle, PathRelaxOptions, VonMisesBelief,
};

use thiserror::Error;

/// Errors from geometric constructions and numeric geodesic computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("precision must be strictly positive, got tau = {tau}")]
    InvalidPrecision { tau: f64 },
    #[error("coherence must be nonnegative, got kappa = {kappa}")]
    InvalidCoherence { kappa: f64 },
    #[error("non-finite parameter: {name}")]
    NonFiniteParameter { name: &'static str },
    #[error("path relaxation did not converge, residual = {residual:.3e}")]
    RelaxationNoConvergence { residual: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Diagonal 2×2 metric tensor; off-diagonal terms vanish for both families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor2 {
    pub g11: f64,
    pub g22: f64,
}

/// Distance on the product of `d` Gaussian factors:
/// `sqrt(Σᵢ d_F(aᵢ, bᵢ)²)`.
pub fn gaussian_product_distance(
    a: &[GaussianBelief],
    b: &[GaussianBelief],
) -> Result<f64, GeometryError> {
    if a.len() != b.len() {
        return Err(GeometryError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| gaussian_fr_distance(x, y).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Product-manifold distance `sqrt(d_spatial² + d_temporal²)` between two
/// factored states. Reduces to either factor when the other coordinates
/// coincide.
pub fn product_distance(
    spatial_a: &[GaussianBelief],
    temporal_a: &VonMisesBelief,
    spatial_b: &[GaussianBelief],
    temporal_b: &VonMisesBelief,
) -> Result<f64, GeometryError> {
    let ds = gaussian_product_distance(spatial_a, spatial_b)?;
    let dt = vonmises_fr_distance(temporal_a, temporal_b)?;
    Ok((ds * ds + dt * dt).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_distance_reduces_to_factors() {
        let sa = [GaussianBelief::new(0.0, 1.0).unwrap()];
        let sb = [GaussianBelief::new(1.0, 2.0).unwrap()];
        let t = VonMisesBelief::new(0.5, 1.5).unwrap();
        let d = product_distance(&sa, &t, &sb, &t).unwrap();
        assert_eq!(d, gaussian_fr_distance(&sa[0], &sb[0]));

        let ta = VonMisesBelief::new(0.2, 1.0).unwrap();
        let tb = VonMisesBelief::new(0.2, 2.5).unwrap();
        let d = product_distance(&sa, &ta, &sa, &tb).unwrap();
        let dt = vonmises_fr_distance(&ta, &tb).unwrap();
        assert!((d - dt).abs() < 1e-15);
    }

    #[test]
    fn product_distance_is_factor_wise_pythagorean() {
        let sa = [
            GaussianBelief::new(0.0, 1.0).unwrap(),
            GaussianBelief::new(2.0, 0.5).unwrap(),
        ];
        let sb = [
            GaussianBelief::new(0.3, 1.3).unwrap(),
            GaussianBelief::new(1.0, 4.0).unwrap(),
        ];
        let ta = VonMisesBelief::new(0.1, 1.0).unwrap();
        let tb = VonMisesBelief::new(1.1, 2.0).unwrap();
        let d = product_distance(&sa, &ta, &sb, &tb).unwrap();
        let d0 = gaussian_fr_distance(&sa[0], &sb[0]);
        let d1 = gaussian_fr_distance(&sa[1], &sb[1]);
        let dt = vonmises_fr_distance(&ta, &tb).unwrap();
        let expected = (d0 * d0 + d1 * d1 + dt * dt).sqrt();
        assert!((d - expected).abs() < 1e-12);
    }

    #[test]
    fn identical_states_have_zero_distance() {
        let s = [GaussianBelief::new(1.0, 3.0).unwrap()];
        let t = VonMisesBelief::new(2.0, 0.7).unwrap();
        assert_eq!(product_distance(&s, &t, &s, &t).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let sa = [GaussianBelief::new(0.0, 1.0).unwrap()];
        let sb = [
            GaussianBelief::new(0.0, 1.0).unwrap(),
            GaussianBelief::new(0.0, 1.0).unwrap(),
        ];
        assert!(matches!(
            gaussian_product_distance(&sa, &sb),
            Err(GeometryError::DimensionMismatch { left: 1, right: 2 })
        ));
    }
}
