//! Thermodynamic bounds on belief maintenance: Landauer cost, minimal
//! erasure energy, information rate, maintenance power and efficiency,
//! plus the coherence readings of EMA momentum and SAC temperature.

use std::f64::consts::LN_2;

use super::DynamicsError;
use crate::geometry::{gaussian_kl, GaussianBelief};

/// Landauer cost of erasing `bits` of information: `bits·kT·ln 2`.
pub fn landauer_cost(bits: f64, kt: f64) -> f64 {
    debug_assert!(bits >= 0.0 && kt > 0.0);
    bits * kt * LN_2
}

/// Minimal energy dissipated when regularizing `q` toward `q*`:
/// `kT·ln 2·D_KL(q ‖ q*)`.
pub fn min_erasure_energy(q: &GaussianBelief, q_star: &GaussianBelief, kt: f64) -> f64 {
    debug_assert!(kt > 0.0);
    kt * LN_2 * gaussian_kl(q, q_star)
}

/// Minimal information rate for maintaining precision `τ*` against
/// dissipation rate `γ`: `γ·τ*/(2·ln 2)` bits per unit time.
pub fn min_information_rate(gamma: f64, tau_star: f64) -> f64 {
    debug_assert!(gamma >= 0.0 && tau_star > 0.0);
    gamma * tau_star / (2.0 * LN_2)
}

/// Minimal maintenance power `γ·τ*·kT/2`; at `τ* = 1` this is the boxed
/// power bound `γ·kT/2`.
pub fn min_maintenance_power(gamma: f64, tau_star: f64, kt: f64) -> f64 {
    debug_assert!(gamma >= 0.0 && tau_star > 0.0 && kt > 0.0);
    gamma * tau_star * kt / 2.0
}

/// Thermodynamic efficiency `η = E_Landauer/E_actual ∈ (0, 1]`.
///
/// Rejects inputs where the actual energy sits below the Landauer floor,
/// which would indicate physically inconsistent accounting.
pub fn thermo_efficiency(bits_erased: f64, e_actual: f64, kt: f64) -> Result<f64, DynamicsError> {
    if !(e_actual > 0.0) {
        return Err(DynamicsError::Domain {
            what: format!("actual energy must be > 0, got {e_actual}"),
        });
    }
    let floor = landauer_cost(bits_erased, kt);
    if e_actual < floor {
        return Err(DynamicsError::PhysicalViolation {
            actual: e_actual,
            floor,
        });
    }
    Ok(floor / e_actual)
}

/// Temporal coherence implied by an EMA momentum coefficient:
/// `κ = 1/(1-m)` for `m ∈ [0, 1)`.
pub fn ema_coherence(m: f64) -> Result<f64, DynamicsError> {
    if !(0.0..1.0).contains(&m) {
        return Err(DynamicsError::Domain {
            what: format!("momentum must lie in [0,1), got {m}"),
        });
    }
    Ok(1.0 / (1.0 - m))
}

/// Coherence implied by an entropy temperature: `κ = 1/α` for `α > 0`.
pub fn sac_coherence(alpha: f64) -> f64 {
    debug_assert!(alpha > 0.0);
    1.0 / alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landauer_examples() {
        assert_eq!(landauer_cost(0.0, 1.0), 0.0);
        assert!((landauer_cost(1.0, 1.0) - LN_2).abs() < 1e-15);
        // room temperature, kT = 4.14e-21 J
        let e = landauer_cost(1.0, 4.14e-21);
        assert!((e - 2.87e-21).abs() < 0.01 * 2.87e-21, "got {e:e}");
    }

    #[test]
    fn erasure_energy_examples() {
        let q = GaussianBelief::new(0.0, 1.0).unwrap();
        assert_eq!(min_erasure_energy(&q, &q, 1.0), 0.0);
        // KL((0,1) ‖ (1,1)) = 1/2
        let q_star = GaussianBelief::new(1.0, 1.0).unwrap();
        let e = min_erasure_energy(&q, &q_star, 1.0);
        assert!((e - 0.5 * LN_2).abs() < 1e-14);
        assert!((min_erasure_energy(&q, &q_star, 3.0) - 3.0 * e).abs() < 1e-14);
    }

    #[test]
    fn information_rate_examples() {
        assert_eq!(min_information_rate(0.0, 1.0), 0.0);
        assert!((min_information_rate(2.0 * LN_2, 1.0) - 1.0).abs() < 1e-15);
        assert!((min_information_rate(1.0, 4.0) - 2.885_390_081_777_927).abs() < 1e-12);
    }

    #[test]
    fn maintenance_power_examples() {
        assert_eq!(min_maintenance_power(2.0, 1.0, 1.0), 1.0);
        assert_eq!(min_maintenance_power(0.0, 1.0, 1.0), 0.0);
        // P_min = info rate × Landauer cost per bit
        for &(gamma, tau, kt) in &[(0.5, 2.0, 1.0), (3.0, 0.2, 4.1)] {
            let composed = min_information_rate(gamma, tau) * landauer_cost(1.0, kt);
            let direct = min_maintenance_power(gamma, tau, kt);
            assert!((composed - direct).abs() < 1e-14 * direct.max(1.0));
        }
    }

    #[test]
    fn efficiency_examples() {
        let eta = thermo_efficiency(1.0, LN_2, 1.0).unwrap();
        assert!((eta - 1.0).abs() < 1e-15);
        let eta = thermo_efficiency(1.0, 2.0 * LN_2, 1.0).unwrap();
        assert!((eta - 0.5).abs() < 1e-15);
        assert!(matches!(
            thermo_efficiency(1.0, 0.5 * LN_2, 1.0),
            Err(DynamicsError::PhysicalViolation { .. })
        ));
    }

    #[test]
    fn ema_examples() {
        assert_eq!(ema_coherence(0.0).unwrap(), 1.0);
        assert!((ema_coherence(0.99).unwrap() - 100.0).abs() < 1e-9);
        assert!((ema_coherence(0.996).unwrap() - 250.0).abs() < 1e-9);
        assert!(ema_coherence(1.0).is_err());
        assert!(ema_coherence(-0.1).is_err());
    }

    #[test]
    fn sac_examples() {
        assert_eq!(sac_coherence(1.0), 1.0);
        assert_eq!(sac_coherence(0.1), 10.0);
        assert!((sac_coherence(10.0) - 0.1).abs() < 1e-15);
    }
}
