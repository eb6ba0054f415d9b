//! Recursive crystallization and the bounded-energy hierarchy: level-`n`
//! posteriors become level-`n+1` priors, dissipation rates fall
//! geometrically `γ_n = γ₀rⁿ`, and the total maintenance energy stays
//! strictly below `E₀/(1-r)`.

use super::NetworkError;
use crate::dynamics::BedsState;
use crate::geometry::GaussianBelief;

/// One hierarchy level: inherited prior plus its dissipation rate.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyLevel {
    pub prior: BedsState,
    pub gamma: f64,
}

/// Stack of levels with geometrically decreasing dissipation.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    levels: Vec<HierarchyLevel>,
    r: f64,
    e0: f64,
}

impl Hierarchy {
    /// Build `n_levels` levels sharing `prior`, with `γ_n = γ₀·rⁿ`.
    pub fn geometric(
        prior: BedsState,
        n_levels: usize,
        gamma0: f64,
        r: f64,
        e0: f64,
    ) -> Result<Self, NetworkError> {
        if !(r > 0.0 && r < 1.0) {
            return Err(NetworkError::DivergentRatio { r });
        }
        if n_levels == 0 || !(gamma0 >= 0.0) || !(e0 > 0.0) {
            return Err(NetworkError::Domain {
                what: format!("need n_levels >= 1, gamma0 >= 0, e0 > 0 (got {n_levels}, {gamma0}, {e0})"),
            });
        }
        let levels = (0..n_levels)
            .map(|n| HierarchyLevel {
                prior: prior.clone(),
                gamma: gamma0 * r.powi(n as i32),
            })
            .collect();
        Ok(Self { levels, r, e0 })
    }

    pub fn levels(&self) -> &[HierarchyLevel] {
        &self.levels
    }

    pub fn ratio(&self) -> f64 {
        self.r
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }
}

/// Identity transport of crystallized posteriors: the level-`n` posteriors
/// become the level-`n+1` priors verbatim.
pub fn crystallize_level(posteriors: &[GaussianBelief]) -> Vec<GaussianBelief> {
    debug_assert!(!posteriors.is_empty(), "need at least one posterior");
    posteriors.to_vec()
}

/// Partial sum, bound and gap of the geometric maintenance-energy series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    /// `E₀·Σ_{n<N} rⁿ` by direct summation.
    pub partial_sum: f64,
    /// `E₀/(1-r)`.
    pub bound: f64,
    /// `bound - partial_sum = E₀·rᴺ/(1-r)`, evaluated in closed form.
    pub gap: f64,
    /// Strictness certificate: the gap of a positive geometric series is
    /// positive, so the partial sum sits strictly below the bound even
    /// when the two are no longer distinguishable in f64.
    pub satisfied: bool,
}

/// Maintenance-energy budget for `n_levels` levels of a geometric
/// hierarchy. Fails with [`NetworkError::DivergentRatio`] for `r ≥ 1`.
pub fn geometric_energy_budget(e0: f64, r: f64, n_levels: usize) -> Result<EnergyBudget, NetworkError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(NetworkError::DivergentRatio { r });
    }
    if !(e0 > 0.0) || n_levels == 0 {
        return Err(NetworkError::Domain {
            what: format!("need e0 > 0 and n_levels >= 1 (got {e0}, {n_levels})"),
        });
    }
    let mut partial_sum = 0.0;
    let mut term = e0;
    for _ in 0..n_levels {
        partial_sum += term;
        term *= r;
    }
    let bound = e0 / (1.0 - r);
    let gap = e0 * r.powi(n_levels as i32) / (1.0 - r);
    Ok(EnergyBudget {
        partial_sum,
        bound,
        gap,
        satisfied: gap > 0.0,
    })
}

/// Budget of a [`Hierarchy`] truncated to its first `n_levels` levels.
pub fn total_maintenance_energy(h: &Hierarchy, n_levels: usize) -> Result<EnergyBudget, NetworkError> {
    geometric_energy_budget(h.e0, h.r, n_levels.min(h.levels.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::BedsState;

    #[test]
    fn crystallize_is_the_identity_assignment() {
        let post = vec![GaussianBelief::new(1.0, 9.0).unwrap()];
        let prior = crystallize_level(&post);
        assert_eq!(prior, post);
        // applied twice == applied once to the intermediate
        assert_eq!(crystallize_level(&prior), post);
        // precision carries over unchanged
        assert_eq!(prior[0].tau(), 9.0);
    }

    #[test]
    fn budget_examples() {
        let b = geometric_energy_budget(1.0, 0.5, 1).unwrap();
        assert_eq!(b.partial_sum, 1.0);
        assert_eq!(b.bound, 2.0);
        assert!(b.satisfied);

        let b = geometric_energy_budget(1.0, 0.5, 20).unwrap();
        let expected = 2.0 - 2.0_f64.powi(-19);
        assert!((b.partial_sum - expected).abs() < 1e-12);
        assert_eq!(b.bound, 2.0);
        assert!(b.satisfied);
    }

    #[test]
    fn ratio_point_nine_stays_under_ten() {
        for n in 1..=64 {
            let b = geometric_energy_budget(1.0, 0.9, n).unwrap();
            assert!(b.partial_sum < 10.0, "partial {} at n={n}", b.partial_sum);
        }
    }

    #[test]
    fn divergent_ratio_is_rejected() {
        assert!(matches!(
            geometric_energy_budget(1.0, 1.0, 4),
            Err(NetworkError::DivergentRatio { .. })
        ));
        assert!(geometric_energy_budget(1.0, 1.5, 4).is_err());
    }

    #[test]
    fn gap_matches_closed_form_across_grid() {
        for r10 in 1..=9 {
            let r = r10 as f64 / 10.0;
            for n in 1..=64 {
                let b = geometric_energy_budget(1.0, r, n).unwrap();
                // strictness is certified through the positive gap; the
                // f64 partial sum may round to within an ulp of the bound
                assert!(b.satisfied, "strictness fails at r={r}, n={n}");
                assert!(b.partial_sum <= b.bound + 1e-12);
                let direct_gap = b.bound - b.partial_sum;
                assert!(
                    (direct_gap - b.gap).abs() <= 1e-12,
                    "gap mismatch at r={r}, n={n}: {direct_gap} vs {}",
                    b.gap
                );
            }
        }
    }

    #[test]
    fn hierarchy_constructor_validates_and_decays() {
        let prior = BedsState::scalar(0.0, 1.0, 0.0, 1.0).unwrap();
        let h = Hierarchy::geometric(prior.clone(), 5, 2.0, 0.5, 1.0).unwrap();
        for (n, level) in h.levels().iter().enumerate() {
            let expected = 2.0 * 0.5_f64.powi(n as i32);
            assert!((level.gamma - expected).abs() <= 1e-12 * expected.max(1.0));
        }
        assert!(Hierarchy::geometric(prior, 5, 2.0, 1.2, 1.0).is_err());
    }
}
