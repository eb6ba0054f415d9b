//! Six-class trajectory taxonomy.
//!
//! Each geometric component (`τ̄` and `κ`) of a trajectory either settles
//! on a fixed point (crystallizable) or keeps moving (maintainable). The
//! decision uses the relative standard deviation of the trailing window,
//! which makes the criterion invariant under positive rescaling.

use super::{DynamicsError, Trajectory};

/// Asymptotic regime of a single component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentRegime {
    Crystallizable,
    Maintainable,
}

/// The six trajectory classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaxonomyClass {
    CTau,
    CKappa,
    CFull,
    MTau,
    MKappa,
    MFull,
}

impl std::fmt::Display for TaxonomyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaxonomyClass::CTau => "C-tau",
            TaxonomyClass::CKappa => "C-kappa",
            TaxonomyClass::CFull => "C-full",
            TaxonomyClass::MTau => "M-tau",
            TaxonomyClass::MKappa => "M-kappa",
            TaxonomyClass::MFull => "M-full",
        })
    }
}

/// Classification result: per-component regimes plus the coarse class.
///
/// Both flags are reported alongside `cls` so mixed cases lose no
/// information: a trajectory with crystallizable `τ` and maintainable `κ`
/// carries `cls = C-tau` together with the `M-kappa` component reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaxonomyLabel {
    pub tau_regime: ComponentRegime,
    pub kappa_regime: ComponentRegime,
    pub cls: TaxonomyClass,
}

impl TaxonomyLabel {
    fn assemble(tau: ComponentRegime, kappa: ComponentRegime) -> Self {
        use ComponentRegime::*;
        let cls = match (tau, kappa) {
            (Crystallizable, Crystallizable) => TaxonomyClass::CFull,
            (Maintainable, Maintainable) => TaxonomyClass::MFull,
            (Crystallizable, Maintainable) => TaxonomyClass::CTau,
            (Maintainable, Crystallizable) => TaxonomyClass::CKappa,
        };
        Self {
            tau_regime: tau,
            kappa_regime: kappa,
            cls,
        }
    }

    /// Class of the τ component alone: `C-tau` or `M-tau`.
    pub fn tau_class(&self) -> TaxonomyClass {
        match self.tau_regime {
            ComponentRegime::Crystallizable => TaxonomyClass::CTau,
            ComponentRegime::Maintainable => TaxonomyClass::MTau,
        }
    }

    /// Class of the κ component alone: `C-kappa` or `M-kappa`.
    pub fn kappa_class(&self) -> TaxonomyClass {
        match self.kappa_regime {
            ComponentRegime::Crystallizable => TaxonomyClass::CKappa,
            ComponentRegime::Maintainable => TaxonomyClass::MKappa,
        }
    }
}

/// Classify a trajectory from the variability of its trailing window.
///
/// A component is crystallizable when the sample standard deviation of its
/// last `window` values, divided by `|mean| + tol`, stays below `tol`.
/// Requires at least `2·window` samples.
pub fn classify_trajectory(
    traj: &Trajectory,
    window: usize,
    tol: f64,
) -> Result<TaxonomyLabel, DynamicsError> {
    if !(tol > 0.0) {
        return Err(DynamicsError::Domain {
            what: format!("tolerance must be > 0, got {tol}"),
        });
    }
    if window == 0 || traj.len() < 2 * window {
        return Err(DynamicsError::InsufficientData {
            len: traj.len(),
            needed: 2 * window.max(1),
        });
    }
    let taus: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| {
            let log_mean = s.spatial().iter().map(|b| b.tau().ln()).sum::<f64>()
                / s.spatial().len() as f64;
            log_mean.exp()
        })
        .collect();
    let kappas: Vec<f64> = traj.states().iter().map(|s| s.temporal().kappa()).collect();

    let regime = |values: &[f64]| {
        let tail = &values[values.len() - window..];
        if relative_std(tail, tol) < tol {
            ComponentRegime::Crystallizable
        } else {
            ComponentRegime::Maintainable
        }
    };
    Ok(TaxonomyLabel::assemble(regime(&taus), regime(&kappas)))
}

/// Sample standard deviation of `values` over `|mean| + tol`.
fn relative_std(values: &[f64], tol: f64) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt() / (mean.abs() + tol)
}
