//! Belief-state evolution under dissipation, crystallization diagnostics,
//! thermodynamic bounds and the trajectory taxonomy.

mod taxonomy;
mod thermo;

pub use taxonomy::{classify_trajectory, ComponentRegime, TaxonomyClass, TaxonomyLabel};
pub use thermo::{
    ema_coherence, landauer_cost, min_erasure_energy, min_information_rate,
    min_maintenance_power, sac_coherence, thermo_efficiency,
};

use thiserror::Error;

use crate::geometry::{product_distance, GaussianBelief, GeometryError, VonMisesBelief};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("a state needs at least one spatial factor")]
    EmptyState,
    #[error("invalid time step: dt = {dt}, t_end = {t_end}")]
    InvalidTimeStep { dt: f64, t_end: f64 },
    #[error("non-finite value during integration at step {step}")]
    NumericFailure { step: usize },
    #[error("parameter out of domain: {what}")]
    Domain { what: String },
    #[error("actual energy {actual} is below the Landauer floor {floor}")]
    PhysicalViolation { actual: f64, floor: f64 },
    #[error("trajectory too short: {len} samples, need at least {needed}")]
    InsufficientData { len: usize, needed: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Product belief state: `d ≥ 1` spatial Gaussian factors and one temporal
/// von Mises factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BedsState {
    spatial: Vec<GaussianBelief>,
    temporal: VonMisesBelief,
}

impl BedsState {
    pub fn new(
        spatial: Vec<GaussianBelief>,
        temporal: VonMisesBelief,
    ) -> Result<Self, DynamicsError> {
        if spatial.is_empty() {
            return Err(DynamicsError::EmptyState);
        }
        Ok(Self { spatial, temporal })
    }

    /// Single-factor convenience constructor `(μ, τ, φ, κ)`.
    pub fn scalar(mu: f64, tau: f64, phi: f64, kappa: f64) -> Result<Self, DynamicsError> {
        Ok(Self {
            spatial: vec![GaussianBelief::new(mu, tau).map_err(DynamicsError::Geometry)?],
            temporal: VonMisesBelief::new(phi, kappa).map_err(DynamicsError::Geometry)?,
        })
    }

    pub fn spatial(&self) -> &[GaussianBelief] {
        &self.spatial
    }

    pub fn temporal(&self) -> &VonMisesBelief {
        &self.temporal
    }

    pub fn dim(&self) -> usize {
        self.spatial.len()
    }

    /// Product-manifold Fisher–Rao distance to another state.
    pub fn distance(&self, other: &Self) -> Result<f64, DynamicsError> {
        product_distance(&self.spatial, &self.temporal, &other.spatial, &other.temporal)
            .map_err(DynamicsError::Geometry)
    }
}

/// Dissipation rates and thermal energy scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationParams {
    /// Precision dissipation rate γ ≥ 0 (1/time).
    pub gamma: f64,
    /// Coherence dissipation rate γ_κ ≥ 0 (1/time); independent of γ.
    pub gamma_kappa: f64,
    /// Thermal energy k_B·T > 0; 1 in natural units.
    pub kt: f64,
}

impl DissipationParams {
    pub fn new(gamma: f64, gamma_kappa: f64, kt: f64) -> Result<Self, DynamicsError> {
        if !(gamma >= 0.0 && gamma_kappa >= 0.0) {
            return Err(DynamicsError::Domain {
                what: format!("dissipation rates must be >= 0 (gamma={gamma}, gamma_kappa={gamma_kappa})"),
            });
        }
        if !(kt > 0.0) {
            return Err(DynamicsError::Domain {
                what: format!("kT must be > 0, got {kt}"),
            });
        }
        Ok(Self {
            gamma,
            gamma_kappa,
            kt,
        })
    }

    /// Natural units, `kT = 1`.
    pub fn natural(gamma: f64, gamma_kappa: f64) -> Result<Self, DynamicsError> {
        Self::new(gamma, gamma_kappa, 1.0)
    }
}

/// Coarse crystallization regime from the index `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrystalRegime {
    Fluid,
    Transition,
    Crystallized,
}

impl std::fmt::Display for CrystalRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CrystalRegime::Fluid => "fluid",
            CrystalRegime::Transition => "transition",
            CrystalRegime::Crystallized => "crystallized",
        })
    }
}

/// Default band parameter for [`classify_regime`].
pub const DEFAULT_REGIME_EPS: f64 = 0.1;

/// Threshold-based crystallization stage of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrystallizationFlags {
    None,
    Position,
    Phase,
    Complete,
}

/// Per-sample diagnostics stored along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub crystallization: f64,
    pub regime: CrystalRegime,
}

/// Time-indexed sequence of states with per-step diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<BedsState>,
    diagnostics: Vec<StepDiagnostics>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a sample; times must be strictly increasing.
    pub fn push(&mut self, t: f64, state: BedsState) -> Result<(), DynamicsError> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(DynamicsError::Domain {
                    what: format!("times must be strictly increasing ({t} after {last})"),
                });
            }
        }
        let c = crystallization_index(&state);
        let regime = classify_regime(c, DEFAULT_REGIME_EPS).expect("default eps is valid");
        self.times.push(t);
        self.states.push(state);
        self.diagnostics.push(StepDiagnostics {
            crystallization: c,
            regime,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[BedsState] {
        &self.states
    }

    pub fn diagnostics(&self) -> &[StepDiagnostics] {
        &self.diagnostics
    }

    pub fn last_state(&self) -> Option<&BedsState> {
        self.states.last()
    }
}

/// Closed-form dissipation: `τ(t) = τ₀·e^(−2γt)` per spatial factor and
/// `κ(t) = κ₀·e^(−γ_κ t)`; positions and phases are unchanged.
pub fn dissipate_closed_form(s: &BedsState, p: &DissipationParams, t: f64) -> BedsState {
    debug_assert!(t >= 0.0, "dissipation time must be nonnegative");
    let decay_tau = (-2.0 * p.gamma * t).exp();
    let decay_kappa = (-p.gamma_kappa * t).exp();
    let spatial = s
        .spatial
        .iter()
        .map(|b| GaussianBelief::new(b.mu(), b.tau() * decay_tau).expect("decayed tau stays positive"))
        .collect();
    let temporal = VonMisesBelief::new(s.temporal.phi(), s.temporal.kappa() * decay_kappa)
        .expect("decayed kappa stays nonnegative");
    BedsState { spatial, temporal }
}

/// RK4 integration of the dissipation ODEs `dτ/dt = −2γτ`,
/// `dκ/dt = −γ_κ κ`, sampled every `dt` up to `t_end`.
pub fn dissipate_rk4(
    s: &BedsState,
    p: &DissipationParams,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    if !(dt > 0.0) || dt > t_end || !t_end.is_finite() {
        return Err(DynamicsError::InvalidTimeStep { dt, t_end });
    }
    let n_full = (t_end / dt + 1e-9).floor() as usize;
    let remainder = t_end - n_full as f64 * dt;

    let mut traj = Trajectory::new();
    let mut taus: Vec<f64> = s.spatial.iter().map(|b| b.tau()).collect();
    let mut kappa = s.temporal.kappa();
    traj.push(0.0, s.clone())?;

    let assemble = |taus: &[f64], kappa: f64| -> Result<BedsState, DynamicsError> {
        let spatial = s
            .spatial
            .iter()
            .zip(taus)
            .map(|(b, &tau)| GaussianBelief::new(b.mu(), tau))
            .collect::<Result<Vec<_>, _>>()
            .map_err(DynamicsError::Geometry)?;
        let temporal = VonMisesBelief::new(s.temporal.phi(), kappa).map_err(DynamicsError::Geometry)?;
        BedsState::new(spatial, temporal)
    };

    let total_steps = n_full + usize::from(remainder > 1e-12 * t_end.max(1.0));
    for step in 1..=total_steps {
        let h = if step <= n_full { dt } else { remainder };
        for tau in taus.iter_mut() {
            *tau = rk4_linear(*tau, -2.0 * p.gamma, h);
        }
        kappa = rk4_linear(kappa, -p.gamma_kappa, h);
        if taus.iter().any(|t| !t.is_finite()) || !kappa.is_finite() {
            return Err(DynamicsError::NumericFailure { step });
        }
        let t = if step <= n_full {
            step as f64 * dt
        } else {
            t_end
        };
        traj.push(t, assemble(&taus, kappa)?)?;
    }
    Ok(traj)
}

/// One classic RK4 step for `y' = a·y`.
fn rk4_linear(y: f64, a: f64, h: f64) -> f64 {
    let k1 = a * y;
    let k2 = a * (y + 0.5 * h * k1);
    let k3 = a * (y + 0.5 * h * k2);
    let k4 = a * (y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Crystallization index `C = τ̄·κ`, with `τ̄` the geometric mean of the
/// spatial precisions.
pub fn crystallization_index(s: &BedsState) -> f64 {
    let log_mean =
        s.spatial.iter().map(|b| b.tau().ln()).sum::<f64>() / s.spatial.len() as f64;
    log_mean.exp() * s.temporal.kappa()
}

/// Fluid for `C < ε`, crystallized for `C > 1/ε`, transition otherwise.
pub fn classify_regime(c: f64, eps: f64) -> Result<CrystalRegime, DynamicsError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DynamicsError::Domain {
            what: format!("regime eps must lie in (0,1), got {eps}"),
        });
    }
    Ok(if c < eps {
        CrystalRegime::Fluid
    } else if c > 1.0 / eps {
        CrystalRegime::Crystallized
    } else {
        CrystalRegime::Transition
    })
}

/// Threshold crystallization: position if every spatial `τ` exceeds
/// `τ_crit`, phase if `κ` exceeds `κ_crit`, complete if both.
pub fn crystallization_flags(
    s: &BedsState,
    tau_crit: f64,
    kappa_crit: f64,
) -> Result<CrystallizationFlags, DynamicsError> {
    if !(tau_crit > 0.0 && kappa_crit > 0.0) {
        return Err(DynamicsError::Domain {
            what: format!("thresholds must be > 0 (tau_crit={tau_crit}, kappa_crit={kappa_crit})"),
        });
    }
    let min_tau = s.spatial.iter().map(|b| b.tau()).fold(f64::INFINITY, f64::min);
    let position = min_tau > tau_crit;
    let phase = s.temporal.kappa() > kappa_crit;
    Ok(match (position, phase) {
        (true, true) => CrystallizationFlags::Complete,
        (true, false) => CrystallizationFlags::Position,
        (false, true) => CrystallizationFlags::Phase,
        (false, false) => CrystallizationFlags::None,
    })
}
