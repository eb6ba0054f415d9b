//! Plain and natural-gradient descent over belief coordinates.

use super::{
    beds_loss_gradient, beds_loss_penalized, BedsGradient, BedsTarget, RegularizerError,
};
use crate::dynamics::{BedsState, Trajectory};
use crate::geometry::{normalize_phase, vonmises_metric, GaussianBelief, VonMisesBelief};

/// Lower clamp for τ and κ after a descent step. The manifold boundary is
/// at infinite distance, but floating point needs a guard.
pub const POSITIVE_FLOOR: f64 = 1e-9;

/// Descent method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeMethod {
    Plain,
    Natural,
}

/// Data-fitting objective evaluated alongside its gradient.
pub trait DataObjective {
    fn eval(&self, s: &BedsState) -> (f64, BedsGradient);
}

impl<F> DataObjective for F
where
    F: Fn(&BedsState) -> (f64, BedsGradient),
{
    fn eval(&self, s: &BedsState) -> (f64, BedsGradient) {
        self(s)
    }
}

/// The zero data term.
pub struct ZeroData;

impl DataObjective for ZeroData {
    fn eval(&self, s: &BedsState) -> (f64, BedsGradient) {
        (0.0, BedsGradient::zeros(s.dim()))
    }
}

/// Coordinate-wise descent step `θ ← θ - η·g`, with τ and κ clamped to
/// [`POSITIVE_FLOOR`] and φ renormalized into `[0, 2π)`.
pub fn gradient_step(s: &BedsState, grad: &BedsGradient, eta: f64) -> BedsState {
    debug_assert!(eta > 0.0);
    let spatial = s
        .spatial()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mu = b.mu() - eta * grad.mu[i];
            let tau = (b.tau() - eta * grad.tau[i]).max(POSITIVE_FLOOR);
            GaussianBelief::new(mu, tau).expect("clamped tau is positive")
        })
        .collect();
    let phi = normalize_phase(s.temporal().phi() - eta * grad.phi);
    let kappa = (s.temporal().kappa() - eta * grad.kappa).max(POSITIVE_FLOOR);
    let temporal = VonMisesBelief::new(phi, kappa).expect("clamped kappa is nonnegative");
    BedsState::new(spatial, temporal).expect("dimension preserved")
}

/// Result of a natural-gradient step; `phi_skipped` is set when κ = 0 made
/// the phase preconditioner singular and the φ component was left alone.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalStep {
    pub state: BedsState,
    pub phi_skipped: bool,
}

/// Natural-gradient step `θ ← θ - η·G(θ)⁻¹·g` with the diagonal metric
/// `(τ, 1/(2τ²))` per spatial factor and `(g_φφ, g_κκ)` for the temporal
/// factor. Same clamping as [`gradient_step`].
pub fn natural_gradient_step(s: &BedsState, grad: &BedsGradient, eta: f64) -> NaturalStep {
    debug_assert!(eta > 0.0);
    let spatial = s
        .spatial()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mu = b.mu() - eta * grad.mu[i] / b.tau();
            let tau = (b.tau() - eta * grad.tau[i] * 2.0 * b.tau() * b.tau()).max(POSITIVE_FLOOR);
            GaussianBelief::new(mu, tau).expect("clamped tau is positive")
        })
        .collect();
    let kappa0 = s.temporal().kappa();
    let m = vonmises_metric(kappa0);
    let (phi, phi_skipped) = if m.g11 > 0.0 {
        (
            normalize_phase(s.temporal().phi() - eta * grad.phi / m.g11),
            false,
        )
    } else {
        (s.temporal().phi(), grad.phi != 0.0)
    };
    let kappa = (kappa0 - eta * grad.kappa / m.g22).max(POSITIVE_FLOOR);
    let temporal = VonMisesBelief::new(phi, kappa).expect("clamped kappa is nonnegative");
    NaturalStep {
        state: BedsState::new(spatial, temporal).expect("dimension preserved"),
        phi_skipped,
    }
}

/// Optimizer history: per-step states with matching loss breakdowns.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationRun {
    pub trajectory: Trajectory,
    pub losses: Vec<super::LossBreakdown>,
}

impl OptimizationRun {
    pub fn final_state(&self) -> &BedsState {
        self.trajectory.last_state().expect("run is never empty")
    }
}

/// Iterate descent on the loss from `init` toward `target`.
///
/// Records a loss breakdown per recorded state (the initial state plus one
/// per step). Fails with [`RegularizerError::NumericFailure`] as soon as a
/// non-finite loss shows up.
pub fn optimize(
    init: &BedsState,
    target: &BedsTarget,
    data: &impl DataObjective,
    lambda: f64,
    eta: f64,
    steps: usize,
    method: OptimizeMethod,
) -> Result<OptimizationRun, RegularizerError> {
    if steps == 0 {
        return Err(RegularizerError::Domain {
            what: "steps must be >= 1".into(),
        });
    }
    if !(eta > 0.0) {
        return Err(RegularizerError::Domain {
            what: format!("eta must be > 0, got {eta}"),
        });
    }
    super::check_dims(init, target)?;
    super::check_lambda(lambda)?;

    let mut trajectory = Trajectory::new();
    let mut losses = Vec::with_capacity(steps + 1);
    let mut state = init.clone();

    for step in 0..=steps {
        let (data_loss, data_grad) = data.eval(&state);
        let breakdown = beds_loss_penalized(&state, target, lambda, data_loss);
        if !breakdown.total.is_finite() {
            return Err(RegularizerError::NumericFailure { step });
        }
        trajectory
            .push(step as f64, state.clone())
            .map_err(RegularizerError::Dynamics)?;
        losses.push(breakdown);
        if step == steps {
            break;
        }
        let grad = beds_loss_gradient(&state, target, lambda, &data_grad)?;
        state = match method {
            OptimizeMethod::Plain => gradient_step(&state, &grad, eta),
            OptimizeMethod::Natural => natural_gradient_step(&state, &grad, eta).state,
        };
    }
    Ok(OptimizationRun { trajectory, losses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::BedsState;
    use crate::geometry::gaussian_fr_distance;

    fn state(mu: f64, tau: f64, phi: f64, kappa: f64) -> BedsState {
        BedsState::scalar(mu, tau, phi, kappa).unwrap()
    }

    #[test]
    fn zero_gradient_leaves_state_unchanged() {
        let s = state(1.0, 2.0, 0.3, 1.5);
        let g = BedsGradient::zeros(1);
        assert_eq!(gradient_step(&s, &g, 0.1), s);
        assert_eq!(natural_gradient_step(&s, &g, 0.1).state, s);
    }

    #[test]
    fn mu_moves_against_the_gradient() {
        let s = state(1.0, 2.0, 0.0, 1.0);
        let mut g = BedsGradient::zeros(1);
        g.mu[0] = 3.0;
        let out = gradient_step(&s, &g, 0.1);
        assert!((out.spatial()[0].mu() - (1.0 - 0.3)).abs() < 1e-15);
        // natural step divides by τ
        let out = natural_gradient_step(&s, &g, 0.1).state;
        assert!((out.spatial()[0].mu() - (1.0 - 0.3 / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn tau_crossing_zero_is_clamped() {
        let s = state(0.0, 0.5, 0.0, 0.5);
        let mut g = BedsGradient::zeros(1);
        g.tau = vec![100.0];
        g.kappa = 100.0;
        let out = gradient_step(&s, &g, 1.0);
        assert_eq!(out.spatial()[0].tau(), POSITIVE_FLOOR);
        assert_eq!(out.temporal().kappa(), POSITIVE_FLOOR);
    }

    #[test]
    fn phi_renormalizes_into_range() {
        let s = state(0.0, 1.0, 0.1, 1.0);
        let mut g = BedsGradient::zeros(1);
        g.phi = 1.0;
        let out = gradient_step(&s, &g, 1.0);
        let phi = out.temporal().phi();
        assert!((0.0..std::f64::consts::TAU).contains(&phi));
    }

    #[test]
    fn singular_phase_preconditioner_is_skipped_and_flagged() {
        let s = state(0.0, 1.0, 1.0, 0.0);
        let mut g = BedsGradient::zeros(1);
        g.phi = 2.0;
        let out = natural_gradient_step(&s, &g, 0.1);
        assert!(out.phi_skipped);
        assert_eq!(out.state.temporal().phi(), 1.0);
    }

    #[test]
    fn natural_contraction_run_reaches_target() {
        let init = state(2.0, 0.5, 1.0, 0.5);
        let target = BedsTarget::new(state(0.0, 2.0, 0.0, 2.0));
        let run = optimize(&init, &target, &ZeroData, 1.0, 0.05, 500, OptimizeMethod::Natural)
            .unwrap();
        let d0 = init.distance(&target.state_star).unwrap();
        let d1 = run.final_state().distance(&target.state_star).unwrap();
        assert!(
            d1 < 1e-3 * d0,
            "natural run should contract: initial {d0}, final {d1}"
        );
    }

    #[test]
    fn run_from_target_keeps_constant_data_loss() {
        let s = state(0.0, 1.0, 0.0, 1.0);
        let target = BedsTarget::new(s.clone());
        let data = |st: &BedsState| (2.5, BedsGradient::zeros(st.dim()));
        let run = optimize(&s, &target, &data, 2.0, 0.1, 20, OptimizeMethod::Plain).unwrap();
        for l in &run.losses {
            assert!((l.total - 5.0).abs() < 1e-12, "loss should stay at λ·data");
        }
    }

    #[test]
    fn natural_beats_plain_on_ill_conditioned_precisions() {
        // τ spread over four orders of magnitude
        let init = BedsState::new(
            vec![
                GaussianBelief::new(1.0, 0.01).unwrap(),
                GaussianBelief::new(1.0, 1.0).unwrap(),
                GaussianBelief::new(1.0, 100.0).unwrap(),
            ],
            VonMisesBelief::new(0.5, 1.0).unwrap(),
        )
        .unwrap();
        let target = BedsTarget::new(
            BedsState::new(
                vec![
                    GaussianBelief::new(0.0, 0.01).unwrap(),
                    GaussianBelief::new(0.0, 1.0).unwrap(),
                    GaussianBelief::new(0.0, 100.0).unwrap(),
                ],
                VonMisesBelief::new(0.5, 1.0).unwrap(),
            )
            .unwrap(),
        );
        let eta = 2e-3;
        let steps_to = |method| {
            let run = optimize(&init, &target, &ZeroData, 1.0, eta, 4000, method).unwrap();
            run.trajectory
                .states()
                .iter()
                .position(|s| s.distance(&target.state_star).unwrap() < 0.01)
        };
        let natural = steps_to(OptimizeMethod::Natural);
        let plain = steps_to(OptimizeMethod::Plain);
        match (natural, plain) {
            (Some(n), Some(p)) => assert!(n < p, "natural {n} should beat plain {p}"),
            (Some(_), None) => {} // natural converged, plain never did
            other => panic!("unexpected convergence pattern {other:?}"),
        }
    }

    #[test]
    fn non_finite_loss_reports_step() {
        let s = state(0.0, 1.0, 0.0, 1.0);
        let target = BedsTarget::new(state(5.0, 1.0, 0.0, 1.0));
        // data term that blows up after a few steps
        let data = |st: &BedsState| {
            let v = if st.spatial()[0].mu() < 4.0 {
                f64::INFINITY
            } else {
                0.0
            };
            (v, BedsGradient::zeros(st.dim()))
        };
        let err = optimize(&s, &target, &data, 1.0, 0.1, 10, OptimizeMethod::Plain).unwrap_err();
        assert!(matches!(err, RegularizerError::NumericFailure { step: 0 }));
    }

    #[test]
    fn natural_step_coordinate_change_gap_is_second_order() {
        // One preconditioned step in (μ, τ) vs (μ, ln τ): the resulting
        // states differ by O(η²) in Fisher distance, so halving η divides
        // the gap by about four.
        let gap = |eta: f64, tau: f64, gtau: f64| {
            let s = state(0.4, tau, 0.0, 1.0);
            let mut g = BedsGradient::zeros(1);
            g.mu[0] = 0.7;
            g.tau[0] = gtau;
            let direct = natural_gradient_step(&s, &g, eta).state;
            // same step with the τ part taken in v = ln τ: pullback metric
            // g_vv = 1/2, so Δv = -2η·(∂L/∂v) = -2η·g_τ·τ
            let v = tau.ln() - 2.0 * eta * gtau * tau;
            let log_route = GaussianBelief::new(
                s.spatial()[0].mu() - eta * g.mu[0] / tau,
                v.exp(),
            )
            .unwrap();
            gaussian_fr_distance(&direct.spatial()[0], &log_route)
        };
        for &(tau, gtau) in &[(1.0, 0.8), (2.0, -0.5), (0.5, 1.2)] {
            let ratio = gap(0.1, tau, gtau) / gap(0.05, tau, gtau);
            assert!(
                (3.2..=4.8).contains(&ratio),
                "gap should shrink ~4x when η halves, got {ratio}"
            );
        }
    }
}
