//! Graduated non-convexity with dissipative coupling.
//!
//! The staged objective over a Gaussian search distribution `q = N(μ, 1/τ)`
//! is `E_q[L_α] + β·D_KL(q ‖ π)`: the continuation parameter `α` reveals
//! the target landscape while `β` controls information disposal toward the
//! prior `π`. Expectations use 16-node Gauss–Hermite quadrature, exact for
//! polynomial targets up to degree 31.

use super::RegularizerError;
use crate::geometry::{gaussian_kl, GaussianBelief};

/// Number of Gauss–Hermite nodes used by [`run_gnc`].
pub const GH_NODES: usize = 16;

/// Sampled continuation schedule: `α` rises from ~0 to ~1, `β` stays
/// positive. Invariants are checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GncSchedule {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl GncSchedule {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self, RegularizerError> {
        if alpha.len() != beta.len() {
            return Err(RegularizerError::DimensionMismatch {
                left: alpha.len(),
                right: beta.len(),
            });
        }
        if alpha.len() < 2 {
            return Err(RegularizerError::Domain {
                what: format!("schedule needs at least 2 samples, got {}", alpha.len()),
            });
        }
        if alpha.windows(2).any(|w| w[1] < w[0]) {
            return Err(RegularizerError::Domain {
                what: "alpha schedule must be nondecreasing".into(),
            });
        }
        if !(alpha[0] <= 0.05 && *alpha.last().unwrap() >= 0.95) {
            return Err(RegularizerError::Domain {
                what: format!(
                    "alpha must start <= 0.05 and end >= 0.95 (got {} .. {})",
                    alpha[0],
                    alpha.last().unwrap()
                ),
            });
        }
        if alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(RegularizerError::Domain {
                what: "alpha samples must lie in [0,1]".into(),
            });
        }
        if beta.iter().any(|b| !(*b > 0.0)) {
            return Err(RegularizerError::Domain {
                what: "beta samples must be strictly positive".into(),
            });
        }
        Ok(Self { alpha, beta })
    }

    /// Coupled linear schedule: `α` from 0 to 1 and `β` rising with it from
    /// `beta_start` to `beta_end` over `stages` samples.
    pub fn coupled_linear(
        stages: usize,
        beta_start: f64,
        beta_end: f64,
    ) -> Result<Self, RegularizerError> {
        if stages < 2 {
            return Err(RegularizerError::Domain {
                what: format!("need at least 2 stages, got {stages}"),
            });
        }
        let alpha: Vec<f64> = (0..stages)
            .map(|i| i as f64 / (stages - 1) as f64)
            .collect();
        let beta: Vec<f64> = alpha
            .iter()
            .map(|a| beta_start + a * (beta_end - beta_start))
            .collect();
        Self::new(alpha, beta)
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
}

/// Effective temperature of a dissipation strength: `T_eff = 1/β`.
pub fn effective_temperature(beta: f64) -> f64 {
    debug_assert!(beta > 0.0);
    1.0 / beta
}

/// Continuation objective `L_α(θ) = (1-α)·L_smooth(θ) + α·L_target(θ)`.
pub fn gnc_objective(
    theta: f64,
    alpha: f64,
    smooth: &impl Fn(f64) -> f64,
    target: &impl Fn(f64) -> f64,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&alpha));
    (1.0 - alpha) * smooth(theta) + alpha * target(theta)
}

/// One recorded continuation stage.
#[derive(Debug, Clone, PartialEq)]
pub struct GncStage {
    pub index: usize,
    pub alpha: f64,
    pub beta: f64,
    pub t_eff: f64,
    pub q: GaussianBelief,
    /// `E_q[L_α] + β·KL(q‖π)` at the end of the stage.
    pub objective: f64,
}

/// Full continuation history.
#[derive(Debug, Clone, PartialEq)]
pub struct GncRun {
    pub stages: Vec<GncStage>,
}

impl GncRun {
    pub fn final_q(&self) -> &GaussianBelief {
        &self.stages.last().expect("runs have at least two stages").q
    }
}

/// Run the continuation: at every schedule sample, take `steps_per_stage`
/// natural-gradient descent steps (with Armijo backtracking) on
/// `E_q[L_α] + β·KL(q‖π)` over the `(μ, τ)` coordinates of `q`.
pub fn run_gnc(
    init: &GaussianBelief,
    schedule: &GncSchedule,
    prior: &GaussianBelief,
    target_fn: &impl Fn(f64) -> f64,
    smooth_fn: &impl Fn(f64) -> f64,
    steps_per_stage: usize,
) -> Result<GncRun, RegularizerError> {
    let (nodes, weights) = gauss_hermite(GH_NODES);
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();

    let expect = |mu: f64, tau: f64, alpha: f64| -> f64 {
        let sigma = 1.0 / tau.sqrt();
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let y = mu + std::f64::consts::SQRT_2 * sigma * x;
            acc += w * gnc_objective(y, alpha, smooth_fn, target_fn);
        }
        acc * inv_sqrt_pi
    };

    let mut q = *init;
    let mut stages = Vec::with_capacity(schedule.len());

    for (k, (&alpha, &beta)) in schedule.alpha.iter().zip(&schedule.beta).enumerate() {
        let objective = |mu: f64, tau: f64| -> f64 {
            expect(mu, tau, alpha)
                + beta * gaussian_kl(&GaussianBelief::new(mu, tau).expect("tau clamped"), prior)
        };

        let mut mu = q.mu();
        let mut tau = q.tau();
        let mut f = objective(mu, tau);
        if !f.is_finite() {
            return Err(RegularizerError::NumericFailure { step: k });
        }

        for _ in 0..steps_per_stage {
            // central differences on the stage objective
            let h_mu = 1e-6 * (1.0 + mu.abs());
            let h_tau = 1e-6 * tau;
            let g_mu = (objective(mu + h_mu, tau) - objective(mu - h_mu, tau)) / (2.0 * h_mu);
            let g_tau = (objective(mu, tau + h_tau) - objective(mu, tau - h_tau)) / (2.0 * h_tau);
            // natural direction under the Fisher metric diag(τ, 1/(2τ²))
            let d_mu = g_mu / tau;
            let d_tau = 2.0 * tau * tau * g_tau;
            let decrease = g_mu * d_mu + g_tau * d_tau;
            if decrease <= 0.0 {
                break;
            }
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let mu_t = mu - step * d_mu;
                let tau_t = (tau - step * d_tau).max(super::optim::POSITIVE_FLOOR);
                let f_t = objective(mu_t, tau_t);
                if f_t.is_finite() && f_t <= f - 1e-4 * step * decrease {
                    mu = mu_t;
                    tau = tau_t;
                    f = f_t;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if !f.is_finite() {
            return Err(RegularizerError::NumericFailure { step: k });
        }
        q = GaussianBelief::new(mu, tau).map_err(RegularizerError::Geometry)?;
        stages.push(GncStage {
            index: k,
            alpha,
            beta,
            t_eff: effective_temperature(beta),
            q,
            objective: f,
        });
    }
    Ok(GncRun { stages })
}

/// Gauss–Hermite nodes and weights for `∫ f(x) e^(-x²) dx ≈ Σ wᵢ f(xᵢ)`.
///
/// Newton iteration on the recurrence for orthonormal Hermite polynomials;
/// exact for polynomials up to degree `2n-1`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..(n + 1) / 2 {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_reproduces_gaussian_moments() {
        let (x, w) = gauss_hermite(GH_NODES);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let moment = |k: u32| -> f64 { x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum() };
        assert!((moment(0) - sqrt_pi).abs() < 1e-13);
        assert!((moment(1)).abs() < 1e-13);
        assert!((moment(2) - sqrt_pi / 2.0).abs() < 1e-13);
        assert!((moment(4) - 3.0 * sqrt_pi / 4.0).abs() < 1e-12);
        // ∫ x^(2k) e^(-x²) = √π (2k-1)!!/2^k; degree 30 is still exact
        let mut dfact = 1.0;
        for j in 1..=15 {
            dfact *= 2.0 * j as f64 - 1.0;
        }
        let expected = sqrt_pi * dfact / 2f64.powi(15);
        let got = moment(30);
        assert!(
            ((got - expected) / expected).abs() < 1e-11,
            "x^30 moment {got} vs {expected}"
        );
    }

    #[test]
    fn objective_endpoints() {
        let smooth = |t: f64| t * t;
        let target = |t: f64| (t * t - 1.0) * (t * t - 1.0);
        assert_eq!(gnc_objective(2.0, 0.0, &smooth, &target), 4.0);
        assert_eq!(gnc_objective(2.0, 1.0, &smooth, &target), 9.0);
        let mid = gnc_objective(1.0, 0.5, &smooth, &target);
        assert!((mid - 0.5).abs() < 1e-15);
    }

    #[test]
    fn schedule_invariants_are_enforced() {
        assert!(GncSchedule::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_ok());
        assert!(GncSchedule::new(vec![0.0], vec![1.0]).is_err());
        assert!(GncSchedule::new(vec![0.5, 1.0], vec![1.0, 1.0]).is_err()); // starts too high
        assert!(GncSchedule::new(vec![0.0, 0.5], vec![1.0, 1.0]).is_err()); // ends too low
        assert!(GncSchedule::new(vec![0.0, 0.6, 0.5, 1.0], vec![1.0; 4]).is_err()); // not monotone
        assert!(GncSchedule::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err()); // beta zero
    }

    #[test]
    fn effective_temperature_examples() {
        assert_eq!(effective_temperature(1.0), 1.0);
        assert_eq!(effective_temperature(4.0), 0.25);
        assert_eq!(effective_temperature(0.1), 10.0);
    }

    #[test]
    fn huge_beta_pins_q_to_the_prior() {
        let init = GaussianBelief::new(1.5, 0.8).unwrap();
        let prior = GaussianBelief::new(-0.5, 2.0).unwrap();
        let schedule = GncSchedule::coupled_linear(6, 1e6, 1e6).unwrap();
        let target = |t: f64| (t * t - 1.0) * (t * t - 1.0);
        let smooth = |t: f64| t * t;
        let run = run_gnc(&init, &schedule, &prior, &target, &smooth, 200).unwrap();
        let d = crate::geometry::gaussian_fr_distance(run.final_q(), &prior);
        assert!(d < 0.01, "β→∞ should pin q to the prior, d = {d}");
    }

    #[test]
    fn shared_minimizer_drives_mean_to_zero() {
        // smooth == target == quadratic bowl at 0 makes the continuation
        // parameter irrelevant, matching the α ≡ 0 configuration.
        let bowl = |t: f64| t * t;
        let init = GaussianBelief::new(2.0, 1.0).unwrap();
        let prior = GaussianBelief::new(0.0, 1.0).unwrap();
        let schedule = GncSchedule::coupled_linear(6, 0.5, 2.0).unwrap();
        let run = run_gnc(&init, &schedule, &prior, &bowl, &bowl, 200).unwrap();
        assert!(
            run.final_q().mu().abs() < 0.01,
            "mean should go to 0, got {}",
            run.final_q().mu()
        );
    }

    #[test]
    fn double_well_lands_in_the_nearest_well() {
        let target = |t: f64| (t * t - 1.0) * (t * t - 1.0);
        // Gaussian-blurred double well at smoothing width s:
        // E[(x²-1)²] for x ~ N(θ, s²) -- single smooth basin for large s.
        let s2 = 1.5_f64;
        let smooth = move |t: f64| {
            let m2 = t * t;
            (m2 * m2 + 6.0 * m2 * s2 + 3.0 * s2 * s2) - 2.0 * (m2 + s2) + 1.0
        };
        let schedule = GncSchedule::coupled_linear(12, 0.02, 0.1).unwrap();
        for &init_mu in &[0.4, -0.4] {
            let init = GaussianBelief::new(init_mu, 1.0).unwrap();
            let prior = GaussianBelief::new(init_mu, 1.0).unwrap();
            let run = run_gnc(&init, &schedule, &prior, &target, &smooth, 300).unwrap();
            let well = init_mu.signum();
            let err = (run.final_q().mu() - well).abs();
            assert!(
                err < 0.05,
                "final mean {} should sit within 0.05 of well {well}",
                run.final_q().mu()
            );
        }
    }
}
