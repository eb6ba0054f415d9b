//! Multi-agent belief networks: precision-weighted fusion, the three-term
//! interaction energy, synchronous belief rounds, agreement-driven
//! potential learning, topology pruning and the hierarchical energy budget.
//!
//! Learning happens on three timescales: beliefs every round (fast),
//! coupling potentials every few rounds (medium), and the graph topology
//! through pruning (slow).
//!
//! Repeated naive fusion would grow precision without bound, so each round
//! rebuilds every belief from its prior, its data likelihood and the
//! current neighbor messages instead of compounding onto the previous
//! belief. Rounds are synchronous and double-buffered: all reads see the
//! pre-round state.

mod diagnostics;
mod hierarchy;

pub use diagnostics::{topology_diagnostics, TopologyDiagnostics};
pub use hierarchy::{
    crystallize_level, geometric_energy_budget, total_maintenance_energy, EnergyBudget, Hierarchy,
    HierarchyLevel,
};

use std::collections::VecDeque;

use rand::Rng;
use thiserror::Error;

use crate::geometry::{gaussian_fr_distance, gaussian_kl, GaussianBelief, GeometryError};
use crate::rng::stream;

/// Agreement-history window capacity.
pub const HISTORY_CAPACITY: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("duplicate agent id {id}")]
    DuplicateAgent { id: usize },
    #[error("edge ({i},{j}) is invalid: {reason}")]
    InvalidEdge { i: usize, j: usize, reason: String },
    #[error("insufficient agreement history: {reason}")]
    InsufficientHistory { reason: String },
    #[error("timescale ordering violated: potential_every={potential_every} must not exceed prune_every={prune_every}")]
    TimescaleOrdering {
        potential_every: usize,
        prune_every: usize,
    },
    #[error("hierarchy diverges: ratio r={r} must lie in (0,1)")]
    DivergentRatio { r: f64 },
    #[error("parameter out of domain: {what}")]
    Domain { what: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One agent: current belief `q`, inherited prior `π` and local
/// observation summary `p_data`.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: usize,
    pub belief: GaussianBelief,
    pub prior: GaussianBelief,
    pub data_likelihood: GaussianBelief,
}

/// Undirected coupling between agents `i < j` with strength `ψ ≥ 0` and a
/// bounded agreement history.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    i: usize,
    j: usize,
    psi: f64,
    history: VecDeque<f64>,
}

impl Potential {
    pub fn new(a: usize, b: usize, psi: f64) -> Result<Self, NetworkError> {
        if a == b {
            return Err(NetworkError::InvalidEdge {
                i: a,
                j: b,
                reason: "self-loop".into(),
            });
        }
        if !(psi >= 0.0) {
            return Err(NetworkError::InvalidEdge {
                i: a,
                j: b,
                reason: format!("psi must be >= 0, got {psi}"),
            });
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Ok(Self {
            i,
            j,
            psi,
            history: VecDeque::with_capacity(HISTORY_CAPACITY),
        })
    }

    /// Potential with the agreement window pre-filled with `value`,
    /// `count` times (capped at the window capacity).
    pub fn with_seeded_history(
        a: usize,
        b: usize,
        psi: f64,
        value: f64,
        count: usize,
    ) -> Result<Self, NetworkError> {
        let mut p = Self::new(a, b, psi)?;
        for _ in 0..count.min(HISTORY_CAPACITY) {
            p.record_agreement(value);
        }
        Ok(p)
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn history(&self) -> &VecDeque<f64> {
        &self.history
    }

    fn record_agreement(&mut self, value: f64) {
        if self.history.len() == HISTORY_CAPACITY {
            self.history.pop_front();
        }
        self.history.push_back(value);
    }

    fn baseline(&self) -> Option<f64> {
        if self.history.is_empty() {
            None
        } else {
            Some(self.history.iter().sum::<f64>() / self.history.len() as f64)
        }
    }
}

/// Agents plus learned coupling potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentGraph {
    agents: Vec<Agent>,
    potentials: Vec<Potential>,
    round: u64,
    last_potential_round: Option<u64>,
}

impl AgentGraph {
    pub fn new(agents: Vec<Agent>, potentials: Vec<Potential>) -> Result<Self, NetworkError> {
        let mut seen = std::collections::BTreeSet::new();
        for a in &agents {
            if !seen.insert(a.id) {
                return Err(NetworkError::DuplicateAgent { id: a.id });
            }
        }
        let mut edges = std::collections::BTreeSet::new();
        for p in &potentials {
            if !seen.contains(&p.i) || !seen.contains(&p.j) {
                return Err(NetworkError::InvalidEdge {
                    i: p.i,
                    j: p.j,
                    reason: "references a missing agent".into(),
                });
            }
            if !edges.insert((p.i, p.j)) {
                return Err(NetworkError::InvalidEdge {
                    i: p.i,
                    j: p.j,
                    reason: "duplicate edge".into(),
                });
            }
        }
        Ok(Self {
            agents,
            potentials,
            round: 0,
            last_potential_round: None,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn potentials(&self) -> &[Potential] {
        &self.potentials
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn edge_count(&self) -> usize {
        self.potentials.len()
    }

    fn agent_index(&self, id: usize) -> usize {
        self.agents
            .iter()
            .position(|a| a.id == id)
            .expect("potentials reference existing agents")
    }
}

/// Precision-weighted fusion: `τ = τₐ + τᵦ`, `μ = (τₐμₐ + τᵦμᵦ)/τ`.
/// Equivalent to multiplying the two Gaussian densities and renormalizing.
pub fn fuse(a: &GaussianBelief, b: &GaussianBelief) -> GaussianBelief {
    let tau = a.tau() + b.tau();
    let mu = (a.tau() * a.mu() + b.tau() * b.mu()) / tau;
    GaussianBelief::new(mu, tau).expect("sum of positive precisions is positive")
}

/// Three-term network energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkEnergy {
    /// Σᵢ KL(qᵢ ‖ pᵢ_data)
    pub data: f64,
    /// Σ_edges ψᵢⱼ·d_F²(qᵢ, qⱼ)
    pub interact: f64,
    /// Σᵢ KL(qᵢ ‖ πᵢ)
    pub prior: f64,
    pub total: f64,
    /// Gibbs temperature; accepted for the log-weight only, the energy
    /// terms themselves are unscaled.
    pub temperature: f64,
}

impl NetworkEnergy {
    /// Unnormalized Gibbs log-weight `-E/T`.
    pub fn gibbs_log_weight(&self) -> f64 {
        -self.total / self.temperature
    }
}

/// Evaluate the three-term energy of the current beliefs.
pub fn network_energy(g: &AgentGraph, temperature: f64) -> NetworkEnergy {
    debug_assert!(temperature > 0.0);
    let mut data = 0.0;
    let mut prior = 0.0;
    for a in &g.agents {
        data += gaussian_kl(&a.belief, &a.data_likelihood);
        prior += gaussian_kl(&a.belief, &a.prior);
    }
    let mut interact = 0.0;
    for p in &g.potentials {
        let qi = &g.agents[g.agent_index(p.i)].belief;
        let qj = &g.agents[g.agent_index(p.j)].belief;
        let d = gaussian_fr_distance(qi, qj);
        interact += p.psi * d * d;
    }
    NetworkEnergy {
        data,
        interact,
        prior,
        total: data + interact + prior,
        temperature,
    }
}

/// One synchronous belief round.
///
/// Every agent rebuilds its belief from `prior ⊕ data ⊕ messages`, where
/// the message from neighbor `j` carries `(μⱼ, ψᵢⱼ·τⱼ)` — the coupling
/// scales message precision, so `ψ = 0` transmits nothing. All messages
/// read the pre-round beliefs. The new beliefs' pairwise agreements
/// `exp(-d_F²)` are appended to each edge's history, and the round counter
/// increments.
pub fn belief_round(g: &AgentGraph) -> AgentGraph {
    belief_round_damped(g, 0.0)
}

/// [`belief_round`] with per-round dissipation at rate `γ ≥ 0`: the belief
/// precision a neighbor transmits decays to `e^(-2γ)·τⱼ` between rounds.
///
/// Carried precision would otherwise grow without bound whenever the
/// coupling into an agent sums above one, dragging the whole network into
/// consensus regardless of the data. `γ = 0` recovers [`belief_round`].
pub fn belief_round_damped(g: &AgentGraph, gamma_round: f64) -> AgentGraph {
    debug_assert!(gamma_round >= 0.0);
    let discount = (-2.0 * gamma_round).exp();
    let mut next = g.clone();
    for (idx, agent) in g.agents.iter().enumerate() {
        // information-form accumulation over prior, data and messages
        let mut tau = agent.prior.tau() + agent.data_likelihood.tau();
        let mut mu_tau =
            agent.prior.tau() * agent.prior.mu() + agent.data_likelihood.tau() * agent.data_likelihood.mu();
        for p in &g.potentials {
            let other = if p.i == agent.id {
                Some(p.j)
            } else if p.j == agent.id {
                Some(p.i)
            } else {
                None
            };
            if let Some(jid) = other {
                let neighbor = &g.agents[g.agent_index(jid)];
                let msg_tau = p.psi * discount * neighbor.belief.tau();
                tau += msg_tau;
                mu_tau += msg_tau * neighbor.belief.mu();
            }
        }
        next.agents[idx].belief =
            GaussianBelief::new(mu_tau / tau, tau).expect("prior precision keeps tau positive");
    }
    for p in next.potentials.iter_mut() {
        let qi = &next.agents[next.agents.iter().position(|a| a.id == p.i).unwrap()].belief;
        let qj = &next.agents[next.agents.iter().position(|a| a.id == p.j).unwrap()].belief;
        let d = gaussian_fr_distance(qi, qj);
        p.record_agreement((-d * d).exp());
    }
    next.round = g.round + 1;
    next
}

/// Baseline estimator for potential updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    /// Running mean of the edge's agreement window.
    RunningMean,
}

/// Medium-timescale potential learning.
///
/// For every edge: `agreement = exp(-d_F²(qᵢ, qⱼ))` of the current
/// beliefs, and `ψ ← max(0, ψ + η·(agreement - baseline))` with the
/// baseline taken as the running mean of the edge's agreement history.
/// Requires at least one belief round since the last update (or since
/// construction), which is what populates the histories.
pub fn potential_update(
    g: &AgentGraph,
    eta_psi: f64,
    baseline_mode: BaselineMode,
) -> Result<AgentGraph, NetworkError> {
    if !(eta_psi >= 0.0) {
        return Err(NetworkError::Domain {
            what: format!("eta_psi must be >= 0, got {eta_psi}"),
        });
    }
    if g.round == 0 {
        return Err(NetworkError::InsufficientHistory {
            reason: "no belief round has run yet".into(),
        });
    }
    if g.last_potential_round == Some(g.round) {
        return Err(NetworkError::InsufficientHistory {
            reason: format!("no belief round since the last update (round {})", g.round),
        });
    }
    let mut next = g.clone();
    for p in next.potentials.iter_mut() {
        let qi = &g.agents[g.agent_index(p.i)].belief;
        let qj = &g.agents[g.agent_index(p.j)].belief;
        let d = gaussian_fr_distance(qi, qj);
        let agreement = (-d * d).exp();
        let baseline = match baseline_mode {
            BaselineMode::RunningMean => {
                p.baseline().ok_or_else(|| NetworkError::InsufficientHistory {
                    reason: format!("edge ({},{}) has an empty agreement history", p.i, p.j),
                })?
            }
        };
        p.record_agreement(agreement);
        p.psi = (p.psi + eta_psi * (agreement - baseline)).max(0.0);
    }
    next.last_potential_round = Some(g.round);
    Ok(next)
}

/// Slow-timescale topology learning: drop every edge with `ψ < ε`.
/// Agents are never removed; idempotent.
pub fn prune_topology(g: &AgentGraph, eps_prune: f64) -> AgentGraph {
    debug_assert!(eps_prune > 0.0);
    let mut next = g.clone();
    next.potentials.retain(|p| p.psi >= eps_prune);
    next
}

/// Parameters of an orchestrated network run.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRunParams {
    pub rounds: usize,
    /// Potential update cadence (medium timescale).
    pub potential_every: usize,
    /// Pruning cadence (slow timescale); must be ≥ `potential_every`.
    pub prune_every: usize,
    pub eta_psi: f64,
    pub eps_prune: f64,
    /// Per-round belief dissipation rate fed to [`belief_round_damped`];
    /// 0 runs the undamped rounds.
    pub gamma_round: f64,
    /// Gibbs temperature recorded with every energy snapshot.
    pub temperature: f64,
    /// Stream seed; drives the optional initial belief jitter.
    pub seed: u64,
    /// Standard deviation of the one-time Gaussian jitter applied to the
    /// initial belief means (0 disables it).
    pub belief_jitter: f64,
}

/// One recorded round.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot {
    pub round: u64,
    pub energy: NetworkEnergy,
    pub edge_count: usize,
    pub beliefs: Vec<(usize, GaussianBelief)>,
}

/// Full run history plus the final graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkHistory {
    pub snapshots: Vec<NetworkSnapshot>,
    pub final_graph: AgentGraph,
}

fn snapshot(g: &AgentGraph, temperature: f64) -> NetworkSnapshot {
    NetworkSnapshot {
        round: g.round,
        energy: network_energy(g, temperature),
        edge_count: g.edge_count(),
        beliefs: g.agents.iter().map(|a| (a.id, a.belief)).collect(),
    }
}

/// Run the three-timescale loop: belief rounds every round, potential
/// updates every `potential_every` rounds, pruning every `prune_every`
/// rounds. Deterministic given the graph, parameters and seed; the
/// history starts with the initial snapshot (so `rounds = 0` records just
/// that).
pub fn run_network(g: &AgentGraph, params: &NetworkRunParams) -> Result<NetworkHistory, NetworkError> {
    if params.potential_every == 0
        || params.prune_every == 0
        || params.potential_every > params.prune_every
    {
        return Err(NetworkError::TimescaleOrdering {
            potential_every: params.potential_every,
            prune_every: params.prune_every,
        });
    }
    if !(params.temperature > 0.0) || !(params.gamma_round >= 0.0) {
        return Err(NetworkError::Domain {
            what: format!(
                "need temperature > 0 and gamma_round >= 0 (got {}, {})",
                params.temperature, params.gamma_round
            ),
        });
    }
    let mut graph = g.clone();
    if params.belief_jitter > 0.0 {
        let mut rng = stream(params.seed, "network.belief_jitter");
        for a in graph.agents.iter_mut() {
            // Box–Muller keeps the dependency surface small
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            a.belief = GaussianBelief::new(a.belief.mu() + params.belief_jitter * z, a.belief.tau())
                .expect("jitter keeps tau untouched");
        }
    }
    let mut history = Vec::with_capacity(params.rounds + 1);
    history.push(snapshot(&graph, params.temperature));
    for r in 1..=params.rounds {
        graph = belief_round_damped(&graph, params.gamma_round);
        if r % params.potential_every == 0 {
            graph = potential_update(&graph, params.eta_psi, BaselineMode::RunningMean)?;
        }
        if r % params.prune_every == 0 {
            graph = prune_topology(&graph, params.eps_prune);
        }
        history.push(snapshot(&graph, params.temperature));
    }
    Ok(NetworkHistory {
        snapshots: history,
        final_graph: graph,
    })
}
