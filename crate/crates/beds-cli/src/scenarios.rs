//! Scenario execution: dispatch the parsed config to the core subsystems,
//! write CSV artifacts and assemble the run report.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use beds_core::dynamics::{
    classify_trajectory, crystallization_index, dissipate_rk4, landauer_cost,
    min_information_rate, min_maintenance_power, BedsState, DissipationParams, Trajectory,
};
use beds_core::geometry::{gaussian_fr_distance, gaussian_geodesic, gaussian_kl, GaussianBelief};
use beds_core::network::{
    network_energy, run_network, topology_diagnostics, Agent, AgentGraph, NetworkHistory,
    NetworkRunParams, Potential, HISTORY_CAPACITY,
};
use beds_core::regularizers::{
    optimize, run_gnc, BedsTarget, GncSchedule, OptimizeMethod, OptimizationRun, ZeroData,
};
use thiserror::Error;

use crate::config::{
    echo_map, MethodKind, ScenarioConfig, ScenarioKind, SeriesMode,
};
use crate::csv::{emit_csv, fmt_f64, Field};
use crate::report::{ReportError, RunReport, SCHEMA_VERSION};

/// Process exit codes of the scenario runner.
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    pub fn exit_code(&self) -> u8 {
        match self {
            ScenarioError::Config(_) => EXIT_CONFIG,
            ScenarioError::Numeric(_) => EXIT_NUMERIC,
            ScenarioError::Io(_) => EXIT_IO,
        }
    }
}

impl From<beds_core::geometry::GeometryError> for ScenarioError {
    fn from(e: beds_core::geometry::GeometryError) -> Self {
        ScenarioError::Numeric(e.to_string())
    }
}

impl From<beds_core::dynamics::DynamicsError> for ScenarioError {
    fn from(e: beds_core::dynamics::DynamicsError) -> Self {
        ScenarioError::Numeric(e.to_string())
    }
}

impl From<beds_core::regularizers::RegularizerError> for ScenarioError {
    fn from(e: beds_core::regularizers::RegularizerError) -> Self {
        ScenarioError::Numeric(e.to_string())
    }
}

impl From<beds_core::network::NetworkError> for ScenarioError {
    fn from(e: beds_core::network::NetworkError) -> Self {
        match e {
            beds_core::network::NetworkError::TimescaleOrdering { .. }
            | beds_core::network::NetworkError::Domain { .. } => {
                ScenarioError::Config(e.to_string())
            }
            other => ScenarioError::Numeric(other.to_string()),
        }
    }
}

fn empty_report(cfg: &ScenarioConfig, out_dir: &Path) -> RunReport {
    RunReport {
        schema_version: SCHEMA_VERSION,
        kind: cfg.kind.name().into(),
        seed: cfg.seed,
        out_dir: out_dir.display().to_string(),
        config: echo_map(cfg),
        metrics: BTreeMap::new(),
        artifacts: Vec::new(),
        wall_time_s: 0.0,
        errors: Vec::new(),
    }
}

/// Run the scenario described by `cfg`, writing artifacts and
/// `report.json` into `out_dir`. On scenario failure the report is still
/// written with the error recorded; the caller maps the error to an exit
/// status.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, ScenarioError> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let mut report = empty_report(cfg, out_dir);
    let result = match &cfg.kind {
        ScenarioKind::Geodesic(_) => run_geodesic(cfg, out_dir, &mut report),
        ScenarioKind::Dissipate(_) => run_dissipate(cfg, out_dir, &mut report),
        ScenarioKind::Optimize(_) => run_optimize(cfg, out_dir, &mut report),
        ScenarioKind::Gnc(_) => run_gnc_scenario(cfg, out_dir, &mut report),
        ScenarioKind::Network(_) => run_network_scenario(cfg, out_dir, &mut report),
        ScenarioKind::Taxonomy(_) => run_taxonomy(cfg, out_dir, &mut report),
        ScenarioKind::Bounds(_) => run_bounds(cfg, out_dir, &mut report),
    };
    report.wall_time_s = started.elapsed().as_secs_f64();
    match result {
        Ok(()) => {
            report.write(out_dir)?;
            Ok(report)
        }
        Err(err) => {
            report.errors.push(ReportError {
                stage: cfg.kind.name().into(),
                message: err.to_string(),
            });
            // artifacts already written stay listed; the report records
            // the failure alongside them
            report.write(out_dir)?;
            Err(err)
        }
    }
}

fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<Field>> {
    traj.times()
        .iter()
        .zip(traj.states())
        .zip(traj.diagnostics())
        .map(|((t, s), d)| {
            vec![
                Field::F64(*t),
                Field::F64(s.spatial()[0].mu()),
                Field::F64(s.spatial()[0].tau()),
                Field::F64(s.temporal().phi()),
                Field::F64(s.temporal().kappa()),
                Field::F64(d.crystallization),
                Field::Str(d.regime.to_string()),
            ]
        })
        .collect()
}

const TRAJECTORY_HEADER: [&str; 7] = ["t", "mu", "tau", "phi", "kappa", "C", "regime"];

fn run_geodesic(cfg: &ScenarioConfig, out_dir: &Path, report: &mut RunReport) -> Result<(), ScenarioError> {
    let ScenarioKind::Geodesic(p) = &cfg.kind else { unreachable!() };
    let a = GaussianBelief::new(p.mu_a, p.tau_a)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let b = GaussianBelief::new(p.mu_b, p.tau_b)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let rows: Vec<Vec<Field>> = (0..p.samples)
        .map(|i| {
            let s = i as f64 / (p.samples - 1) as f64;
            let q = gaussian_geodesic(&a, &b, s);
            vec![
                Field::F64(s),
                Field::F64(q.mu()),
                Field::F64(q.tau()),
                Field::F64(q.sigma()),
                Field::F64(gaussian_fr_distance(&a, &q)),
            ]
        })
        .collect();
    emit_csv(&out_dir.join("geodesic.csv"), &["s", "mu", "tau", "sigma", "dist_from_a"], &rows)?;
    report.artifacts.push("geodesic.csv".into());
    report.metric_f64("distance", gaussian_fr_distance(&a, &b));
    report.metric_f64("kl_ab", gaussian_kl(&a, &b));
    report.metric_f64("kl_ba", gaussian_kl(&b, &a));
    Ok(())
}

fn run_dissipate(cfg: &ScenarioConfig, out_dir: &Path, report: &mut RunReport) -> Result<(), ScenarioError> {
    let ScenarioKind::Dissipate(p) = &cfg.kind else { unreachable!() };
    let state = BedsState::scalar(p.mu0, p.tau0, p.phi0, p.kappa0)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let params = DissipationParams::new(p.gamma, p.gamma_kappa, p.kt)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let traj = dissipate_rk4(&state, &params, p.t_end, p.dt)?;
    emit_csv(&out_dir.join("trajectory.csv"), &TRAJECTORY_HEADER, &trajectory_rows(&traj))?;
    report.artifacts.push("trajectory.csv".into());
    let last = traj.last_state().expect("trajectory is non-empty");
    let diag = traj.diagnostics().last().expect("diagnostics recorded");
    report.metric_f64("final_c", diag.crystallization);
    report.metric_str("final_regime", diag.regime.to_string());
    report.metric_f64("final_tau", last.spatial()[0].tau());
    report.metric_f64("final_kappa", last.temporal().kappa());
    Ok(())
}

fn run_optimize(cfg: &ScenarioConfig, out_dir: &Path, report: &mut RunReport) -> Result<(), ScenarioError> {
    let ScenarioKind::Optimize(p) = &cfg.kind else { unreachable!() };
    let init = BedsState::scalar(p.mu0, p.tau0, p.phi0, p.kappa0)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let target = BedsTarget::new(
        BedsState::scalar(p.mu_star, p.tau_star, p.phi_star, p.kappa_star)
            .map_err(|e| ScenarioError::Config(e.to_string()))?,
    );
    let method = match p.method {
        MethodKind::Plain => OptimizeMethod::Plain,
        MethodKind::Natural => OptimizeMethod::Natural,
    };
    let initial_distance = init.distance(&target.state_star)?;
    let run: OptimizationRun = optimize(&init, &target, &ZeroData, p.lambda, p.eta, p.steps, method)?;
    let rows: Vec<Vec<Field>> = trajectory_rows(&run.trajectory)
        .into_iter()
        .zip(&run.losses)
        .map(|(mut row, loss)| {
            row.extend([
                Field::F64(loss.spatial_mu),
                Field::F64(loss.spatial_tau),
                Field::F64(loss.temporal_phi),
                Field::F64(loss.temporal_kappa),
                Field::F64(loss.data),
                Field::F64(loss.total),
            ]);
            row
        })
        .collect();
    let header = [
        "t", "mu", "tau", "phi", "kappa", "C", "regime", "spatial_mu", "spatial_tau",
        "temporal_phi", "temporal_kappa", "data", "total",
    ];
    emit_csv(&out_dir.join("optimize.csv"), &header, &rows)?;
    report.artifacts.push("optimize.csv".into());
    let final_distance = run.final_state().distance(&target.state_star)?;
    report.metric_f64("initial_distance", initial_distance);
    report.metric_f64("final_distance", final_distance);
    report.metric_f64("final_c", crystallization_index(run.final_state()));
    report.metric_f64("final_total", run.losses.last().expect("non-empty").total);
    Ok(())
}

fn run_gnc_scenario(cfg: &ScenarioConfig, out_dir: &Path, report: &mut RunReport) -> Result<(), ScenarioError> {
    let ScenarioKind::Gnc(p) = &cfg.kind else { unreachable!() };
    let init = GaussianBelief::new(p.mu0, p.tau0)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let prior = GaussianBelief::new(p.prior_mu, p.prior_tau)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let schedule = GncSchedule::coupled_linear(p.stages, p.beta_start, p.beta_end)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    // double-well target with its Gaussian-blurred surrogate
    let target = |t: f64| (t * t - 1.0) * (t * t - 1.0);
    let s2 = p.smooth_sigma2;
    let smooth = move |t: f64| {
        let m2 = t * t;
        (m2 * m2 + 6.0 * m2 * s2 + 3.0 * s2 * s2) - 2.0 * (m2 + s2) + 1.0
    };
    let run = run_gnc(&init, &schedule, &prior, &target, &smooth, p.steps_per_stage)?;
    let rows: Vec<Vec<Field>> = run
        .stages
        .iter()
        .map(|st| {
            vec![
                Field::U64(st.index as u64),
                Field::F64(st.alpha),
                Field::F64(st.beta),
                Field::F64(st.t_eff),
                Field::F64(st.q.mu()),
                Field::F64(st.q.tau()),
                Field::F64(st.objective),
            ]
        })
        .collect();
    emit_csv(
        &out_dir.join("gnc.csv"),
        &["stage", "alpha", "beta", "t_eff", "mu", "tau", "objective"],
        &rows,
    )?;
    report.artifacts.push("gnc.csv".into());
    let q = run.final_q();
    report.metric_f64("final_mu", q.mu());
    report.metric_f64("final_tau", q.tau());
    report.metric_f64("final_t_eff", run.stages.last().expect("non-empty").t_eff);
    report.metric_f64("distance_to_prior", gaussian_fr_distance(q, &prior));
    Ok(())
}

/// Two-cluster graph: `agents_per_cluster` agents around each data center,
/// fully connected start with optimistic agreement seeds.
pub fn build_network_graph(p: &crate::config::NetworkParams) -> Result<AgentGraph, ScenarioError> {
    let n = 2 * p.agents_per_cluster;
    let mut agents = Vec::with_capacity(n);
    for id in 0..n {
        let center = if id < p.agents_per_cluster {
            p.data_mu_a
        } else {
            p.data_mu_b
        };
        agents.push(Agent {
            id,
            belief: GaussianBelief::new(p.prior_mu, p.prior_tau)
                .map_err(|e| ScenarioError::Config(e.to_string()))?,
            prior: GaussianBelief::new(p.prior_mu, p.prior_tau)
                .map_err(|e| ScenarioError::Config(e.to_string()))?,
            data_likelihood: GaussianBelief::new(center, p.data_tau)
                .map_err(|e| ScenarioError::Config(e.to_string()))?,
        });
    }
    let mut potentials = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            potentials.push(
                Potential::with_seeded_history(i, j, p.psi0, p.history_seed, HISTORY_CAPACITY)
                    .map_err(|e| ScenarioError::Config(e.to_string()))?,
            );
        }
    }
    AgentGraph::new(agents, potentials).map_err(|e| ScenarioError::Config(e.to_string()))
}

fn run_network_scenario(cfg: &ScenarioConfig, out_dir: &Path, report: &mut RunReport) -> Result<(), ScenarioError> {
    let ScenarioKind::Network(p) = &cfg.kind else { unreachable!() };
    let graph = build_network_graph(p)?;
    let params = NetworkRunParams {
        rounds: p.rounds,
        potential_every: p.potential_every,
        prune_every: p.prune_every,
        eta_psi: p.eta_psi,
        eps_prune: p.eps_prune,
        gamma_round: p.gamma_round,
        temperature: p.temperature,
        seed: cfg.seed,
        belief_jitter: p.belief_jitter,
    };
    let history: NetworkHistory = run_network(&graph, &params)?;

    let n_agents = graph.agents().len();
    let mut header: Vec<String> = vec![
        "round".into(),
        "E_data".into(),
        "E_interact".into(),
        "E_prior".into(),
        "E_total".into(),
        "edge_count".into(),
    ];
    for id in 0..n_agents {
        header.push(format!("mu_{id}"));
        header.push(format!("tau_{id}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<Field>> = history
        .snapshots
        .iter()
        .map(|s| {
            let mut row = vec![
                Field::U64(s.round),
                Field::F64(s.energy.data),
                Field::F64(s.energy.interact),
                Field::F64(s.energy.prior),
                Field::F64(s.energy.total),
                Field::U64(s.edge_count as u64),
            ];
            for (_, b) in &s.beliefs {
                row.push(Field::F64(b.mu()));
                row.push(Field::F64(b.tau()));
            }
            row
        })
        .collect();
    emit_csv(&out_dir.join("network.csv"), &header_refs, &rows)?;
    report.artifacts.push("network.csv".into());

    // edge-list snapshot of the final topology: "i j psi"
    let mut edges = String::new();
    for pot in history.final_graph.potentials() {
        let (i, j) = pot.endpoints();
        edges.push_str(&format!("{i} {j} {}\n", fmt_f64(pot.psi())));
    }
    std::fs::write(out_dir.join("edges_final.txt"), edges)?;
    report.artifacts.push("edges_final.txt".into());

    let half = p.agents_per_cluster;
    let (mut inter, mut intra_a, mut intra_b) = (0u64, 0u64, 0u64);
    for pot in history.final_graph.potentials() {
        let (i, j) = pot.endpoints();
        match ((i < half), (j < half)) {
            (true, true) => intra_a += 1,
            (false, false) => intra_b += 1,
            _ => inter += 1,
        }
    }
    let diag = topology_diagnostics(&history.final_graph);
    let final_energy = network_energy(&history.final_graph, p.temperature);
    report.metric_u64("edge_count", history.final_graph.edge_count() as u64);
    report.metric_u64("inter_edges", inter);
    report.metric_u64("intra_a_edges", intra_a);
    report.metric_u64("intra_b_edges", intra_b);
    report.metric_f64("e_total_initial", history.snapshots[0].energy.total);
    report.metric_f64("e_total_final", final_energy.total);
    report.metric_f64("sparsity", diag.sparsity);
    report.metric_f64("mean_clustering", diag.mean_clustering);
    Ok(())
}

fn run_taxonomy(cfg: &ScenarioConfig, out_dir: &Path, report: &mut RunReport) -> Result<(), ScenarioError> {
    let ScenarioKind::Taxonomy(p) = &cfg.kind else { unreachable!() };
    let series = |mode: SeriesMode, base: f64, i: usize| -> f64 {
        match mode {
            SeriesMode::Constant => base,
            SeriesMode::Oscillate => {
                base * (1.0 + p.amplitude * (std::f64::consts::TAU * i as f64 / p.period).sin())
            }
        }
    };
    let mut traj = Trajectory::new();
    for i in 0..p.samples {
        let tau = series(p.tau_mode, p.tau_base, i);
        let kappa = series(p.kappa_mode, p.kappa_base, i);
        traj.push(i as f64, BedsState::scalar(0.0, tau, 0.0, kappa)?)
            .map_err(ScenarioError::from)?;
    }
    emit_csv(&out_dir.join("trajectory.csv"), &TRAJECTORY_HEADER, &trajectory_rows(&traj))?;
    report.artifacts.push("trajectory.csv".into());
    let label = classify_trajectory(&traj, p.window, p.tol)?;
    report.metric_str("cls", label.cls.to_string());
    report.metric_str(
        "tau_regime",
        format!("{:?}", label.tau_regime).to_lowercase(),
    );
    report.metric_str(
        "kappa_regime",
        format!("{:?}", label.kappa_regime).to_lowercase(),
    );
    report.metric_str("tau_class", label.tau_class().to_string());
    report.metric_str("kappa_class", label.kappa_class().to_string());
    Ok(())
}

fn run_bounds(cfg: &ScenarioConfig, out_dir: &Path, report: &mut RunReport) -> Result<(), ScenarioError> {
    let ScenarioKind::Bounds(p) = &cfg.kind else { unreachable!() };
    let info_rate = min_information_rate(p.gamma, p.tau_star);
    let landauer = landauer_cost(1.0, p.kt);
    let p_min = min_maintenance_power(p.gamma, p.tau_star, p.kt);
    let erasure = landauer_cost(p.bits, p.kt);
    let rows = vec![vec![
        Field::F64(p.gamma),
        Field::F64(p.tau_star),
        Field::F64(p.kt),
        Field::F64(info_rate),
        Field::F64(landauer),
        Field::F64(p_min),
    ]];
    emit_csv(
        &out_dir.join("bounds.csv"),
        &["gamma", "tau_star", "kT", "info_rate_bits", "landauer_per_bit", "p_min"],
        &rows,
    )?;
    report.artifacts.push("bounds.csv".into());
    report.metric_f64("p_min", p_min);
    report.metric_f64("info_rate_bits", info_rate);
    report.metric_f64("landauer_per_bit", landauer);
    report.metric_f64("erasure_energy", erasure);
    Ok(())
}
