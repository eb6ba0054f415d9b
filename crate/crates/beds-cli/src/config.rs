//! Scenario configuration: a line-oriented `key = value` format with one
//! `[kind]` section header naming the scenario.
//!
//! ```text
//! [dissipate]
//! seed = 42
//! out_dir = runs/dissipate
//! tau0 = 4.0
//! kappa0 = 2.0
//! gamma = 0.5
//! gamma_kappa = 1.0
//! t_end = 5.0
//! dt = 0.001
//! ```
//!
//! Blank lines and `#` comments are ignored. Parsing validates everything
//! and reports *all* problems, each with its line number. `render` emits
//! the canonical text for a config; `parse_config(render(cfg))` returns
//! `cfg` exactly (floats are printed with round-trip precision).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::csv::fmt_f64;

/// One validation problem with its position in the input.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}: key '{k}': {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key '{k}': {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Plain,
    Natural,
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodKind::Plain => "plain",
            MethodKind::Natural => "natural",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMode {
    Constant,
    Oscillate,
}

impl fmt::Display for SeriesMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesMode::Constant => "constant",
            SeriesMode::Oscillate => "oscillate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicParams {
    pub mu_a: f64,
    pub tau_a: f64,
    pub mu_b: f64,
    pub tau_b: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipateParams {
    pub mu0: f64,
    pub tau0: f64,
    pub phi0: f64,
    pub kappa0: f64,
    pub gamma: f64,
    pub gamma_kappa: f64,
    pub kt: f64,
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeParams {
    pub mu0: f64,
    pub tau0: f64,
    pub phi0: f64,
    pub kappa0: f64,
    pub mu_star: f64,
    pub tau_star: f64,
    pub phi_star: f64,
    pub kappa_star: f64,
    pub lambda: f64,
    pub eta: f64,
    pub steps: usize,
    pub method: MethodKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GncParams {
    pub mu0: f64,
    pub tau0: f64,
    pub prior_mu: f64,
    pub prior_tau: f64,
    pub stages: usize,
    pub steps_per_stage: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub smooth_sigma2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub agents_per_cluster: usize,
    pub data_mu_a: f64,
    pub data_mu_b: f64,
    pub data_tau: f64,
    pub prior_mu: f64,
    pub prior_tau: f64,
    pub psi0: f64,
    pub history_seed: f64,
    pub rounds: usize,
    pub potential_every: usize,
    pub prune_every: usize,
    pub eta_psi: f64,
    pub eps_prune: f64,
    pub gamma_round: f64,
    pub temperature: f64,
    pub belief_jitter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaxonomyParams {
    pub samples: usize,
    pub window: usize,
    pub tol: f64,
    pub tau_base: f64,
    pub kappa_base: f64,
    pub tau_mode: SeriesMode,
    pub kappa_mode: SeriesMode,
    pub amplitude: f64,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsParams {
    pub gamma: f64,
    pub tau_star: f64,
    pub kt: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    Geodesic(GeodesicParams),
    Dissipate(DissipateParams),
    Optimize(OptimizeParams),
    Gnc(GncParams),
    Network(NetworkParams),
    Taxonomy(TaxonomyParams),
    Bounds(BoundsParams),
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Geodesic(_) => "geodesic",
            ScenarioKind::Dissipate(_) => "dissipate",
            ScenarioKind::Optimize(_) => "optimize",
            ScenarioKind::Gnc(_) => "gnc",
            ScenarioKind::Network(_) => "network",
            ScenarioKind::Taxonomy(_) => "taxonomy",
            ScenarioKind::Bounds(_) => "bounds",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub kind: ScenarioKind,
}

/// Raw `key = value` entries with their line numbers, plus error capture.
struct EntryMap {
    entries: BTreeMap<String, (usize, String)>,
    consumed: std::collections::BTreeSet<String>,
    errors: Vec<ConfigError>,
}

impl EntryMap {
    fn error(&mut self, line: Option<usize>, key: Option<&str>, message: String) {
        self.errors.push(ConfigError {
            line,
            key: key.map(str::to_owned),
            message,
        });
    }

    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.consumed.insert(key.to_owned());
        self.entries.get(key).cloned()
    }

    fn f64_req(&mut self, key: &str) -> f64 {
        match self.raw(key) {
            None => {
                self.error(None, Some(key), "missing required key".into());
                f64::NAN
            }
            Some((line, raw)) => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    self.error(line.into(), Some(key), format!("expected a finite number, got '{raw}'"));
                    f64::NAN
                }
            },
        }
    }

    fn f64_opt(&mut self, key: &str, default: f64) -> f64 {
        match self.raw(key) {
            None => default,
            Some((line, raw)) => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    self.error(line.into(), Some(key), format!("expected a finite number, got '{raw}'"));
                    default
                }
            },
        }
    }

    fn usize_req(&mut self, key: &str) -> usize {
        match self.raw(key) {
            None => {
                self.error(None, Some(key), "missing required key".into());
                0
            }
            Some((line, raw)) => match raw.parse::<usize>() {
                Ok(v) => v,
                Err(_) => {
                    self.error(line.into(), Some(key), format!("expected a nonnegative integer, got '{raw}'"));
                    0
                }
            },
        }
    }

    fn usize_opt(&mut self, key: &str, default: usize) -> usize {
        match self.raw(key) {
            None => default,
            Some((line, raw)) => match raw.parse::<usize>() {
                Ok(v) => v,
                Err(_) => {
                    self.error(line.into(), Some(key), format!("expected a nonnegative integer, got '{raw}'"));
                    default
                }
            },
        }
    }

    fn u64_opt(&mut self, key: &str, default: u64) -> u64 {
        match self.raw(key) {
            None => default,
            Some((line, raw)) => match raw.parse::<u64>() {
                Ok(v) => v,
                Err(_) => {
                    self.error(line.into(), Some(key), format!("expected a nonnegative integer, got '{raw}'"));
                    default
                }
            },
        }
    }

    fn string_opt(&mut self, key: &str) -> Option<(usize, String)> {
        self.raw(key)
    }

    /// The value must be nonnegative (a rate).
    fn rate(&mut self, key: &str, required: bool, default: f64) -> f64 {
        let (v, line) = if required {
            (self.f64_req(key), self.line_of(key))
        } else {
            (self.f64_opt(key, default), self.line_of(key))
        };
        if v.is_finite() && v < 0.0 {
            self.error(line, Some(key), format!("rate must be >= 0, got {v}"));
        }
        v
    }

    /// The value must be strictly positive (a tolerance/scale).
    fn positive(&mut self, key: &str, required: bool, default: f64) -> f64 {
        let (v, line) = if required {
            (self.f64_req(key), self.line_of(key))
        } else {
            (self.f64_opt(key, default), self.line_of(key))
        };
        if v.is_finite() && v <= 0.0 {
            self.error(line, Some(key), format!("must be > 0, got {v}"));
        }
        v
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(l, _)| *l)
    }

    fn finish_unknown_keys(&mut self) {
        let unknown: Vec<(String, usize)> = self
            .entries
            .iter()
            .filter(|(k, _)| !self.consumed.contains(*k))
            .map(|(k, (l, _))| (k.clone(), *l))
            .collect();
        for (k, l) in unknown {
            self.error(Some(l), Some(&k), "unknown key for this scenario kind".into());
        }
    }
}

/// Parse and validate; returns either the config or every problem found.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let mut errors = Vec::new();
    let mut section: Option<(usize, String)> = None;
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if let Some((first, _)) = &section {
                errors.push(ConfigError {
                    line: Some(lineno),
                    key: None,
                    message: format!("second section header; first was on line {first}"),
                });
            } else {
                section = Some((lineno, name.trim().to_owned()));
            }
            continue;
        }
        match line.split_once('=') {
            None => errors.push(ConfigError {
                line: Some(lineno),
                key: None,
                message: format!("expected 'key = value', got '{line}'"),
            }),
            Some((k, v)) => {
                let key = k.trim().to_owned();
                let value = v.trim().to_owned();
                if let Some((prev_line, _)) = entries.get(&key) {
                    errors.push(ConfigError {
                        line: Some(lineno),
                        key: Some(key.clone()),
                        message: format!("duplicate key; first defined on line {prev_line}"),
                    });
                } else {
                    entries.insert(key, (lineno, value));
                }
            }
        }
    }

    let (_, kind_name) = match &section {
        Some(s) => s.clone(),
        None => {
            errors.push(ConfigError {
                line: None,
                key: None,
                message: "missing [kind] section header".into(),
            });
            if !errors.is_empty() {
                return Err(errors);
            }
            unreachable!()
        }
    };

    let mut map = EntryMap {
        entries,
        consumed: Default::default(),
        errors,
    };
    let seed = map.u64_opt("seed", 0);
    let out_dir = map.string_opt("out_dir").map(|(_, s)| PathBuf::from(s));

    let kind = match kind_name.as_str() {
        "geodesic" => Some(ScenarioKind::Geodesic(GeodesicParams {
            mu_a: map.f64_req("mu_a"),
            tau_a: map.positive("tau_a", true, f64::NAN),
            mu_b: map.f64_req("mu_b"),
            tau_b: map.positive("tau_b", true, f64::NAN),
            samples: {
                let s = map.usize_opt("samples", 101);
                if s < 2 {
                    map.error(map.line_of("samples"), Some("samples"), "need at least 2 samples".into());
                }
                s
            },
        })),
        "dissipate" => Some(ScenarioKind::Dissipate(DissipateParams {
            mu0: map.f64_opt("mu0", 0.0),
            tau0: map.positive("tau0", true, f64::NAN),
            phi0: map.f64_opt("phi0", 0.0),
            kappa0: map.rate("kappa0", true, f64::NAN),
            gamma: map.rate("gamma", true, f64::NAN),
            gamma_kappa: map.rate("gamma_kappa", true, f64::NAN),
            kt: map.positive("kt", false, 1.0),
            t_end: map.positive("t_end", true, f64::NAN),
            dt: map.positive("dt", true, f64::NAN),
        })),
        "optimize" => Some(ScenarioKind::Optimize(OptimizeParams {
            mu0: map.f64_req("mu0"),
            tau0: map.positive("tau0", true, f64::NAN),
            phi0: map.f64_opt("phi0", 0.0),
            kappa0: map.positive("kappa0", true, f64::NAN),
            mu_star: map.f64_req("mu_star"),
            tau_star: map.positive("tau_star", true, f64::NAN),
            phi_star: map.f64_opt("phi_star", 0.0),
            kappa_star: map.positive("kappa_star", true, f64::NAN),
            lambda: map.positive("lambda", true, f64::NAN),
            eta: map.positive("eta", true, f64::NAN),
            steps: {
                let s = map.usize_req("steps");
                if s == 0 {
                    map.error(map.line_of("steps"), Some("steps"), "need at least one step".into());
                }
                s
            },
            method: match map.raw("method") {
                None => MethodKind::Natural,
                Some((line, raw)) => match raw.as_str() {
                    "plain" => MethodKind::Plain,
                    "natural" => MethodKind::Natural,
                    other => {
                        map.error(Some(line), Some("method"), format!("expected plain|natural, got '{other}'"));
                        MethodKind::Natural
                    }
                },
            },
        })),
        "gnc" => Some(ScenarioKind::Gnc(GncParams {
            mu0: map.f64_req("mu0"),
            tau0: map.positive("tau0", true, f64::NAN),
            prior_mu: map.f64_req("prior_mu"),
            prior_tau: map.positive("prior_tau", true, f64::NAN),
            stages: {
                let s = map.usize_opt("stages", 12);
                if s < 2 {
                    map.error(map.line_of("stages"), Some("stages"), "need at least 2 stages".into());
                }
                s
            },
            steps_per_stage: map.usize_opt("steps_per_stage", 300),
            beta_start: map.positive("beta_start", true, f64::NAN),
            beta_end: map.positive("beta_end", true, f64::NAN),
            smooth_sigma2: map.positive("smooth_sigma2", false, 1.5),
        })),
        "network" => Some(ScenarioKind::Network(NetworkParams {
            agents_per_cluster: {
                let v = map.usize_opt("agents_per_cluster", 3);
                if v == 0 {
                    map.error(map.line_of("agents_per_cluster"), Some("agents_per_cluster"), "need at least one agent per cluster".into());
                }
                v
            },
            data_mu_a: map.f64_opt("data_mu_a", -5.0),
            data_mu_b: map.f64_opt("data_mu_b", 5.0),
            data_tau: map.positive("data_tau", false, 1.0),
            prior_mu: map.f64_opt("prior_mu", 0.0),
            prior_tau: map.positive("prior_tau", false, 0.1),
            psi0: map.rate("psi0", false, 0.5),
            history_seed: map.f64_opt("history_seed", 1.0),
            rounds: map.usize_opt("rounds", 400),
            potential_every: {
                let v = map.usize_opt("potential_every", 5);
                if v == 0 {
                    map.error(map.line_of("potential_every"), Some("potential_every"), "must be >= 1".into());
                }
                v
            },
            prune_every: {
                let v = map.usize_opt("prune_every", 100);
                if v == 0 {
                    map.error(map.line_of("prune_every"), Some("prune_every"), "must be >= 1".into());
                }
                v
            },
            eta_psi: map.rate("eta_psi", false, 0.25),
            eps_prune: map.positive("eps_prune", false, 0.05),
            gamma_round: map.rate("gamma_round", false, 1.0),
            temperature: map.positive("temperature", false, 1.0),
            belief_jitter: map.rate("belief_jitter", false, 0.1),
        })),
        "taxonomy" => Some(ScenarioKind::Taxonomy(TaxonomyParams {
            samples: map.usize_opt("samples", 200),
            window: {
                let v = map.usize_opt("window", 50);
                if v == 0 {
                    map.error(map.line_of("window"), Some("window"), "must be >= 1".into());
                }
                v
            },
            tol: map.positive("tol", false, 1e-3),
            tau_base: map.positive("tau_base", false, 1.0),
            kappa_base: map.positive("kappa_base", false, 1.0),
            tau_mode: parse_mode(&mut map, "tau_mode"),
            kappa_mode: parse_mode(&mut map, "kappa_mode"),
            amplitude: map.positive("amplitude", false, 0.4),
            period: map.positive("period", false, 25.0),
        })),
        "bounds" => Some(ScenarioKind::Bounds(BoundsParams {
            gamma: map.rate("gamma", true, f64::NAN),
            tau_star: map.positive("tau_star", false, 1.0),
            kt: map.positive("kt", false, 1.0),
            bits: map.rate("bits", false, 1.0),
        })),
        other => {
            map.error(
                section.as_ref().map(|(l, _)| *l),
                None,
                format!("unknown scenario kind '{other}' (expected geodesic|dissipate|optimize|gnc|network|taxonomy|bounds)"),
            );
            None
        }
    };

    if kind.is_some() {
        map.finish_unknown_keys();
    }
    if !map.errors.is_empty() {
        return Err(map.errors);
    }
    let kind = kind.expect("kind parsed without errors");
    sanity_check(&kind).map_err(|e| vec![e])?;
    Ok(ScenarioConfig {
        seed,
        out_dir,
        kind,
    })
}

fn parse_mode(map: &mut EntryMap, key: &str) -> SeriesMode {
    match map.raw(key) {
        None => SeriesMode::Constant,
        Some((line, raw)) => match raw.as_str() {
            "constant" => SeriesMode::Constant,
            "oscillate" => SeriesMode::Oscillate,
            other => {
                map.error(Some(line), Some(key), format!("expected constant|oscillate, got '{other}'"));
                SeriesMode::Constant
            }
        },
    }
}

/// Cross-field checks that need the fully parsed kind.
fn sanity_check(kind: &ScenarioKind) -> Result<(), ConfigError> {
    match kind {
        ScenarioKind::Dissipate(p) if p.dt > p.t_end => Err(ConfigError {
            line: None,
            key: Some("dt".into()),
            message: format!("dt = {} must not exceed t_end = {}", p.dt, p.t_end),
        }),
        ScenarioKind::Network(p) if p.potential_every > p.prune_every => Err(ConfigError {
            line: None,
            key: Some("potential_every".into()),
            message: format!(
                "timescale ordering violated: potential_every = {} > prune_every = {}",
                p.potential_every, p.prune_every
            ),
        }),
        ScenarioKind::Taxonomy(p) if p.samples < 2 * p.window => Err(ConfigError {
            line: None,
            key: Some("samples".into()),
            message: format!("need samples >= 2*window ({} < {})", p.samples, 2 * p.window),
        }),
        _ => Ok(()),
    }
}

fn push_kv(out: &mut String, key: &str, value: impl AsRef<str>) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(value.as_ref());
    out.push('\n');
}

/// Canonical text form; inverse of [`parse_config`] on valid configs.
pub fn render(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    s.push('[');
    s.push_str(cfg.kind.name());
    s.push_str("]\n");
    push_kv(&mut s, "seed", cfg.seed.to_string());
    if let Some(dir) = &cfg.out_dir {
        push_kv(&mut s, "out_dir", dir.display().to_string());
    }
    match &cfg.kind {
        ScenarioKind::Geodesic(p) => {
            push_kv(&mut s, "mu_a", fmt_f64(p.mu_a));
            push_kv(&mut s, "tau_a", fmt_f64(p.tau_a));
            push_kv(&mut s, "mu_b", fmt_f64(p.mu_b));
            push_kv(&mut s, "tau_b", fmt_f64(p.tau_b));
            push_kv(&mut s, "samples", p.samples.to_string());
        }
        ScenarioKind::Dissipate(p) => {
            push_kv(&mut s, "mu0", fmt_f64(p.mu0));
            push_kv(&mut s, "tau0", fmt_f64(p.tau0));
            push_kv(&mut s, "phi0", fmt_f64(p.phi0));
            push_kv(&mut s, "kappa0", fmt_f64(p.kappa0));
            push_kv(&mut s, "gamma", fmt_f64(p.gamma));
            push_kv(&mut s, "gamma_kappa", fmt_f64(p.gamma_kappa));
            push_kv(&mut s, "kt", fmt_f64(p.kt));
            push_kv(&mut s, "t_end", fmt_f64(p.t_end));
            push_kv(&mut s, "dt", fmt_f64(p.dt));
        }
        ScenarioKind::Optimize(p) => {
            push_kv(&mut s, "mu0", fmt_f64(p.mu0));
            push_kv(&mut s, "tau0", fmt_f64(p.tau0));
            push_kv(&mut s, "phi0", fmt_f64(p.phi0));
            push_kv(&mut s, "kappa0", fmt_f64(p.kappa0));
            push_kv(&mut s, "mu_star", fmt_f64(p.mu_star));
            push_kv(&mut s, "tau_star", fmt_f64(p.tau_star));
            push_kv(&mut s, "phi_star", fmt_f64(p.phi_star));
            push_kv(&mut s, "kappa_star", fmt_f64(p.kappa_star));
            push_kv(&mut s, "lambda", fmt_f64(p.lambda));
            push_kv(&mut s, "eta", fmt_f64(p.eta));
            push_kv(&mut s, "steps", p.steps.to_string());
            push_kv(&mut s, "method", p.method.to_string());
        }
        ScenarioKind::Gnc(p) => {
            push_kv(&mut s, "mu0", fmt_f64(p.mu0));
            push_kv(&mut s, "tau0", fmt_f64(p.tau0));
            push_kv(&mut s, "prior_mu", fmt_f64(p.prior_mu));
            push_kv(&mut s, "prior_tau", fmt_f64(p.prior_tau));
            push_kv(&mut s, "stages", p.stages.to_string());
            push_kv(&mut s, "steps_per_stage", p.steps_per_stage.to_string());
            push_kv(&mut s, "beta_start", fmt_f64(p.beta_start));
            push_kv(&mut s, "beta_end", fmt_f64(p.beta_end));
            push_kv(&mut s, "smooth_sigma2", fmt_f64(p.smooth_sigma2));
        }
        ScenarioKind::Network(p) => {
            push_kv(&mut s, "agents_per_cluster", p.agents_per_cluster.to_string());
            push_kv(&mut s, "data_mu_a", fmt_f64(p.data_mu_a));
            push_kv(&mut s, "data_mu_b", fmt_f64(p.data_mu_b));
            push_kv(&mut s, "data_tau", fmt_f64(p.data_tau));
            push_kv(&mut s, "prior_mu", fmt_f64(p.prior_mu));
            push_kv(&mut s, "prior_tau", fmt_f64(p.prior_tau));
            push_kv(&mut s, "psi0", fmt_f64(p.psi0));
            push_kv(&mut s, "history_seed", fmt_f64(p.history_seed));
            push_kv(&mut s, "rounds", p.rounds.to_string());
            push_kv(&mut s, "potential_every", p.potential_every.to_string());
            push_kv(&mut s, "prune_every", p.prune_every.to_string());
            push_kv(&mut s, "eta_psi", fmt_f64(p.eta_psi));
            push_kv(&mut s, "eps_prune", fmt_f64(p.eps_prune));
            push_kv(&mut s, "gamma_round", fmt_f64(p.gamma_round));
            push_kv(&mut s, "temperature", fmt_f64(p.temperature));
            push_kv(&mut s, "belief_jitter", fmt_f64(p.belief_jitter));
        }
        ScenarioKind::Taxonomy(p) => {
            push_kv(&mut s, "samples", p.samples.to_string());
            push_kv(&mut s, "window", p.window.to_string());
            push_kv(&mut s, "tol", fmt_f64(p.tol));
            push_kv(&mut s, "tau_base", fmt_f64(p.tau_base));
            push_kv(&mut s, "kappa_base", fmt_f64(p.kappa_base));
            push_kv(&mut s, "tau_mode", p.tau_mode.to_string());
            push_kv(&mut s, "kappa_mode", p.kappa_mode.to_string());
            push_kv(&mut s, "amplitude", fmt_f64(p.amplitude));
            push_kv(&mut s, "period", fmt_f64(p.period));
        }
        ScenarioKind::Bounds(p) => {
            push_kv(&mut s, "gamma", fmt_f64(p.gamma));
            push_kv(&mut s, "tau_star", fmt_f64(p.tau_star));
            push_kv(&mut s, "kt", fmt_f64(p.kt));
            push_kv(&mut s, "bits", fmt_f64(p.bits));
        }
    }
    s
}

/// Echo of every key/value pair for the run report.
pub fn echo_map(cfg: &ScenarioConfig) -> BTreeMap<String, String> {
    render(cfg)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_DISSIPATE: &str = "\
[dissipate]
tau0 = 4.0
kappa0 = 2.0
gamma = 0.5
gamma_kappa = 1.0
t_end = 5.0
dt = 0.001
";

    #[test]
    fn minimal_dissipate_parses() {
        let cfg = parse_config(MINIMAL_DISSIPATE).unwrap();
        assert_eq!(cfg.seed, 0);
        match cfg.kind {
            ScenarioKind::Dissipate(p) => {
                assert_eq!(p.tau0, 4.0);
                assert_eq!(p.mu0, 0.0);
                assert_eq!(p.kt, 1.0);
            }
            other => panic!("wrong kind {other:?}"),
        }
    }

    #[test]
    fn negative_rate_reports_key_and_line() {
        let text = MINIMAL_DISSIPATE.replace("gamma = 0.5", "gamma = -1");
        let errs = parse_config(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].key.as_deref(), Some("gamma"));
        assert_eq!(errs[0].line, Some(4));
        assert!(errs[0].message.contains(">= 0"));
    }

    #[test]
    fn duplicate_key_lists_both_lines() {
        let text = format!("{MINIMAL_DISSIPATE}tau0 = 5.0\n");
        let errs = parse_config(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, Some(8));
        assert!(errs[0].message.contains("line 2"), "{}", errs[0].message);
    }

    #[test]
    fn unknown_kind_and_missing_keys_are_all_reported() {
        let errs = parse_config("[warp]\nspeed = 9\n").unwrap_err();
        assert!(errs.iter().any(|e| e.message.contains("unknown scenario kind")));

        let errs = parse_config("[dissipate]\ntau0 = 1\n").unwrap_err();
        let missing: Vec<_> = errs
            .iter()
            .filter(|e| e.message.contains("missing required key"))
            .collect();
        assert!(missing.len() >= 4, "all missing keys reported: {errs:?}");
    }

    #[test]
    fn non_numeric_value_is_flagged_with_line() {
        let text = MINIMAL_DISSIPATE.replace("dt = 0.001", "dt = fast");
        let errs = parse_config(&text).unwrap_err();
        assert_eq!(errs[0].key.as_deref(), Some("dt"));
        assert_eq!(errs[0].line, Some(7));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{MINIMAL_DISSIPATE}warp = 9\n");
        let errs = parse_config(&text).unwrap_err();
        assert_eq!(errs[0].key.as_deref(), Some("warp"));
    }

    #[test]
    fn render_round_trips() {
        let cfg = parse_config(MINIMAL_DISSIPATE).unwrap();
        let again = parse_config(&render(&cfg)).unwrap();
        assert_eq!(cfg, again);

        let text = "\
[network]
seed = 9
out_dir = runs/net
rounds = 50
eta_psi = 0.3
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(parse_config(&render(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn timescale_ordering_is_a_config_error() {
        let text = "\
[network]
potential_every = 100
prune_every = 5
";
        let errs = parse_config(text).unwrap_err();
        assert!(errs[0].message.contains("timescale"));
    }
}
