//! Declarative scenario configuration and the solver dispatch behind
//! `run` and `compare`.

use std::collections::BTreeMap;

use ladderops::models::{MEDIATOR, PREDATOR, PREY};
use ladderops::{
    discretize_state, evolve_positions, mean_trajectory, propagate, CubicPP3, GatedPP,
    GaussianState, GridConfig, Integrator, ModeIndex, OperatorExpr, Propagation, QuadraticPP,
    SolvableModel,
};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct ScenarioError(pub String);

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ScenarioError {}

fn bail<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Exact,
    Perturbative,
    Grid,
    All,
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Solver::Exact => "exact",
            Solver::Perturbative => "perturbative",
            Solver::Grid => "grid",
            Solver::All => "all",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for Solver {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Solver::Exact),
            "perturbative" => Ok(Solver::Perturbative),
            "grid" => Ok(Solver::Grid),
            "all" => Ok(Solver::All),
            other => bail(format!(
                "solver: unknown value `{other}` (expected exact | perturbative | grid | all)"
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub preset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub k1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    pub k3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_extent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells_per_unit: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// `rk4` or `krylov`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub krylov_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_mass_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary_dump: Option<String>,
}

/// One declarative run: model, initial centers, time grid, solver choice,
/// grid overrides, output paths. Frequencies are in radians per unit time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub solver: Solver,
    pub model: ModelConfig,
    pub initial: InitialConfig,
    pub time: TimeConfig,
    #[serde(default, skip_serializing_if = "grid_is_default")]
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "output_is_default")]
    pub output: OutputSection,
}

fn grid_is_default(g: &GridSection) -> bool {
    g.half_extent.is_none()
        && g.cells_per_unit.is_none()
        && g.dt.is_none()
        && g.integrator.is_none()
        && g.krylov_dim.is_none()
        && g.boundary_mass_threshold.is_none()
}

fn output_is_default(o: &OutputSection) -> bool {
    o.csv.is_none() && o.svg.is_none() && o.binary_dump.is_none()
}

/// Resolved model behind a scenario.
#[derive(Debug, Clone)]
pub enum Preset {
    Quadratic(QuadraticPP),
    Cubic(CubicPP3),
    Gated(GatedPP),
    Free { omega1: f64, omega3: f64 },
}

impl Preset {
    pub fn modes(&self) -> Vec<ModeIndex> {
        match self {
            Preset::Cubic(_) => vec![PREDATOR, MEDIATOR, PREY],
            _ => vec![PREDATOR, PREY],
        }
    }

    pub fn hamiltonian(&self) -> OperatorExpr {
        match self {
            Preset::Quadratic(m) => m.hamiltonian(),
            Preset::Cubic(m) => m.hamiltonian(),
            Preset::Gated(m) => m.hamiltonian(),
            Preset::Free { omega1, omega3 } => self
                .free_model(*omega1, *omega3)
                .hamiltonian(),
        }
    }

    fn free_model(&self, omega1: f64, omega3: f64) -> SolvableModel {
        SolvableModel::new(
            BTreeMap::from([(PREDATOR, omega1), (PREY, omega3)]),
            vec![],
        )
        .expect("positive frequencies")
    }

    pub fn solvable(&self) -> Option<SolvableModel> {
        match self {
            Preset::Quadratic(m) => Some(m.model()),
            Preset::Cubic(m) => Some(m.model()),
            Preset::Gated(_) => None,
            Preset::Free { omega1, omega3 } => Some(self.free_model(*omega1, *omega3)),
        }
    }
}

/// Canonical preset names and their decision-making aliases.
pub const PRESET_TABLE: &[(&str, &str, &str)] = &[
    (
        "quadratic-pp",
        "love-affair",
        "two-agent exchange; params omega1, omega3, lambda; modes x1 (predator), x3 (prey)",
    ),
    (
        "cubic-pp3",
        "love-affair-3",
        "three agents with a mediator; params omega1, omega2, omega3, lambda1, lambda2",
    ),
    (
        "gated-pp",
        "love-affair-gated",
        "exchange gated by x1, inert without predators; params omega1, omega3, lambda",
    ),
    (
        "fermi-pp",
        "love-affair-fermi",
        "two-mode fermionic baseline; run it with the fermi-baseline subcommand",
    ),
    ("free", "", "no interaction; params omega1, omega3"),
];

pub fn canonical_preset(name: &str) -> Option<&'static str> {
    for (canon, alias, _) in PRESET_TABLE {
        if name == *canon || (!alias.is_empty() && name == *alias) {
            return Some(canon);
        }
    }
    None
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Built-in named scenarios; `run <NAME>` uses these.
    pub fn builtin(name: &str, lambda2: Option<f64>) -> Result<Self, ScenarioError> {
        let l2 = lambda2.unwrap_or(1.0);
        let quadratic_fig = ModelConfig {
            preset: "quadratic-pp".into(),
            omega1: Some(3.0),
            omega2: None,
            omega3: Some(1.0),
            lambda: Some(3.0),
            lambda1: None,
            lambda2: None,
        };
        let cubic = |gap1: f64, gap2: f64| ModelConfig {
            preset: "cubic-pp3".into(),
            omega1: Some(1.0 + (gap1 + gap2) / 2.0),
            omega2: Some((gap2 - gap1) / 2.0),
            omega3: Some(1.0),
            lambda: None,
            lambda1: Some(2.0),
            lambda2: Some(l2),
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let make = |model: ModelConfig, k2: Option<f64>, t_max: f64| Scenario {
            solver: Solver::Exact,
            model,
            initial: InitialConfig { k1: 4.0, k2, k3: 4.0 },
            time: TimeConfig { t_max, samples: 800 },
            grid: GridSection::default(),
            output: OutputSection::default(),
        };
        match name {
            "figure1-top" => Ok(make(quadratic_fig, None, two_pi)),
            "quadratic" => {
                let mut s = make(quadratic_fig, None, two_pi);
                // at λ = 3 the packet breathes to ~10 units; a wider grid
                // keeps --solver all runs far from the absorbing edge
                s.initial = InitialConfig { k1: 2.0, k2: None, k3: 2.0 };
                s.grid.half_extent = Some(16.0);
                Ok(s)
            }
            "figure1-bottom-left" | "cubic" => Ok(make(cubic(2.0, 3.0), Some(4.0), two_pi)),
            "figure1-bottom-right" => Ok(make(cubic(1.0, 4.0), Some(4.0), two_pi)),
            "gated" => {
                let mut s = make(
                    ModelConfig {
                        preset: "gated-pp".into(),
                        omega1: Some(2.0),
                        omega2: None,
                        omega3: Some(1.0),
                        lambda: Some(0.1),
                        lambda1: None,
                        lambda2: None,
                    },
                    None,
                    6.0,
                );
                s.initial = InitialConfig { k1: 2.0, k2: None, k3: 2.0 };
                s.solver = Solver::Grid;
                s.time.samples = 60;
                Ok(s)
            }
            "free" => Ok(make(
                ModelConfig {
                    preset: "free".into(),
                    omega1: Some(2.0),
                    omega2: None,
                    omega3: Some(1.0),
                    lambda: None,
                    lambda1: None,
                    lambda2: None,
                },
                None,
                6.0,
            )),
            other => bail(format!(
                "unknown scenario `{other}`; try one of: quadratic, cubic, gated, free, \
                 figure1-top, figure1-bottom-left, figure1-bottom-right, or pass --config"
            )),
        }
    }

    pub fn resolve_preset(&self) -> Result<Preset, ScenarioError> {
        let m = &self.model;
        let canon = canonical_preset(&m.preset)
            .ok_or_else(|| ScenarioError(format!("model.preset: unknown preset `{}`", m.preset)))?;
        let need = |v: Option<f64>, field: &str| {
            v.ok_or_else(|| ScenarioError(format!("model.{field}: required by preset `{canon}`")))
        };
        let model_err = |field: &str, e: ladderops::ModelError| {
            ScenarioError(format!("model.{field}: {e}"))
        };
        match canon {
            "quadratic-pp" => {
                let q = QuadraticPP::new(
                    need(m.omega1, "omega1")?,
                    need(m.omega3, "omega3")?,
                    need(m.lambda, "lambda")?,
                )
                .map_err(|e| model_err("omega1/omega3/lambda", e))?;
                Ok(Preset::Quadratic(q))
            }
            "cubic-pp3" => {
                let c = CubicPP3::new(
                    need(m.omega1, "omega1")?,
                    need(m.omega2, "omega2")?,
                    need(m.omega3, "omega3")?,
                    need(m.lambda1, "lambda1")?,
                    need(m.lambda2, "lambda2")?,
                )
                .map_err(|e| model_err("omega*/lambda*", e))?;
                Ok(Preset::Cubic(c))
            }
            "gated-pp" => {
                let g = GatedPP::new(
                    need(m.omega1, "omega1")?,
                    need(m.omega3, "omega3")?,
                    need(m.lambda, "lambda")?,
                )
                .map_err(|e| model_err("omega1/omega3/lambda", e))?;
                Ok(Preset::Gated(g))
            }
            "free" => {
                let (o1, o3) = (need(m.omega1, "omega1")?, need(m.omega3, "omega3")?);
                if o1 <= 0.0 || o3 <= 0.0 {
                    return bail("model.omega1/omega3: must be strictly positive");
                }
                Ok(Preset::Free { omega1: o1, omega3: o3 })
            }
            "fermi-pp" => bail(
                "model.preset: `fermi-pp` runs through the fermi-baseline subcommand, not `run`",
            ),
            _ => unreachable!("canonical_preset covers the table"),
        }
    }

    pub fn state(&self, preset: &Preset) -> Result<GaussianState, ScenarioError> {
        let mut centers = vec![(PREDATOR, self.initial.k1), (PREY, self.initial.k3)];
        if matches!(preset, Preset::Cubic(_)) {
            let k2 = self.initial.k2.ok_or_else(|| {
                ScenarioError("initial.k2: required for three-agent presets".into())
            })?;
            centers.push((MEDIATOR, k2));
        } else if self.initial.k2.is_some() {
            return bail("initial.k2: only meaningful for three-agent presets");
        }
        GaussianState::new(centers).map_err(|e| ScenarioError(format!("initial: {e}")))
    }

    pub fn times(&self) -> Result<Vec<f64>, ScenarioError> {
        if self.time.t_max.is_nan() || self.time.t_max <= 0.0 || self.time.samples < 2 {
            return bail("time: t_max must be positive and samples at least 2");
        }
        let n = self.time.samples;
        Ok((0..n)
            .map(|i| self.time.t_max * i as f64 / (n - 1) as f64)
            .collect())
    }

    /// Effective grid configuration: documented defaults overridden by the
    /// `[grid]` section. Three-mode presets default to half extent 8 to
    /// bound memory; everything else to 12.
    pub fn grid_config(&self, preset: &Preset) -> Result<GridConfig, ScenarioError> {
        let modes = preset.modes();
        let default_half = if modes.len() == 3 { 8.0 } else { 12.0 };
        let half = self.grid.half_extent.unwrap_or(default_half);
        let s = self.grid.cells_per_unit.unwrap_or(8);
        let integrator = match self.grid.integrator.as_deref() {
            None | Some("rk4") => Integrator::RungeKutta4,
            Some("krylov") => Integrator::KrylovExp {
                subspace_dim: self.grid.krylov_dim.unwrap_or(16),
            },
            Some(other) => {
                return bail(format!(
                    "grid.integrator: unknown value `{other}` (expected rk4 | krylov)"
                ))
            }
        };
        let mut cfg = GridConfig::symmetric(modes, half, s)
            .map_err(|e| ScenarioError(format!("grid: {e}")))?;
        cfg.integrator = integrator;
        if let Some(dt) = self.grid.dt {
            cfg.dt = dt;
        }
        if let Some(eps) = self.grid.boundary_mass_threshold {
            cfg.boundary_mass_threshold = eps;
        }
        GridConfig::new(
            cfg.extents().clone(),
            s,
            cfg.dt,
            cfg.integrator,
            cfg.boundary_mass_threshold,
        )
        .map_err(|e| ScenarioError(format!("grid: {e}")))
    }

    pub fn validate_solver(&self, preset: &Preset) -> Result<(), ScenarioError> {
        match (self.solver, preset) {
            (Solver::Exact, Preset::Gated(_)) => bail(
                "solver: `exact` is not available for gated-pp (the interaction carries x1); \
                 use grid, perturbative, or all",
            ),
            (Solver::Perturbative, Preset::Gated(_)) => Ok(()),
            (Solver::Perturbative, _) => {
                bail("solver: `perturbative` only applies to gated-pp")
            }
            _ => Ok(()),
        }
    }
}

/// One solver's trajectory table.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub solver: &'static str,
    pub times: Vec<f64>,
    /// Column per mode, in mode order.
    pub columns: BTreeMap<ModeIndex, Vec<f64>>,
    pub propagation: Option<Propagation>,
}

impl SolverRun {
    pub fn sum_drift(&self) -> f64 {
        let x1 = &self.columns[&PREDATOR];
        let x3 = &self.columns[&PREY];
        let base = x1[0] + x3[0];
        x1.iter()
            .zip(x3)
            .map(|(a, b)| (a + b - base).abs())
            .fold(0.0, f64::max)
    }
}

pub fn run_exact(
    scenario: &Scenario,
    preset: &Preset,
) -> Result<SolverRun, ScenarioError> {
    let model = preset
        .solvable()
        .ok_or_else(|| ScenarioError("solver: exact solver needs a solvable preset".into()))?;
    let state = scenario.state(preset)?;
    let times = scenario.times()?;
    let trajs = evolve_positions(&model);
    let mut columns = BTreeMap::new();
    for (&mode, traj) in &trajs {
        let series = mean_trajectory(traj, &state, &times)
            .map_err(|e| ScenarioError(format!("initial: {e}")))?;
        columns.insert(mode, series);
    }
    Ok(SolverRun { solver: "exact", times, columns, propagation: None })
}

pub fn run_perturbative(
    scenario: &Scenario,
    preset: &Preset,
) -> Result<SolverRun, ScenarioError> {
    let Preset::Gated(g) = preset else {
        return bail("solver: `perturbative` only applies to gated-pp");
    };
    let times = scenario.times()?;
    let (k1, k3) = (scenario.initial.k1, scenario.initial.k3);
    let mut x1 = Vec::with_capacity(times.len());
    for &t in &times {
        x1.push(
            g.perturbative_x1(k1, t)
                .map_err(|e| ScenarioError(format!("model: {e}")))?,
        );
    }
    // x1 + x3 is conserved, so the prey trace mirrors the predator's
    let x3: Vec<f64> = x1.iter().map(|v| k1 + k3 - v).collect();
    Ok(SolverRun {
        solver: "perturbative",
        times,
        columns: BTreeMap::from([(PREDATOR, x1), (PREY, x3)]),
        propagation: None,
    })
}

pub fn run_grid(scenario: &Scenario, preset: &Preset) -> Result<SolverRun, ScenarioError> {
    let state = scenario.state(preset)?;
    let times = scenario.times()?;
    let cfg = scenario.grid_config(preset)?;
    let psi0 = discretize_state(&state, &cfg)
        .map_err(|e| ScenarioError(format!("grid: {e}")))?;
    let prop = propagate(&psi0, &preset.hamiltonian(), &times, &cfg)
        .map_err(|e| ScenarioError(format!("grid: {e}")))?;
    Ok(SolverRun {
        solver: "grid",
        times,
        columns: prop.means.clone(),
        propagation: Some(prop),
    })
}

/// The solver runs a scenario asks for, in output order.
pub fn run_all(scenario: &Scenario, preset: &Preset) -> Result<Vec<SolverRun>, ScenarioError> {
    scenario.validate_solver(preset)?;
    match scenario.solver {
        Solver::Exact => Ok(vec![run_exact(scenario, preset)?]),
        Solver::Perturbative => Ok(vec![run_perturbative(scenario, preset)?]),
        Solver::Grid => Ok(vec![run_grid(scenario, preset)?]),
        Solver::All => {
            // reference solver and grid oracle run concurrently
            let (grid, reference) = std::thread::scope(|scope| {
                let g = scope.spawn(|| run_grid(scenario, preset));
                let reference = match preset {
                    Preset::Gated(_) => run_perturbative(scenario, preset),
                    _ => run_exact(scenario, preset),
                };
                (g.join().expect("grid solver thread"), reference)
            });
            Ok(vec![reference?, grid?])
        }
    }
}

/// Max absolute and relative deviation between two runs over shared modes.
pub fn deviation(a: &SolverRun, b: &SolverRun) -> (f64, f64) {
    let mut max_abs = 0.0f64;
    let mut scale = 0.0f64;
    for (mode, series_a) in &a.columns {
        if let Some(series_b) = b.columns.get(mode) {
            for (va, vb) in series_a.iter().zip(series_b) {
                max_abs = max_abs.max((va - vb).abs());
                scale = scale.max(va.abs());
            }
        }
    }
    (max_abs, if scale > 0.0 { max_abs / scale } else { max_abs })
}
