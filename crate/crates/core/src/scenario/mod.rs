//! Scenario files: a TOML description of geometry, phases, closures and the
//! integrator, turned into a validated [`SimState`] and [`RunParams`].
//!
//! Geometry is given either as one of the canned primitives (`bubble`,
//! `lens`, `sessile_drop`) or as an explicit `network` of arcs and chains
//! with named junctions and outer walls. The primitives expand to networks.

mod build;
mod presets;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{stability_bound, RunParams, Scheme, SimState, StepParams};
use crate::exchange::{JunctionClosure, SlipParams, SorptionParams};
use crate::geometry::{Constraint, Mode};
use crate::thermo::TENSION_GUARD;

pub use build::{build_state, expand_geometry};
pub use presets::{preset, PRESETS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub mode: Mode,
    pub domain: DomainSpec,
    pub geometry: GeometrySpec,
    pub phase: BTreeMap<String, PhaseSpec>,
    pub interface: BTreeMap<String, InterfaceSpec>,
    #[serde(default)]
    pub junction: JunctionSpec,
    pub mobility: MobilitySpec,
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remesh: Option<RemeshSpec>,
}

/// Axis-aligned box; in axisymmetric mode this is the generator rectangle
/// and `min[0]` must be 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    /// Closed ellipse, phases `inside` and `outside`, interface `interface`.
    /// Axisymmetric bubbles must be centred on the axis.
    Bubble { center: [f64; 2], semi_axes: [f64; 2], markers: usize },
    /// Two circular caps over a flat chord of half-width `half_width` centred
    /// at the origin; phases `upper`, `lower`, `outer`; interfaces `top`,
    /// `middle`, `bottom`. Axisymmetric lenses sit on the axis.
    Lens { half_width: f64, top_height: f64, bottom_height: f64, markers: usize },
    /// Circular cap of liquid on a rigid flat support along `y = 0`; phases
    /// `liquid`, `vapor`, `solid`; interfaces `liquid_vapor`, `solid_liquid`,
    /// `solid_vapor`. Planar only.
    SessileDrop { half_width: f64, height: f64, markers: usize, substrate_markers: usize },
    Network(NetworkSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub curve: Vec<CurveSpec>,
    #[serde(default)]
    pub wall: Vec<WallSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub id: String,
    /// Key into the `interface` table.
    pub interface: String,
    pub minus: String,
    pub plus: String,
    pub shape: ShapeSpec,
    pub markers: usize,
    /// `free`, `outer`, `axis` or `junction:<name>`; ignored for closed curves.
    #[serde(default = "free")]
    pub start: String,
    #[serde(default = "free")]
    pub end: String,
    #[serde(default)]
    pub constraint: Constraint,
}

fn free() -> String {
    "free".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    /// Elliptic arc `center + (radius cos a, aspect · radius sin a)` from
    /// `from_deg` to `to_deg`, uniform in angle. A full turn gives a closed
    /// curve.
    Arc {
        center: [f64; 2],
        radius: f64,
        #[serde(default = "one")]
        aspect: f64,
        from_deg: f64,
        to_deg: f64,
    },
    /// Polyline resampled to uniform arclength.
    Chain { points: Vec<[f64; 2]> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    pub phase: String,
    pub points: Vec<[f64; 2]>,
}

/// Bulk reservoir. Give exactly one of `mass` and `density`; the latter is
/// multiplied by the initial region measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    pub rho_ref: f64,
    #[serde(default)]
    pub p_ref: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    pub gamma0: f64,
    #[serde(default = "one")]
    pub rho_star: f64,
    #[serde(default)]
    pub psi_offset: f64,
    /// Initial uniform surface density.
    #[serde(default)]
    pub density: f64,
    /// Sorption closure per adjacent phase label.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sorption: BTreeMap<String, SorptionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slip: Option<SlipParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionSpec {
    #[serde(default = "one")]
    pub mobility: f64,
    #[serde(default)]
    pub line_tension: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureSpec>,
}

/// Mass transfer between the three interfaces meeting at every junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClosureSpec {
    Linear { transfer_coefficient: f64 },
    Ideal,
}

impl ClosureSpec {
    pub fn closure(&self) -> JunctionClosure {
        match *self {
            ClosureSpec::Linear { transfer_coefficient } => JunctionClosure::linear(transfer_coefficient),
            ClosureSpec::Ideal => JunctionClosure::ideal(),
        }
    }
}

impl Default for JunctionSpec {
    fn default() -> Self {
        JunctionSpec { mobility: 1.0, line_tension: 0.0, closure: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilitySpec {
    pub normal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default)]
    pub scheme: Scheme,
    pub dt: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    pub t_end: f64,
    pub max_steps: u64,
    /// Stop once every speed and flux is below this.
    pub convergence: f64,
}

fn default_cfl() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "one_u64")]
    pub record_every: u64,
    #[serde(default)]
    pub snapshot_every: u64,
    #[serde(default)]
    pub checkpoint_every: u64,
}

fn one_u64() -> u64 {
    1
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { record_every: 1, snapshot_every: 0, checkpoint_every: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemeshSpec {
    pub every: u64,
    /// Target spacing; defaults to the smallest initial mean spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
}

/// One problem found while validating a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{} validation error(s):\n{}", .0.len(), .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<FieldError>),
}

impl ScenarioError {
    pub fn fields(&self) -> Vec<&str> {
        match self {
            ScenarioError::Validation(v) => v.iter().map(|e| e.field.as_str()).collect(),
            _ => vec![],
        }
    }
}

/// Parses TOML text without validating.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].lines().count().max(1));
        ScenarioError::Parse { line, message: e.message().to_string() }
    })
}

/// Parses and fully validates scenario text.
pub fn load_scenario_str(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let cfg = parse_scenario(text)?;
    let errors = cfg.validate();
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ScenarioError::Validation(errors))
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    load_scenario_str(&text)
}

/// A file path if it exists, otherwise the name of a shipped preset.
pub fn resolve_scenario(name_or_path: &str) -> Result<ScenarioConfig, ScenarioError> {
    let path = Path::new(name_or_path);
    if path.exists() {
        return load_scenario(path);
    }
    match preset(name_or_path) {
        Some(text) => load_scenario_str(text),
        None => Err(ScenarioError::Io {
            path: name_or_path.into(),
            message: format!(
                "no such file or preset (presets: {})",
                PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            ),
        }),
    }
}

pub fn write_scenario(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("scenario config is always representable in TOML")
}

struct Errors(Vec<FieldError>);

impl Errors {
    fn check(&mut self, ok: bool, field: impl Into<String>, reason: impl Into<String>) {
        if !ok {
            self.0.push(FieldError { field: field.into(), reason: reason.into() });
        }
    }
}

impl ScenarioConfig {
    /// Every problem with the configuration; empty when it is runnable.
    pub fn validate(&self) -> Vec<FieldError> {
        let mut e = Errors(vec![]);
        e.check(!self.name.trim().is_empty(), "name", "must not be empty");
        let d = &self.domain;
        e.check(
            d.min[0] < d.max[0] && d.min[1] < d.max[1] && d.min.iter().chain(&d.max).all(|v| v.is_finite()),
            "domain",
            "min must be strictly below max",
        );
        if self.mode == Mode::Axisymmetric {
            e.check(d.min[0] == 0.0, "domain.min", "axisymmetric domains start on the axis (r = 0)");
        }
        for (label, p) in &self.phase {
            let f = format!("phase.{label}");
            match (p.mass, p.density) {
                (Some(m), None) => e.check(m > 0.0, format!("{f}.mass"), "must be positive"),
                (None, Some(r)) => e.check(r > 0.0, format!("{f}.density"), "must be positive"),
                _ => e.check(false, &f, "give exactly one of mass and density"),
            }
            e.check(p.rho_ref > 0.0, format!("{f}.rho_ref"), "must be positive");
            e.check(p.c2 > 0.0, format!("{f}.c2"), "must be positive");
            e.check(p.p_ref.is_finite(), format!("{f}.p_ref"), "must be finite");
        }
        let closure = self.junction.closure.is_some();
        for (key, s) in &self.interface {
            let f = format!("interface.{key}");
            e.check(s.gamma0 > 0.0, format!("{f}.gamma0"), "must be positive");
            e.check(s.rho_star > 0.0, format!("{f}.rho_star"), "must be positive");
            e.check(s.psi_offset.is_finite(), format!("{f}.psi_offset"), "must be finite");
            e.check(
                s.density >= 0.0 && s.density < s.rho_star * (1.0 - TENSION_GUARD),
                format!("{f}.density"),
                "must lie in [0, rho_star)",
            );
            if !s.sorption.is_empty() || closure {
                e.check(
                    s.density > 0.0,
                    format!("{f}.density"),
                    "must be positive when sorption or junction transfer is enabled",
                );
            }
            for (phase, p) in &s.sorption {
                e.check(
                    p.a_sigma > 0.0 && p.k_de > 0.0,
                    format!("{f}.sorption.{phase}"),
                    "needs a_sigma > 0 and k_de > 0",
                );
            }
            if let Some(slip) = s.slip {
                e.check(
                    slip.beta_plus >= 0.0 && slip.beta_minus >= 0.0 && slip.total() > 0.0,
                    format!("{f}.slip"),
                    "beta_plus + beta_minus must be positive with both nonnegative",
                );
            }
        }
        e.check(self.junction.mobility >= 0.0, "junction.mobility", "must be nonnegative");
        e.check(self.junction.line_tension >= 0.0, "junction.line_tension", "must be nonnegative");
        if let Some(c) = &self.junction.closure {
            e.check(c.closure().validate().is_ok(), "junction.closure", "transfer coefficient must be positive");
        }
        e.check(self.mobility.normal > 0.0, "mobility.normal", "must be positive");
        let i = &self.integrator;
        e.check(i.dt > 0.0 && i.dt.is_finite(), "integrator.dt", "must be positive");
        e.check(i.cfl_safety > 0.0 && i.cfl_safety <= 1.0, "integrator.cfl_safety", "must lie in (0, 1]");
        e.check(i.t_end > 0.0, "integrator.t_end", "must be positive");
        e.check(i.max_steps > 0, "integrator.max_steps", "must be positive");
        e.check(i.convergence >= 0.0, "integrator.convergence", "must be nonnegative");
        if let Some(r) = &self.remesh {
            e.check(r.every > 0, "remesh.every", "must be positive");
            e.check(r.spacing.is_none_or(|h| h > 0.0), "remesh.spacing", "must be positive");
        }
        let net = match expand_geometry(self) {
            Ok(net) => net,
            Err(errs) => {
                e.0.extend(errs);
                return e.0;
            }
        };
        self.check_labels(&net, &mut e);
        if !e.0.is_empty() {
            return e.0;
        }
        match build_state(self) {
            Ok(state) => {
                if let Err(err) = state.validate() {
                    e.check(false, "geometry", err.to_string());
                } else {
                    match stability_bound(&state) {
                        Ok(bound) => e.check(
                            i.dt <= i.cfl_safety * bound,
                            "integrator.dt",
                            format!("exceeds cfl_safety x stability bound = {:.4e}", i.cfl_safety * bound),
                        ),
                        Err(err) => e.check(false, "geometry", err.to_string()),
                    }
                }
            }
            Err(err) => e.check(false, "geometry", err.to_string()),
        }
        e.0
    }

    fn check_labels(&self, net: &NetworkSpec, e: &mut Errors) {
        let mut phases: Vec<&str> = vec![];
        let mut keys: Vec<&str> = vec![];
        for c in &net.curve {
            phases.extend([c.minus.as_str(), c.plus.as_str()]);
            keys.push(&c.interface);
            let f = format!("geometry.curve.{}", c.id);
            e.check(self.interface.contains_key(&c.interface), format!("{f}.interface"), format!("no [interface.{}] section", c.interface));
            for label in [&c.minus, &c.plus] {
                e.check(self.phase.contains_key(label), &f, format!("unknown phase {label}"));
            }
            if let Some(s) = self.interface.get(&c.interface) {
                for phase in s.sorption.keys() {
                    e.check(
                        phase == &c.minus || phase == &c.plus,
                        format!("interface.{}.sorption.{phase}", c.interface),
                        format!("phase does not border curve {}", c.id),
                    );
                }
            }
        }
        for w in &net.wall {
            phases.push(&w.phase);
            e.check(self.phase.contains_key(&w.phase), "geometry.wall", format!("unknown phase {}", w.phase));
        }
        for label in self.phase.keys() {
            e.check(phases.contains(&label.as_str()), format!("phase.{label}"), "not bordered by any curve or wall");
        }
        for key in self.interface.keys() {
            e.check(keys.contains(&key.as_str()), format!("interface.{key}"), "not used by any curve");
        }
    }

    pub fn run_params(&self) -> RunParams {
        let i = &self.integrator;
        RunParams {
            step: StepParams { dt: i.dt, cfl_safety: i.cfl_safety, scheme: i.scheme },
            t_end: i.t_end,
            max_steps: i.max_steps,
            convergence: i.convergence,
            record_every: self.output.record_every,
            snapshot_every: self.output.snapshot_every,
            checkpoint_every: self.output.checkpoint_every,
            remesh_every: self.remesh.as_ref().map_or(0, |r| r.every),
            remesh_spacing: self.remesh.as_ref().and_then(|r| r.spacing.or_else(|| self.initial_spacing())),
        }
    }

    /// Smallest mean marker spacing over the initial curves. Remeshing to a
    /// fixed spacing keeps shrinking curves from dragging the step bound down.
    fn initial_spacing(&self) -> Option<f64> {
        let state = self.initial_state().ok()?;
        state.curves.iter().map(|c| c.arclength() / c.segment_count() as f64).reduce(f64::min)
    }

    /// Builds the initial state; the config must have passed [`validate`](Self::validate).
    pub fn initial_state(&self) -> crate::Result<SimState> {
        build_state(self)
    }
}
