//! Browser demo: load a preset, step it, and retune an interface while it
//! runs. `Demo` is plain Rust; the `wasm_bindgen` wrapper only converts
//! errors and hands JSON strings to the page.

use serde::Serialize;
use triline::dynamics::{run, stability_bound, RunParams, SimState};
use triline::geometry::Mode;
use triline::scenario::{expand_geometry, load_scenario_str, preset, ScenarioConfig, PRESETS};
use wasm_bindgen::prelude::*;

/// What the page draws after each batch of steps.
#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub scenario: String,
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub max_speed: f64,
    pub total_mass: f64,
    /// Axis-aligned view box `[xmin, ymin, xmax, ymax]`.
    pub view: [f64; 4],
    pub curves: Vec<CurveView>,
    pub junctions: Vec<JunctionView>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveView {
    pub id: String,
    pub interface: String,
    pub gamma0: f64,
    /// Polyline; axisymmetric curves come with their mirror image appended
    /// as a second polyline.
    pub paths: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JunctionView {
    pub id: String,
    pub position: [f64; 2],
    /// `(phase, degrees)` for the three sectors.
    pub angles: Vec<(String, f64)>,
}

pub struct Demo {
    cfg: ScenarioConfig,
    params: RunParams,
    state: SimState,
    /// Interface name of every curve.
    interfaces: Vec<String>,
    last: Option<triline::dynamics::Record>,
}

impl Demo {
    pub fn new(name: &str) -> Result<Demo, String> {
        let text = preset(name).ok_or_else(|| format!("unknown preset {name}"))?;
        let cfg = load_scenario_str(text).map_err(|e| e.to_string())?;
        let net = expand_geometry(&cfg).map_err(|e| format!("{e:?}"))?;
        let interfaces = net.curve.iter().map(|c| c.interface.clone()).collect();
        let state = cfg.initial_state().map_err(|e| e.to_string())?;
        let mut params = cfg.run_params();
        params.record_every = 0;
        params.snapshot_every = 0;
        params.checkpoint_every = 0;
        params.convergence = 0.0;
        params.t_end = f64::INFINITY;
        Ok(Demo { cfg, params, state, interfaces, last: None })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    /// Advances `n` steps. The step starts at half the current stability
    /// bound (retuned tensions tighten it) and is halved again whenever the
    /// geometry tightens it mid-batch.
    pub fn advance(&mut self, n: u64) -> Result<(), String> {
        let target = self.state.step + n;
        let bound = stability_bound(&self.state).map_err(|e| e.to_string())?;
        let mut params = self.params.clone();
        params.step.dt = self.cfg.integrator.dt.min(0.5 * params.step.cfl_safety * bound);
        params.max_steps = target;
        for _ in 0..8 {
            match run(self.state.clone(), &params, &mut ()) {
                Ok(summary) => {
                    self.params.step.dt = params.step.dt;
                    self.state = summary.state;
                    self.last = Some(summary.last);
                    return Ok(());
                }
                Err(f) if matches!(f.error, triline::Error::StepRejected { .. }) => {
                    self.state = *f.state;
                    self.last = None;
                    params.step.dt *= 0.5;
                }
                Err(f) => return Err(f.error.to_string()),
            }
        }
        Err(format!("step kept shrinking below {:.3e}", params.step.dt))
    }

    /// Sets `γ₀` on every curve of `interface`.
    pub fn set_tension(&mut self, interface: &str, gamma0: f64) -> Result<(), String> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(format!("tension must be positive, got {gamma0}"));
        }
        let mut hit = false;
        for (phys, name) in self.state.physics.iter_mut().zip(&self.interfaces) {
            if name == interface {
                phys.eos.gamma0 = gamma0;
                hit = true;
            }
        }
        if !hit {
            return Err(format!("no interface {interface}"));
        }
        self.last = None;
        Ok(())
    }

    pub fn frame(&mut self) -> Result<Frame, String> {
        if self.last.is_none() {
            let r = triline::dynamics::rates(&self.state).map_err(|e| e.to_string())?;
            self.last = Some(triline::dynamics::Record::new(&self.state, &r).map_err(|e| e.to_string())?);
        }
        let rec = self.last.as_ref().expect("filled above");
        let axi = self.state.mode == Mode::Axisymmetric;
        let d = &self.cfg.domain;
        let view = if axi { [-d.max[0], d.min[1], d.max[0], d.max[1]] } else { [d.min[0], d.min[1], d.max[0], d.max[1]] };
        let curves = self
            .state
            .curves
            .iter()
            .zip(&self.state.physics)
            .zip(&self.interfaces)
            .map(|((c, phys), name)| {
                let mut path: Vec<[f64; 2]> = c.markers.iter().map(|p| [p.x, p.y]).collect();
                if c.closed {
                    path.push(path[0]);
                }
                let mut paths = vec![path.clone()];
                if axi {
                    paths.push(path.iter().map(|p| [-p[0], p[1]]).collect());
                }
                CurveView { id: c.id.clone(), interface: name.clone(), gamma0: phys.eos.gamma0, paths }
            })
            .collect();
        let junctions = self
            .state
            .junctions
            .iter()
            .zip(&rec.angles)
            .map(|(j, a)| JunctionView {
                id: j.id.clone(),
                position: [j.position.x, j.position.y],
                angles: a.iter().map(|s| (s.phase.clone(), s.degrees())).collect(),
            })
            .collect();
        Ok(Frame {
            scenario: self.cfg.name.clone(),
            step: self.state.step,
            t: self.state.t,
            dt: self.params.step.dt,
            energy: rec.ledger.e_total,
            dissipation: rec.ledger.dissipation(),
            max_speed: rec.max_speed,
            total_mass: rec.total_mass,
            view,
            curves,
            junctions,
        })
    }
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

#[wasm_bindgen]
pub fn presets() -> String {
    serde_json::to_string(&preset_names()).expect("plain strings")
}

#[wasm_bindgen(js_name = Simulation)]
pub struct WebDemo(Demo);

#[wasm_bindgen(js_class = Simulation)]
impl WebDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(preset: &str) -> Result<WebDemo, JsError> {
        Demo::new(preset).map(WebDemo).map_err(|e| JsError::new(&e))
    }

    /// Advances `n` steps and returns the new frame as JSON.
    pub fn advance(&mut self, n: u32) -> Result<String, JsError> {
        self.0.advance(u64::from(n)).map_err(|e| JsError::new(&e))?;
        self.frame()
    }

    #[wasm_bindgen(js_name = setTension)]
    pub fn set_tension(&mut self, interface: &str, gamma0: f64) -> Result<(), JsError> {
        self.0.set_tension(interface, gamma0).map_err(|e| JsError::new(&e))
    }

    pub fn frame(&mut self) -> Result<String, JsError> {
        let f = self.0.frame().map_err(|e| JsError::new(&e))?;
        serde_json::to_string(&f).map_err(|e| JsError::new(&e.to_string()))
    }
}
