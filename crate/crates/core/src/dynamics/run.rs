use serde::{Deserialize, Serialize};

use super::step::{junction_projection, rates, step_from, StepParams};
use super::{Rates, SimState};
use crate::energy::{dissipation_budget, EnergyLedger};
use crate::error::{Error, Result};
use crate::exchange::{junction_curvature, kirchhoff_residual};
use crate::geometry::{junction_conormals, needs_remesh, remesh, sector_angles, SectorAngle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub step: StepParams,
    pub t_end: f64,
    /// Cap on the absolute step counter.
    pub max_steps: u64,
    /// Stop once speeds and mass-exchange fluxes all fall below this.
    pub convergence: f64,
    /// Emit a time-series row every this many steps (0: never).
    pub record_every: u64,
    /// Emit a snapshot every this many steps (0: only at the end).
    pub snapshot_every: u64,
    pub checkpoint_every: u64,
    /// Check every this many steps (0: never) and remesh the curves whose
    /// spacing has drifted.
    pub remesh_every: u64,
    pub remesh_spacing: Option<f64>,
}

/// One time-series row: the state's energies and the dissipation of the
/// step that leaves it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub step: u64,
    pub ledger: EnergyLedger,
    pub phase_mass: Vec<f64>,
    pub total_mass: f64,
    /// Per junction, sector angle of every phase.
    pub angles: Vec<[SectorAngle; 3]>,
    /// Per junction, `|Σ γ_k N^k - γ^C κ^C|`.
    pub kirchhoff: Vec<f64>,
    pub max_speed: f64,
    pub max_flux: f64,
    /// The state was remeshed after its step, so the window that ends here
    /// is not a pure time step.
    #[serde(default)]
    pub remeshed: bool,
}

impl Record {
    pub fn new(state: &SimState, rates: &Rates) -> Result<Record> {
        let ledger = dissipation_budget(state, rates)?;
        let mut angles = Vec::with_capacity(state.junctions.len());
        let mut kirchhoff = Vec::with_capacity(state.junctions.len());
        for (ji, jn) in state.junctions.iter().enumerate() {
            angles.push(sector_angles(jn, &state.curves)?);
            let n = junction_conormals(jn, &state.curves)?;
            let gammas: [f64; 3] = std::array::from_fn(|k| {
                let (c, end) = jn.incident[k];
                rates.forces.gammas[c][state.curves[c].end_segment(end)]
            });
            let kappa = junction_curvature(state.mode, jn.position);
            let mut res = kirchhoff_residual(gammas, n, jn.line_tension, kappa);
            if junction_projection(state, ji) {
                // the support takes the normal load
                res.y = 0.0;
            }
            kirchhoff.push(res.norm());
        }
        Ok(Record {
            step: state.step,
            ledger,
            phase_mass: state.phases.iter().map(|p| p.mass).collect(),
            total_mass: state.total_mass(),
            angles,
            kirchhoff,
            max_speed: rates.max_speed(),
            max_flux: rates.max_flux(),
            remeshed: false,
        })
    }
}

pub trait Observer {
    fn record(&mut self, _record: &Record) -> Result<()> {
        Ok(())
    }
    fn snapshot(&mut self, _state: &SimState) -> Result<()> {
        Ok(())
    }
    fn checkpoint(&mut self, _state: &SimState) -> Result<()> {
        Ok(())
    }
}

/// Collects every record in memory.
impl Observer for Vec<Record> {
    fn record(&mut self, record: &Record) -> Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

impl Observer for () {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    EndTime,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub state: SimState,
    pub reason: StopReason,
    pub steps: u64,
    pub last: Record,
}

/// A failed run: the error and the last good state, for a diagnostic
/// checkpoint.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: Error,
    pub state: Box<SimState>,
}

/// Advances `state` until convergence, `t_end` or `max_steps`.
///
/// The first and the final state are always recorded and snapshotted.
pub fn run(state0: SimState, params: &RunParams, observer: &mut dyn Observer) -> Result<RunSummary, RunFailure> {
    let mut state = state0;
    let fail = |error: Error, state: &SimState| RunFailure { error, state: Box::new(state.clone()) };
    let start = state.step;
    observer.snapshot(&state).map_err(|e| fail(e, &state))?;
    let mut remeshed = false;
    loop {
        let r = rates(&state).map_err(|e| fail(e, &state))?;
        let mut record = Record::new(&state, &r).map_err(|e| fail(e, &state))?;
        record.remeshed = remeshed;
        let taken = state.step - start;
        let converged = record.max_speed.max(record.max_flux) < params.convergence;
        let reason = if converged {
            Some(StopReason::Converged)
        } else if state.t >= params.t_end * (1.0 - 1e-12) {
            Some(StopReason::EndTime)
        } else if state.step >= params.max_steps {
            Some(StopReason::MaxSteps)
        } else {
            None
        };
        if let Some(reason) = reason {
            observer.record(&record).map_err(|e| fail(e, &state))?;
            observer.snapshot(&state).map_err(|e| fail(e, &state))?;
            return Ok(RunSummary { steps: taken, reason, last: record, state });
        }
        if params.record_every > 0 && state.step % params.record_every == 0 {
            observer.record(&record).map_err(|e| fail(e, &state))?;
        }
        let mut sp = params.step;
        // land exactly on t_end
        sp.dt = sp.dt.min(params.t_end - state.t);
        let (mut next, _) = step_from(&state, &sp, r).map_err(|e| fail(e, &state))?;
        // cadences count absolute steps so that a resumed run lines up
        let n = next.step;
        remeshed = false;
        if params.remesh_every > 0 && n % params.remesh_every == 0 {
            for c in 0..next.curves.len() {
                let h = params
                    .remesh_spacing
                    .unwrap_or_else(|| next.curves[c].arclength() / next.curves[c].segment_count() as f64);
                if needs_remesh(&next.curves[c], h) {
                    next.curves[c] = remesh(&next.curves[c], h).map_err(|e| fail(e, &state))?;
                    remeshed = true;
                }
            }
            if remeshed {
                next.velocity.clear();
                next.normal_speed.clear();
            }
        }
        state = next;
        if params.snapshot_every > 0 && n % params.snapshot_every == 0 {
            observer.snapshot(&state).map_err(|e| fail(e, &state))?;
        }
        if params.checkpoint_every > 0 && n % params.checkpoint_every == 0 {
            observer.checkpoint(&state).map_err(|e| fail(e, &state))?;
        }
    }
}
