//! Time evolution of the coupled interface/junction/reservoir system.
//!
//! The kinematics are an overdamped gradient flow of the discrete available
//! energy: marker velocities are a mobility tensor applied to the exact
//! negative gradient of the energy, surface mass rides with the segments, and
//! sorption and junction transfer move mass down chemical-potential gaps.

mod equilibrium;
mod forces;
mod run;
mod step;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exchange::{SlipParams, SorptionParams};
use crate::geometry::{region_measure, MarkerCurve, Mode, PhaseTopology, TripleJunction, Vec2};
use crate::thermo::{BulkEos, BulkState, SurfaceEos};

pub use equilibrium::{equilibrium_report, EquilibriumReport, JunctionReport, LaplaceResidual};
pub use forces::{compute_forces, Forces};
pub use run::{run, Observer, Record, RunFailure, RunParams, RunSummary, StopReason};
pub use step::{
    advance_surface_density, rates, stability_bound, stability_terms, step, BoundSource, Rates, Scheme, StepParams,
};

/// A well-mixed compressible bulk phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReservoir {
    pub label: String,
    pub mass: f64,
    pub eos: BulkEos,
}

/// Constitutive data attached to one interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfacePhysics {
    pub eos: SurfaceEos,
    pub sorption_minus: Option<SorptionParams>,
    pub sorption_plus: Option<SorptionParams>,
    /// `None` disables tangential marker motion on this interface.
    pub slip: Option<SlipParams>,
}

impl InterfacePhysics {
    pub fn clean(gamma0: f64) -> Self {
        InterfacePhysics { eos: SurfaceEos::clean(gamma0), sorption_minus: None, sorption_plus: None, slip: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub mode: Mode,
    pub curves: Vec<MarkerCurve>,
    /// Parallel to `curves`.
    pub physics: Vec<InterfacePhysics>,
    pub junctions: Vec<TripleJunction>,
    pub phases: Vec<PhaseReservoir>,
    pub topology: PhaseTopology,
    /// Interface normal mobility `m_n`.
    pub normal_mobility: f64,
    pub t: f64,
    pub step: u64,
    /// Marker velocities of the last step, per curve (diagnostic).
    #[serde(default)]
    pub velocity: Vec<Vec<Vec2>>,
    /// Normal speeds `V_Σ` of the last step, per curve (diagnostic).
    #[serde(default)]
    pub normal_speed: Vec<Vec<f64>>,
}

/// Bulk quantities of every phase in the current geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEval {
    pub measure: f64,
    pub rho: f64,
    pub state: BulkState,
}

impl SimState {
    pub fn phase_index(&self, label: &str) -> Option<usize> {
        self.phases.iter().position(|p| p.label == label)
    }

    pub fn phase_evals(&self) -> Result<Vec<PhaseEval>> {
        let measures: BTreeMap<String, f64> = region_measure(&self.topology, &self.curves)?;
        self.phases
            .iter()
            .map(|p| {
                let measure = measures[&p.label];
                let rho = p.mass / measure;
                Ok(PhaseEval { measure, rho, state: p.eos.eval(rho)? })
            })
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        let bulk: f64 = self.phases.iter().map(|p| p.mass).sum();
        let surf: f64 = self.curves.iter().map(|c| c.total_mass()).sum();
        bulk + surf
    }

    pub fn length_scale(&self) -> f64 {
        self.topology.domain.scale()
    }

    /// Smallest segment length over all curves.
    pub fn min_spacing(&self) -> f64 {
        self.curves
            .iter()
            .flat_map(|c| c.segment_lengths())
            .fold(f64::INFINITY, f64::min)
    }

    /// Structural checks: curves, attachment, topology, labels, physics.
    pub fn validate(&self) -> Result<()> {
        if self.physics.len() != self.curves.len() {
            return Err(Error::InvalidInput("one interface physics entry per curve required".into()));
        }
        if !(self.normal_mobility > 0.0) {
            return Err(Error::InvalidInput(format!("normal mobility must be positive, got {}", self.normal_mobility)));
        }
        for c in &self.curves {
            if c.markers.len() < 3 {
                return Err(Error::DegenerateGeometry(format!("curve {} needs at least 3 markers", c.id)));
            }
            c.validate()?;
            for (end, e) in [(crate::geometry::CurveEnd::Start, c.start), (crate::geometry::CurveEnd::End, c.end)] {
                if c.closed {
                    break;
                }
                match e {
                    crate::geometry::Endpoint::Junction(j) => {
                        let jn = self.junctions.get(j).ok_or_else(|| {
                            Error::TopologyError(format!("curve {} references junction {j}", c.id))
                        })?;
                        let ci = self.curves.iter().position(|x| x.id == c.id).unwrap();
                        if !jn.incident.contains(&(ci, end)) {
                            return Err(Error::TopologyError(format!(
                                "curve {} end is not listed at junction {}",
                                c.id, jn.id
                            )));
                        }
                    }
                    crate::geometry::Endpoint::Axis => {
                        let p = c.markers[c.end_marker(end)];
                        if self.mode != Mode::Axisymmetric || p.x != 0.0 {
                            return Err(Error::TopologyError(format!(
                                "curve {} axis end must lie on r = 0 in axisymmetric mode",
                                c.id
                            )));
                        }
                    }
                    _ => {}
                }
            }
        }
        for (ci, p) in self.physics.iter().enumerate() {
            p.eos.validate()?;
            for s in [p.sorption_minus, p.sorption_plus].into_iter().flatten() {
                s.validate()?;
            }
            if let Some(s) = p.slip {
                s.validate().map_err(|_| {
                    Error::InvalidInput(format!("slip on curve {}: beta_plus + beta_minus must be positive", self.curves[ci].id))
                })?;
            }
            for rho in self.curves[ci].densities() {
                p.eos.eval(rho)?;
            }
        }
        let scale = self.length_scale();
        for (ji, j) in self.junctions.iter().enumerate() {
            j.check_attachment(&self.curves, scale)?;
            for &(c, end) in &j.incident {
                if self.curves[c].endpoint(end) != crate::geometry::Endpoint::Junction(ji) {
                    return Err(Error::TopologyError(format!(
                        "junction {} lists curve {} but the curve end points elsewhere",
                        j.id, self.curves[c].id
                    )));
                }
            }
            if !(j.mobility >= 0.0) || !(j.line_tension >= 0.0) {
                return Err(Error::InvalidInput(format!("junction {}: mobility and line tension must be >= 0", j.id)));
            }
            if self.mode == Mode::Axisymmetric && !(j.position.x > 0.0) {
                return Err(Error::DegenerateGeometry(format!("junction {} lies on the axis", j.id)));
            }
            if let Some(c) = &j.closure {
                c.validate()?;
            }
            step::check_angles(self, ji)?;
        }
        for p in &self.phases {
            if self.topology.phase_index(&p.label).is_none() {
                return Err(Error::TopologyError(format!("reservoir {} has no region", p.label)));
            }
            if !(p.mass > 0.0) {
                return Err(Error::InvalidInput(format!("phase {} needs positive mass", p.label)));
            }
            p.eos.validate()?;
        }
        if self.phases.len() != self.topology.phases.len() {
            return Err(Error::TopologyError("every region needs a reservoir".into()));
        }
        self.topology.validate(&self.curves)?;
        self.phase_evals()?;
        Ok(())
    }
}
