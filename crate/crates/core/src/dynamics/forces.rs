use std::f64::consts::PI;

use super::{PhaseEval, SimState};
use crate::error::Result;
use crate::geometry::measure::{green_grad, segment_measure, segment_measure_grad};
use crate::geometry::{Mode, Vec2};

/// Configurational forces `-∂E/∂x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forces {
    /// Per curve, per marker. End markers hold only their own partial
    /// derivative; the junction total is in `junctions`.
    pub markers: Vec<Vec<Vec2>>,
    /// Total force on each junction: the three end-marker forces plus the
    /// line-tension force.
    pub junctions: Vec<Vec2>,
    /// Bulk state of every phase in the geometry the forces were taken at.
    pub phases: Vec<PhaseEval>,
    /// Tension of every segment, per curve.
    pub gammas: Vec<Vec<f64>>,
}

/// Exact negative gradient of the discrete available energy with respect to
/// marker and junction positions.
///
/// The segment energy `A f(m/A)` has `∂/∂A = γ`, and the bulk energy
/// `M ψ(M/V)` has `∂/∂V = -p`, so each segment contributes
/// `γ ∂A/∂x - [[p]] ∂G/∂x` to the gradient, where `G` is its Green
/// contribution to the enclosed measure.
pub fn compute_forces(state: &SimState) -> Result<Forces> {
    let phases = state.phase_evals()?;
    let mode = state.mode;
    let mut markers = Vec::with_capacity(state.curves.len());
    let mut gammas = Vec::with_capacity(state.curves.len());
    for (curve, phys) in state.curves.iter().zip(&state.physics) {
        let plus = state.phase_index(&curve.side_plus).expect("validated label");
        let minus = state.phase_index(&curve.side_minus).expect("validated label");
        let jump = phases[plus].state.p - phases[minus].state.p;
        let mut grad = vec![Vec2::zeros(); curve.markers.len()];
        let mut seg_gamma = Vec::with_capacity(curve.segment_count());
        for s in 0..curve.segment_count() {
            let (i, j) = curve.segment_ends(s);
            let (a, b) = (curve.markers[i], curve.markers[j]);
            let area = segment_measure(mode, a, b);
            let gamma = phys.eos.eval(curve.segment_mass[s] / area)?.gamma;
            let (ga, gb) = segment_measure_grad(mode, a, b);
            let (va, vb) = green_grad(mode, a, b);
            grad[i] += ga * gamma - va * jump;
            grad[j] += gb * gamma - vb * jump;
            seg_gamma.push(gamma);
        }
        markers.push(grad.into_iter().map(|g| -g).collect::<Vec<_>>());
        gammas.push(seg_gamma);
    }
    let junctions = state
        .junctions
        .iter()
        .map(|jn| {
            let mut f: Vec2 = jn
                .incident
                .iter()
                .map(|&(c, end)| markers[c][state.curves[c].end_marker(end)])
                .sum();
            if mode == Mode::Axisymmetric {
                f.x -= 2.0 * PI * jn.line_tension;
            }
            f
        })
        .collect();
    Ok(Forces { markers, junctions, phases, gammas })
}
