//! Residuals of the equilibrium conditions, evaluated on a (converged) state.

use serde::{Deserialize, Serialize};

use super::step::junction_projection;
use super::{rates, SimState};
use crate::error::Result;
use crate::exchange::{junction_curvature, kirchhoff_residual};
use crate::geometry::{curvature_normal, junction_conormals, marker_normal, sector_angles, SectorAngle};

/// Pressure jump against `γ κ` on one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceResidual {
    pub curve: String,
    /// `p(plus) - p(minus)`.
    pub jump: f64,
    /// Measure-weighted mean of `γ κ` over interior markers.
    pub gamma_kappa: f64,
    /// `|jump - γκ| / |γκ|`, or `None` on a flat curve.
    pub relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionReport {
    pub junction: String,
    pub angles: [SectorAngle; 3],
    /// `|Σ γ_k N^k - γ^C κ^C|`, tangential part only on a supported junction.
    pub kirchhoff: f64,
    /// `max_k |μ^Σ_k - μ^C|` over the end segments, if a closure is active.
    pub affinity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub laplace: Vec<LaplaceResidual>,
    pub junctions: Vec<JunctionReport>,
    /// `max |μ_k - μ^Σ|` over every interface side with sorption; `None`
    /// when no sorption is configured.
    pub sorption_affinity: Option<f64>,
}

pub fn equilibrium_report(state: &SimState) -> Result<EquilibriumReport> {
    let r = rates(state)?;
    let phases = &r.forces.phases;
    let mut laplace = Vec::with_capacity(state.curves.len());
    let mut sorption_affinity: Option<f64> = None;
    for (ci, curve) in state.curves.iter().enumerate() {
        let plus = state.phase_index(&curve.side_plus).expect("validated label");
        let minus = state.phase_index(&curve.side_minus).expect("validated label");
        let jump = phases[plus].state.p - phases[minus].state.p;
        let gammas = &r.forces.gammas[ci];
        let lumped = curve.lumped_measures();
        let n = curve.markers.len();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            if !curve.closed && (i == 0 || i + 1 == n) || lumped[i] == 0.0 {
                continue;
            }
            let kappa = curvature_normal(curve, i)?.dot(&marker_normal(curve, i));
            let (a, b) = curve.adjacent_segments(i);
            let gamma = 0.5 * (gammas[a.unwrap_or_else(|| b.unwrap())] + gammas[b.unwrap_or_else(|| a.unwrap())]);
            num += lumped[i] * gamma * kappa;
            den += lumped[i];
        }
        let gamma_kappa = num / den;
        let scale = gammas.iter().fold(0.0f64, |m, g| m.max(g.abs())) / state.length_scale();
        let relative = (gamma_kappa.abs() > 1e-9 * scale).then(|| (jump - gamma_kappa).abs() / gamma_kappa.abs());
        laplace.push(LaplaceResidual { curve: curve.id.clone(), jump, gamma_kappa, relative });

        let phys = &state.physics[ci];
        for (params, side) in [(phys.sorption_minus, minus), (phys.sorption_plus, plus)] {
            if params.is_none() {
                continue;
            }
            for rho in curve.densities() {
                let gap = (phases[side].state.mu - phys.eos.mu(rho)).abs();
                sorption_affinity = Some(sorption_affinity.unwrap_or(0.0).max(gap));
            }
        }
    }
    let mut junctions = Vec::with_capacity(state.junctions.len());
    for (ji, jn) in state.junctions.iter().enumerate() {
        let n = junction_conormals(jn, &state.curves)?;
        let gammas: [f64; 3] = std::array::from_fn(|k| {
            let (c, end) = jn.incident[k];
            r.forces.gammas[c][state.curves[c].end_segment(end)]
        });
        let mut res = kirchhoff_residual(gammas, n, jn.line_tension, junction_curvature(state.mode, jn.position));
        if junction_projection(state, ji) {
            res.y = 0.0;
        }
        let kirchhoff = res.norm();
        let affinity = r.junction_flux[ji].as_ref().map(|flux| {
            jn.incident
                .iter()
                .map(|&(c, end)| {
                    let curve = &state.curves[c];
                    let rho = curve.densities()[curve.end_segment(end)];
                    (state.physics[c].eos.mu(rho) - flux.mu_c).abs()
                })
                .fold(0.0, f64::max)
        });
        junctions.push(JunctionReport {
            junction: jn.id.clone(),
            angles: sector_angles(jn, &state.curves)?,
            kirchhoff,
            affinity,
        });
    }
    Ok(EquilibriumReport { laplace, junctions, sorption_affinity })
}

#[cfg(test)]
mod tests {
    use super::super::test_util::bubble_state;
    use super::*;

    #[test]
    fn balanced_polygon_has_small_laplace_residual() {
        let s = bubble_state(64, 1.0, true);
        let rep = equilibrium_report(&s).unwrap();
        let l = &rep.laplace[0];
        assert!(l.relative.unwrap() < 1e-2, "{l:?}");
        assert!(rep.junctions.is_empty() && rep.sorption_affinity.is_none());
    }
}
