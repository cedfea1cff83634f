//! Available energy and its dissipation budget.
//!
//! The kinetic parts of the available energy vanish identically in the
//! overdamped model; they are kept as explicit zero fields so the ledger has
//! the same terms as the continuum functional.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Rates, Record, SimState};
use crate::error::{Error, Result};
use crate::geometry::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub t: f64,
    pub e_kinetic_bulk: f64,
    pub e_kinetic_interface: f64,
    pub e_bulk: f64,
    pub e_interface: f64,
    /// `γ^C · 2πr` per junction in axisymmetric mode; a point carries no line
    /// measure, so this is zero in planar mode.
    pub e_line: f64,
    pub e_total: f64,
    pub d_normal: f64,
    pub d_slip: f64,
    pub d_sorption: f64,
    pub d_junction: f64,
}

impl EnergyLedger {
    pub fn dissipation(&self) -> f64 {
        self.d_normal + self.d_slip + self.d_sorption + self.d_junction
    }

    pub fn channels(&self) -> [f64; 4] {
        [self.d_normal, self.d_slip, self.d_sorption, self.d_junction]
    }
}

/// Energies of the current state; dissipation channels are left at zero.
pub fn total_available_energy(state: &SimState) -> Result<EnergyLedger> {
    let phases = state.phase_evals()?;
    let e_bulk: f64 = state.phases.iter().zip(&phases).map(|(p, e)| p.mass * e.state.psi).sum();
    let mut e_interface = 0.0;
    for (curve, phys) in state.curves.iter().zip(&state.physics) {
        for (area, m) in curve.segment_measures().iter().zip(&curve.segment_mass) {
            e_interface += area * phys.eos.eval(m / area)?.energy_density;
        }
    }
    let e_line = match state.mode {
        Mode::Planar => 0.0,
        Mode::Axisymmetric => state.junctions.iter().map(|j| j.line_tension * 2.0 * PI * j.position.x).sum(),
    };
    Ok(EnergyLedger {
        t: state.t,
        e_bulk,
        e_interface,
        e_line,
        e_total: e_bulk + e_interface + e_line,
        ..Default::default()
    })
}

/// Energies of `state` together with the dissipation channels of `rates`
/// (which must have been evaluated at `state`).
pub fn dissipation_budget(state: &SimState, rates: &Rates) -> Result<EnergyLedger> {
    let mut ledger = total_available_energy(state)?;
    let m_n = state.normal_mobility;
    for (ci, phys) in state.physics.iter().enumerate() {
        let lumped = &rates.lumped[ci];
        ledger.d_normal += rates.normal_speed[ci].iter().zip(lumped).map(|(v, l)| l * v * v).sum::<f64>() / m_n;
        if let Some(slip) = phys.slip {
            ledger.d_slip += slip.total() * rates.slip_speed[ci].iter().zip(lumped).map(|(v, l)| l * v * v).sum::<f64>();
        }
        ledger.d_sorption += rates.sorption_dissipation[ci].iter().sum::<f64>();
    }
    for (ji, jn) in state.junctions.iter().enumerate() {
        ledger.d_junction += jn.mobility * rates.junction_force[ji].norm_squared();
        if let Some(f) = &rates.junction_flux[ji] {
            ledger.d_junction += rates.junction_length[ji] * f.dissipation_rate;
        }
    }
    Ok(ledger)
}

/// Outcome of auditing one or more trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// No step raised the energy by more than `1e-9 |E|`.
    pub monotone: bool,
    /// Largest relative energy increase over a step, per run (0 if none).
    pub worst_increase: Vec<f64>,
    /// Largest budget defect `|ΔE/Δt + Σ D|` over a step, per run. Windows
    /// that end on a remeshed state are left out.
    pub worst_violation: Vec<f64>,
    /// Convergence order of `worst_violation` between consecutive runs, in
    /// their time steps.
    pub budget_order: Vec<f64>,
    /// Dissipation was positive on every row whose speed exceeded the
    /// threshold.
    pub strict: bool,
    /// Smallest dissipation channel seen on any row.
    pub min_channel: f64,
}

/// Audits trajectories for energy decay. Runs are expected to share the
/// initial state and physical duration and differ in their time step.
pub fn decay_certificate(runs: &[&[Record]], speed_threshold: f64) -> Result<DecayReport> {
    let mut report = DecayReport {
        monotone: true,
        worst_increase: vec![],
        worst_violation: vec![],
        budget_order: vec![],
        strict: true,
        min_channel: f64::INFINITY,
    };
    let mut dts = vec![];
    for rows in runs {
        if rows.len() < 3 {
            return Err(Error::InvalidInput(format!("decay audit needs at least 3 rows, got {}", rows.len())));
        }
        let mut worst_inc: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for w in rows.windows(2) {
            let (a, b) = (&w[0].ledger, &w[1].ledger);
            let dt = b.t - a.t;
            let de = b.e_total - a.e_total;
            let rel = de / a.e_total.abs().max(f64::MIN_POSITIVE);
            worst_inc = worst_inc.max(rel);
            if de > 1e-9 * a.e_total.abs() {
                report.monotone = false;
            }
            if dt > 0.0 && !w[1].remeshed {
                worst = worst.max((de / dt + a.dissipation()).abs());
            }
        }
        for r in rows.iter() {
            for c in r.ledger.channels() {
                report.min_channel = report.min_channel.min(c);
            }
            if r.max_speed > speed_threshold && !(r.ledger.dissipation() > 0.0) {
                report.strict = false;
            }
        }
        report.worst_increase.push(worst_inc);
        report.worst_violation.push(worst);
        dts.push(rows[1].ledger.t - rows[0].ledger.t);
    }
    for k in 1..runs.len() {
        let ratio = report.worst_violation[k - 1] / report.worst_violation[k];
        report.budget_order.push(ratio.ln() / (dts[k - 1] / dts[k]).ln());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::test_util::{bubble_state, straight_state};
    use crate::dynamics::{rates, PhaseReservoir};
    use crate::thermo::{BulkEos, SurfaceEos};

    #[test]
    fn clean_circle_energy_is_its_perimeter() {
        let mut s = bubble_state(100, 1.3, false);
        s.curves[0].segment_mass.iter_mut().for_each(|m| *m = 0.0);
        s.physics[0].eos = SurfaceEos { gamma0: 1.0, rho_star: 1.0, psi_offset: 0.0 };
        let e = total_available_energy(&s).unwrap();
        assert!((e.e_interface - s.curves[0].arclength()).abs() < 1e-13);
        assert_eq!(e.e_total, e.e_bulk + e.e_interface + e.e_line);
        assert_eq!(e.e_kinetic_bulk, 0.0);
    }

    #[test]
    fn inert_phase_adds_its_reference_energy() {
        let s = straight_state();
        let bottom = total_available_energy(&s).unwrap().e_bulk - s.phases[0].mass * s.phases[0].eos.psi(1.0);
        // make the top phase sit exactly at its reference density
        let eos = BulkEos { rho_ref: 2.0, p_ref: 3.0, c2: 5.0 };
        let mut t = s.clone();
        t.phases[0] = PhaseReservoir { label: "top".into(), mass: 8.0 * eos.rho_ref, eos };
        let e = total_available_energy(&t).unwrap().e_bulk;
        assert_eq!(e, bottom + t.phases[0].mass * eos.psi(eos.rho_ref));
    }

    #[test]
    fn energy_is_invariant_under_reorientation_and_relabeling() {
        let mut s = bubble_state(40, 1.0, false);
        for (k, m) in s.curves[0].segment_mass.iter_mut().enumerate() {
            *m *= 1.0 + 0.2 * (k as f64).sin();
        }
        let e0 = total_available_energy(&s).unwrap().e_total;
        let mut r = s.clone();
        r.curves[0] = s.curves[0].reversed();
        let e1 = total_available_energy(&r).unwrap().e_total;
        // relabel: rotate the starting marker
        let mut q = s.clone();
        q.curves[0].markers.rotate_left(7);
        q.curves[0].segment_mass.rotate_left(7);
        let e2 = total_available_energy(&q).unwrap().e_total;
        // reflect the whole configuration through the y axis
        let mut m = s.clone();
        m.curves[0] = {
            let mut c = s.curves[0].clone();
            c.markers.iter_mut().for_each(|p| p.x = -p.x);
            // reflection flips the left normal; reverse traversal but keep sides
            let mut r = c.reversed();
            std::mem::swap(&mut r.side_minus, &mut r.side_plus);
            r
        };
        let e3 = total_available_energy(&m).unwrap().e_total;
        for e in [e1, e2, e3] {
            assert!((e - e0).abs() <= 1e-13 * e0.abs(), "{e} {e0}");
        }
    }

    #[test]
    fn equilibrium_has_no_dissipation() {
        let s = bubble_state(48, 1.0, true);
        let r = rates(&s).unwrap();
        let l = dissipation_budget(&s, &r).unwrap();
        for c in l.channels() {
            assert!(c.abs() <= 1e-14);
        }
    }

    #[test]
    fn marangoni_only_dissipates_through_slip() {
        let mut s = straight_state();
        let n = s.curves[0].segment_count();
        for k in 0..n {
            s.curves[0].segment_mass[k] *= 1.0 + 0.5 * k as f64 / n as f64;
        }
        let r = rates(&s).unwrap();
        let l = dissipation_budget(&s, &r).unwrap();
        assert!(l.d_slip > 0.0);
        assert!(l.d_normal < 1e-28 && l.d_sorption == 0.0 && l.d_junction == 0.0, "{l:?}");
    }
}
