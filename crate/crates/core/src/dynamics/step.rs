use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{compute_forces, Forces, SimState};
use crate::error::{Error, Result};
use crate::exchange::{junction_solve, slip_velocity, sorption_flux, JunctionFlux};
use crate::geometry::{marker_normal, sector_angles, Constraint, Endpoint, MarkerCurve, Mode, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Euler,
    Rk2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub dt: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
}

/// Everything the state changes at, evaluated at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub forces: Forces,
    /// Per curve, per marker.
    pub velocity: Vec<Vec<Vec2>>,
    /// Normal speed of markers that move with the interface mobility; zero
    /// for junction, pinned and constrained markers.
    pub normal_speed: Vec<Vec<f64>>,
    /// Slip speed of markers that move tangentially under friction.
    pub slip_speed: Vec<Vec<f64>>,
    pub lumped: Vec<Vec<f64>>,
    pub junction_velocity: Vec<Vec2>,
    /// Junction force after projection onto the admissible directions.
    pub junction_force: Vec<Vec2>,
    /// Per curve, per segment: adsorption fluxes from the minus and plus side.
    pub sorption: Vec<Vec<[f64; 2]>>,
    /// Per curve, per segment: sorption dissipation (already times measure).
    pub sorption_dissipation: Vec<Vec<f64>>,
    pub junction_flux: Vec<Option<JunctionFlux>>,
    /// Length of each triple line: 1 per unit depth, or `2πr`.
    pub junction_length: Vec<f64>,
    /// Mass rate of every segment, per curve.
    pub segment_mass_rate: Vec<Vec<f64>>,
    pub phase_mass_rate: Vec<f64>,
}

impl Rates {
    pub fn max_speed(&self) -> f64 {
        let m = self.velocity.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        self.junction_velocity.iter().map(|v| v.norm()).fold(m, f64::max)
    }

    /// Largest mass-exchange flux density (sorption or junction transfer).
    pub fn max_flux(&self) -> f64 {
        let j = self.sorption.iter().flatten().flat_map(|s| s.iter()).map(|x| x.abs()).fold(0.0, f64::max);
        self.junction_flux
            .iter()
            .flatten()
            .flat_map(|f| f.mdot.iter())
            .map(|x| x.abs())
            .fold(j, f64::max)
    }
}

fn end_kind(curve: &MarkerCurve, i: usize) -> Option<Endpoint> {
    if curve.closed {
        return None;
    }
    if i == 0 {
        Some(curve.start)
    } else if i + 1 == curve.markers.len() {
        Some(curve.end)
    } else {
        None
    }
}

/// Junction positions are confined to `x` whenever an incident curve is a
/// horizontal support.
pub(crate) fn junction_projection(state: &SimState, j: usize) -> bool {
    state.junctions[j]
        .incident
        .iter()
        .any(|&(c, _)| state.curves[c].constraint == Constraint::Horizontal)
}

pub(crate) fn junction_length(mode: Mode, position: Vec2) -> f64 {
    match mode {
        Mode::Planar => 1.0,
        Mode::Axisymmetric => 2.0 * PI * position.x,
    }
}

pub(crate) fn check_angles(state: &SimState, j: usize) -> Result<()> {
    for s in sector_angles(&state.junctions[j], &state.curves)? {
        if s.degrees() < 5.0 {
            return Err(Error::DegenerateJunction { junction: state.junctions[j].id.clone(), angle_deg: s.degrees() });
        }
    }
    Ok(())
}

/// Velocities, fluxes and mass rates at the current state.
pub fn rates(state: &SimState) -> Result<Rates> {
    let forces = compute_forces(state)?;
    let m_n = state.normal_mobility;
    let nc = state.curves.len();
    let mut velocity = Vec::with_capacity(nc);
    let mut normal_speed = Vec::with_capacity(nc);
    let mut slip_speed = Vec::with_capacity(nc);
    let mut lumped_all = Vec::with_capacity(nc);
    for (ci, curve) in state.curves.iter().enumerate() {
        let phys = &state.physics[ci];
        let lumped = curve.lumped_measures();
        let n = curve.markers.len();
        let mut v = vec![Vec2::zeros(); n];
        let mut vn = vec![0.0; n];
        let mut vt = vec![0.0; n];
        for i in 0..n {
            let f = forces.markers[ci][i] / lumped[i];
            match end_kind(curve, i) {
                Some(Endpoint::Junction(_)) | Some(Endpoint::OuterBoundary) => continue,
                Some(Endpoint::Axis) => {
                    vn[i] = m_n * f.y;
                    v[i] = Vec2::new(0.0, vn[i]);
                    continue;
                }
                _ => {}
            }
            let normal = marker_normal(curve, i);
            let tangent = Vec2::new(normal.y, -normal.x);
            let tangential = match phys.slip {
                Some(slip) => slip_velocity(&slip, f.dot(&tangent), tangent)?.v,
                None => Vec2::zeros(),
            };
            match curve.constraint {
                Constraint::Horizontal => {
                    // the support is exactly horizontal, so the tangent is ±x
                    v[i] = Vec2::new(tangential.x, 0.0);
                    vt[i] = tangential.x.abs();
                }
                Constraint::None => {
                    vn[i] = m_n * f.dot(&normal);
                    v[i] = normal * vn[i] + tangential;
                    vt[i] = tangential.norm();
                }
            }
        }
        velocity.push(v);
        normal_speed.push(vn);
        slip_speed.push(vt);
        lumped_all.push(lumped);
    }

    let mut junction_velocity = Vec::with_capacity(state.junctions.len());
    let mut junction_force = Vec::with_capacity(state.junctions.len());
    for (ji, jn) in state.junctions.iter().enumerate() {
        let mut f = forces.junctions[ji];
        if junction_projection(state, ji) {
            f.y = 0.0;
        }
        let v = f * jn.mobility;
        for &(c, end) in &jn.incident {
            velocity[c][state.curves[c].end_marker(end)] = v;
        }
        junction_velocity.push(v);
        junction_force.push(f);
    }

    // mass exchange
    let phases = &forces.phases;
    let mut sorption = Vec::with_capacity(nc);
    let mut sorption_dissipation = Vec::with_capacity(nc);
    let mut segment_mass_rate = Vec::with_capacity(nc);
    let mut phase_mass_rate = vec![0.0; state.phases.len()];
    for (ci, curve) in state.curves.iter().enumerate() {
        let phys = &state.physics[ci];
        let sides = [
            (phys.sorption_minus, state.phase_index(&curve.side_minus).expect("validated label")),
            (phys.sorption_plus, state.phase_index(&curve.side_plus).expect("validated label")),
        ];
        let areas = curve.segment_measures();
        let mut js = vec![[0.0; 2]; areas.len()];
        let mut ds = vec![0.0; areas.len()];
        let mut rate = vec![0.0; areas.len()];
        if sides.iter().any(|(p, _)| p.is_some()) {
            for (s, area) in areas.iter().enumerate() {
                let rho_s = curve.segment_mass[s] / area;
                let mu_s = if rho_s > 0.0 { phys.eos.mu(rho_s) } else { f64::NEG_INFINITY };
                for (k, (params, phase)) in sides.iter().enumerate() {
                    if let Some(p) = params {
                        let flux = sorption_flux(p, phases[*phase].state.mu, mu_s, rho_s, phases[*phase].rho)?;
                        js[s][k] = flux.j;
                        ds[s] += flux.dissipation_rate * area;
                        rate[s] += flux.j * area;
                        phase_mass_rate[*phase] -= flux.j * area;
                    }
                }
            }
        }
        sorption.push(js);
        sorption_dissipation.push(ds);
        segment_mass_rate.push(rate);
    }

    let mut junction_flux = Vec::with_capacity(state.junctions.len());
    let mut junction_len = Vec::with_capacity(state.junctions.len());
    for jn in &state.junctions {
        let len = junction_length(state.mode, jn.position);
        junction_len.push(len);
        let Some(closure) = &jn.closure else {
            junction_flux.push(None);
            continue;
        };
        let mut mu = [0.0; 3];
        let mut rho = [0.0; 3];
        for (k, &(c, end)) in jn.incident.iter().enumerate() {
            let curve = &state.curves[c];
            let s = curve.end_segment(end);
            let (a, b) = curve.segment(s);
            rho[k] = curve.segment_mass[s] / crate::geometry::measure::segment_measure(state.mode, a, b);
            mu[k] = if rho[k] > 0.0 { state.physics[c].eos.mu(rho[k]) } else { f64::NEG_INFINITY };
        }
        let flux = junction_solve(closure, mu, rho)?;
        for (k, &(c, end)) in jn.incident.iter().enumerate() {
            let s = state.curves[c].end_segment(end);
            segment_mass_rate[c][s] += flux.mdot[k] * len;
        }
        junction_flux.push(Some(flux));
    }

    Ok(Rates {
        forces,
        velocity,
        normal_speed,
        slip_speed,
        lumped: lumped_all,
        junction_velocity,
        junction_force,
        sorption,
        sorption_dissipation,
        junction_flux,
        junction_length: junction_len,
        segment_mass_rate,
        phase_mass_rate,
    })
}

/// Scales outgoing mass fluxes so no segment or reservoir is drained below
/// zero within `dt`. Each scaled flux is scaled on both of its ends, so the
/// global balance is untouched.
fn cap_fluxes(state: &SimState, r: &mut Rates, dt: f64) {
    let nc = state.curves.len();
    // outflow per segment
    let mut theta: Vec<Vec<f64>> = Vec::with_capacity(nc);
    for (ci, curve) in state.curves.iter().enumerate() {
        let areas = curve.segment_measures();
        let mut out = vec![0.0; areas.len()];
        for (s, j) in r.sorption[ci].iter().enumerate() {
            out[s] += areas[s] * (j[0].min(0.0) + j[1].min(0.0)).abs();
        }
        theta.push(
            out.iter()
                .zip(&curve.segment_mass)
                .map(|(o, m)| if o * dt > *m { m / (o * dt) } else { 1.0 })
                .collect(),
        );
    }
    for (ji, jn) in state.junctions.iter().enumerate() {
        let Some(flux) = r.junction_flux[ji].as_mut() else { continue };
        let len = r.junction_length[ji];
        let mut cap: f64 = 1.0;
        for (k, &(c, end)) in jn.incident.iter().enumerate() {
            if flux.mdot[k] < 0.0 {
                let curve = &state.curves[c];
                let s = curve.end_segment(end);
                let (a, b) = curve.segment(s);
                let area = crate::geometry::measure::segment_measure(state.mode, a, b);
                let j = r.sorption[c][s];
                let sorb_out = area * (j[0].min(0.0) + j[1].min(0.0)).abs() * theta[c][s];
                let avail = curve.segment_mass[s] - sorb_out * dt;
                let need = -flux.mdot[k] * len * dt;
                if need > avail {
                    cap = cap.min((avail / need).max(0.0));
                }
            }
        }
        if cap < 1.0 {
            for (k, &(c, end)) in jn.incident.iter().enumerate() {
                let s = state.curves[c].end_segment(end);
                r.segment_mass_rate[c][s] -= flux.mdot[k] * len * (1.0 - cap);
                flux.mdot[k] *= cap;
            }
        }
    }
    for (ci, curve) in state.curves.iter().enumerate() {
        let areas = curve.segment_measures();
        for s in 0..areas.len() {
            if theta[ci][s] < 1.0 {
                let sides = [&curve.side_minus, &curve.side_plus];
                for k in 0..2 {
                    let j = r.sorption[ci][s][k];
                    if j < 0.0 {
                        let cut = j * areas[s] * (1.0 - theta[ci][s]);
                        r.segment_mass_rate[ci][s] -= cut;
                        let p = state.phase_index(sides[k]).expect("validated label");
                        r.phase_mass_rate[p] += cut;
                        r.sorption[ci][s][k] *= theta[ci][s];
                    }
                }
            }
        }
    }
}

/// Moves the markers with `velocities` and adds `segment_sources · dt` to the
/// segment masses. Masses ride with their segments, so stretching dilutes the
/// surface density without changing the total.
pub fn advance_surface_density(
    curve: &MarkerCurve,
    velocities: &[Vec2],
    segment_sources: &[f64],
    dt: f64,
) -> Result<MarkerCurve> {
    if velocities.len() != curve.markers.len() || segment_sources.len() != curve.segment_count() {
        return Err(Error::InvalidInput(format!("curve {}: rate arrays do not match its size", curve.id)));
    }
    if !(dt >= 0.0) {
        return Err(Error::InvalidInput(format!("negative time step {dt}")));
    }
    let mut out = curve.clone();
    for (p, v) in out.markers.iter_mut().zip(velocities) {
        *p += v * dt;
    }
    let scale = curve.total_mass().max(f64::MIN_POSITIVE);
    for (m, src) in out.segment_mass.iter_mut().zip(segment_sources) {
        *m += src * dt;
        if *m < 0.0 {
            assert!(*m > -1e-12 * scale, "curve {}: segment mass {m} after flux capping", curve.id);
            *m = 0.0;
        }
    }
    if out.mode == Mode::Axisymmetric {
        for p in &mut out.markers {
            if p.x < 0.0 && p.x > -1e-14 {
                p.x = 0.0;
            }
        }
    }
    Ok(out)
}

fn apply(state: &SimState, r: &Rates, dt: f64) -> Result<SimState> {
    let mut next = state.clone();
    for (ci, curve) in state.curves.iter().enumerate() {
        next.curves[ci] = advance_surface_density(curve, &r.velocity[ci], &r.segment_mass_rate[ci], dt)?;
    }
    for (ji, jn) in next.junctions.iter_mut().enumerate() {
        jn.position += r.junction_velocity[ji] * dt;
        for &(c, end) in &jn.incident {
            let i = next.curves[c].end_marker(end);
            next.curves[c].markers[i] = jn.position;
        }
    }
    for (p, rate) in next.phases.iter_mut().zip(&r.phase_mass_rate) {
        p.mass += rate * dt;
    }
    next.t += dt;
    Ok(next)
}

/// Largest stable explicit step, before the safety factor.
///
/// Combines the curvature-flow bound `h_a h_b/(2 m γ)` over adjacent segment
/// pairs (with `m` the larger of the normal and slip mobilities; the sawtooth
/// mode of a uniform chain decays at rate `4 m γ / h²`, and explicit Euler
/// needs `dt` times that below 2), the junction relaxation `h/(m_C Σγ)`, the
/// bulk pressure stiffness, and the relaxation rates of sorption and
/// junction transfer.
pub fn stability_bound(state: &SimState) -> Result<f64> {
    stability_bound_with(state, &compute_forces(state)?)
}

fn stability_bound_with(state: &SimState, forces: &Forces) -> Result<f64> {
    let mut bound = f64::INFINITY;
    each_bound(state, forces, &mut |_, dt| bound = bound.min(dt));
    Ok(bound)
}

/// Which stiffness a [`stability_terms`] entry comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundSource {
    Curvature { curve: usize },
    Sorption { curve: usize, segment: usize },
    JunctionMotion { junction: usize },
    JunctionTransfer { junction: usize },
    Bulk { phase: usize },
}

/// Every term of [`stability_bound`], before the safety factor, smallest
/// first.
pub fn stability_terms(state: &SimState) -> Result<Vec<(BoundSource, f64)>> {
    let forces = compute_forces(state)?;
    let mut terms = vec![];
    each_bound(state, &forces, &mut |src, dt| terms.push((src, dt)));
    terms.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(terms)
}

fn each_bound(state: &SimState, forces: &Forces, emit: &mut dyn FnMut(BoundSource, f64)) {
    let m_n = state.normal_mobility;
    let mut boundary_measure = vec![0.0; state.phases.len()];
    for (ci, curve) in state.curves.iter().enumerate() {
        let phys = &state.physics[ci];
        // Gershgorin on the chain's curvature operator: marker i between
        // segments a and b relaxes no faster than 4 m γ / (a b)
        let lengths = curve.segment_lengths();
        let nl = lengths.len();
        let pairs = if curve.closed { nl } else { nl.saturating_sub(1) };
        let h2 = if pairs == 0 {
            lengths[0] * lengths[0]
        } else {
            (0..pairs).map(|k| lengths[k] * lengths[(k + 1) % nl]).fold(f64::INFINITY, f64::min)
        };
        let gamma = phys.eos.gamma0;
        let mobility = match phys.slip {
            Some(s) => m_n.max(1.0 / s.total()),
            None => m_n,
        };
        emit(BoundSource::Curvature { curve: ci }, 0.5 * h2 / (mobility * gamma));
        let measure = curve.measure();
        for side in [&curve.side_minus, &curve.side_plus] {
            boundary_measure[state.phase_index(side).expect("validated label")] += measure;
        }
        let areas = curve.segment_measures();
        for (s, area) in areas.iter().enumerate() {
            let rho_s = curve.segment_mass[s] / area;
            if rho_s <= 0.0 {
                continue;
            }
            let dmu = phys.eos.gamma0 / (phys.eos.rho_star * rho_s);
            let mu_s = phys.eos.mu(rho_s);
            let mut rate = 0.0;
            for (p, side) in [(phys.sorption_minus, &curve.side_minus), (phys.sorption_plus, &curve.side_plus)] {
                if let Some(p) = p {
                    let mu_b = forces.phases[state.phase_index(side).unwrap()].state.mu;
                    let e = ((mu_b - mu_s) / p.a_sigma).exp();
                    rate += p.k_de * (e * rho_s * dmu / p.a_sigma + (e - 1.0).abs());
                }
            }
            if rate > 0.0 {
                emit(BoundSource::Sorption { curve: ci, segment: s }, 1.0 / rate);
            }
        }
    }
    for (ji, jn) in state.junctions.iter().enumerate() {
        let sum_gamma: f64 = jn.incident.iter().map(|&(c, _)| state.physics[c].eos.gamma0).sum();
        let h = jn
            .incident
            .iter()
            .map(|&(c, end)| {
                let (a, b) = state.curves[c].segment(state.curves[c].end_segment(end));
                (b - a).norm()
            })
            .fold(f64::INFINITY, f64::min);
        if jn.mobility > 0.0 {
            let len = junction_length(state.mode, jn.position);
            emit(BoundSource::JunctionMotion { junction: ji }, h / (jn.mobility * sum_gamma * len));
        }
        if let Some(crate::exchange::JunctionClosure {
            mode: crate::exchange::ClosureMode::Linear { transfer_coefficient: l },
            ..
        }) = jn.closure
        {
            let len = junction_length(state.mode, jn.position);
            let mut rate: f64 = 0.0;
            for &(c, end) in &jn.incident {
                let curve = &state.curves[c];
                let s = curve.end_segment(end);
                let (a, b) = curve.segment(s);
                let area = crate::geometry::measure::segment_measure(state.mode, a, b);
                let rho = curve.segment_mass[s] / area;
                if rho > 0.0 {
                    let eos = &state.physics[c].eos;
                    rate = rate.max(l * len * eos.gamma0 / (eos.rho_star * rho * area));
                }
            }
            if rate > 0.0 {
                emit(BoundSource::JunctionTransfer { junction: ji }, 1.0 / rate);
            }
        }
    }
    for (k, p) in forces.phases.iter().enumerate() {
        let stiff = m_n * state.phases[k].eos.c2 * p.rho / p.measure * boundary_measure[k];
        if stiff > 0.0 {
            emit(BoundSource::Bulk { phase: k }, 1.0 / stiff);
        }
    }
}

/// One explicit step. Returns the new state and the rates evaluated at the
/// old state, which define this step's dissipation record.
pub fn step(state: &SimState, params: &StepParams) -> Result<(SimState, Rates)> {
    step_from(state, params, rates(state)?)
}

/// [`step`] with the rates at `state` already evaluated.
pub(crate) fn step_from(state: &SimState, params: &StepParams, mut r1: Rates) -> Result<(SimState, Rates)> {
    let dt = params.dt;
    if !(dt >= 0.0) {
        return Err(Error::InvalidInput(format!("negative time step {dt}")));
    }
    let dt_max = params.cfl_safety * stability_bound_with(state, &r1.forces)?;
    if dt > dt_max * (1.0 + 1e-12) {
        return Err(Error::StepRejected { dt, dt_max });
    }
    let mut next = match params.scheme {
        Scheme::Euler => {
            cap_fluxes(state, &mut r1, dt);
            apply(state, &r1, dt)?
        }
        Scheme::Rk2 => {
            let mut half = r1.clone();
            cap_fluxes(state, &mut half, 0.5 * dt);
            let mid = apply(state, &half, 0.5 * dt)?;
            let mut r2 = rates(&mid)?;
            cap_fluxes(state, &mut r2, dt);
            cap_fluxes(state, &mut r1, dt);
            apply(state, &r2, dt)?
        }
    };
    next.step = state.step + 1;
    next.velocity = r1.velocity.clone();
    next.normal_speed = state
        .curves
        .iter()
        .enumerate()
        .map(|(ci, c)| (0..c.markers.len()).map(|i| r1.velocity[ci][i].dot(&marker_normal(c, i))).collect())
        .collect();
    for j in 0..next.junctions.len() {
        check_angles(&next, j)?;
    }
    for (c, p) in next.curves.iter().zip(&next.physics) {
        for rho in c.densities() {
            p.eos.eval(rho)?;
        }
    }
    next.phase_evals()?;
    Ok((next, r1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::test_util::*;
    use crate::geometry::measure::segment_measure;

    fn euler(dt: f64) -> StepParams {
        StepParams { dt, cfl_safety: 1.0, scheme: Scheme::Euler }
    }

    #[test]
    fn discrete_equilibrium_is_a_fixed_point() {
        let s = bubble_state(48, 1.0, true);
        let dt = 0.5 * stability_bound(&s).unwrap();
        let (next, r) = step(&s, &euler(dt)).unwrap();
        let moved = next.curves[0]
            .markers
            .iter()
            .zip(&s.curves[0].markers)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(moved < 1e-12, "{moved}");
        assert!(r.max_speed() < 1e-12);
        assert_eq!(next.curves[0].segment_mass, s.curves[0].segment_mass);
    }

    #[test]
    fn stretching_dilutes_density() {
        let s = straight_state();
        let c = &s.curves[0];
        let v: Vec<Vec2> = c.markers.iter().map(|p| *p).collect();
        let out = advance_surface_density(c, &v, &vec![0.0; c.segment_count()], 1.0).unwrap();
        for (a, b) in out.densities().iter().zip(c.densities()) {
            assert!((a - 0.5 * b).abs() < 1e-15);
        }
        assert!((out.total_mass() - c.total_mass()).abs() < 1e-15);
    }

    #[test]
    fn constant_source_adds_exact_mass() {
        let s = straight_state();
        let c = &s.curves[0];
        let j = 0.37;
        let dt = 1e-3;
        let src: Vec<f64> = (0..c.segment_count())
            .map(|k| {
                let (a, b) = c.segment(k);
                j * segment_measure(Mode::Planar, a, b)
            })
            .collect();
        let out = advance_surface_density(c, &vec![Vec2::zeros(); c.markers.len()], &src, dt).unwrap();
        let added = out.total_mass() - c.total_mass();
        assert!((added - j * c.arclength() * dt).abs() < 1e-14);
        let same = advance_surface_density(c, &vec![Vec2::new(1.0, 2.0); c.markers.len()], &src, 0.0).unwrap();
        assert_eq!(&same, c);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let s = bubble_state(48, 1.0, false);
        let bound = stability_bound(&s).unwrap();
        assert!(matches!(step(&s, &euler(2.0 * bound)), Err(Error::StepRejected { .. })));
    }

    #[test]
    fn marangoni_flow_moves_toward_high_tension() {
        let mut s = straight_state();
        let n = s.curves[0].segment_count();
        for k in 0..n {
            s.curves[0].segment_mass[k] *= 1.0 + 0.5 * k as f64 / n as f64;
        }
        let r = rates(&s).unwrap();
        // density grows with x, so tension falls with x and the surface flows to -x
        for v in &r.velocity[0][1..n] {
            assert!(v.x < 0.0);
            assert!(v.y.abs() < 1e-14);
        }
    }
}
