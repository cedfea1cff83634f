use std::collections::BTreeMap;

use super::{CurveSpec, FieldError, GeometrySpec, NetworkSpec, ScenarioConfig, ShapeSpec, WallSpec};
use crate::dynamics::{InterfacePhysics, PhaseReservoir, SimState};
use crate::error::{Error, Result};
use crate::geometry::{
    region_measure, Constraint, CurveEnd, Domain, Endpoint, MarkerCurve, Mode, PhaseTopology, TripleJunction,
    Vec2, Wall,
};
use crate::thermo::{BulkEos, SurfaceEos};

fn arc(center: [f64; 2], radius: f64, from_deg: f64, to_deg: f64) -> ShapeSpec {
    ShapeSpec::Arc { center, radius, aspect: 1.0, from_deg, to_deg }
}

#[allow(clippy::too_many_arguments)]
fn curve(id: &str, interface: &str, minus: &str, plus: &str, shape: ShapeSpec, markers: usize, start: &str, end: &str) -> CurveSpec {
    CurveSpec {
        id: id.into(),
        interface: interface.into(),
        minus: minus.into(),
        plus: plus.into(),
        shape,
        markers,
        start: start.into(),
        end: end.into(),
        constraint: Constraint::None,
    }
}

/// Circle through `(-w, 0)`, `(0, h)` and `(w, 0)`: centre height and radius.
fn cap_circle(w: f64, h: f64) -> (f64, f64) {
    let yc = (h * h - w * w) / (2.0 * h);
    (yc, h - yc)
}

/// The box outline counter-clockwise, or in axisymmetric mode the three
/// sides off the axis.
fn box_wall(cfg: &ScenarioConfig, phase: &str) -> WallSpec {
    let ([x0, y0], [x1, y1]) = (cfg.domain.min, cfg.domain.max);
    let points = match cfg.mode {
        Mode::Planar => vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]],
        Mode::Axisymmetric => vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
    };
    WallSpec { phase: phase.into(), points }
}

/// Expands a geometry primitive into an explicit network, checking its
/// parameters.
pub fn expand_geometry(cfg: &ScenarioConfig) -> Result<NetworkSpec, Vec<FieldError>> {
    let mut errs = vec![];
    let mut check = |ok: bool, field: &str, reason: &str| {
        if !ok {
            errs.push(FieldError { field: format!("geometry.{field}"), reason: reason.into() });
        }
    };
    let axi = cfg.mode == Mode::Axisymmetric;
    let ([x0, y0], [x1, y1]) = (cfg.domain.min, cfg.domain.max);
    let inside = |p: [f64; 2]| p[0] > x0 && p[0] < x1 && p[1] > y0 && p[1] < y1;
    let net = match &cfg.geometry {
        GeometrySpec::Bubble { center, semi_axes, markers } => {
            let [a, b] = *semi_axes;
            check(a > 0.0 && b > 0.0, "semi_axes", "must be positive");
            check(*markers >= 3, "markers", "need at least 3");
            if axi {
                check(center[0] == 0.0, "center", "axisymmetric bubbles are centred on the axis");
            }
            let lo = if axi { [center[0] + a, center[1] - b] } else { [center[0] - a, center[1] - b] };
            check(inside(lo) && inside([center[0] + a, center[1] + b]), "semi_axes", "bubble must fit inside the domain");
            let shape = ShapeSpec::Arc {
                center: *center,
                radius: a,
                aspect: b / a,
                from_deg: if axi { -90.0 } else { 0.0 },
                to_deg: if axi { 90.0 } else { 360.0 },
            };
            let ends = if axi { "axis" } else { "free" };
            NetworkSpec {
                curve: vec![curve("interface", "interface", "outside", "inside", shape, *markers, ends, ends)],
                wall: vec![box_wall(cfg, "outside")],
            }
        }
        GeometrySpec::Lens { half_width: w, top_height: ht, bottom_height: hb, markers } => {
            let (w, ht, hb, n) = (*w, *ht, *hb, *markers);
            check(w > 0.0, "half_width", "must be positive");
            check(ht > 0.0 && hb > 0.0, "top_height", "cap heights must be positive");
            check(n >= 3, "markers", "need at least 3");
            check(inside([if axi { w * 0.5 } else { -w }, -hb]) && inside([w, ht]), "half_width", "lens must fit inside the domain");
            if !errs.is_empty() {
                return Err(errs);
            }
            let (yt, rt) = cap_circle(w, ht);
            let (yb, rb) = cap_circle(w, hb);
            let right = (-yt).atan2(w).to_degrees();
            let phi = yb.atan2(w).to_degrees();
            if axi {
                NetworkSpec {
                    curve: vec![
                        curve("top", "top", "upper", "outer", arc([0.0, yt], rt, 90.0, right), n, "axis", "junction:rim"),
                        curve(
                            "middle",
                            "middle",
                            "lower",
                            "upper",
                            ShapeSpec::Chain { points: vec![[0.0, 0.0], [w, 0.0]] },
                            n,
                            "axis",
                            "junction:rim",
                        ),
                        curve("bottom", "bottom", "outer", "lower", arc([0.0, -yb], rb, 270.0, 360.0 + phi), n, "axis", "junction:rim"),
                    ],
                    wall: vec![box_wall(cfg, "outer")],
                }
            } else {
                NetworkSpec {
                    curve: vec![
                        curve("top", "top", "outer", "upper", arc([0.0, yt], rt, right, 180.0 - right), n, "junction:right", "junction:left"),
                        curve(
                            "middle",
                            "middle",
                            "lower",
                            "upper",
                            ShapeSpec::Chain { points: vec![[-w, 0.0], [w, 0.0]] },
                            n,
                            "junction:left",
                            "junction:right",
                        ),
                        curve(
                            "bottom",
                            "bottom",
                            "outer",
                            "lower",
                            arc([0.0, -yb], rb, 180.0 - phi, 360.0 + phi),
                            n,
                            "junction:left",
                            "junction:right",
                        ),
                    ],
                    wall: vec![box_wall(cfg, "outer")],
                }
            }
        }
        GeometrySpec::SessileDrop { half_width: w, height: h, markers, substrate_markers } => {
            let (w, h) = (*w, *h);
            check(!axi, "kind", "sessile_drop is planar only");
            check(w > 0.0 && h > 0.0, "half_width", "half_width and height must be positive");
            check(*markers >= 3 && *substrate_markers >= 3, "markers", "need at least 3");
            check(y0 < 0.0 && inside([-w, h]) && inside([w, 0.5 * h]), "half_width", "drop and support must fit inside the domain");
            if !errs.is_empty() {
                return Err(errs);
            }
            let (yc, r) = cap_circle(w, h);
            let right = (-yc).atan2(w).to_degrees();
            let flat = |a: f64, b: f64| ShapeSpec::Chain { points: vec![[a, 0.0], [b, 0.0]] };
            let mut curves = vec![
                curve("liquid_vapor", "liquid_vapor", "vapor", "liquid", arc([0.0, yc], r, right, 180.0 - right), *markers, "junction:right", "junction:left"),
                curve("solid_liquid", "solid_liquid", "solid", "liquid", flat(-w, w), *substrate_markers, "junction:left", "junction:right"),
                curve("solid_vapor_left", "solid_vapor", "solid", "vapor", flat(x0, -w), *substrate_markers, "outer", "junction:left"),
                curve("solid_vapor_right", "solid_vapor", "solid", "vapor", flat(w, x1), *substrate_markers, "junction:right", "outer"),
            ];
            for c in &mut curves[1..] {
                c.constraint = Constraint::Horizontal;
            }
            NetworkSpec {
                curve: curves,
                wall: vec![
                    WallSpec { phase: "vapor".into(), points: vec![[x1, 0.0], [x1, y1], [x0, y1], [x0, 0.0]] },
                    WallSpec { phase: "solid".into(), points: vec![[x0, 0.0], [x0, y0], [x1, y0], [x1, 0.0]] },
                ],
            }
        }
        GeometrySpec::Network(net) => {
            for c in &net.curve {
                check(c.markers >= 3, &format!("curve.{}.markers", c.id), "need at least 3");
                for e in [&c.start, &c.end] {
                    check(parse_end(e).is_some(), &format!("curve.{}", c.id), "ends are free, outer, axis or junction:<name>");
                }
                match &c.shape {
                    ShapeSpec::Arc { radius, aspect, from_deg, to_deg, .. } => check(
                        *radius > 0.0 && *aspect > 0.0 && from_deg != to_deg,
                        &format!("curve.{}.shape", c.id),
                        "arc needs positive radius and aspect and a nonempty angle range",
                    ),
                    ShapeSpec::Chain { points } => check(
                        points.len() >= 2 && points.windows(2).any(|p| p[0] != p[1]),
                        &format!("curve.{}.shape", c.id),
                        "chain needs at least two distinct points",
                    ),
                }
            }
            let mut ids: Vec<&str> = net.curve.iter().map(|c| c.id.as_str()).collect();
            ids.sort();
            ids.dedup();
            check(ids.len() == net.curve.len(), "curve", "curve ids must be unique");
            check(!net.curve.is_empty(), "curve", "need at least one curve");
            net.clone()
        }
    };
    if errs.is_empty() {
        Ok(net)
    } else {
        Err(errs)
    }
}

enum End {
    Free,
    Outer,
    Axis,
    Junction(String),
}

fn parse_end(s: &str) -> Option<End> {
    match s {
        "free" => Some(End::Free),
        "outer" => Some(End::Outer),
        "axis" => Some(End::Axis),
        _ => s.strip_prefix("junction:").filter(|n| !n.is_empty()).map(|n| End::Junction(n.into())),
    }
}

fn is_closed(shape: &ShapeSpec) -> bool {
    matches!(shape, ShapeSpec::Arc { from_deg, to_deg, .. } if ((to_deg - from_deg).abs() - 360.0).abs() < 1e-9)
}

fn sample(shape: &ShapeSpec, n: usize) -> Vec<Vec2> {
    match shape {
        ShapeSpec::Arc { center, radius, aspect, from_deg, to_deg } => {
            let closed = is_closed(shape);
            let steps = if closed { n } else { n - 1 };
            (0..n)
                .map(|k| {
                    let a = (from_deg + (to_deg - from_deg) * k as f64 / steps as f64).to_radians();
                    Vec2::new(center[0] + radius * a.cos(), center[1] + aspect * radius * a.sin())
                })
                .collect()
        }
        ShapeSpec::Chain { points } => {
            let pts: Vec<Vec2> = points.iter().map(|p| Vec2::new(p[0], p[1])).collect();
            let mut cum = vec![0.0];
            for w in pts.windows(2) {
                cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
            }
            let total = *cum.last().unwrap();
            let mut out: Vec<Vec2> = (0..n)
                .map(|k| {
                    let s = total * k as f64 / (n - 1) as f64;
                    let i = cum.partition_point(|c| *c <= s).clamp(1, pts.len() - 1) - 1;
                    let len = cum[i + 1] - cum[i];
                    if len == 0.0 {
                        pts[i]
                    } else {
                        pts[i] + (pts[i + 1] - pts[i]) * ((s - cum[i]) / len)
                    }
                })
                .collect();
            out[0] = pts[0];
            out[n - 1] = *pts.last().unwrap();
            out
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

/// Builds the initial [`SimState`]. Junction positions are taken from the
/// first curve end that names them and the other ends are snapped onto it.
pub fn build_state(cfg: &ScenarioConfig) -> Result<SimState> {
    let net = expand_geometry(cfg)
        .map_err(|e| invalid(e.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")))?;
    let mode = cfg.mode;
    let mut junction_names: Vec<String> = vec![];
    let mut incident: Vec<Vec<(usize, CurveEnd)>> = vec![];
    let mut curves = Vec::with_capacity(net.curve.len());
    let mut physics = Vec::with_capacity(net.curve.len());
    for (ci, c) in net.curve.iter().enumerate() {
        let spec = cfg
            .interface
            .get(&c.interface)
            .ok_or_else(|| invalid(format!("curve {} uses unknown interface {}", c.id, c.interface)))?;
        let closed = is_closed(&c.shape);
        let mut markers = sample(&c.shape, c.markers);
        let mut ends = [Endpoint::Free; 2];
        if !closed {
            for (k, (name, which)) in [(&c.start, CurveEnd::Start), (&c.end, CurveEnd::End)].into_iter().enumerate() {
                let idx = if k == 0 { 0 } else { markers.len() - 1 };
                ends[k] = match parse_end(name).ok_or_else(|| invalid(format!("curve {}: bad end {name}", c.id)))? {
                    End::Free => Endpoint::Free,
                    End::Outer => Endpoint::OuterBoundary,
                    End::Axis => {
                        markers[idx].x = 0.0;
                        Endpoint::Axis
                    }
                    End::Junction(j) => {
                        let ji = match junction_names.iter().position(|n| *n == j) {
                            Some(ji) => ji,
                            None => {
                                junction_names.push(j);
                                incident.push(vec![]);
                                junction_names.len() - 1
                            }
                        };
                        incident[ji].push((ci, which));
                        Endpoint::Junction(ji)
                    }
                };
            }
        }
        let mut curve = MarkerCurve {
            id: c.id.clone(),
            markers,
            segment_mass: vec![],
            side_minus: c.minus.clone(),
            side_plus: c.plus.clone(),
            start: ends[0],
            end: ends[1],
            closed,
            mode,
            constraint: c.constraint,
        };
        curve.segment_mass = vec![0.0; curve.segment_count()];
        curves.push(curve);
        let sorption = |side: &str| spec.sorption.get(side).copied();
        physics.push(InterfacePhysics {
            eos: SurfaceEos { gamma0: spec.gamma0, rho_star: spec.rho_star, psi_offset: spec.psi_offset },
            sorption_minus: sorption(&c.minus),
            sorption_plus: sorption(&c.plus),
            slip: spec.slip,
        });
    }
    let mut junctions = Vec::with_capacity(junction_names.len());
    for (name, inc) in junction_names.iter().zip(&incident) {
        let inc: [(usize, CurveEnd); 3] = inc
            .clone()
            .try_into()
            .map_err(|v: Vec<_>| invalid(format!("junction {name} joins {} curve ends, need 3", v.len())))?;
        // prefer an end of a straight chain, which is exact in the input
        let (c0, e0) = *inc
            .iter()
            .find(|(c, _)| matches!(net.curve[*c].shape, ShapeSpec::Chain { .. }))
            .unwrap_or(&inc[0]);
        let position = curves[c0].markers[curves[c0].end_marker(e0)];
        for &(c, e) in &inc {
            let i = curves[c].end_marker(e);
            curves[c].markers[i] = position;
        }
        junctions.push(TripleJunction {
            id: name.clone(),
            position,
            incident: inc,
            line_tension: cfg.junction.line_tension,
            mobility: cfg.junction.mobility,
            closure: cfg.junction.closure.map(|c| c.closure()),
        });
    }
    for (curve, c) in curves.iter_mut().zip(&net.curve) {
        let rho = cfg.interface[&c.interface].density;
        curve.segment_mass = curve.segment_measures().iter().map(|a| rho * a).collect();
    }
    let topology = PhaseTopology {
        mode,
        phases: cfg.phase.keys().cloned().collect(),
        walls: net
            .wall
            .iter()
            .map(|w| Wall { phase: w.phase.clone(), points: w.points.iter().map(|p| Vec2::new(p[0], p[1])).collect() })
            .collect(),
        domain: Domain::Box {
            min: Vec2::new(cfg.domain.min[0], cfg.domain.min[1]),
            max: Vec2::new(cfg.domain.max[0], cfg.domain.max[1]),
        },
    };
    let measures: BTreeMap<String, f64> = region_measure(&topology, &curves)?;
    let phases = cfg
        .phase
        .iter()
        .map(|(label, p)| PhaseReservoir {
            label: label.clone(),
            mass: p.mass.unwrap_or_else(|| p.density.unwrap_or(0.0) * measures[label]),
            eos: BulkEos { rho_ref: p.rho_ref, p_ref: p.p_ref, c2: p.c2 },
        })
        .collect();
    Ok(SimState {
        mode,
        curves,
        physics,
        junctions,
        phases,
        topology,
        normal_mobility: cfg.mobility.normal,
        t: 0.0,
        step: 0,
        velocity: vec![],
        normal_speed: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::super::{parse_scenario, preset};
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lens_regions_partition_the_box() {
        let cfg = parse_scenario(preset("lens_equal_tensions").unwrap()).unwrap();
        let s = build_state(&cfg).unwrap();
        s.validate().unwrap();
        let m = region_measure(&s.topology, &s.curves).unwrap();
        assert!((m["upper"] - m["lower"]).abs() < 1e-12);
        assert_eq!(s.junctions.len(), 2);
        assert_eq!(s.junctions[0].position, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn axisymmetric_bubble_volume() {
        let mut cfg = parse_scenario(preset("bubble_axisymmetric").unwrap()).unwrap();
        if let GeometrySpec::Bubble { markers, semi_axes, .. } = &mut cfg.geometry {
            *markers = 400;
            *semi_axes = [1.0, 1.0];
        }
        let s = build_state(&cfg).unwrap();
        let m = region_measure(&s.topology, &s.curves).unwrap();
        assert!((m["inside"] - 4.0 / 3.0 * PI).abs() < 1e-3, "{}", m["inside"]);
        assert_eq!(s.curves[0].markers[0].x, 0.0);
    }

    #[test]
    fn chain_resampling_is_uniform() {
        let pts = sample(&ShapeSpec::Chain { points: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]] }, 7);
        for w in pts.windows(2) {
            assert!(((w[1] - w[0]).norm() - 0.5).abs() < 1e-12);
        }
        assert_eq!(pts[6], Vec2::new(1.0, 2.0));
    }
}
