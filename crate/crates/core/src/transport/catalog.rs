//! The shipped verification cases.

use std::f64::consts::PI;

use super::shapes::{Affine, Line, Surface, V3};
use super::{AnalyticCase, CaseGeometry, Expectation, FieldValue};

fn one(_: &V3, _: f64) -> FieldValue {
    FieldValue { value: 1.0, grad: V3::zeros(), dt: 0.0 }
}

fn zero(_: &V3, _: f64) -> FieldValue {
    FieldValue { value: 0.0, grad: V3::zeros(), dt: 0.0 }
}

fn quadratic(x: &V3, _: f64) -> FieldValue {
    FieldValue { value: x.x * x.x + x.y * x.z, grad: V3::new(2.0 * x.x, x.z, x.y), dt: 0.0 }
}

fn height(x: &V3, _: f64) -> FieldValue {
    FieldValue { value: x.z, grad: V3::z(), dt: 0.0 }
}

/// `sin(x + t/2) cos y + 0.3 z² t`
fn wave(x: &V3, t: f64) -> FieldValue {
    let (s, c) = (x.x + 0.5 * t).sin_cos();
    let (sy, cy) = x.y.sin_cos();
    FieldValue {
        value: s * cy + 0.3 * x.z * x.z * t,
        grad: V3::new(c * cy, -s * sy, 0.6 * x.z * t),
        dt: 0.5 * c * cy + 0.3 * x.z * x.z,
    }
}

/// `exp(-|x|²/4) (1 + t/2 + t²)`
fn glow(x: &V3, t: f64) -> FieldValue {
    let e = (-x.norm_squared() / 4.0).exp();
    let f = 1.0 + 0.5 * t + t * t;
    FieldValue { value: e * f, grad: -x * (0.5 * e * f), dt: e * (0.5 + 2.0 * t) }
}

const DRIFT: V3 = V3::new(0.3, -0.2, 0.5);

/// A field frozen into a body translating with `DRIFT`.
fn carried(x: &V3, t: f64) -> FieldValue {
    let y = x - DRIFT * t;
    let grad = V3::new(2.0 * y.x, y.z * y.y.cos(), y.y.sin());
    FieldValue { value: y.x * y.x + y.y.sin() * y.z, grad, dt: -DRIFT.dot(&grad) }
}

fn fixed_origin(_: f64) -> (V3, V3) {
    (V3::zeros(), V3::zeros())
}

fn unit_axes(_: f64) -> (V3, V3) {
    (V3::repeat(1.0), V3::zeros())
}

fn growing_axes(t: f64) -> (V3, V3) {
    (V3::repeat(1.0 + t), V3::repeat(1.0))
}

fn wobbling_center(t: f64) -> (V3, V3) {
    (V3::new(0.2 * t.sin(), 0.1 * t * t, 0.05 * t), V3::new(0.2 * t.cos(), 0.2 * t, 0.05))
}

fn wobbling_axes(t: f64) -> (V3, V3) {
    (V3::new(1.0 + 0.3 * t.sin(), 0.8 + 0.1 * t, 0.7 + 0.2 * t * t), V3::new(0.3 * t.cos(), 0.1, 0.4 * t))
}

fn drifting_center(t: f64) -> (V3, V3) {
    (V3::new(0.1 * t, 0.0, 0.2 * t.sin()), V3::new(0.1, 0.0, 0.2 * t.cos()))
}

/// Spheroid, so a spin about `z` is tangential.
fn spheroid_axes(t: f64) -> (V3, V3) {
    let a = 1.0 + 0.2 * (1.3 * t).sin();
    let da = 0.26 * (1.3 * t).cos();
    (V3::new(a, a, 0.7 + 0.1 * t), V3::new(da, da, 0.1))
}

fn growing_radius(t: f64) -> (f64, f64) {
    (1.0 + t, 1.0)
}

fn breathing_radius(t: f64) -> (f64, f64) {
    (1.0 + 0.2 * t.sin(), 0.2 * t.cos())
}

fn no_pitch(_: f64) -> (f64, f64) {
    (0.0, 0.0)
}

fn stretching_pitch(t: f64) -> (f64, f64) {
    (0.3 + 0.1 * t, 0.1)
}

fn lower_end(t: f64) -> (f64, f64) {
    (0.2 * t, 0.2)
}

fn upper_end(t: f64) -> (f64, f64) {
    (2.0 + 0.5 * t * t, t)
}

fn plane_point(t: f64) -> (V3, V3) {
    (V3::new(0.1 * t, -0.05 * t, 0.2 * t.sin()), V3::new(0.1, -0.05, 0.2 * t.cos()))
}

/// All shipped cases, covering each theorem with static, exact and
/// converging examples.
pub fn catalog() -> Vec<AnalyticCase> {
    let fixed = Affine { center: fixed_origin, axes: unit_axes, spin: V3::zeros() };
    let growing = Affine { center: fixed_origin, axes: growing_axes, spin: V3::zeros() };
    let wobbling = Affine { center: wobbling_center, axes: wobbling_axes, spin: V3::zeros() };
    let spheroid = Affine { center: drifting_center, axes: spheroid_axes, spin: V3::new(0.0, 0.0, 0.8) };
    let tilt = V3::new(1.0, 0.0, 0.3).normalize();
    vec![
        AnalyticCase {
            name: "vol_static_ball",
            geometry: CaseGeometry::Volume { interface: fixed, control: 3.0, inside: quadratic, outside: height },
            t: 0.0,
            reference: Some(0.0),
            expectation: Expectation::Exact,
        },
        AnalyticCase {
            name: "vol_expanding_ball",
            geometry: CaseGeometry::Volume { interface: growing, control: 3.0, inside: one, outside: zero },
            t: 0.0,
            reference: Some(4.0 * PI),
            expectation: Expectation::Converges,
        },
        AnalyticCase {
            name: "vol_moving_ellipsoid",
            geometry: CaseGeometry::Volume { interface: wobbling, control: 3.0, inside: wave, outside: glow },
            t: 0.3,
            reference: None,
            expectation: Expectation::Converges,
        },
        AnalyticCase {
            name: "surf_static_sphere",
            geometry: CaseGeometry::Surface { surface: Surface::Ellipsoid(fixed), field: quadratic },
            t: 0.0,
            reference: Some(0.0),
            expectation: Expectation::Exact,
        },
        AnalyticCase {
            name: "surf_expanding_sphere",
            geometry: CaseGeometry::Surface { surface: Surface::Ellipsoid(growing), field: one },
            t: 0.0,
            reference: Some(8.0 * PI),
            // d/dt R² is linear, which the central difference reproduces
            expectation: Expectation::Exact,
        },
        AnalyticCase {
            name: "surf_deforming_ellipsoid",
            geometry: CaseGeometry::Surface { surface: Surface::Ellipsoid(spheroid), field: wave },
            t: 0.2,
            reference: None,
            expectation: Expectation::Converges,
        },
        AnalyticCase {
            name: "surf_expanding_sphere_cap",
            geometry: CaseGeometry::Surface {
                surface: Surface::SphereCap { radius: growing_radius, cut: 0.4, spin: 0.7 },
                field: wave,
            },
            t: 0.0,
            reference: None,
            expectation: Expectation::Converges,
        },
        AnalyticCase {
            name: "surf_translating_tilted_disk",
            geometry: CaseGeometry::Surface {
                surface: Surface::PlaneInBox {
                    normal: V3::new(0.3, -0.4, 1.0),
                    point: plane_point,
                    spin: 0.5,
                    lo: V3::new(-1.0, -0.8, -1.0),
                    hi: V3::new(1.0, 0.9, 1.0),
                },
                field: glow,
            },
            t: 0.1,
            reference: None,
            expectation: Expectation::Converges,
        },
        AnalyticCase {
            name: "line_expanding_circle",
            geometry: CaseGeometry::Line {
                line: Line::Helix { radius: growing_radius, spin: 0.0, pitch: no_pitch, ends: None },
                field: one,
            },
            t: 0.0,
            reference: Some(2.0 * PI),
            expectation: Expectation::Exact,
        },
        AnalyticCase {
            name: "line_rigid_translation",
            geometry: CaseGeometry::Line {
                line: Line::Translating {
                    center: V3::new(0.1, 0.2, -0.1),
                    e1: tilt,
                    e2: V3::y(),
                    a: 1.2,
                    b: 0.7,
                    velocity: DRIFT,
                },
                field: carried,
            },
            t: 0.0,
            reference: None,
            expectation: Expectation::Exact,
        },
        AnalyticCase {
            name: "line_moving_helix_segment",
            geometry: CaseGeometry::Line {
                line: Line::Helix {
                    radius: breathing_radius,
                    spin: 0.6,
                    pitch: stretching_pitch,
                    ends: Some((lower_end, upper_end)),
                },
                field: wave,
            },
            t: 0.1,
            reference: None,
            expectation: Expectation::Converges,
        },
    ]
}

pub fn case_by_name(name: &str) -> Option<AnalyticCase> {
    catalog().into_iter().find(|c| c.name == name)
}
