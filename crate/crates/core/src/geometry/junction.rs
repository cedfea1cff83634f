use serde::{Deserialize, Serialize};

use super::{CurveEnd, MarkerCurve, TripleJunction, Vec2};
use crate::error::{Error, Result};

/// Inward unit tangent of a curve at one of its ends.
///
/// Uses the second-order one-sided difference on the first three markers,
/// which removes the O(h) chord error that would otherwise bias junction
/// angles. Two-marker curves fall back to the chord.
pub(crate) fn inward_tangent(curve: &MarkerCurve, end: CurveEnd) -> Result<Vec2> {
    let n = curve.markers.len();
    let at = |k: usize| match end {
        CurveEnd::Start => curve.markers[k],
        CurveEnd::End => curve.markers[n - 1 - k],
    };
    let (x0, x1) = (at(0), at(1));
    let s1 = (x1 - x0).norm();
    if s1 == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "curve {}: zero-length end segment",
            curve.id
        )));
    }
    let t = if n >= 3 {
        let x2 = at(2);
        let s2 = (x2 - x1).norm();
        if s2 == 0.0 {
            return Err(Error::DegenerateGeometry(format!(
                "curve {}: zero-length segment near end",
                curve.id
            )));
        }
        let c0 = -(2.0 * s1 + s2) / (s1 * (s1 + s2));
        let c1 = (s1 + s2) / (s1 * s2);
        let c2 = -s1 / (s2 * (s1 + s2));
        x0 * c0 + x1 * c1 + x2 * c2
    } else {
        x1 - x0
    };
    let norm = t.norm();
    if !(norm > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "curve {}: vanishing end tangent",
            curve.id
        )));
    }
    Ok(t / norm)
}

/// Outer conormals `N^k` of the three incident curves: unit tangents at the
/// junction end pointing out of each curve.
pub fn junction_conormals(junction: &TripleJunction, curves: &[MarkerCurve]) -> Result<[Vec2; 3]> {
    let mut out = [Vec2::zeros(); 3];
    for (k, &(c, end)) in junction.incident.iter().enumerate() {
        let curve = curves.get(c).ok_or_else(|| {
            Error::TopologyError(format!("junction {} references curve {c}", junction.id))
        })?;
        out[k] = -inward_tangent(curve, end)?;
    }
    Ok(out)
}

/// Opening angle of one phase at a junction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorAngle {
    pub phase: String,
    pub radians: f64,
}

impl SectorAngle {
    pub fn degrees(&self) -> f64 {
        self.radians.to_degrees()
    }
}

/// Angles of the three phase sectors around a junction, measured between the
/// discrete end tangents. They sum to 2π.
pub fn sector_angles(junction: &TripleJunction, curves: &[MarkerCurve]) -> Result<[SectorAngle; 3]> {
    let mut arms = Vec::with_capacity(3);
    for &(c, end) in &junction.incident {
        let curve = &curves[c];
        let t = inward_tangent(curve, end)?;
        // Left of the inward tangent is the plus side when the curve starts
        // here, the minus side when it ends here.
        let (left, right) = match end {
            CurveEnd::Start => (&curve.side_plus, &curve.side_minus),
            CurveEnd::End => (&curve.side_minus, &curve.side_plus),
        };
        arms.push((t.y.atan2(t.x), left.clone(), right.clone()));
    }
    arms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<SectorAngle> = Vec::with_capacity(3);
    for k in 0..3 {
        let (a, left, _) = &arms[k];
        let (b, _, right_next) = &arms[(k + 1) % 3];
        if left != right_next {
            return Err(Error::TopologyError(format!(
                "junction {}: sector between arms has phases {left} and {right_next}",
                junction.id
            )));
        }
        let mut angle = b - a;
        if angle <= 0.0 {
            angle += 2.0 * std::f64::consts::PI;
        }
        out.push(SectorAngle { phase: left.clone(), radians: angle });
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

#[cfg(test)]
mod tests {
    use super::super::test_util::open;
    use super::super::{Endpoint, Mode};
    use super::*;
    use std::f64::consts::PI;

    fn star(dirs: [Vec2; 3]) -> (TripleJunction, Vec<MarkerCurve>) {
        let phases = ["a", "b", "c"];
        let curves = dirs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let mut c = open((0..5).map(|i| d * (0.25 * i as f64)).collect(), Mode::Planar);
                c.start = Endpoint::Junction(0);
                // plus side is left of the outgoing direction
                c.side_plus = phases[k].into();
                c.side_minus = phases[(k + 2) % 3].into();
                c
            })
            .collect();
        let j = TripleJunction {
            id: "j".into(),
            position: Vec2::zeros(),
            incident: [(0, CurveEnd::Start), (1, CurveEnd::Start), (2, CurveEnd::Start)],
            line_tension: 0.0,
            mobility: 1.0,
            closure: None,
        };
        (j, curves)
    }

    fn dir(deg: f64) -> Vec2 {
        let r = deg.to_radians();
        Vec2::new(r.cos(), r.sin())
    }

    #[test]
    fn symmetric_star_has_120_degree_conormals() {
        let (j, curves) = star([dir(10.0), dir(130.0), dir(250.0)]);
        let n = junction_conormals(&j, &curves).unwrap();
        for k in 0..3 {
            assert!((n[k].norm() - 1.0).abs() < 1e-15);
            assert!((n[k] + dir(10.0 + 120.0 * k as f64)).norm() < 1e-14);
            let cos = n[k].dot(&n[(k + 1) % 3]);
            assert!((cos + 0.5).abs() < 1e-14);
        }
        for s in sector_angles(&j, &curves).unwrap() {
            assert!((s.degrees() - 120.0).abs() < 1e-10);
        }
    }

    #[test]
    fn collinear_plus_perpendicular() {
        let (j, curves) = star([Vec2::x(), -Vec2::x(), Vec2::y()]);
        let n = junction_conormals(&j, &curves).unwrap();
        assert!((n[0] + Vec2::x()).norm() < 1e-15);
        assert!((n[1] - Vec2::x()).norm() < 1e-15);
        assert!((n[2] + Vec2::y()).norm() < 1e-15);
    }

    #[test]
    fn small_perturbation_moves_conormal_little() {
        let (j, mut curves) = star([dir(0.0), dir(100.0), dir(230.0)]);
        let before = junction_conormals(&j, &curves).unwrap();
        curves[1].markers[1].x += 1e-8;
        let after = junction_conormals(&j, &curves).unwrap();
        assert!((before[1] - after[1]).norm() <= 1e-6);
    }

    #[test]
    fn curved_arm_tangent_is_second_order() {
        // unit circle arc leaving the origin horizontally
        let mut errs = vec![];
        for n in [10, 20, 40] {
            let pts = (0..=n)
                .map(|i| {
                    let t = 0.5 * i as f64 / n as f64;
                    Vec2::new(t.sin(), 1.0 - t.cos())
                })
                .collect();
            let c = open(pts, Mode::Planar);
            let t = inward_tangent(&c, CurveEnd::Start).unwrap();
            errs.push(t.y.atan2(t.x).abs());
        }
        assert!(errs[1] < errs[0] / 3.5 && errs[2] < errs[1] / 3.5, "{errs:?}");
    }

    #[test]
    fn sectors_follow_phase_labels() {
        let (j, curves) = star([dir(0.0), dir(90.0), dir(180.0)]);
        let s = sector_angles(&j, &curves).unwrap();
        let total: f64 = s.iter().map(|s| s.radians).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
        let a = s.iter().find(|s| s.phase == "a").unwrap();
        assert!((a.degrees() - 90.0).abs() < 1e-10);
        let c = s.iter().find(|s| s.phase == "c").unwrap();
        assert!((c.degrees() - 180.0).abs() < 1e-10);
    }
}
