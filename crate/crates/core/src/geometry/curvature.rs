use super::measure::{left_normal, segment_measure, segment_measure_grad};
use super::{MarkerCurve, Vec2};
use crate::error::{Error, Result};

/// Discrete curvature vector `κ n` at marker `i`: the negative gradient of the
/// curve measure with respect to the marker, divided by the lumped measure.
///
/// End markers use their single adjacent segment. In axisymmetric mode the
/// gradient of the frustum areas already contains the azimuthal curvature.
pub fn curvature_normal(curve: &MarkerCurve, i: usize) -> Result<Vec2> {
    let n = curve.markers.len();
    if i >= n {
        return Err(Error::InvalidInput(format!(
            "marker {i} out of range for curve {} ({n} markers)",
            curve.id
        )));
    }
    let (prev, next) = curve.adjacent_segments(i);
    let mut grad = Vec2::zeros();
    let mut lumped = 0.0;
    for s in [prev, next].into_iter().flatten() {
        let (a, b) = curve.segment(s);
        if (b - a).norm() == 0.0 {
            return Err(Error::DegenerateGeometry(format!(
                "curve {}: zero-length segment {s}",
                curve.id
            )));
        }
        let (ga, gb) = segment_measure_grad(curve.mode, a, b);
        grad += if curve.segment_ends(s).0 == i { ga } else { gb };
        lumped += 0.5 * segment_measure(curve.mode, a, b);
    }
    if !(lumped > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "curve {}: zero lumped measure at marker {i}",
            curve.id
        )));
    }
    Ok(-grad / lumped)
}

/// Unit normal at a marker: the normalized mean of the adjacent segment
/// normals.
pub fn marker_normal(curve: &MarkerCurve, i: usize) -> Vec2 {
    let (prev, next) = curve.adjacent_segments(i);
    let mut n = Vec2::zeros();
    for s in [prev, next].into_iter().flatten() {
        let (a, b) = curve.segment(s);
        n += left_normal(b - a);
    }
    n.normalize()
}
