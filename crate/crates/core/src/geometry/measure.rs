//! Segment measures and enclosed-measure (Green) contributions with their
//! exact gradients.
//!
//! Planar points are `(x, y)`; axisymmetric points are `(r, z)` and every
//! measure is the one swept by a full revolution about the `z` axis.

use std::f64::consts::PI;

use super::{Mode, Vec2};

/// Length (planar) or lateral frustum area (axisymmetric) of segment `a -> b`.
pub fn segment_measure(mode: Mode, a: Vec2, b: Vec2) -> f64 {
    let len = (b - a).norm();
    match mode {
        Mode::Planar => len,
        Mode::Axisymmetric => PI * (a.x + b.x) * len,
    }
}

/// Gradient of [`segment_measure`] with respect to `a` and `b`.
pub fn segment_measure_grad(mode: Mode, a: Vec2, b: Vec2) -> (Vec2, Vec2) {
    let d = b - a;
    let len = d.norm();
    let unit = d / len;
    match mode {
        Mode::Planar => (-unit, unit),
        Mode::Axisymmetric => {
            let w = PI * (a.x + b.x);
            let radial = Vec2::new(PI * len, 0.0);
            (radial - unit * w, radial + unit * w)
        }
    }
}

/// Contribution of the directed edge `a -> b` to the measure of the region on
/// its left. Summing over a closed counter-clockwise loop gives the enclosed
/// area (planar, `1/2 ∮ x dy - y dx`) or the volume of revolution
/// (axisymmetric, `2π ∮ r²/2 dz`). Edges on the axis contribute nothing.
pub fn green(mode: Mode, a: Vec2, b: Vec2) -> f64 {
    match mode {
        Mode::Planar => 0.5 * (a.x * b.y - b.x * a.y),
        Mode::Axisymmetric => PI / 3.0 * (b.y - a.y) * (a.x * a.x + a.x * b.x + b.x * b.x),
    }
}

/// Gradient of [`green`] with respect to `a` and `b`.
pub fn green_grad(mode: Mode, a: Vec2, b: Vec2) -> (Vec2, Vec2) {
    match mode {
        Mode::Planar => (
            Vec2::new(0.5 * b.y, -0.5 * b.x),
            Vec2::new(-0.5 * a.y, 0.5 * a.x),
        ),
        Mode::Axisymmetric => {
            let dz = b.y - a.y;
            let q = a.x * a.x + a.x * b.x + b.x * b.x;
            let c = PI / 3.0;
            (
                Vec2::new(c * dz * (2.0 * a.x + b.x), -c * q),
                Vec2::new(c * dz * (a.x + 2.0 * b.x), c * q),
            )
        }
    }
}

/// Left unit normal of the direction `d`.
pub fn left_normal(d: Vec2) -> Vec2 {
    Vec2::new(-d.y, d.x) / d.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(Vec2, Vec2) -> f64, g: impl Fn(Vec2, Vec2) -> (Vec2, Vec2)) {
        let a = Vec2::new(0.7, -0.3);
        let b = Vec2::new(1.9, 0.4);
        let (ga, gb) = g(a, b);
        let h = 1e-6;
        for k in 0..2 {
            let mut e = Vec2::zeros();
            e[k] = h;
            let fa = (f(a + e, b) - f(a - e, b)) / (2.0 * h);
            let fb = (f(a, b + e) - f(a, b - e)) / (2.0 * h);
            assert!((fa - ga[k]).abs() < 1e-8, "{fa} vs {}", ga[k]);
            assert!((fb - gb[k]).abs() < 1e-8, "{fb} vs {}", gb[k]);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for mode in [Mode::Planar, Mode::Axisymmetric] {
            fd_check(|a, b| segment_measure(mode, a, b), |a, b| segment_measure_grad(mode, a, b));
            fd_check(|a, b| green(mode, a, b), |a, b| green_grad(mode, a, b));
        }
    }

    #[test]
    fn unit_square_and_cylinder() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let loop_sum = |mode| {
            (0..4)
                .map(|i| green(mode, pts[i], pts[(i + 1) % 4]))
                .sum::<f64>()
        };
        assert!((loop_sum(Mode::Planar) - 1.0).abs() < 1e-15);
        // r in [0, 1], z in [0, 1]: cylinder volume π.
        assert!((loop_sum(Mode::Axisymmetric) - PI).abs() < 1e-14);
    }
}
