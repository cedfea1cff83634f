use super::{MarkerCurve, Vec2};
use crate::error::{Error, Result};

/// Whether some segment of `curve` has drifted outside `[0.8 h, 1.5 h]`.
pub fn needs_remesh(curve: &MarkerCurve, h: f64) -> bool {
    curve.segment_lengths().iter().any(|&l| l < 0.8 * h || l > 1.5 * h)
}

/// Redistributes markers to uniform arclength spacing close to `h` on the
/// original polyline. End markers stay put (marker 0 for closed curves), and
/// each new segment receives the old mass in proportion to overlapped length.
pub fn remesh(curve: &MarkerCurve, h: f64) -> Result<MarkerCurve> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("remesh spacing must be positive, got {h}")));
    }
    let lengths = curve.segment_lengths();
    let total: f64 = lengths.iter().sum();
    if total < 2.0 * h {
        return Err(Error::CurveTooShort { curve: curve.id.clone(), length: total, h });
    }
    let min_segments = if curve.closed { 3 } else { 1 };
    let n_new = ((total / h).round() as usize).max(min_segments);
    let spacing = total / n_new as f64;

    let already_uniform = n_new == lengths.len()
        && lengths.iter().all(|l| (l - spacing).abs() <= 1e-9 * spacing);
    if already_uniform {
        return Ok(curve.clone());
    }

    // cumulative arclength at old markers
    let mut cum = Vec::with_capacity(lengths.len() + 1);
    cum.push(0.0);
    for l in &lengths {
        cum.push(cum.last().unwrap() + l);
    }
    let point_at = |s: f64| -> Vec2 {
        let k = match cum.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(k) => return curve.segment(k.min(lengths.len() - 1)).0,
            Err(k) => (k.max(1) - 1).min(lengths.len() - 1),
        };
        let (a, b) = curve.segment(k);
        a + (b - a) * ((s - cum[k]) / lengths[k])
    };

    let n_markers = if curve.closed { n_new } else { n_new + 1 };
    let mut markers: Vec<Vec2> = (0..n_markers).map(|i| point_at(i as f64 * spacing)).collect();
    if !curve.closed {
        markers[0] = curve.markers[0];
        markers[n_new] = *curve.markers.last().unwrap();
    }

    // overlap-weighted mass transfer, sweeping both partitions once
    let mut mass = vec![0.0; n_new];
    let mut old = 0;
    for (new, m) in mass.iter_mut().enumerate() {
        let lo = new as f64 * spacing;
        let hi = if new + 1 == n_new { total } else { (new + 1) as f64 * spacing };
        while old < lengths.len() && cum[old + 1] <= lo {
            old += 1;
        }
        let mut k = old;
        while k < lengths.len() && cum[k] < hi {
            let overlap = cum[k + 1].min(hi) - cum[k].max(lo);
            if overlap > 0.0 && lengths[k] > 0.0 {
                *m += curve.segment_mass[k] * overlap / lengths[k];
            }
            k += 1;
        }
    }
    // put the summation round-off on the heaviest segment
    let before = curve.total_mass();
    let after: f64 = mass.iter().sum();
    if let Some(heaviest) = (0..n_new).max_by(|&a, &b| mass[a].total_cmp(&mass[b])) {
        mass[heaviest] = (mass[heaviest] + (before - after)).max(0.0);
    }

    let out = MarkerCurve { markers, segment_mass: mass, ..curve.clone() };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::super::Mode;
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_curve_is_left_alone() {
        let mut c = circle(Vec2::zeros(), 1.0, 32, Mode::Planar);
        c.segment_mass = vec![0.1; 32];
        let h = c.arclength() / 32.0;
        assert_eq!(remesh(&c, h).unwrap(), c);
    }

    #[test]
    fn only_distorted_curves_need_remeshing() {
        let c = circle(Vec2::zeros(), 1.0, 32, Mode::Planar);
        let h = c.arclength() / 32.0;
        assert!(!needs_remesh(&c, h));
        assert!(needs_remesh(&c, 2.0 * h));
        let mut d = c.clone();
        d.markers[3] = d.markers[4] * 0.999 + d.markers[3] * 0.001;
        assert!(needs_remesh(&d, h));
    }

    #[test]
    fn too_short() {
        let c = open(vec![Vec2::zeros(), Vec2::new(1.0, 0.0)], Mode::Planar);
        assert!(matches!(remesh(&c, 0.6), Err(Error::CurveTooShort { .. })));
    }

    #[test]
    fn ends_stay_fixed() {
        let pts = (0..7).map(|i| Vec2::new((i as f64).powi(2) / 36.0, (i as f64).sin())).collect();
        let mut c = open(pts, Mode::Planar);
        c.segment_mass = (0..6).map(|i| 0.1 * i as f64).collect();
        let r = remesh(&c, 0.1).unwrap();
        assert_eq!(r.markers[0], c.markers[0]);
        assert_eq!(r.markers.last(), c.markers.last());
        r.validate().unwrap();
    }

    #[test]
    fn refinement_of_nonuniform_circle_changes_energy_at_second_order() {
        // The zero-mass interface energy is γ₀·length; compare against 2π.
        let make = |n: usize| {
            let mut c = circle(Vec2::zeros(), 1.0, n, Mode::Planar);
            for (i, p) in c.markers.iter_mut().enumerate() {
                let t = 2.0 * PI * (i as f64 + 0.3 * (2.0 * PI * i as f64 / n as f64).sin()) / n as f64;
                *p = Vec2::new(t.cos(), t.sin());
            }
            c
        };
        let mut errs = vec![];
        for n in [40, 80, 160] {
            let c = make(n);
            let h = 2.0 * PI / n as f64;
            let r = remesh(&c, h / 2.0).unwrap();
            errs.push((r.arclength() - c.arclength()).abs());
        }
        assert!(errs[1] < errs[0] / 3.0 && errs[2] < errs[1] / 3.0, "{errs:?}");
    }

    proptest! {
        #[test]
        fn mass_is_conserved(
            masses in proptest::collection::vec(0.0f64..3.0, 12),
            wobble in proptest::collection::vec(-0.2f64..0.2, 12),
            h in 0.05f64..0.6,
        ) {
            let mut c = circle(Vec2::zeros(), 1.0, 12, Mode::Planar);
            for (p, w) in c.markers.iter_mut().zip(&wobble) {
                *p *= 1.0 + w;
            }
            c.segment_mass = masses;
            let r = remesh(&c, h).unwrap();
            let before = c.total_mass();
            let after = r.total_mass();
            prop_assert!((before - after).abs() <= 1e-15 * before.max(1e-300) * 4.0);
            prop_assert!(r.segment_mass.iter().all(|m| *m >= 0.0));
        }
    }
}
