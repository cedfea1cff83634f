use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::measure::green;
use super::{MarkerCurve, Mode, Vec2};
use crate::error::{Error, Result};

/// Fixed outer boundary of the computational domain.
///
/// In axisymmetric mode the box is the generator rectangle `[r0, r1] × [z0, z1]`
/// and the circle is a meridian of the outer sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Box { min: Vec2, max: Vec2 },
    Circle { center: Vec2, radius: f64 },
}

impl Domain {
    pub fn measure(&self, mode: Mode) -> f64 {
        match (self, mode) {
            (Domain::Box { min, max }, Mode::Planar) => (max.x - min.x) * (max.y - min.y),
            (Domain::Box { min, max }, Mode::Axisymmetric) => {
                PI * (max.x * max.x - min.x * min.x) * (max.y - min.y)
            }
            (Domain::Circle { radius, .. }, Mode::Planar) => PI * radius * radius,
            (Domain::Circle { radius, .. }, Mode::Axisymmetric) => 4.0 / 3.0 * PI * radius.powi(3),
        }
    }

    /// Length scale used for attachment tolerances.
    pub fn scale(&self) -> f64 {
        match self {
            Domain::Box { min, max } => (max - min).norm(),
            Domain::Circle { radius, .. } => 2.0 * radius,
        }
    }
}

/// Part of the fixed outer boundary that closes a phase region. The phase lies
/// to the left of the polyline, matching the counter-clockwise convention of
/// the curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub phase: String,
    pub points: Vec<Vec2>,
}

impl Wall {
    fn green(&self, mode: Mode) -> f64 {
        self.points.windows(2).map(|w| green(mode, w[0], w[1])).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTopology {
    pub mode: Mode,
    pub phases: Vec<String>,
    pub walls: Vec<Wall>,
    pub domain: Domain,
}

impl PhaseTopology {
    pub fn phase_index(&self, label: &str) -> Option<usize> {
        self.phases.iter().position(|p| p == label)
    }

    /// Every label must name a phase, each curve must separate two distinct
    /// phases, and the region measures must be positive and partition the
    /// domain.
    pub fn validate(&self, curves: &[MarkerCurve]) -> Result<()> {
        for c in curves {
            for side in [&c.side_minus, &c.side_plus] {
                if self.phase_index(side).is_none() {
                    return Err(Error::TopologyError(format!(
                        "curve {} borders unknown phase {side}",
                        c.id
                    )));
                }
            }
            if c.side_minus == c.side_plus {
                return Err(Error::TopologyError(format!(
                    "curve {} has the same phase on both sides",
                    c.id
                )));
            }
            if c.mode != self.mode {
                return Err(Error::TopologyError(format!("curve {} has the wrong mode", c.id)));
            }
        }
        for w in &self.walls {
            if self.phase_index(&w.phase).is_none() {
                return Err(Error::TopologyError(format!("wall borders unknown phase {}", w.phase)));
            }
        }
        let measures = region_measure(self, curves)?;
        let total: f64 = measures.values().sum();
        let domain = self.domain.measure(self.mode);
        if (total - domain).abs() > 1e-12 * domain {
            return Err(Error::TopologyError(format!(
                "region measures sum to {total}, domain measure is {domain}"
            )));
        }
        Ok(())
    }
}

/// Area (planar) or volume (axisymmetric) of every phase region, from the
/// Green contributions of its bounding curves and walls.
pub fn region_measure(topology: &PhaseTopology, curves: &[MarkerCurve]) -> Result<BTreeMap<String, f64>> {
    let mode = topology.mode;
    let mut out: BTreeMap<String, f64> = topology.phases.iter().map(|p| (p.clone(), 0.0)).collect();
    for c in curves {
        let g: f64 = (0..c.segment_count())
            .map(|s| {
                let (a, b) = c.segment(s);
                green(mode, a, b)
            })
            .sum();
        *out.get_mut(&c.side_plus).ok_or_else(|| unknown(&c.side_plus))? += g;
        *out.get_mut(&c.side_minus).ok_or_else(|| unknown(&c.side_minus))? -= g;
    }
    for w in &topology.walls {
        *out.get_mut(&w.phase).ok_or_else(|| unknown(&w.phase))? += w.green(mode);
    }
    if let Some((p, m)) = out.iter().find(|(_, m)| !(**m > 0.0)) {
        return Err(Error::TopologyError(format!(
            "phase {p} has nonpositive measure {m}; check curve orientation"
        )));
    }
    Ok(out)
}

fn unknown(label: &str) -> Error {
    Error::TopologyError(format!("unknown phase {label}"))
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;

    fn square_wall(phase: &str, lo: Vec2, hi: Vec2) -> Wall {
        Wall {
            phase: phase.into(),
            points: vec![lo, Vec2::new(hi.x, lo.y), hi, Vec2::new(lo.x, hi.y), lo],
        }
    }

    #[test]
    fn circle_in_box() {
        let lo = Vec2::new(-2.0, -2.0);
        let hi = Vec2::new(2.0, 2.0);
        let topo = PhaseTopology {
            mode: Mode::Planar,
            phases: vec!["inside".into(), "outside".into()],
            walls: vec![square_wall("outside", lo, hi)],
            domain: Domain::Box { min: lo, max: hi },
        };
        let n = 400;
        let c = circle(Vec2::zeros(), 1.0, n, Mode::Planar);
        topo.validate(std::slice::from_ref(&c)).unwrap();
        let m = region_measure(&topo, &[c]).unwrap();
        let h = 2.0 * PI / n as f64;
        assert!((m["inside"] - PI).abs() < h * h);
        assert!((m["inside"] + m["outside"] - 16.0).abs() < 1e-12 * 16.0);
    }

    #[test]
    fn reversed_curve_is_an_orientation_error_only_if_labels_disagree() {
        let lo = Vec2::new(-2.0, -2.0);
        let hi = Vec2::new(2.0, 2.0);
        let topo = PhaseTopology {
            mode: Mode::Planar,
            phases: vec!["inside".into(), "outside".into()],
            walls: vec![square_wall("outside", lo, hi)],
            domain: Domain::Box { min: lo, max: hi },
        };
        let c = circle(Vec2::zeros(), 1.0, 50, Mode::Planar);
        let r = c.reversed();
        let a = region_measure(&topo, &[c.clone()]).unwrap();
        let b = region_measure(&topo, &[r]).unwrap();
        assert!((a["inside"] - b["inside"]).abs() < 1e-14);
        let mut bad = c;
        std::mem::swap(&mut bad.side_plus, &mut bad.side_minus);
        assert!(matches!(region_measure(&topo, &[bad]), Err(Error::TopologyError(_))));
    }

    #[test]
    fn sphere_from_semicircle_generator() {
        let mut errs = vec![];
        for n in [50, 100, 200] {
            let pts = (0..=n)
                .map(|i| {
                    let t = -PI / 2.0 + PI * i as f64 / n as f64;
                    Vec2::new(t.cos().max(0.0), t.sin())
                })
                .collect();
            let mut c = open(pts, Mode::Axisymmetric);
            c.side_plus = "in".into();
            c.side_minus = "out".into();
            let lo = Vec2::new(0.0, -2.0);
            let hi = Vec2::new(2.0, 2.0);
            let topo = PhaseTopology {
                mode: Mode::Axisymmetric,
                phases: vec!["in".into(), "out".into()],
                walls: vec![Wall {
                    phase: "out".into(),
                    points: vec![lo, Vec2::new(hi.x, lo.y), hi, Vec2::new(0.0, hi.y)],
                }],
                domain: Domain::Box { min: lo, max: hi },
            };
            let m = region_measure(&topo, &[c]).unwrap();
            errs.push((m["in"] - 4.0 / 3.0 * PI).abs());
            assert!((m["in"] + m["out"] - topo.domain.measure(Mode::Axisymmetric)).abs() < 1e-12 * 16.0 * PI);
        }
        assert!(errs[1] < errs[0] / 3.5 && errs[2] < errs[1] / 3.5, "{errs:?}");
    }
}
