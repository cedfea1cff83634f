//! Discrete interfaces, triple junctions and phase regions.
//!
//! A [`MarkerCurve`] is an oriented polyline. Its unit normal is the left
//! normal of the traversal direction and points from `side_minus` into
//! `side_plus`, so jumps are always `[[φ]] = φ(plus) - φ(minus)`. Surface mass
//! lives on segments, not markers, so that advection and remeshing conserve it
//! exactly.

mod curvature;
mod junction;
pub mod measure;
mod remesh;
mod topology;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exchange::JunctionClosure;

pub use curvature::{curvature_normal, marker_normal};
pub use junction::{junction_conormals, sector_angles, SectorAngle};
pub use remesh::{needs_remesh, remesh};
pub use topology::{region_measure, Domain, PhaseTopology, Wall};

pub type Vec2 = nalgebra::Vector2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Planar,
    Axisymmetric,
}

/// What an open curve end is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    /// Moves with its own force, like an interior marker.
    Free,
    /// Pinned on the fixed outer boundary.
    OuterBoundary,
    /// Slides along the symmetry axis (axisymmetric mode only).
    Axis,
    /// Shared with the triple junction of this index.
    Junction(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveEnd {
    Start,
    End,
}

/// Kinematic constraint applied to every marker of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    #[default]
    None,
    /// Markers stay on their initial horizontal line (a rigid flat support).
    Horizontal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerCurve {
    pub id: String,
    pub markers: Vec<Vec2>,
    /// Mass of segment `i` (markers `i -> i+1`, wrapping when closed).
    pub segment_mass: Vec<f64>,
    pub side_minus: String,
    pub side_plus: String,
    pub start: Endpoint,
    pub end: Endpoint,
    pub closed: bool,
    pub mode: Mode,
    pub constraint: Constraint,
}

impl MarkerCurve {
    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.markers.len()
        } else {
            self.markers.len().saturating_sub(1)
        }
    }

    /// Marker indices of segment `s`.
    pub fn segment_ends(&self, s: usize) -> (usize, usize) {
        (s, (s + 1) % self.markers.len())
    }

    pub fn segment(&self, s: usize) -> (Vec2, Vec2) {
        let (i, j) = self.segment_ends(s);
        (self.markers[i], self.markers[j])
    }

    /// Segments before and after marker `i`.
    pub fn adjacent_segments(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let n = self.markers.len();
        if self.closed {
            ((Some((i + n - 1) % n)), Some(i))
        } else {
            let prev = if i > 0 { Some(i - 1) } else { None };
            let next = if i + 1 < n { Some(i) } else { None };
            (prev, next)
        }
    }

    pub fn segment_measures(&self) -> Vec<f64> {
        (0..self.segment_count())
            .map(|s| {
                let (a, b) = self.segment(s);
                measure::segment_measure(self.mode, a, b)
            })
            .collect()
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.segment_count())
            .map(|s| {
                let (a, b) = self.segment(s);
                (b - a).norm()
            })
            .collect()
    }

    /// Length (planar) or area (axisymmetric) of the interface.
    pub fn measure(&self) -> f64 {
        self.segment_measures().iter().sum()
    }

    pub fn arclength(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Half the measure of the segments adjacent to each marker.
    pub fn lumped_measures(&self) -> Vec<f64> {
        let seg = self.segment_measures();
        (0..self.markers.len())
            .map(|i| {
                let (p, n) = self.adjacent_segments(i);
                0.5 * (p.map_or(0.0, |s| seg[s]) + n.map_or(0.0, |s| seg[s]))
            })
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.segment_mass.iter().sum()
    }

    /// Surface density of every segment.
    pub fn densities(&self) -> Vec<f64> {
        self.segment_measures()
            .iter()
            .zip(&self.segment_mass)
            .map(|(a, m)| m / a)
            .collect()
    }

    pub fn end_marker(&self, end: CurveEnd) -> usize {
        match end {
            CurveEnd::Start => 0,
            CurveEnd::End => self.markers.len() - 1,
        }
    }

    pub fn endpoint(&self, end: CurveEnd) -> Endpoint {
        match end {
            CurveEnd::Start => self.start,
            CurveEnd::End => self.end,
        }
    }

    /// Segment touching the given end of an open curve.
    pub fn end_segment(&self, end: CurveEnd) -> usize {
        match end {
            CurveEnd::Start => 0,
            CurveEnd::End => self.segment_count() - 1,
        }
    }

    /// Same curve traversed backwards; sides and endpoints swap so the
    /// physical configuration is unchanged.
    pub fn reversed(&self) -> MarkerCurve {
        let mut markers = self.markers.clone();
        let mut segment_mass = self.segment_mass.clone();
        if self.closed {
            // Keep marker 0 first: 0, n-1, ..., 1. Segment i of the new curve
            // joins new markers i and i+1, i.e. old segment (n - 1 - i).
            markers[1..].reverse();
            segment_mass.reverse();
        } else {
            markers.reverse();
            segment_mass.reverse();
        }
        MarkerCurve {
            id: self.id.clone(),
            markers,
            segment_mass,
            side_minus: self.side_plus.clone(),
            side_plus: self.side_minus.clone(),
            start: self.end,
            end: self.start,
            closed: self.closed,
            mode: self.mode,
            constraint: self.constraint,
        }
    }

    /// Checks the type invariants: enough markers, distinct consecutive
    /// markers, nonnegative masses, no self-intersection, `r >= 0` when
    /// axisymmetric.
    pub fn validate(&self) -> Result<()> {
        let n = self.markers.len();
        let min = if self.closed { 3 } else { 2 };
        if n < min {
            return Err(Error::DegenerateGeometry(format!(
                "curve {} has {n} markers",
                self.id
            )));
        }
        if self.segment_mass.len() != self.segment_count() {
            return Err(Error::InvalidInput(format!(
                "curve {}: {} segment masses for {} segments",
                self.id,
                self.segment_mass.len(),
                self.segment_count()
            )));
        }
        if let Some(m) = self.segment_mass.iter().find(|m| !(**m >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "curve {}: negative segment mass {m}",
                self.id
            )));
        }
        if self.markers.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::DegenerateGeometry(format!(
                "curve {} has non-finite markers",
                self.id
            )));
        }
        if self.mode == Mode::Axisymmetric {
            if let Some(p) = self.markers.iter().find(|p| p.x < 0.0) {
                return Err(Error::DegenerateGeometry(format!(
                    "curve {}: negative radius {}",
                    self.id, p.x
                )));
            }
        }
        let scale = self.arclength().max(f64::MIN_POSITIVE);
        for s in 0..self.segment_count() {
            let (a, b) = self.segment(s);
            if (b - a).norm() <= 1e-14 * scale {
                return Err(Error::DegenerateGeometry(format!(
                    "curve {}: coincident markers at segment {s}",
                    self.id
                )));
            }
        }
        if let Some((s, t)) = self.self_intersection() {
            return Err(Error::DegenerateGeometry(format!(
                "curve {}: segments {s} and {t} intersect",
                self.id
            )));
        }
        Ok(())
    }

    fn self_intersection(&self) -> Option<(usize, usize)> {
        let ns = self.segment_count();
        for s in 0..ns {
            for t in (s + 2)..ns {
                if self.closed && s == 0 && t == ns - 1 {
                    continue;
                }
                let (a, b) = self.segment(s);
                let (c, d) = self.segment(t);
                if segments_intersect(a, b, c, d) {
                    return Some((s, t));
                }
            }
        }
        None
    }
}

fn cross(u: Vec2, v: Vec2) -> f64 {
    u.x * v.y - u.y * v.x
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let lo = |p: Vec2, q: Vec2| p.inf(&q);
    let hi = |p: Vec2, q: Vec2| p.sup(&q);
    let (l1, h1, l2, h2) = (lo(a, b), hi(a, b), lo(c, d), hi(c, d));
    if h1.x < l2.x || h2.x < l1.x || h1.y < l2.y || h2.y < l1.y {
        return false;
    }
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// A point joining three curve ends.
///
/// In axisymmetric mode the junction is a circle of radius `position.x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleJunction {
    pub id: String,
    pub position: Vec2,
    /// Curve index and which end of it meets here.
    pub incident: [(usize, CurveEnd); 3],
    /// Line tension; contributes energy `γ^C · 2πr` in axisymmetric mode only.
    pub line_tension: f64,
    /// Junction mobility `m_C >= 0`.
    pub mobility: f64,
    /// Mass transfer closure between the incident interfaces, if any.
    pub closure: Option<JunctionClosure>,
}

impl TripleJunction {
    /// Checks attachment of the three incident ends to within `1e-12 * scale`.
    pub fn check_attachment(&self, curves: &[MarkerCurve], scale: f64) -> Result<()> {
        for &(c, end) in &self.incident {
            let curve = curves.get(c).ok_or_else(|| {
                Error::TopologyError(format!("junction {} references curve {c}", self.id))
            })?;
            if curve.closed {
                return Err(Error::TopologyError(format!(
                    "junction {} attached to closed curve {}",
                    self.id, curve.id
                )));
            }
            let p = curve.markers[curve.end_marker(end)];
            if (p - self.position).norm() > 1e-12 * scale {
                return Err(Error::DegenerateGeometry(format!(
                    "junction {} detached from curve {} by {:.3e}",
                    self.id,
                    curve.id,
                    (p - self.position).norm()
                )));
            }
        }
        Ok(())
    }
}
