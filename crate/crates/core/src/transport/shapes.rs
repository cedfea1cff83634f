//! Moving geometries in 3D and their quadrature samples.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use super::quadrature::composite;
use crate::error::{Error, Result};

pub type V3 = Vector3<f64>;
pub type M3 = Matrix3<f64>;

/// Scalar function of time returning `(value, d/dt)`.
pub type TimeFn = fn(f64) -> (f64, f64);
/// Vector function of time returning `(value, d/dt)`.
pub type VecTimeFn = fn(f64) -> (V3, V3);

/// A point of a surface quadrature.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub x: V3,
    pub weight: f64,
    pub normal: V3,
    /// Velocity of the parametrization at fixed parameters. Its normal part
    /// is the speed of normal displacement.
    pub x_t: V3,
    /// `div_Σ(-n)`, twice the mean curvature.
    pub kappa: f64,
}

/// A point of a quadrature on `∂Σ_V`, which lies on the control boundary.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub x: V3,
    pub weight: f64,
    pub x_t: V3,
    pub normal: V3,
    /// Outer normal of the control volume.
    pub n_v: V3,
}

impl BoundaryPoint {
    /// In-surface conormal: the unit projection of `n_V` onto the tangent
    /// plane.
    pub fn conormal(&self) -> V3 {
        (self.n_v - self.normal * self.normal.dot(&self.n_v)).normalize()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VolumePoint {
    pub x: V3,
    pub weight: f64,
    pub inside: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LinePoint {
    pub x: V3,
    pub weight: f64,
    pub tangent: V3,
    pub x_t: V3,
}

/// End point of an open curve.
#[derive(Debug, Clone, Copy)]
pub struct EndPoint {
    pub x: V3,
    /// Outer unit tangent.
    pub nu: V3,
    /// Velocity of the end point itself.
    pub x_t: V3,
}

fn sphere_frame(theta: f64, phi: f64) -> (V3, V3, V3) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    (
        V3::new(st * cp, st * sp, ct),
        V3::new(ct * cp, ct * sp, -st),
        V3::new(-st * sp, st * cp, 0.0),
    )
}

/// Ellipsoid `c(t) + diag(a(t)) ω` moving with the affine velocity field
/// `c' + (A' A⁻¹ + [Ω]×)(x - c)`. The spin must be about an axis of
/// rotational symmetry so that it only adds tangential motion.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub center: VecTimeFn,
    pub axes: VecTimeFn,
    pub spin: V3,
}

impl Affine {
    pub fn velocity(&self, x: &V3, t: f64) -> (V3, M3) {
        let (c, dc) = (self.center)(t);
        let (a, da) = (self.axes)(t);
        let g = M3::from_diagonal(&da.component_div(&a)) + self.spin.cross_matrix();
        (dc + g * (x - c), g)
    }

    /// Closed-surface quadrature in `(θ, φ)`.
    pub fn surface(&self, t: f64, h: f64) -> Vec<SurfacePoint> {
        let (c, dc) = (self.center)(t);
        let (a, da) = (self.axes)(t);
        let q = composite(h);
        let mut out = Vec::with_capacity(q.len() * q.len());
        for &(u, wu) in &q {
            for &(v, wv) in &q {
                let (w, w_t, w_p) = sphere_frame(PI * u, 2.0 * PI * v);
                let x = c + a.component_mul(&w);
                let cross = a.component_mul(&w_t).cross(&a.component_mul(&w_p));
                let normal = cross.normalize();
                // level set F = Σ ((x - c)_i / a_i)² - 1
                let hess = V3::new(2.0 / (a.x * a.x), 2.0 / (a.y * a.y), 2.0 / (a.z * a.z));
                let g = (x - c).component_mul(&hess);
                let gn = g.norm();
                let div_n = (hess.sum() * gn * gn - g.dot(&g.component_mul(&hess))) / gn.powi(3);
                out.push(SurfacePoint {
                    x,
                    weight: cross.norm() * 2.0 * PI * PI * wu * wv,
                    normal,
                    x_t: dc + da.component_mul(&w),
                    kappa: -div_n,
                });
            }
        }
        out
    }

    /// Volume quadrature of the ball of radius `control` split by the
    /// ellipsoid into an inside and an outside part.
    pub fn volume(&self, control: f64, t: f64, h: f64) -> Result<Vec<VolumePoint>> {
        let (c, _) = (self.center)(t);
        let (a, _) = (self.axes)(t);
        let q = composite(h);
        let mut out = Vec::with_capacity(2 * q.len().pow(3));
        for &(u, wu) in &q {
            for &(v, wv) in &q {
                let (w, w_t, w_p) = sphere_frame(PI * u, 2.0 * PI * v);
                let surf = c + a.component_mul(&w);
                if surf.norm() >= control {
                    return Err(Error::IllPosedCase(format!(
                        "interface point {surf:?} reaches the control boundary of radius {control}"
                    )));
                }
                let (x_t, x_p) = (a.component_mul(&w_t), a.component_mul(&w_p));
                for &(s, ws) in &q {
                    let wt = wu * wv * ws * 2.0 * PI * PI;
                    out.push(VolumePoint {
                        x: c + s * (surf - c),
                        weight: wt * s * s * (surf - c).dot(&x_t.cross(&x_p)),
                        inside: true,
                    });
                    // straight blend from the interface to the control sphere
                    let d_s = control * w - surf;
                    let d_t = (1.0 - s) * x_t + s * control * w_t;
                    let d_p = (1.0 - s) * x_p + s * control * w_p;
                    let jac = d_s.dot(&d_t.cross(&d_p));
                    if !(jac > 0.0) {
                        return Err(Error::IllPosedCase("outer region map folds over".into()));
                    }
                    out.push(VolumePoint { x: surf + s * d_s, weight: wt * jac, inside: false });
                }
            }
        }
        Ok(out)
    }
}

/// A moving surface together with the part of it inside a fixed control
/// volume.
#[derive(Debug, Clone, Copy)]
pub enum Surface {
    /// Closed ellipsoid entirely inside the control volume.
    Ellipsoid(Affine),
    /// Sphere of radius `R(t)` about the origin, cut to `z > cut`; material
    /// points move radially and spin about `z`.
    SphereCap { radius: TimeFn, cut: f64, spin: f64 },
    /// Plane through `point(t)` with fixed normal, cut by the box
    /// `[lo, hi]`; material points translate with the plane and spin about
    /// its normal.
    PlaneInBox { normal: V3, point: VecTimeFn, spin: f64, lo: V3, hi: V3 },
}

impl Surface {
    /// Material velocity field and its gradient.
    pub fn velocity(&self, x: &V3, t: f64) -> (V3, M3) {
        match *self {
            Surface::Ellipsoid(m) => m.velocity(x, t),
            Surface::SphereCap { radius, spin, .. } => {
                let (r, dr) = radius(t);
                let g = M3::identity() * (dr / r) + V3::z().cross_matrix() * spin;
                (g * x, g)
            }
            Surface::PlaneInBox { normal, point, spin, .. } => {
                let (c, dc) = point(t);
                let g = normal.normalize().cross_matrix() * spin;
                (dc + g * (x - c), g)
            }
        }
    }

    /// Quadrature of `Σ_V` and of `∂Σ_V` at time `t`.
    pub fn sample(&self, t: f64, h: f64) -> Result<(Vec<SurfacePoint>, Vec<BoundaryPoint>)> {
        match *self {
            Surface::Ellipsoid(m) => Ok((m.surface(t, h), vec![])),
            Surface::SphereCap { radius, cut, .. } => sphere_cap(radius, cut, t, h),
            Surface::PlaneInBox { normal, point, lo, hi, .. } => plane_in_box(normal.normalize(), point, lo, hi, t, h),
        }
    }
}

fn sphere_cap(radius: TimeFn, cut: f64, t: f64, h: f64) -> Result<(Vec<SurfacePoint>, Vec<BoundaryPoint>)> {
    let (r, dr) = radius(t);
    if !(r > cut.abs()) {
        return Err(Error::IllPosedCase(format!("sphere of radius {r} does not cross the plane z = {cut}")));
    }
    let tc = (cut / r).acos();
    let dtc = cut * dr / (r * r) / tc.sin();
    let q = composite(h);
    let mut pts = Vec::with_capacity(q.len() * q.len());
    for &(u, wu) in &q {
        for &(v, wv) in &q {
            let theta = u * tc;
            let (w, w_t, _) = sphere_frame(theta, 2.0 * PI * v);
            pts.push(SurfacePoint {
                x: r * w,
                weight: r * r * theta.sin() * tc * 2.0 * PI * wu * wv,
                normal: w,
                x_t: dr * w + r * u * dtc * w_t,
                kappa: -2.0 / r,
            });
        }
    }
    let rim = q
        .iter()
        .map(|&(v, wv)| {
            let (w, w_t, _) = sphere_frame(tc, 2.0 * PI * v);
            BoundaryPoint {
                x: r * w,
                weight: 2.0 * PI * r * tc.sin() * wv,
                x_t: dr * w + r * dtc * w_t,
                normal: w,
                n_v: -V3::z(),
            }
        })
        .collect();
    Ok((pts, rim))
}

/// Corner of the polygon `plane ∩ box` on a box edge, with its velocity and
/// the two box faces containing that edge as `(axis, upper)`.
struct Vertex {
    x: V3,
    x_t: V3,
    faces: [(usize, bool); 2],
}

fn plane_in_box(
    n: V3,
    point: VecTimeFn,
    lo: V3,
    hi: V3,
    t: f64,
    h: f64,
) -> Result<(Vec<SurfacePoint>, Vec<BoundaryPoint>)> {
    let (c, dc) = point(t);
    let mut verts = vec![];
    for axis in 0..3 {
        let (j, k) = ((axis + 1) % 3, (axis + 2) % 3);
        for bj in [false, true] {
            for bk in [false, true] {
                let mut a = lo;
                a[j] = if bj { hi[j] } else { lo[j] };
                a[k] = if bk { hi[k] } else { lo[k] };
                let mut e = V3::zeros();
                e[axis] = hi[axis] - lo[axis];
                let (fa, fb) = (n.dot(&(a - c)), n.dot(&(a + e - c)));
                let scale = (hi - lo).norm();
                if fa.abs() < 1e-9 * scale || fb.abs() < 1e-9 * scale {
                    return Err(Error::IllPosedCase("plane passes through a box corner".into()));
                }
                if (fa < 0.0) != (fb < 0.0) {
                    let s = n.dot(&(c - a)) / n.dot(&e);
                    verts.push(Vertex {
                        x: a + s * e,
                        x_t: e * (n.dot(&dc) / n.dot(&e)),
                        faces: [(j, bj), (k, bk)],
                    });
                }
            }
        }
    }
    if verts.len() < 3 {
        return Err(Error::IllPosedCase("plane misses the box".into()));
    }
    let g = verts.iter().map(|v| v.x).sum::<V3>() / verts.len() as f64;
    let g_t = verts.iter().map(|v| v.x_t).sum::<V3>() / verts.len() as f64;
    let e1 = (verts[0].x - g).normalize();
    let e2 = n.cross(&e1);
    verts.sort_by(|p, q| {
        let ang = |v: &Vertex| (v.x - g).dot(&e2).atan2((v.x - g).dot(&e1));
        ang(p).total_cmp(&ang(q))
    });
    let quad = composite(h);
    let mut pts = vec![];
    let mut rim = vec![];
    for i in 0..verts.len() {
        let (p, q) = (&verts[i], &verts[(i + 1) % verts.len()]);
        let shared: Vec<_> = p.faces.iter().filter(|f| q.faces.contains(f)).collect();
        let &&(axis, upper) = match shared.as_slice() {
            [f] => f,
            _ => return Err(Error::IllPosedCase("polygon edge not on a single box face".into())),
        };
        let mut n_v = V3::zeros();
        n_v[axis] = if upper { 1.0 } else { -1.0 };
        // collapsed square onto the triangle (g, p, q)
        for &(u, wu) in &quad {
            for &(v, wv) in &quad {
                let xu = (p.x - g) + v * (q.x - p.x);
                let xv = u * (q.x - p.x);
                pts.push(SurfacePoint {
                    x: g + u * (p.x - g) + u * v * (q.x - p.x),
                    weight: xu.cross(&xv).norm() * wu * wv,
                    normal: n,
                    x_t: g_t + u * (p.x_t - g_t) + u * v * (q.x_t - p.x_t),
                    kappa: 0.0,
                });
            }
        }
        let len = (q.x - p.x).norm();
        for &(l, wl) in &quad {
            rim.push(BoundaryPoint {
                x: p.x + l * (q.x - p.x),
                weight: len * wl,
                x_t: p.x_t + l * (q.x_t - p.x_t),
                normal: n,
                n_v,
            });
        }
    }
    Ok((pts, rim))
}

/// A moving curve with a prescribed material velocity.
#[derive(Debug, Clone, Copy)]
pub enum Line {
    /// `(R cos(s + ωt), R sin(s + ωt), p s)` for `s` in `[s0(t), s1(t)]`, or
    /// the closed circle `s ∈ [0, 2π)` when `ends` is `None` (then the pitch
    /// must vanish). Material points keep their `s`.
    Helix { radius: TimeFn, spin: f64, pitch: TimeFn, ends: Option<(TimeFn, TimeFn)> },
    /// Closed ellipse `c + a cos s e1 + b sin s e2` translating rigidly.
    Translating { center: V3, e1: V3, e2: V3, a: f64, b: f64, velocity: V3 },
}

impl Line {
    pub fn velocity(&self, x: &V3, t: f64) -> (V3, M3) {
        match *self {
            Line::Helix { radius, spin, pitch, .. } => {
                let (r, dr) = radius(t);
                let (p, dp) = pitch(t);
                let stretch = if p == 0.0 { 0.0 } else { dp / p };
                let g = M3::from_diagonal(&V3::new(dr / r, dr / r, stretch)) + V3::z().cross_matrix() * spin;
                (g * x, g)
            }
            Line::Translating { velocity, .. } => (velocity, M3::zeros()),
        }
    }

    pub fn sample(&self, t: f64, h: f64) -> Result<(Vec<LinePoint>, Vec<EndPoint>)> {
        let q = composite(h);
        match *self {
            Line::Helix { radius, spin, pitch, ends } => {
                let (r, dr) = radius(t);
                let (p, dp) = pitch(t);
                let eval = |s: f64| {
                    let (sn, cs) = (s + spin * t).sin_cos();
                    let x = V3::new(r * cs, r * sn, p * s);
                    let x_s = V3::new(-r * sn, r * cs, p);
                    let x_t = V3::new(dr * cs - r * spin * sn, dr * sn + r * spin * cs, dp * s);
                    (x, x_s, x_t)
                };
                let (s0, ds0, s1, ds1) = match ends {
                    Some((a, b)) => {
                        let ((s0, ds0), (s1, ds1)) = (a(t), b(t));
                        (s0, ds0, s1, ds1)
                    }
                    None if p == 0.0 && dp == 0.0 => (0.0, 0.0, 2.0 * PI, 0.0),
                    None => return Err(Error::IllPosedCase("a closed helix needs zero pitch".into())),
                };
                if !(s1 > s0) {
                    return Err(Error::IllPosedCase("empty parameter range".into()));
                }
                let pts = q
                    .iter()
                    .map(|&(u, wu)| {
                        let (x, x_s, x_t) = eval(s0 + u * (s1 - s0));
                        LinePoint { x, weight: x_s.norm() * (s1 - s0) * wu, tangent: x_s.normalize(), x_t }
                    })
                    .collect();
                let mut tips = vec![];
                if ends.is_some() {
                    let (x, x_s, x_t) = eval(s0);
                    tips.push(EndPoint { x, nu: -x_s.normalize(), x_t: x_t + x_s * ds0 });
                    let (x, x_s, x_t) = eval(s1);
                    tips.push(EndPoint { x, nu: x_s.normalize(), x_t: x_t + x_s * ds1 });
                }
                Ok((pts, tips))
            }
            Line::Translating { center, e1, e2, a, b, velocity } => {
                let pts = q
                    .iter()
                    .map(|&(u, wu)| {
                        let s = 2.0 * PI * u;
                        let x_s = -a * s.sin() * e1 + b * s.cos() * e2;
                        LinePoint {
                            x: center + velocity * t + a * s.cos() * e1 + b * s.sin() * e2,
                            weight: x_s.norm() * 2.0 * PI * wu,
                            tangent: x_s.normalize(),
                            x_t: velocity,
                        }
                    })
                    .collect();
                Ok((pts, vec![]))
            }
        }
    }
}
