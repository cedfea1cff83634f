//! Brute-force checks of the volume, surface and line transport theorems on
//! analytic moving geometries in 3D.
//!
//! Each check compares a central time difference of a quadrature of the
//! integral with the right-hand side of the theorem evaluated by the same
//! kind of quadrature. Quadrature resolution `h` is the cell width of the
//! composite four-point Gauss rule on the unit parameter interval, and the
//! time step is taken equal to `h`, so the residual of a smooth case falls
//! like `h²` from the time difference alone.

mod catalog;
mod quadrature;
pub mod shapes;

use serde::Serialize;

pub use catalog::{case_by_name, catalog};
pub use quadrature::composite;
use shapes::{Affine, Line, Surface, V3};

use crate::error::{Error, Result};

/// Coarsest resolution of a convergence study.
pub const BASE_H: f64 = 0.2;
/// Residuals at or below this are round-off.
pub const EXACT_TOL: f64 = 1e-10;
/// Smallest acceptable order between consecutive refinements.
pub const MIN_ORDER: f64 = 1.9;

/// Closed-form scalar field: value, spatial gradient and time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub value: f64,
    pub grad: V3,
    pub dt: f64,
}

pub type Field = fn(&V3, f64) -> FieldValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    Volume,
    Surface,
    Line,
}

/// The three equivalent right-hand sides of the surface theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Form {
    /// Normal time derivative, `-φ κ V` and the boundary displacement speed.
    Basic,
    /// Lagrangian derivative, `φ div v` and the relative boundary speed.
    Lagrangian,
    /// As `Lagrangian` with the boundary speed written through `n_V`.
    NormalBoundary,
}

impl Form {
    pub const ALL: [Form; 3] = [Form::Basic, Form::Lagrangian, Form::NormalBoundary];

    pub fn name(self) -> &'static str {
        match self {
            Form::Basic => "basic",
            Form::Lagrangian => "lagrangian",
            Form::NormalBoundary => "normal_boundary",
        }
    }
}

/// Whether a case is expected to converge or to hold to round-off at every
/// resolution (static fields, rigid motion, time dependence the central
/// difference reproduces exactly).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expectation {
    Converges,
    Exact,
}

#[derive(Debug, Clone, Copy)]
pub enum CaseGeometry {
    /// Ellipsoidal interface inside a ball of radius `control` about the
    /// origin, with separate fields inside and outside.
    Volume { interface: Affine, control: f64, inside: Field, outside: Field },
    Surface { surface: Surface, field: Field },
    Line { line: Line, field: Field },
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyticCase {
    pub name: &'static str,
    pub geometry: CaseGeometry,
    /// Time at which the theorem is checked.
    pub t: f64,
    /// Exact value of the time derivative of the integral, where known.
    pub reference: Option<f64>,
    pub expectation: Expectation,
}

impl AnalyticCase {
    pub fn kind(&self) -> Kind {
        match self.geometry {
            CaseGeometry::Volume { .. } => Kind::Volume,
            CaseGeometry::Surface { .. } => Kind::Surface,
            CaseGeometry::Line { .. } => Kind::Line,
        }
    }
}

/// Both sides of a transport identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    /// Central difference of the integral.
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Residual {
    fn new(lhs: f64, rhs: f64) -> Residual {
        Residual { lhs, rhs, residual: (lhs - rhs).abs() }
    }
}

fn check_step(dt: f64, h: f64) -> Result<()> {
    if !(dt > 0.0 && h > 0.0) {
        return Err(Error::InvalidInput(format!("dt = {dt} and h = {h} must be positive")));
    }
    Ok(())
}

fn wrong_kind(case: &AnalyticCase, want: Kind) -> Error {
    Error::InvalidInput(format!("case {} is a {:?} case, not {:?}", case.name, case.kind(), want))
}

/// Volume theorem: `d/dt ∫_V φ = ∫_{V∖Σ} ∂_t φ - ∫_Σ [[φ]] V_Σ`, with the
/// jump taken outside minus inside and `V_Σ` along the outer normal.
pub fn volume_transport_residual(case: &AnalyticCase, t: f64, dt: f64, h: f64) -> Result<Residual> {
    check_step(dt, h)?;
    let CaseGeometry::Volume { interface, control, inside, outside } = case.geometry else {
        return Err(wrong_kind(case, Kind::Volume));
    };
    let field = |inner: bool| if inner { inside } else { outside };
    let integral = |t: f64| -> Result<f64> {
        Ok(interface.volume(control, t, h)?.iter().map(|p| p.weight * field(p.inside)(&p.x, t).value).sum())
    };
    let lhs = (integral(t + dt)? - integral(t - dt)?) / (2.0 * dt);
    let bulk: f64 = interface.volume(control, t, h)?.iter().map(|p| p.weight * field(p.inside)(&p.x, t).dt).sum();
    let flux: f64 = interface
        .surface(t, h)
        .iter()
        .map(|p| p.weight * (outside(&p.x, t).value - inside(&p.x, t).value) * p.x_t.dot(&p.normal))
        .sum();
    Ok(Residual::new(lhs, bulk - flux))
}

/// Checks that the material velocity moves with the surface: its normal part
/// must be the speed of normal displacement.
fn check_material(u: &V3, x_t: &V3, normal: &V3) -> Result<()> {
    let gap = (u - x_t).dot(normal);
    if gap.abs() > 1e-9 * (1.0 + u.norm()) {
        return Err(Error::IllPosedCase(format!("material velocity leaves the surface at normal rate {gap:.3e}")));
    }
    Ok(())
}

/// Surface theorem in the chosen form.
pub fn surface_transport_residual(case: &AnalyticCase, form: Form, t: f64, dt: f64, h: f64) -> Result<Residual> {
    check_step(dt, h)?;
    let CaseGeometry::Surface { surface, field } = case.geometry else {
        return Err(wrong_kind(case, Kind::Surface));
    };
    let integral = |t: f64| -> Result<f64> {
        Ok(surface.sample(t, h)?.0.iter().map(|p| p.weight * field(&p.x, t).value).sum())
    };
    let lhs = (integral(t + dt)? - integral(t - dt)?) / (2.0 * dt);
    let (pts, rim) = surface.sample(t, h)?;
    let mut rhs = 0.0;
    for p in &pts {
        let f = field(&p.x, t);
        let speed = p.x_t.dot(&p.normal);
        rhs += p.weight
            * match form {
                Form::Basic => f.dt + speed * p.normal.dot(&f.grad) - f.value * p.kappa * speed,
                Form::Lagrangian | Form::NormalBoundary => {
                    let (u, g) = surface.velocity(&p.x, t);
                    check_material(&u, &p.x_t, &p.normal)?;
                    let div = g.trace() - p.normal.dot(&(g * p.normal));
                    f.dt + u.dot(&f.grad) + f.value * div
                }
            };
    }
    for b in &rim {
        let phi = field(&b.x, t).value;
        let conormal = b.conormal();
        let v_boundary = b.x_t.dot(&conormal);
        let (u, _) = surface.velocity(&b.x, t);
        rhs += b.weight
            * phi
            * match form {
                Form::Basic => v_boundary,
                Form::Lagrangian => v_boundary - u.dot(&conormal),
                Form::NormalBoundary => {
                    let c = b.normal.dot(&b.n_v);
                    -u.dot(&b.n_v) / (1.0 - c * c).sqrt()
                }
            };
    }
    Ok(Residual::new(lhs, rhs))
}

/// Largest difference over `∂Σ_V` between the tracked in-surface speed of the
/// boundary and `-V_Σ (n·n_V)/√(1 - (n·n_V)²)`. Zero for cases without a
/// boundary.
pub fn boundary_speed_defect(case: &AnalyticCase, t: f64, h: f64) -> Result<f64> {
    let CaseGeometry::Surface { surface, .. } = case.geometry else {
        return Err(wrong_kind(case, Kind::Surface));
    };
    let (_, rim) = surface.sample(t, h)?;
    Ok(rim
        .iter()
        .map(|b| {
            let c = b.normal.dot(&b.n_v);
            let geometric = -b.x_t.dot(&b.normal) * c / (1.0 - c * c).sqrt();
            (b.x_t.dot(&b.conormal()) - geometric).abs()
        })
        .fold(0.0, f64::max))
}

/// Line theorem: `d/dt ∫_C φ = ∫_C (Dφ/Dt + φ div_C v) + Σ_ends φ (V_∂ - v·ν)`.
pub fn line_transport_residual(case: &AnalyticCase, t: f64, dt: f64, h: f64) -> Result<Residual> {
    check_step(dt, h)?;
    let CaseGeometry::Line { line, field } = case.geometry else {
        return Err(wrong_kind(case, Kind::Line));
    };
    let integral =
        |t: f64| -> Result<f64> { Ok(line.sample(t, h)?.0.iter().map(|p| p.weight * field(&p.x, t).value).sum()) };
    let lhs = (integral(t + dt)? - integral(t - dt)?) / (2.0 * dt);
    let (pts, ends) = line.sample(t, h)?;
    let mut rhs = 0.0;
    for p in &pts {
        let f = field(&p.x, t);
        let (u, g) = line.velocity(&p.x, t);
        let drift = (u - p.x_t) - p.tangent * (u - p.x_t).dot(&p.tangent);
        if drift.norm() > 1e-9 * (1.0 + u.norm()) {
            return Err(Error::IllPosedCase(format!("material velocity leaves the curve at rate {:.3e}", drift.norm())));
        }
        rhs += p.weight * (f.dt + u.dot(&f.grad) + f.value * p.tangent.dot(&(g * p.tangent)));
    }
    for e in &ends {
        let (u, _) = line.velocity(&e.x, t);
        rhs += field(&e.x, t).value * (e.x_t.dot(&e.nu) - u.dot(&e.nu));
    }
    Ok(Residual::new(lhs, rhs))
}

/// Residual of `case` in the given form (ignored unless the case is a
/// surface case).
pub fn residual(case: &AnalyticCase, form: Form, t: f64, dt: f64, h: f64) -> Result<Residual> {
    match case.kind() {
        Kind::Volume => volume_transport_residual(case, t, dt, h),
        Kind::Surface => surface_transport_residual(case, form, t, dt, h),
        Kind::Line => line_transport_residual(case, t, dt, h),
    }
}

/// Largest pairwise disagreement between the right-hand sides of the three
/// surface forms.
pub fn form_disagreement(case: &AnalyticCase, t: f64, dt: f64, h: f64) -> Result<f64> {
    let r = Form::ALL.map(|f| surface_transport_residual(case, f, t, dt, h));
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (r[i].as_ref().map_err(Clone::clone)?, r[j].as_ref().map_err(Clone::clone)?);
            worst = worst.max((a.rhs - b.rhs).abs());
        }
    }
    Ok(worst)
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    /// Case name, suffixed with the form for surface cases.
    pub case: String,
    pub level: u32,
    pub h: f64,
    pub lhs: f64,
    pub residual: f64,
    /// `log2` of the residual ratio to the previous level; absent on the
    /// first level and when both residuals are round-off.
    pub order: Option<f64>,
}

/// Residuals of `case` at `h = BASE_H / 2^level` for `level = 0..=refinements`,
/// with `dt = h`. Surface cases produce one table per form.
pub fn convergence_study(case: &AnalyticCase, refinements: u32) -> Result<Vec<ConvergenceRow>> {
    let forms: &[Form] = if case.kind() == Kind::Surface { &Form::ALL } else { &[Form::Basic] };
    let mut rows = vec![];
    for &form in forms {
        let label = match case.kind() {
            Kind::Surface => format!("{}:{}", case.name, form.name()),
            _ => case.name.to_string(),
        };
        let mut prev: Option<f64> = None;
        for level in 0..=refinements {
            let h = BASE_H / f64::from(1u32 << level);
            let r = residual(case, form, case.t, h, h)?;
            let order = prev
                .filter(|&p| p > EXACT_TOL || r.residual > EXACT_TOL)
                .map(|p| (p / r.residual).log2());
            rows.push(ConvergenceRow { case: label.clone(), level, h, lhs: r.lhs, residual: r.residual, order });
            prev = Some(r.residual);
        }
    }
    Ok(rows)
}

/// Whether a convergence table meets the case's expectation.
pub fn study_passes(case: &AnalyticCase, rows: &[ConvergenceRow]) -> bool {
    match case.expectation {
        Expectation::Exact => rows.iter().all(|r| r.residual <= EXACT_TOL),
        Expectation::Converges => rows.iter().filter(|r| r.level > 0).all(|r| r.order.is_some_and(|o| o >= MIN_ORDER)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrong_kind_and_bad_steps_are_rejected() {
        let v = case_by_name("vol_static_ball").unwrap();
        assert!(matches!(line_transport_residual(&v, 0.0, 0.1, 0.1), Err(Error::InvalidInput(_))));
        assert!(matches!(volume_transport_residual(&v, 0.0, 0.0, 0.1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn static_cases_vanish() {
        for name in ["vol_static_ball", "surf_static_sphere"] {
            let c = case_by_name(name).unwrap();
            for form in Form::ALL {
                let r = residual(&c, form, 0.0, 0.1, 0.25).unwrap();
                assert!(r.residual <= 1e-12 && r.lhs.abs() <= 1e-12, "{name}: {r:?}");
            }
        }
    }
}
