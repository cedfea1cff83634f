//! Bulk and surface equations of state.
//!
//! Both families are linear in density so that the free energies follow in
//! closed form from the Maxwell relation `ρ² ψ'(ρ) = p(ρ)`. For the surface,
//! `p^Σ = -γ^Σ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of `rho_star` beyond which an interface counts as depleted.
pub const TENSION_GUARD: f64 = 1e-6;

/// `p(ρ) = p_ref + c2 (ρ - rho_ref)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BulkEos {
    pub rho_ref: f64,
    pub p_ref: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkState {
    pub p: f64,
    pub psi: f64,
    pub mu: f64,
}

impl BulkEos {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_ref > 0.0 && self.c2 > 0.0 && self.p_ref.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bulk EOS needs rho_ref > 0 and c2 > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.p_ref + self.c2 * (rho - self.rho_ref)
    }

    /// `ψ` normalised so that `ψ(rho_ref) = 0`.
    pub fn psi(&self, rho: f64) -> f64 {
        let a = self.p_ref - self.c2 * self.rho_ref;
        a * (1.0 / self.rho_ref - 1.0 / rho) + self.c2 * (rho / self.rho_ref).ln()
    }

    pub fn mu(&self, rho: f64) -> f64 {
        self.p_ref / self.rho_ref + self.c2 * (rho / self.rho_ref).ln()
    }

    pub fn eval(&self, rho: f64) -> Result<BulkState> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::NonPositiveDensity(rho));
        }
        Ok(BulkState { p: self.pressure(rho), psi: self.psi(rho), mu: self.mu(rho) })
    }
}

/// `γ^Σ(ρ) = γ₀ (1 - ρ/ρ_*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceEos {
    pub gamma0: f64,
    pub rho_star: f64,
    #[serde(default)]
    pub psi_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceState {
    pub gamma: f64,
    pub p_s: f64,
    /// `+∞` on a clean interface.
    pub psi_s: f64,
    /// `-∞` on a clean interface.
    pub mu_s: f64,
    /// `ρ ψ^Σ`, tending to `γ₀` as `ρ → 0`.
    pub energy_density: f64,
}

impl SurfaceEos {
    pub fn clean(gamma0: f64) -> Self {
        SurfaceEos { gamma0, rho_star: 1.0, psi_offset: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.rho_star > 0.0 && self.psi_offset.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "surface EOS needs gamma0 > 0 and rho_star > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_star * (1.0 - TENSION_GUARD)
    }

    fn check(&self, rho: f64) -> Result<()> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::NonPositiveDensity(rho));
        }
        if rho >= self.rho_max() {
            return Err(Error::TensionDepleted { rho_s: rho, rho_star: self.rho_star });
        }
        Ok(())
    }

    pub fn gamma(&self, rho: f64) -> f64 {
        self.gamma0 * (1.0 - rho / self.rho_star)
    }

    /// `dγ/dρ`, a negative constant.
    pub fn dgamma(&self) -> f64 {
        -self.gamma0 / self.rho_star
    }

    pub fn psi(&self, rho: f64) -> f64 {
        let k = self.gamma0 / self.rho_star;
        self.gamma0 / rho + k * (rho / self.rho_star).ln() + self.psi_offset
    }

    pub fn mu(&self, rho: f64) -> f64 {
        let k = self.gamma0 / self.rho_star;
        k * ((rho / self.rho_star).ln() + 1.0) + self.psi_offset
    }

    pub fn energy_density(&self, rho: f64) -> f64 {
        if rho == 0.0 {
            return self.gamma0;
        }
        let k = self.gamma0 / self.rho_star;
        self.gamma0 + k * rho * (rho / self.rho_star).ln() + self.psi_offset * rho
    }

    pub fn eval(&self, rho: f64) -> Result<SurfaceState> {
        self.check(rho)?;
        let gamma = self.gamma(rho);
        let (psi_s, mu_s) = if rho == 0.0 {
            (f64::INFINITY, f64::NEG_INFINITY)
        } else {
            (self.psi(rho), self.mu(rho))
        };
        Ok(SurfaceState { gamma, p_s: -gamma, psi_s, mu_s, energy_density: self.energy_density(rho) })
    }
}

/// Specific free energy and pressure as functions of density, for the
/// Maxwell-relation check.
pub trait FreeEnergy {
    fn psi_checked(&self, rho: f64) -> Result<f64>;
    fn pressure_checked(&self, rho: f64) -> Result<f64>;
}

impl FreeEnergy for BulkEos {
    fn psi_checked(&self, rho: f64) -> Result<f64> {
        Ok(self.eval(rho)?.psi)
    }
    fn pressure_checked(&self, rho: f64) -> Result<f64> {
        Ok(self.eval(rho)?.p)
    }
}

impl FreeEnergy for SurfaceEos {
    fn psi_checked(&self, rho: f64) -> Result<f64> {
        if rho == 0.0 {
            return Err(Error::NonPositiveDensity(rho));
        }
        Ok(self.eval(rho)?.psi_s)
    }
    fn pressure_checked(&self, rho: f64) -> Result<f64> {
        Ok(self.eval(rho)?.p_s)
    }
}

/// `|ρ² (ψ(ρ+δ) - ψ(ρ-δ)) / 2δ - p(ρ)|`.
pub fn gibbs_duhem_residual<E: FreeEnergy>(eos: &E, rho: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("finite-difference step must be positive, got {step}")));
    }
    let p = eos.pressure_checked(rho)?;
    let dpsi = (eos.psi_checked(rho + step)? - eos.psi_checked(rho - step)?) / (2.0 * step);
    Ok((rho * rho * dpsi - p).abs())
}

/// Result of sampling an EOS over its admissible range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosCheck {
    pub samples: usize,
    /// Largest Gibbs–Duhem residual divided by `max(1, |p|)`.
    pub max_residual: f64,
    /// Whether `μ` increased strictly from each sample to the next.
    pub mu_increasing: bool,
}

fn sample_check(rhos: &[f64], residual: impl Fn(f64) -> Result<(f64, f64, f64)>) -> Result<EosCheck> {
    let mut max_residual: f64 = 0.0;
    let mut mu_increasing = true;
    let mut last = f64::NEG_INFINITY;
    for &rho in rhos {
        let (r, p, mu) = residual(rho)?;
        max_residual = max_residual.max(r / p.abs().max(1.0));
        mu_increasing &= mu > last;
        last = mu;
    }
    Ok(EosCheck { samples: rhos.len(), max_residual, mu_increasing })
}

/// Samples `n` densities evenly inside `(0, rho_max)`.
pub fn check_surface_eos(eos: &SurfaceEos, n: usize) -> Result<EosCheck> {
    let rhos: Vec<f64> = (0..n).map(|i| eos.rho_max() * (i as f64 + 0.5) / n as f64).collect();
    sample_check(&rhos, |rho| {
        let r = gibbs_duhem_residual(eos, rho, 1e-5 * rho)?;
        let s = eos.eval(rho)?;
        Ok((r, s.p_s, s.mu_s))
    })
}

/// Samples `n` densities evenly in `(0, 4 rho_ref]`.
pub fn check_bulk_eos(eos: &BulkEos, n: usize) -> Result<EosCheck> {
    let rhos: Vec<f64> = (1..=n).map(|i| 4.0 * eos.rho_ref * i as f64 / n as f64).collect();
    sample_check(&rhos, |rho| {
        let r = gibbs_duhem_residual(eos, rho, 1e-5 * rho)?;
        let s = eos.eval(rho)?;
        Ok((r, s.p, s.mu))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BULK: BulkEos = BulkEos { rho_ref: 1.3, p_ref: 2.0, c2: 10.0 };
    const SURF: SurfaceEos = SurfaceEos { gamma0: 1.0, rho_star: 1.0, psi_offset: 0.0 };

    #[test]
    fn reference_state() {
        let s = BULK.eval(BULK.rho_ref).unwrap();
        assert_eq!(s.p, BULK.p_ref);
        assert_eq!(s.psi, 0.0);
        assert!((s.mu - (s.psi + s.p / BULK.rho_ref)).abs() < 1e-15);
    }

    #[test]
    fn bulk_maxwell_relation() {
        for rho in [0.2, 0.9, 1.3, 4.0, 50.0] {
            let r = gibbs_duhem_residual(&BULK, rho, 1e-5 * rho).unwrap();
            assert!(r <= 1e-8 * BULK.pressure(rho).abs().max(1.0), "{rho}: {r}");
            let s = BULK.eval(rho).unwrap();
            assert!((s.mu - (s.psi + s.p / rho)).abs() <= 1e-14 * s.mu.abs().max(1.0));
        }
    }

    #[test]
    fn bulk_mu_is_increasing() {
        let mut last = f64::NEG_INFINITY;
        for i in 1..=500 {
            let mu = BULK.eval(0.01 * i as f64).unwrap().mu;
            assert!(mu > last);
            last = mu;
        }
    }

    #[test]
    fn nonpositive_bulk_density() {
        assert!(matches!(BULK.eval(0.0), Err(Error::NonPositiveDensity(_))));
        assert!(matches!(BULK.eval(-1.0), Err(Error::NonPositiveDensity(_))));
    }

    #[test]
    fn clean_interface_limit() {
        let s = SURF.eval(0.0).unwrap();
        assert_eq!(s.gamma, 1.0);
        assert_eq!(s.energy_density, 1.0);
        assert_eq!(SURF.eval(0.5).unwrap().gamma, 0.5);
        for f in [1e-3, 1e-6, 1e-9] {
            let e = SURF.eval(f).unwrap().energy_density;
            assert!((e - 1.0).abs() < 10.0 * f * (1.0 / f).ln());
        }
    }

    #[test]
    fn surface_gibbs_duhem() {
        let r = gibbs_duhem_residual(&SURF, 0.3, 1e-5 * 0.3).unwrap();
        assert!(r <= 1e-8, "{r}");
        let s = SURF.eval(0.3).unwrap();
        assert!((s.mu_s - (s.psi_s + s.p_s / 0.3)).abs() < 1e-14);
        assert!((0.3 * s.psi_s - s.energy_density).abs() < 1e-15);
    }

    #[test]
    fn residual_shrinks_quadratically_with_step() {
        let eos = SurfaceEos { gamma0: 0.7, rho_star: 2.0, psi_offset: 0.3 };
        let rho = 0.4;
        let r: Vec<f64> = [1e-1, 5e-2, 2.5e-2]
            .iter()
            .map(|f| gibbs_duhem_residual(&eos, rho, f * rho).unwrap())
            .collect();
        assert!(r[0] / r[1] > 3.8 && r[0] / r[1] < 4.2, "{r:?}");
        assert!(r[1] / r[2] > 3.8 && r[1] / r[2] < 4.2, "{r:?}");
    }

    #[test]
    fn range_guard() {
        assert!(matches!(SURF.eval(1.0), Err(Error::TensionDepleted { .. })));
        assert!(matches!(SURF.eval(-0.1), Err(Error::NonPositiveDensity(_))));
        assert!(gibbs_duhem_residual(&SURF, 1.0 - 1e-7, 1e-5).is_err());
        assert!(gibbs_duhem_residual(&SURF, 0.0, 1e-5).is_err());
        assert!(gibbs_duhem_residual(&BULK, 1e-6, 1e-5).is_err());
    }

    proptest! {
        #[test]
        fn surface_mu_strictly_increasing(a in 1e-6f64..0.99, b in 1e-6f64..0.99) {
            prop_assume!(a < b);
            prop_assert!(SURF.eval(b).unwrap().mu_s > SURF.eval(a).unwrap().mu_s);
            prop_assert!(SURF.eval(a).unwrap().p_s < 0.0);
        }
    }
}
