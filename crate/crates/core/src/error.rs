use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the geometry, thermodynamics, closure and dynamics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("inconsistent phase topology: {0}")]
    TopologyError(String),
    #[error("curve {curve} has length {length:.3e}, shorter than twice the spacing {h:.3e}")]
    CurveTooShort { curve: String, length: f64, h: f64 },
    #[error("non-positive density {0:.6e}")]
    NonPositiveDensity(f64),
    #[error("surface density {rho_s:.6e} depletes the tension (saturation {rho_star:.6e})")]
    TensionDepleted { rho_s: f64, rho_star: f64 },
    #[error("slip coefficients sum to zero")]
    SlipDegenerate,
    #[error("closure solve failed: {reason} (affinities {affinities:?})")]
    ClosureSolveFailed { reason: String, affinities: Vec<f64> },
    #[error("junction {junction} degenerate: sector angle {angle_deg:.3} deg below 5 deg")]
    DegenerateJunction { junction: String, angle_deg: f64 },
    #[error("time step {dt:.3e} exceeds stability bound {dt_max:.3e}")]
    StepRejected { dt: f64, dt_max: f64 },
    #[error("ill-posed verification case: {0}")]
    IllPosedCase(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
