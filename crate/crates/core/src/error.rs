use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the numerical layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument lies on (or within the guard band of) the branch cut [-1, 1].
    #[error(
        "argument {z} lies on the branch cut [-1, 1]; use the on-cut (principal value) evaluators"
    )]
    OnCut { z: Complex64 },

    /// A real argument fell outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The scattering kernel failed validation.
    #[error("invalid scattering kernel: {0}")]
    InvalidKernel(String),

    /// A built-in consistency check (Wronskian, Liouville-Ostrogradski,
    /// dispersion cross-form) exceeded its tolerance.
    #[error("numerical instability detected in {what}: residual {residual:.3e}")]
    Instability { what: String, residual: f64 },

    /// The transformed moment system is (near-)singular because the argument
    /// sits at a zero of the dispersion function.
    #[error("transform argument {z} is at or near a dispersion zero{}",
        nearest.map(|n| format!(" (nearest root nu_0 = {n:.12})")).unwrap_or_default())]
    NearDispersionRoot { z: Complex64, nearest: Option<f64> },

    /// Angular transform requested at mu == mu0 where a distributional term
    /// would be required.
    #[error("coincident angles mu = mu0 = {mu}: the angular transform carries a delta there")]
    CoincidentAngles { mu: f64 },

    /// A quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// Operation outside the supported parameter range.
    #[error("unsupported: {0}")]
    Unsupported(String),
}
