//! Green's function of monoenergetic neutron transport in an infinite medium
//! with anisotropic scattering, computed by two independent routes:
//!
//! 1. the singular-eigenfunction expansion — a sum over discrete relaxation
//!    modes plus a branch-cut (continuum) integral, and
//! 2. numerical Fourier inversion of the transformed moment system.
//!
//! The medium is characterized by the mean number of secondaries per
//! collision `c` (subcritical: 0 <= c < 1) and a truncated Legendre
//! expansion of the scattering kernel with coefficients `omega_0..omega_L`.
//! All lengths are in mean free paths and the total cross section is unity.
//!
//! Layered modules:
//!
//! - [`legendre`]: Legendre polynomials P_l, second-kind functions Q_l for
//!   complex argument, and their principal-value boundary values Q*_l on the
//!   cut [-1, 1], with a Wronskian stability sentinel.
//! - [`chandrasekhar`]: Chandrasekhar polynomials g_l, rho_l, their weighted
//!   partial sums, and the Wronskian-type surface functions.
//! - [`spectral`]: the dispersion function Lambda_L, its zeros nu_0m > 1
//!   (discrete relaxation lengths), and on-cut boundary values.
//! - [`transform`]: the transformed moment system solved three independent
//!   ways, plus the angular transform assembled from generalized
//!   eigenfunctions.
//! - [`greens`]: real-space Green's function moments (uncollided, discrete,
//!   continuum, collocation) and the Fourier-inversion oracle.
//! - [`verify`]: the seeded identity suite exercised by the CLI and the
//!   acceptance tests.
//!
//! ```
//! use transport_greens::greens::{self, QuadConfig};
//! use transport_greens::ScatteringKernel;
//!
//! let kernel = ScatteringKernel::isotropic(0.9)?;
//! let b = greens::greens_moments(&kernel, 1.0, 0.5, 2, &QuadConfig::default())?;
//! assert!(b.total_moments[0] > 0.0);
//! assert_eq!(b.uncollided_weight, (-2.0f64).exp() / 0.5);
//! # Ok::<(), transport_greens::Error>(())
//! ```

pub mod chandrasekhar;
pub mod error;
pub mod greens;
pub mod kernel;
pub mod legendre;
pub mod quad;
pub mod spectral;
pub mod transform;
pub mod verify;

pub use error::Error;
pub use kernel::ScatteringKernel;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
