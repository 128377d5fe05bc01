//! Collinear three-body scattering on the Jacobi metric.
//!
//! A collinear exchange reaction A + BC -> AB + C at fixed total energy E is
//! equivalent, after mass scaling, to the motion of a single image point of
//! reduced mass mu0 on a plane. The classical trajectories at energy E are
//! geodesics of the conformally flat metric
//!
//! ```text
//!     g_ik = P0^2 delta_ik,      P0^2 = 2 mu0 (E - V(x1, x2)),
//! ```
//!
//! so chaotic scattering shows up as sensitive dependence of the geodesic
//! flow. Around the extremal ray connecting the reactant and product
//! channels, transverse vibrations reduce to a parametric oscillator
//!
//! ```text
//!     d^2 xi / d tau^2 + Omega^2(tau) xi = 0
//! ```
//!
//! driven through an internal time tau that follows the image point's
//! progress along the ray. The Bogoliubov coefficients of `xi` give the
//! reflection coefficient rho and with it the full matrix of
//! vibrational transition probabilities.
//!
//! Crate layout:
//!
//! - [`system`]: masses, mass-scaled coordinates, potential surfaces,
//!   the momentum field P0.
//! - [`ray`]: saddle location, extremal ray construction, curvature data.
//! - [`geodesic`]: trajectory integration (geodesic and Newtonian forms),
//!   outcome classification.
//! - [`itime`]: projection onto the ray, internal time, frequency profiles.
//! - [`oscillator`]: the parametric oscillator and its Bogoliubov analysis.
//! - [`transitions`]: transition probability matrices, wave functions, and
//!   the number-basis oracle.
//! - [`chaos`]: outcome maps, Lyapunov exponents, box-counting dimension.
//! - [`pipeline`]: one-call classical -> quantum runs.
//! - [`manifest`]: reproducible run manifests and atomic output writing.

pub mod curve;
pub mod error;
pub mod geodesic;
pub mod itime;
pub mod ode;
pub mod ray;
pub mod special;
pub mod system;
pub mod units;

pub use error::{Error, Result};
