//! Joint spatial mode distributions (JSMDs) of photon pairs from
//! collinear down-conversion with a Gaussian pump, in the
//! Laguerre-Gaussian basis — plus a simulator of the stimulated-emission
//! measurement chain that estimates the same distribution from photon
//! counts.
//!
//! The crate computes every distribution twice, by construction:
//!
//! * [`analytic`] evaluates the closed-form mode amplitudes (a terminating
//!   Gauss hypergeometric series with factorial prefactors), and
//! * [`oracle`] brute-forces the same amplitudes as triple-field overlap
//!   integrals by Gauss-Legendre quadrature,
//!
//! and the two routes are compared cell by cell in [`oracle::validate_against_analytic`].
//! [`setsim`] then layers the measurement chain on top: stimulated idler
//! generation, azimuthal phase flattening, single-mode-fiber coupling with
//! an optional field-of-view aperture, Poisson counting, and dark-count
//! subtraction.
//!
//! Start with the runnable examples (`cargo run --example jsmd_matrix`,
//! `engine_crosscheck`, `set_experiment`, …) or the `biphoton` binary,
//! which exposes the same capabilities as subcommands.

pub mod analytic;
pub mod config;
pub mod error;
pub mod lg;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod rng;
pub mod setsim;

pub use error::{Error, Result};
pub use lg::{BeamGeometry, LgIndex, QuadratureConfig, ScalarField};
