//! Casimir interaction between a dielectric sphere and a metallic plane.
//!
//! The exact energy is evaluated in the scattering formalism at imaginary
//! frequencies: for every frequency node the round-trip operator is assembled
//! block by block in the multipole basis (one block per angular-momentum
//! projection `m`) and the energy follows from a frequency quadrature of
//! `ln det(I - M)`. Around it sit the closed-form asymptotic models
//! (Casimir-Polder, van der Waals, Hamaker, proximity force) and the curve
//! analysis tools used to produce the figure data.
//!
//! Lengths are in nanometres throughout, frequencies are the reduced
//! `xi_hat = xi / c` in nm⁻¹ and energies are reported in eV.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod asymptotic;
pub mod bessel;
pub mod cache;
pub mod cli;
pub mod config;
pub mod energy;
pub mod error;
pub mod fresnel;
pub mod legendre;
pub mod material;
pub mod mie;
pub mod parallel;
pub mod quadrature;
pub mod roundtrip;

pub use energy::{EnergyResult, Geometry, NumericsSpec};
pub use error::{Error, Result};
pub use material::{DrudeParams, MaterialModel, SellmeierParams, SellmeierTerm};

/// ħc in eV·nm. The only physical constant used; every energy derives from it.
pub const HBAR_C_EV_NM: f64 = 197.327;

/// Tool version embedded in output provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
