//! Numerical laboratory for heat flow under generalized Robin boundary
//! conditions.
//!
//! The object of study is the parabolic problem associated with the form
//!
//! ```text
//!   a_B[u, v] = ∫_Ω  A ∇u · ∇v dx  +  <B γ(u), γ(v)>_∂Ω
//! ```
//!
//! where `γ` is the boundary trace and `B` is a bounded operator on the
//! boundary space that may be *non-local*: rank-one functionals, smooth
//! kernels, rotation commutators, and convolutions are all admitted next to
//! the classical multiplication (local Robin) case. The induced evolution
//! `u' + L_B u = 0` conserves nothing sacred: positivity of the semigroup,
//! the location of the spectral bound, and the symmetry of the leading
//! eigenfunction all depend on `B`, and this crate exists to compute,
//! certify, and stress-test those properties on interval and disk
//! geometries with P1 finite elements and dense linear algebra.
//!
//! Everything is desk-scale by design (≤ 2000 vertices, dense solvers,
//! deterministic seeds). The primary interface is the `examples/`
//! directory: one runnable program per capability:
//!
//! ```text
//! cargo run --release -p robinlab --example interval_spectrum
//! cargo run --release -p robinlab --example quadrant_rotation_witness
//! cargo run --release -p robinlab --example disk_eventual_positivity
//! cargo run --release -p robinlab --example bose_convolution_model
//! cargo run --release -p robinlab --example ultracontractivity_fit
//! cargo run --release -p robinlab --example domination_construction
//! cargo run --release -p robinlab --example symmetry_projections
//! ```
//!
//! A thin CLI (`robinlab spectrum|evolve|positivity|ultra|verify|oracle`)
//! drives the same library functions from JSON problem configurations; see
//! the README for the schema.
//!
//! Module map:
//!
//! * [`geometry`]: interval and structured polar disk meshes, boundary
//!   quadrature weights, JSON export.
//! * [`boundary`]: boundary operator specifications and their discrete
//!   matrices on the weighted boundary space.
//! * [`assembly`]: mass/stiffness assembly, the Robin-perturbed operator
//!   matrix, Gårding constants, locality probes.
//! * [`semigroup`]: implicit steppers, dense matrix exponentials,
//!   resolvents, ultracontractivity fits, domination constructions.
//! * [`spectral`]: dense (generalized) eigensolves, peripheral spectrum
//!   classification, growth-rate cross-checks.
//! * [`positivity`]: boundary Metzler tests, first-order form witnesses
//!   against positivity, eventual-positivity certificates.
//! * [`symmetry`]: finite symmetry group actions, averaging projections,
//!   equivariance defects, invariance of leading eigenfunctions.
//! * [`oracles`]: closed-form and semi-analytic references (branch roots,
//!   Bessel series, radial mode solver) kept independent of the FEM path.
//! * [`config`] / [`report`]: JSON problem configs and deterministic
//!   artifact writers.

pub mod assembly;
pub mod boundary;
pub mod config;
pub mod error;
pub mod geometry;
pub(crate) mod linalg;
pub mod oracles;
pub mod positivity;
pub mod report;
pub mod semigroup;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
