//! Resonance spectra of a particle in a vertical optical lattice under gravity.
//!
//! The Hamiltonian `-d²/dz̃² + (u/2)(1 - cos 2z̃) ∓ f z̃` (recoil units) is
//! complex scaled, discretized on a grid and diagonalized. Bound states sit on
//! the real axis, Wannier-Stark resonances below it, and the scaled continuum
//! along a rotated line.

pub mod analytic;
pub mod bands;
pub mod discretize;
pub mod eigensolve;
pub mod floquet;
pub mod potential;
pub mod resonances;
pub mod units;

pub use num_complex::Complex64 as C64;

pub use analytic::NiuParams;
pub use bands::BandStructure;
pub use discretize::{Contour, GridSpec, Layout, ScaledHamiltonian, Scaling, Scheme};
pub use eigensolve::{Backend, ComplexSpectrum};
pub use floquet::FloquetResult;
pub use potential::{Orientation, PotentialModel, PotentialTerm, Wall};
pub use resonances::{Class, Resonance, ResonanceSet, Tolerances};
pub use units::{DimensionlessParams, PhysicalParams};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("width {0} is not positive, input is not a resonance")]
    NotAResonance(f64),
    #[error("potential evaluated inside the hard wall at z = {0}")]
    WallDomain(f64),
    #[error("grid incompatible with model: {0}")]
    IncompatibleGrid(String),
    #[error("plane-wave basis too small: {0}")]
    Basis(String),
    #[error("bands overlap: gap half-width {0} < 0")]
    BandsOverlap(f64),
    #[error("QR iteration did not converge ({converged} of {n} eigenvalues found)")]
    NoConvergence { n: usize, converged: usize, partial: Vec<C64> },
    #[error("linear algebra backend failed: {0}")]
    Backend(String),
    #[error("vector is self-orthogonal under the c-product (|(v|v)| = {0:e})")]
    SelfOrthogonal(f64),
    #[error("eigenvector matrix is ill conditioned (estimate {0:e})")]
    IllConditioned(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
