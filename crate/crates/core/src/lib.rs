//! Numerics for one-dimensional discrete Schrödinger operators
//! `(Hψ)_n = −ψ_{n−1} − ψ_{n+1} + λV(T^n x)ψ_n` with dynamically defined
//! potentials: transfer-matrix cocycles, Lyapunov exponents, finite-volume
//! spectra and the integrated density of states, deviation statistics, and
//! complex zeros of Dirichlet determinants.

pub mod cocycle;
pub mod deviations;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod lyapunov;
pub mod potential;
pub mod sampling;
pub mod spectrum;
pub mod zeros;

pub use cocycle::{Cocycle, FirstSite};
pub use dynamics::{Dynamics, Phase};
pub use error::{Error, Result};
pub use linalg::{Mat2, ScaledProduct, SignedLog};
pub use potential::{ComplexPhase, Potential};
pub use sampling::Sampler;

pub use num_complex::Complex64;
