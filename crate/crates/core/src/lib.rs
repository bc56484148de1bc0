//! Bloch-Messiah reduction of multimode linear Bogoliubov transformations.
//!
//! Any optical circuit whose input-output relations are linear in the mode
//! operators, `b = A a + B a† + beta`, factors into a passive multiport, a
//! layer of independent single-mode squeezers and a second passive multiport.
//! The squeezing parameters of that middle layer are invariant under passive
//! optics, so they count the irreducible squeezing a circuit needs.
//!
//! Module map:
//! - [`linalg`]: dense kernels (SVD, Jacobi eigensolver, polar, Takagi).
//! - [`bogoliubov`]: the transform type, validation, composition, inverse.
//! - [`elements`]: squeezers, down-converters, beam splitters and circuits.
//! - [`reduction`]: the reduction itself and the squeeze spectrum.
//! - [`synthesis`]: triangular beam-splitter meshes for passive unitaries.
//! - [`state`] and [`fock`]: pure Gaussian states, truncated Fock expansions,
//!   single-photon conditioning.
//! - [`cli`]: the `gauss-reduce` command-line front end.

pub mod bogoliubov;
pub mod cli;
pub mod elements;
pub mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod parallel;
pub mod reduction;
pub mod state;
pub mod sweep;
pub mod synthesis;

pub use bogoliubov::{GaussianTransform, ValidationReport};
pub use elements::{Circuit, CircuitElement, ElementKind};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, RealMatrix, ToleranceConfig};
pub use reduction::{reduce, recompose, squeeze_spectrum, squeezer_count, BlochMessiahForm};
pub use state::{ConditionedState, PureGaussianState, StructureReport};
pub use synthesis::{PassiveNetwork, Stage};
