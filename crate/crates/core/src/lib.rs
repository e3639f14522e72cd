//! Fourier analysis of functions on Z_r^n and the stability of
//! near-maximum independent sets in the weak product K_r^n.
//!
//! An independent set `J` of K_r^n with `|J|/r^n = (1 − ε)/r` is close to a
//! dictator set `{x : x_i = j}`. [`stability::recover_independent_set`]
//! finds that dictator from the Fourier spectrum of `J`'s indicator and
//! reports every quantity involved in bounding the distance.

pub mod cli;
pub mod error;
pub mod graph;
pub mod grid;
pub mod io;
pub mod stability;
pub mod tail;
pub mod transform;

pub use error::{Error, Result};
pub use graph::{DictatorSet, IndependentSet, VertexSet};
pub use grid::{BooleanFunction, GridFunction, GridShape, MultiIndex, Point, Spectrum};
pub use stability::{RecoveryResult, StabilityReport};
