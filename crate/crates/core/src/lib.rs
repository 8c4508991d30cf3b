//! Pseudospectral laboratory for the Landau–Lifshitz–Slonczewski equation.
//!
//! The crate discretizes sphere-valued magnetization dynamics on a periodic
//! torus, maps them through the stereographic chart to a derivative complex
//! Ginzburg–Landau equation, and provides the dyadic (Littlewood–Paley,
//! modulation, Bourgain-type) norms and Duhamel/Picard machinery used to
//! probe small-data well-posedness numerically.

pub mod dyadic;
pub mod error;
pub mod estimates;
pub mod fft;
pub mod field;
pub mod gl;
pub mod grid;
pub mod io;
pub mod lls;
pub mod random;
pub mod spectral;
pub mod stereographic;

pub use error::{LabError, Result};
pub use field::{ComplexField, CurrentField, CurrentSlice, MagnetizationField, Representation, SpaceTimeField};
pub use grid::TorusGrid;
