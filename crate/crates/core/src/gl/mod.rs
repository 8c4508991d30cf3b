//! Derivative complex Ginzburg–Landau dynamics in the stereographic chart.

pub mod equivalence;
pub mod march;
pub mod nonlinearity;
pub mod picard;
pub mod residual;

pub use equivalence::{check_equivalence, equivalence_residuals, EquivalenceReport, ResidualTriple};
pub use march::{gl_march, EtdScheme, MarchConfig};
pub use nonlinearity::{gl_nonlinear_parts, gl_nonlinearity, gl_nonlinearity_of, CurrentCoupling, NonlinearParts};
pub use picard::{duhamel, free_trajectory, picard_map, picard_solve, PicardConfig, PicardReport, StopReason};
pub use residual::{
    gl_residual, gl_residual_postflip, gl_residual_preflip, gl_rhs, GlForm, ResidualAccumulator, ResidualReport,
};
