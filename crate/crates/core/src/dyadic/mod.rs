//! Littlewood–Paley and modulation decompositions and the dyadic function-space norms.

pub mod bump;
pub mod composite;
pub mod lebesgue;
pub mod modulation;
pub mod projectors;

pub use bump::{chi, chi_leq, chi_tilde, eta};
pub use composite::{
    norm_besov, norm_fk, norm_nk, norm_space, norm_spaces, norm_yk, norm_zk, NormReport, ShellIngredients,
    SliceSpectra, Space,
};
pub use lebesgue::{norm_anisotropic, norm_mixed};
pub use modulation::{mod_project, norm_xsbq, tapered, ModulationShells, SpaceTimeSpectrum};
pub use projectors::{lp_project, lp_project_directional, lp_project_leq, ShellProjection, ShellRange};
