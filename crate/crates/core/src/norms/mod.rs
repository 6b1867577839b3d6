//! Rough-path norms and distances, p-variation, Besov seminorms and control
//! functions.

mod besov;
mod control;
mod holder;
mod moments;
mod pvar;

pub use besov::{
    besov_seminorm, besov_seminorm_on, fourier_sobolev_norm, variation_embedding_ratio,
    BesovEstimate, BesovParams,
};
pub use control::{
    control_from_besov, control_integral_check, pl_control, Control, ControlKind,
};
pub use holder::{
    holder_signature_norm, inhom_distance, lyons_extension_check, n_beta_alpha, HolderNormParams,
    InhomDistanceParams, LyonsCheck,
};
pub use moments::{moment_scaling_table, write_moment_csv, MomentRow};
pub use pvar::{p_variation, p_variation_profile, p_variation_with, VariationNorm};
