//! ℓ²-cocycles as exact step functions, and the virtually cyclic checks.

mod dinf;
mod step;

pub use dinf::{conjugacy_class, dihedral_eta, dinf_no_scheme_check, dinf_times_z2_ctx, fc_transfer_check, random_admissible_set, DihedralEta};
pub use step::{asym_cocycle, asym_cocycle_checked, StepVector, Term};
