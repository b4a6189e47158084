//! Torsion-free 2-step nilpotent groups in Malcev coordinates.

mod boxes;
mod direction;
mod malcev;
mod smith;

pub use direction::{check_heisenberg_direction, find_heisenberg_direction, nil2coords_holds, MalcevHeisData};
pub use malcev::{MalcevPresentation, Nil2Group};
pub use smith::{big_det, big_mat_mul, det, identity, mat_mul, smith_normal_form, to_big, to_small, transpose, BMat, IMat, Snf};
pub use boxes::{build_heisenberg_scheme, build_nil2_rn, nil2_ctx, nil2_tower, BoxParams, BoxTable, IntSeq, KhatReport};
