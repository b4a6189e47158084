//! Left schemes on finite windows: data model, verifier and rearrangement.

mod orbit;
mod rearrange;
mod report;
mod verify;
mod window;

pub use orbit::OrbitChart;
pub use rearrange::{check_rearranged, gamma_order, rearrange, tested_elements, Rearranged, GAMMA_SEARCH_LIMIT};
pub use report::{CheckRow, PhiRow, SeriesPoint, VerifyReport};
pub use verify::{exp_series, phi_partial, verify_scheme, verify_scheme_with, GammaProfile, VerifyOptions};
pub use window::{require_scheme_capable, GenBudget, SchemeWindow, WindowParams};

pub(crate) use verify::show;
