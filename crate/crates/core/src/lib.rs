pub mod bernoulli;
pub mod cocycle;
pub mod error;
pub mod folner;
pub mod group;
pub mod lifting;
pub mod num;
pub mod par;
pub mod nilpotent;
pub mod scheme;
pub mod semidirect;

pub use error::{Error, Result};
