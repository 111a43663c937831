//! Rank-2 proximal Kakutani-Rohlin coverings and the symbolic systems they present.
//!
//! A [`covering::CoveringSpec`] is a finite presentation of an inverse sequence of
//! two-circuit graphs. The other modules expand it, measure it, simulate its
//! orbits, convert it to an ordered Bratteli diagram, and check the substitution
//! system it is conjugate to in the worked example.

pub mod bratteli;
pub mod cli;
pub mod covering;
pub mod error;
pub mod expansion;
pub mod measures;
pub mod dynamics;
pub mod rational;
pub mod substitution;
pub mod symbol;
pub mod window;

pub use error::{Error, Result};

/// Default bound on materialized symbols or vertices.
pub const DEFAULT_CAP: u64 = 100_000_000;

/// Cap from `PROXRANK2_CAP` if set and valid, else [`DEFAULT_CAP`].
pub fn cap_from_env() -> u64 {
    std::env::var("PROXRANK2_CAP")
        .ok()
        .and_then(|v| v.trim().replace('_', "").parse().ok())
        .unwrap_or(DEFAULT_CAP)
}
