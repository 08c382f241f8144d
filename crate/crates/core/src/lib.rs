//! Exact recurrences for permanents and cycle statistics of circulant
//! matrices, derived with the transfer-matrix method and checked against
//! brute-force oracles.
//!
//! The pipeline runs [`spec::normalize`] → [`lattice::decompose`] →
//! [`transfer::TransferSystem`] → [`algebra`], and [`derive::derive`] wraps
//! it end to end. [`extensions`] adds cycle moments and Hamiltonian cycles on
//! path-pairing states, and [`oracle`] supplies Ryser permanents and
//! exhaustive enumeration for verification.

pub mod algebra;
pub mod classify;
pub mod corpus;
pub mod derive;
pub mod error;
pub mod extensions;
pub mod lattice;
pub mod matrix;
pub mod num;
pub mod oracle;
pub mod par;
pub mod report;
pub mod spec;
pub mod transfer;

pub use algebra::{Polynomial, Recurrence};
pub use error::{Error, Result};
pub use num::{Int, Rat};
pub use spec::{parse_spec, CirculantSpec};
