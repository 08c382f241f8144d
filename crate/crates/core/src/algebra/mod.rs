//! Exact polynomial and matrix algebra over the rationals.

mod charpoly;
mod growth;
mod poly;
mod recurrence;

pub use charpoly::{char_poly, eval_matrix_poly};
pub use growth::{growth, GrowthEstimate};
pub use poly::Polynomial;
pub use recurrence::{eval_recurrence, min_recurrence, Recurrence, GUARD};
