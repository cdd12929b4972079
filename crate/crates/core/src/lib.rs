//! How fast the t statistic approaches normality, and what the first
//! correction looks like.
//!
//! The crate computes the truncation radius `b_n`, the rate functional `δ_n`
//! and related truncated moments for a catalog of zero-mean laws; evaluates
//! the leading term `L_n` and its relatives on a grid; generates the law of
//! the t statistic by Monte Carlo or exact enumeration; and assembles rate
//! reports that compare the two.

pub mod distributions;
pub mod error;
pub mod experiment;
pub mod functionals;
pub mod leading_terms;
pub mod quadrature;
pub mod rates;
pub mod simulation;
pub mod special;

pub use distributions::{DistributionCatalog, DistributionSpec, Kind, Support};
pub use error::{Error, Result};
