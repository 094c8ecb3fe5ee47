//! Time-adaptive unit commitment.
//!
//! The crate is organised as a pipeline:
//!
//! - [`aggregation`] reduces a high-resolution demand/renewable trace to a
//!   small number of contiguous, variable-duration periods using
//!   adjacency-constrained Ward agglomeration.
//! - [`model`] builds the duration-aware unit-commitment MILP over any such
//!   grid (uniform hourly grids recover the conventional formulation).
//! - [`solver`] solves the MILP through HiGHS, an external executable, or an
//!   exhaustive oracle used for verification.
//! - [`simulation`] runs day-ahead planning on low-resolution grids, re-dispatches
//!   in real time on the original resolution and compares hourly against
//!   time-adaptive scheduling over rolling horizons.
//! - [`ingestion`] loads traces and scenario configuration and provides the
//!   generator portfolios used in studies.

pub mod aggregation;
pub mod error;
pub mod fixtures;
pub mod ingestion;
pub mod model;
pub mod simulation;
pub mod solver;

pub use error::{Error, Result};
