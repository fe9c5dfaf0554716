//! Independent oracles for the test suites: brute-force isovist
//! recomputation, straight-from-definition metrics, a tridiagonal-QL
//! eigensolver, random world fixtures, and plot-file parsing helpers.
//!
//! Everything here deliberately avoids the production code paths it
//! checks: lines are materialized in full instead of walked with early
//! exit, candidate blocks come from exhaustive scans instead of
//! precomputed indices, and the eigensolver is a different algorithm from
//! the production Jacobi sweep.

pub mod eigen;
pub mod oracle;
pub mod svgtext;
pub mod worlds;
