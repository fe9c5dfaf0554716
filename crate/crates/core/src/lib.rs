//! Isovist analysis for voxel block worlds.
//!
//! The pipeline: load or generate a [`world::VoxelWorld`], enumerate the
//! standable locations ([`isovist::enumerate_headspaces`]), compute the
//! visibility sets around each one ([`isovist::compute_isovist`]), reduce
//! them to 13 scalar metrics ([`metrics::compute_metrics`]), compress the
//! metric matrix with PCA ([`pca::fit_pca`]), and quantify how much each
//! location changed between a base world and a generated world
//! ([`shift::pair_locations`] / [`shift::compute_shift`]). The [`viz`]
//! module renders scatter plots, shift flow plots, and overhead overlays.
//!
//! Every seeded operation is deterministic: identical inputs and seeds
//! produce identical outputs regardless of worker count.

pub mod engine;
pub mod isovist;
pub mod metrics;
mod numfmt;
pub mod pca;
pub mod rng;
pub mod shift;
pub mod viz;
pub mod world;

pub use world::{Coord, VoxelWorld};
