//! Parallel per-world analysis: enumerate headspaces, sub-sample, compute
//! one isovist per headspace over the shared immutable world, reduce each
//! to metrics.
//!
//! Workers share a read-only [`WorldContext`]; the result vector keeps the
//! sampled (y, z, x) order no matter how many workers run, so downstream
//! artifacts are bit-identical across `workers` settings.

use rayon::prelude::*;
use thiserror::Error;

use crate::isovist::{subsample_headspaces, Headspace, IsovistError, WorldContext};
use crate::metrics::{compute_metrics, IsovistMetrics};
use crate::world::{BlockClassification, VoxelWorld};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Isovist(#[from] IsovistError),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisParams {
    /// View distance cap in blocks (d).
    pub view_distance: u32,
    /// Walk budget in lateral steps (n).
    pub step_budget: u32,
    /// Per-Y-level headspace sample fraction in (0, 1].
    pub sample_fraction: f64,
    pub seed: u64,
    /// 0 means one worker per logical CPU.
    pub workers: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            view_distance: 256,
            step_budget: 32,
            sample_fraction: 0.1,
            seed: 0,
            workers: 0,
        }
    }
}

/// Set cardinalities kept for the debug dump after the sets are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetCounts {
    pub visible_headspaces: usize,
    pub perimeter: usize,
    pub real_perimeter: usize,
    pub reachable: usize,
    pub radials: usize,
    pub sky_radials: usize,
}

#[derive(Debug, Clone)]
pub struct AnalysisRecord {
    pub headspace: Headspace,
    pub metrics: IsovistMetrics,
    pub counts: SetCounts,
}

#[derive(Debug, Clone)]
pub struct WorldAnalysis {
    /// Headspace count before sub-sampling.
    pub total_headspaces: usize,
    /// One record per sampled headspace, ordered by (y, z, x) of the head.
    pub records: Vec<AnalysisRecord>,
}

impl WorldAnalysis {
    pub fn metric_records(&self) -> Vec<(Headspace, IsovistMetrics)> {
        self.records
            .iter()
            .map(|r| (r.headspace, r.metrics.clone()))
            .collect()
    }
}

pub fn analyze_world(
    world: &VoxelWorld,
    classification: &BlockClassification,
    params: &AnalysisParams,
) -> Result<WorldAnalysis, EngineError> {
    let ctx = WorldContext::build(world, classification);
    let total_headspaces = ctx.headspaces().len();
    let sampled = subsample_headspaces(ctx.headspaces(), params.sample_fraction, params.seed)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.workers)
        .build()?;
    let records: Vec<AnalysisRecord> = pool.install(|| {
        sampled
            .par_iter()
            .map(|hs| {
                let sets = ctx.compute_isovist(*hs, params.view_distance, params.step_budget);
                let counts = SetCounts {
                    visible_headspaces: sets.visible_headspaces.len(),
                    perimeter: sets.perimeter.len(),
                    real_perimeter: sets.real_perimeter.len(),
                    reachable: sets.reachable.len(),
                    radials: sets.radials.len(),
                    sky_radials: sets.sky_radial_count,
                };
                AnalysisRecord {
                    headspace: *hs,
                    metrics: compute_metrics(&sets),
                    counts,
                }
            })
            .collect()
    });

    Ok(WorldAnalysis {
        total_headspaces,
        records,
    })
}

/// Debug dump of set cardinalities, one tab-separated line per headspace:
/// head x/y/z, then visible, perimeter, real perimeter, reachable, radial,
/// and sky-radial counts. Not a stability-guaranteed format.
pub fn write_sets_tsv(analysis: &WorldAnalysis) -> String {
    let mut out = String::from(
        "head_x\thead_y\thead_z\tvisible\tperimeter\treal_perimeter\treachable\tradials\tsky_radials\n",
    );
    for r in &analysis.records {
        let h = r.headspace.head;
        let c = r.counts;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            h.x,
            h.y,
            h.z,
            c.visible_headspaces,
            c.perimeter,
            c.real_perimeter,
            c.reachable,
            c.radials,
            c.sky_radials
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::generate_flat_world;

    #[test]
    fn analysis_covers_every_headspace_at_fraction_one() {
        let world = generate_flat_world((8, 6, 8), 2, "stone", 0).unwrap();
        let cls = BlockClassification::default_lists();
        let params = AnalysisParams {
            view_distance: 64,
            step_budget: 8,
            sample_fraction: 1.0,
            seed: 1,
            workers: 2,
        };
        let analysis = analyze_world(&world, &cls, &params).unwrap();
        assert_eq!(analysis.total_headspaces, 64);
        assert_eq!(analysis.records.len(), 64);
        for pair in analysis.records.windows(2) {
            assert!(pair[0].headspace.head.yzx_key() < pair[1].headspace.head.yzx_key());
        }
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let world = generate_flat_world((10, 6, 10), 2, "grass", 0).unwrap();
        let cls = BlockClassification::default_lists();
        let base = AnalysisParams {
            view_distance: 32,
            step_budget: 6,
            sample_fraction: 0.5,
            seed: 9,
            workers: 1,
        };
        let one = analyze_world(&world, &cls, &base).unwrap();
        let four = analyze_world(&world, &cls, &AnalysisParams { workers: 4, ..base }).unwrap();
        assert_eq!(one.records.len(), four.records.len());
        for (a, b) in one.records.iter().zip(&four.records) {
            assert_eq!(a.headspace, b.headspace);
            assert_eq!(a.metrics, b.metrics);
            assert_eq!(a.counts, b.counts);
        }
        assert_eq!(write_sets_tsv(&one), write_sets_tsv(&four));
    }

    #[test]
    fn uniform_plane_interior_rows_are_identical() {
        // On a flat world with the view ball clipped well inside the world,
        // interior locations are translation-equivalent.
        let world = generate_flat_world((24, 8, 24), 2, "stone", 0).unwrap();
        let cls = BlockClassification::default_lists();
        let params = AnalysisParams {
            view_distance: 4,
            step_budget: 2,
            sample_fraction: 1.0,
            seed: 0,
            workers: 2,
        };
        let analysis = analyze_world(&world, &cls, &params).unwrap();
        let interior: Vec<&AnalysisRecord> = analysis
            .records
            .iter()
            .filter(|r| {
                let h = r.headspace.head;
                (8..16).contains(&h.x) && (8..16).contains(&h.z)
            })
            .collect();
        assert!(interior.len() > 10);
        for r in &interior[1..] {
            assert_eq!(r.metrics, interior[0].metrics);
        }
    }
}
