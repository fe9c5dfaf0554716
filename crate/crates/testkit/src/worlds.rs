//! Randomized world fixtures for oracle-equivalence and property tests.

use voxshift_core::rng::SeededRng;
use voxshift_core::world::{BlockClassification, VoxelWorld};

/// Palette shared by the random worlds; names match the shipped
/// classification (glass exercises the transparent-but-solid path, water
/// the opaque-but-unstandable one).
pub const RANDOM_PALETTE: [&str; 5] = ["air", "stone", "grass", "glass", "water"];

/// A random terrain-with-clutter world of up to `max_dim` blocks per axis:
/// a per-column ground height with sprinkled caves, and scattered stone,
/// glass, and water blocks in the air volume.
pub fn random_world(seed: u64, max_dim: u32) -> VoxelWorld {
    let mut rng = SeededRng::new(seed);
    let dim = |rng: &mut SeededRng| 4 + rng.below((max_dim - 3) as u64) as u32;
    let dims = (dim(&mut rng), dim(&mut rng), dim(&mut rng));
    let origin = (
        rng.below(17) as i32 - 8,
        rng.below(17) as i32 - 8,
        rng.below(17) as i32 - 8,
    );
    let (sx, sy, sz) = dims;

    // Ground height per column.
    let base = 1 + rng.below(sy.max(2) as u64 / 2) as u32;
    let mut heights = vec![0u32; (sx * sz) as usize];
    for h in heights.iter_mut() {
        let jitter = rng.below(3) as i64 - 1;
        *h = (base as i64 + jitter).clamp(0, sy as i64 - 1) as u32;
    }

    let air = 0u16;
    let stone = 1u16;
    let grass = 2u16;
    let glass = 3u16;
    let water = 4u16;

    let mut grid = vec![air; (sx * sy * sz) as usize];
    for y in 0..sy {
        for z in 0..sz {
            for x in 0..sx {
                let idx = (x + sx * (z + sz * y)) as usize;
                let h = heights[(x + sx * z) as usize];
                if y < h {
                    // 6% caves, occasional grass banding.
                    grid[idx] = match rng.below(100) {
                        0..=5 => air,
                        6..=20 => grass,
                        _ => stone,
                    };
                } else {
                    // Sparse clutter in the open volume.
                    grid[idx] = match rng.below(100) {
                        0..=3 => stone,
                        4..=5 => glass,
                        6 => water,
                        _ => air,
                    };
                }
            }
        }
    }

    VoxelWorld::new(
        dims,
        origin,
        RANDOM_PALETTE.iter().map(|s| s.to_string()).collect(),
        grid,
    )
    .expect("random world is structurally valid")
}

pub fn default_classification() -> BlockClassification {
    BlockClassification::default_lists()
}
