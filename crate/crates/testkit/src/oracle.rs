//! Brute-force recomputation of isovist sets and metrics, independent of
//! the production code paths: targets come from an exhaustive scan of all
//! world blocks, lines are materialized fully before checking, walkability
//! scans columns directly, and metric set algebra runs on hash sets.

use std::collections::{HashMap, HashSet, VecDeque};

use voxshift_core::isovist::IsovistSets;
use voxshift_core::world::{BlockClassification, Coord, VoxelWorld};

/// Materializes the full Bresenham point list from the lexicographically
/// smaller endpoint to the larger (the canonical traversal direction),
/// textbook dominant-axis form.
pub fn bf_line(a: Coord, b: Coord) -> Vec<Coord> {
    let (from, to) = if (a.x, a.y, a.z) <= (b.x, b.y, b.z) {
        (a, b)
    } else {
        (b, a)
    };
    let dx = (to.x as i64 - from.x as i64).abs();
    let dy = (to.y as i64 - from.y as i64).abs();
    let dz = (to.z as i64 - from.z as i64).abs();
    let xs: i32 = if from.x < to.x { 1 } else { -1 };
    let ys: i32 = if from.y < to.y { 1 } else { -1 };
    let zs: i32 = if from.z < to.z { 1 } else { -1 };

    let (mut x, mut y, mut z) = (from.x, from.y, from.z);
    let mut points = Vec::with_capacity(dx.max(dy).max(dz) as usize + 1);

    if dx >= dy && dx >= dz {
        let mut p1 = 2 * dy - dx;
        let mut p2 = 2 * dz - dx;
        while x != to.x {
            points.push(Coord::new(x, y, z));
            if p1 >= 0 {
                y += ys;
                p1 -= 2 * dx;
            }
            if p2 >= 0 {
                z += zs;
                p2 -= 2 * dx;
            }
            p1 += 2 * dy;
            p2 += 2 * dz;
            x += xs;
        }
    } else if dy >= dx && dy >= dz {
        let mut p1 = 2 * dx - dy;
        let mut p2 = 2 * dz - dy;
        while y != to.y {
            points.push(Coord::new(x, y, z));
            if p1 >= 0 {
                x += xs;
                p1 -= 2 * dy;
            }
            if p2 >= 0 {
                z += zs;
                p2 -= 2 * dy;
            }
            p1 += 2 * dx;
            p2 += 2 * dz;
            y += ys;
        }
    } else {
        let mut p1 = 2 * dy - dz;
        let mut p2 = 2 * dx - dz;
        while z != to.z {
            points.push(Coord::new(x, y, z));
            if p1 >= 0 {
                y += ys;
                p1 -= 2 * dz;
            }
            if p2 >= 0 {
                x += xs;
                p2 -= 2 * dz;
            }
            p1 += 2 * dy;
            p2 += 2 * dx;
            z += zs;
        }
    }
    points.push(to);
    points
}

fn transparent_at(world: &VoxelWorld, cls: &BlockClassification, c: Coord) -> bool {
    match world.block_at(c) {
        Some(b) => cls.is_transparent(b),
        None => true,
    }
}

fn enterable_at(world: &VoxelWorld, cls: &BlockClassification, c: Coord) -> bool {
    matches!(world.block_at(c), Some(b) if cls.is_enterable(b))
}

fn standable_at(world: &VoxelWorld, cls: &BlockClassification, c: Coord) -> bool {
    matches!(world.block_at(c), Some(b) if cls.is_standable(b))
}

/// Visibility by full line materialization.
pub fn bf_visible(
    world: &VoxelWorld,
    cls: &BlockClassification,
    a: Coord,
    b: Coord,
    d: u32,
) -> bool {
    if a.dist2(b) > d as u64 * d as u64 {
        return false;
    }
    let line = bf_line(a, b);
    line.iter()
        .skip(1)
        .take(line.len().saturating_sub(2))
        .all(|&p| transparent_at(world, cls, p))
}

/// Exhaustive headspace scan, (y, z, x) order.
pub fn bf_headspaces(world: &VoxelWorld, cls: &BlockClassification) -> Vec<Coord> {
    world
        .iter_coords()
        .filter(|&c| {
            enterable_at(world, cls, c)
                && enterable_at(world, cls, c.offset(0, -1, 0))
                && standable_at(world, cls, c.offset(0, -2, 0))
        })
        .collect()
}

fn standing_at(world: &VoxelWorld, cls: &BlockClassification, support: Coord) -> bool {
    standable_at(world, cls, support)
        && enterable_at(world, cls, support.offset(0, 1, 0))
        && enterable_at(world, cls, support.offset(0, 2, 0))
}

/// Walkability floodfill scanning each destination column directly.
pub fn bf_reachable(
    world: &VoxelWorld,
    cls: &BlockClassification,
    start: Coord,
    budget: u32,
) -> Vec<Coord> {
    if !standing_at(world, cls, start) {
        return Vec::new();
    }
    let bottom = world.min_corner().y;
    let mut dist: HashMap<Coord, u32> = HashMap::new();
    dist.insert(start, 0);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        let steps = dist[&s];
        if steps == budget {
            continue;
        }
        let headroom = enterable_at(world, cls, s.offset(0, 3, 0))
            && enterable_at(world, cls, s.offset(0, 4, 0));
        for (dx, dz) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let top = s.y + 1;
            for ty in (bottom..=top).rev() {
                let t = Coord::new(s.x + dx, ty, s.z + dz);
                if !standing_at(world, cls, t) {
                    continue;
                }
                if ty == s.y + 1 && !headroom {
                    continue;
                }
                if !dist.contains_key(&t) {
                    dist.insert(t, steps + 1);
                    queue.push_back(t);
                }
            }
        }
    }
    let mut out: Vec<Coord> = dist.into_keys().collect();
    out.sort_by_key(|c| c.yzx_key());
    out
}

/// Brute-force isovist: the same set definitions as the engine, computed
/// by scanning every world block.
pub fn bf_isovist(
    world: &VoxelWorld,
    cls: &BlockClassification,
    head: Coord,
    d: u32,
    n: u32,
) -> IsovistSets {
    let d2 = d as u64 * d as u64;

    let visible_headspaces: Vec<Coord> = bf_headspaces(world, cls)
        .into_iter()
        .filter(|&h| bf_visible(world, cls, head, h, d))
        .collect();
    let support_blocks: Vec<Coord> = visible_headspaces
        .iter()
        .map(|c| c.offset(0, -2, 0))
        .collect();

    let mut perimeter: Vec<(Coord, u16)> = Vec::new();
    for c in world.iter_coords() {
        let name = world.block_at(c).expect("in-world");
        let surface = !(cls.is_transparent(name) && cls.is_enterable(name));
        if surface && bf_visible(world, cls, head, c, d) {
            perimeter.push((c, world.palette_index_at(c).expect("in-world")));
        }
    }
    perimeter.sort_by_key(|&(c, _)| c.yzx_key());
    let real_perimeter: Vec<(Coord, u16)> = perimeter
        .iter()
        .copied()
        .filter(|&(c, _)| {
            let name = world.block_at(c).expect("in-world");
            !cls.is_transparent(name)
        })
        .collect();

    let radial_endpoints: Vec<Coord> = perimeter.iter().map(|&(c, _)| c).collect();
    let radials: Vec<f64> = radial_endpoints.iter().map(|&c| head.dist(c)).collect();

    // Sky rays: transparent blocks on the boundary of (world ∩ view ball)
    // with a clear line from the head.
    let mut sky_radial_count = 0usize;
    for c in world.iter_coords() {
        if head.dist2(c) > d2 {
            continue;
        }
        let name = world.block_at(c).expect("in-world");
        if !cls.is_transparent(name) {
            continue;
        }
        let on_boundary = [
            c.offset(1, 0, 0),
            c.offset(-1, 0, 0),
            c.offset(0, 1, 0),
            c.offset(0, -1, 0),
            c.offset(0, 0, 1),
            c.offset(0, 0, -1),
        ]
        .iter()
        .any(|&nb| !world.contains(nb) || head.dist2(nb) > d2);
        if on_boundary && bf_visible(world, cls, head, c, d) {
            sky_radial_count += 1;
        }
    }

    IsovistSets {
        centroid: voxshift_core::isovist::Headspace::new(head),
        visible_headspaces,
        support_blocks,
        perimeter,
        real_perimeter,
        reachable: bf_reachable(world, cls, head.offset(0, -2, 0), n),
        radials,
        radial_endpoints,
        sky_radial_count,
        sky_radial_length: d as f64,
    }
}

/// Straight-from-definition metric recomputation over hash sets.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMetrics {
    pub area: usize,
    pub perimeter: usize,
    pub diversity: usize,
    pub var_radials: f64,
    pub mean_radials: f64,
    pub roundness: f64,
    pub openness: f64,
    pub clutter: f64,
    pub reachability: usize,
    pub occlusivity: f64,
    pub drift_length: f64,
    pub vista_length: f64,
    pub real_perimeter_size: usize,
}

pub fn oracle_metrics(sets: &IsovistSets) -> OracleMetrics {
    let area = sets.visible_headspaces.len();
    let perimeter = sets.perimeter.len();
    let real_perimeter_size = sets.real_perimeter.len();
    let reachability = sets.reachable.len();

    let types: HashSet<u16> = sets.perimeter.iter().map(|&(_, t)| t).collect();
    let support: HashSet<Coord> = sets.support_blocks.iter().copied().collect();
    let perim_coords: HashSet<Coord> = sets.perimeter.iter().map(|&(c, _)| c).collect();
    let reach: HashSet<Coord> = sets.reachable.iter().copied().collect();

    let div = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };

    let mut rays: Vec<f64> = sets.radials.clone();
    rays.resize(rays.len() + sets.sky_radial_count, sets.sky_radial_length);
    let (mean, var, vista) = if rays.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        let mean = rays.iter().sum::<f64>() / rays.len() as f64;
        let var = rays.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / rays.len() as f64;
        let vista = rays.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (mean, var, vista)
    };

    let drift = if sets.radial_endpoints.is_empty() {
        0.0
    } else {
        let k = sets.radial_endpoints.len() as f64;
        let mx = sets
            .radial_endpoints
            .iter()
            .map(|c| c.x as f64)
            .sum::<f64>()
            / k;
        let my = sets
            .radial_endpoints
            .iter()
            .map(|c| c.y as f64)
            .sum::<f64>()
            / k;
        let mz = sets
            .radial_endpoints
            .iter()
            .map(|c| c.z as f64)
            .sum::<f64>()
            / k;
        let h = sets.centroid.head;
        ((mx - h.x as f64).powi(2) + (my - h.y as f64).powi(2) + (mz - h.z as f64).powi(2)).sqrt()
    };

    OracleMetrics {
        area,
        perimeter,
        diversity: types.len(),
        var_radials: var,
        mean_radials: mean,
        roundness: div(area as f64, perimeter as f64),
        openness: div(area as f64, real_perimeter_size as f64),
        clutter: div(
            support.intersection(&perim_coords).count() as f64,
            area as f64,
        ),
        reachability,
        occlusivity: div(
            reach.intersection(&support).count() as f64,
            reachability as f64,
        ),
        drift_length: drift,
        vista_length: vista,
        real_perimeter_size,
    }
}
