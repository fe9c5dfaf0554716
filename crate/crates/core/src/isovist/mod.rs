//! Headspace enumeration, block-to-block visibility, walkability, and the
//! per-location isovist set assembly.

mod bresenham;

pub use bresenham::{canonical, LineIter};

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::rng::{ceil_fraction, SeededRng};
use crate::world::{BlockClassification, Coord, VoxelWorld};

#[derive(Debug, Error)]
pub enum IsovistError {
    #[error("sample fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
}

/// A block position a standing avatar's head can occupy: the block itself
/// and the one below are enterable, and the block two below is standable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Headspace {
    pub head: Coord,
}

impl Headspace {
    pub fn new(head: Coord) -> Self {
        Headspace { head }
    }

    pub fn feet(&self) -> Coord {
        self.head.offset(0, -1, 0)
    }

    pub fn support(&self) -> Coord {
        self.head.offset(0, -2, 0)
    }
}

/// The raw visibility sets around one headspace.
///
/// `perimeter` holds every view-limiting surface block the centroid can
/// see: a block joins it when it is not sight-and-body passable (so glass
/// is included, air is not) and every block strictly between it and the
/// centroid head is transparent. `real_perimeter` keeps only the opaque
/// members, dropping transparent surfaces like glass.
///
/// `radials` carries one ray length per perimeter block, index-aligned
/// with `radial_endpoints`. Rays that leave the world or reach the view
/// distance cap without hitting a surface are tallied separately in
/// `sky_radial_count`; they enter the radial statistics as rays of length
/// `sky_radial_length` (= the view distance) but contribute no endpoint.
#[derive(Debug, Clone)]
pub struct IsovistSets {
    pub centroid: Headspace,
    /// Head coordinates of every headspace visible from the centroid head
    /// (head-to-head test), the centroid itself included. Sorted (y, z, x).
    pub visible_headspaces: Vec<Coord>,
    /// The standable blocks two below each visible headspace.
    pub support_blocks: Vec<Coord>,
    /// Visible view-limiting blocks with their palette indices. Sorted (y, z, x).
    pub perimeter: Vec<(Coord, u16)>,
    /// Perimeter members whose type is opaque.
    pub real_perimeter: Vec<(Coord, u16)>,
    /// Walkable supports within the step budget, the start included.
    pub reachable: Vec<Coord>,
    /// Ray length to each perimeter block.
    pub radials: Vec<f64>,
    pub radial_endpoints: Vec<Coord>,
    /// Unobstructed rays to the sky or the view-distance cap.
    pub sky_radial_count: usize,
    /// Length assigned to each sky ray (the view distance).
    pub sky_radial_length: f64,
}

/// Per-palette classification flags bound to one world.
pub(crate) struct WorldView<'w> {
    pub world: &'w VoxelWorld,
    transparent: Vec<bool>,
    enterable: Vec<bool>,
    standable: Vec<bool>,
    /// Transparency per grid cell, for the hot sight-test path.
    transparent_grid: Vec<bool>,
}

impl<'w> WorldView<'w> {
    pub fn new(world: &'w VoxelWorld, classification: &BlockClassification) -> Self {
        let transparent: Vec<bool> = world
            .palette()
            .iter()
            .map(|p| classification.is_transparent(p))
            .collect();
        let enterable = world
            .palette()
            .iter()
            .map(|p| classification.is_enterable(p))
            .collect();
        let standable = world
            .palette()
            .iter()
            .map(|p| classification.is_standable(p))
            .collect();
        let transparent_grid = world
            .grid()
            .iter()
            .map(|&i| transparent[i as usize])
            .collect();
        WorldView {
            world,
            transparent,
            enterable,
            standable,
            transparent_grid,
        }
    }

    /// Out of bounds counts as transparent: rays leaving the world meet no
    /// phantom surface.
    #[inline]
    pub fn is_transparent(&self, c: Coord) -> bool {
        match self.world.palette_index_at(c) {
            Some(i) => self.transparent[i as usize],
            None => true,
        }
    }

    #[inline]
    pub fn is_enterable(&self, c: Coord) -> bool {
        match self.world.palette_index_at(c) {
            Some(i) => self.enterable[i as usize],
            None => false,
        }
    }

    #[inline]
    pub fn is_standable(&self, c: Coord) -> bool {
        match self.world.palette_index_at(c) {
            Some(i) => self.standable[i as usize],
            None => false,
        }
    }

    #[inline]
    pub fn transparent_idx(&self, idx: u16) -> bool {
        self.transparent[idx as usize]
    }

    /// A surface (view-limiting) type is anything an avatar's body and
    /// sight do not both pass through: opaque blocks and glass-likes.
    #[inline]
    pub fn surface_idx(&self, idx: u16) -> bool {
        !(self.transparent[idx as usize] && self.enterable[idx as usize])
    }

    /// A valid standing position: standable support with two enterable
    /// blocks above it.
    #[inline]
    pub fn is_standing_position(&self, support: Coord) -> bool {
        self.is_standable(support)
            && self.is_enterable(support.offset(0, 1, 0))
            && self.is_enterable(support.offset(0, 2, 0))
    }

    /// Whether any of the 26 neighbors is transparent (out of bounds counts).
    /// A surface block failing this can only be seen from a directly
    /// adjacent head, because the last block before it on any longer
    /// Bresenham line is one of these neighbors.
    pub fn is_exposed(&self, c: Coord) -> bool {
        for dy in -1..=1 {
            for dz in -1..=1 {
                for dx in -1..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    if self.is_transparent(c.offset(dx, dy, dz)) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// True when every block strictly between `a` and `b` on the canonical
/// Bresenham line is transparent. Endpoint block types never matter.
pub(crate) fn clear_between(view: &WorldView<'_>, a: Coord, b: Coord) -> bool {
    if view.world.contains(a) && view.world.contains(b) {
        // The line between two in-world blocks stays inside the axis-aligned
        // world box, so the walk can run on raw grid indices.
        return view.clear_between_inworld(a, b);
    }
    let (lo, hi) = canonical(a, b);
    let mut line = LineIter::new(lo, hi);
    line.next(); // skip the first endpoint
    for p in line {
        if p == hi {
            break;
        }
        if !view.is_transparent(p) {
            return false;
        }
    }
    true
}

impl WorldView<'_> {
    /// Same traversal as [`LineIter`], specialized to in-world endpoints:
    /// coordinates are tracked as incremental grid-index deltas, skipping
    /// bounds checks and index arithmetic per step.
    fn clear_between_inworld(&self, a: Coord, b: Coord) -> bool {
        let (from, to) = canonical(a, b);
        let dx = (to.x - from.x).abs() as i64;
        let dy = (to.y - from.y).abs() as i64;
        let dz = (to.z - from.z).abs() as i64;
        let steps = dx.max(dy).max(dz);
        if steps <= 1 {
            return true;
        }

        let (sx, _, sz) = self.world.dims();
        let row = sx as i64;
        let layer = sx as i64 * sz as i64;
        let o = self.world.min_corner();
        let mut idx = (from.x - o.x) as i64
            + row * ((from.z - o.z) as i64 + sz as i64 * (from.y - o.y) as i64);
        let ix = if from.x < to.x { 1 } else { -1i64 };
        let iy = if from.y < to.y { layer } else { -layer };
        let iz = if from.z < to.z { row } else { -row };

        macro_rules! walk {
            ($d_main:expr, $ia:expr, $da:expr, $ib:expr, $db:expr, $imain:expr) => {{
                let mut err_a = 2 * $da - $d_main;
                let mut err_b = 2 * $db - $d_main;
                for _ in 1..steps {
                    if err_a >= 0 {
                        idx += $ia;
                        err_a -= 2 * $d_main;
                    }
                    if err_b >= 0 {
                        idx += $ib;
                        err_b -= 2 * $d_main;
                    }
                    err_a += 2 * $da;
                    err_b += 2 * $db;
                    idx += $imain;
                    if !self.transparent_grid[idx as usize] {
                        return false;
                    }
                }
            }};
        }
        if dx >= dy && dx >= dz {
            walk!(dx, iy, dy, iz, dz, ix);
        } else if dy >= dx && dy >= dz {
            walk!(dy, ix, dx, iz, dz, iy);
        } else {
            walk!(dz, iy, dy, ix, dx, iz);
        }
        true
    }
}

/// Visibility between two block centers: true iff their Euclidean distance
/// is at most `d` and the open segment between them is transparent.
/// `visible(x, x)` is always true.
pub fn visible(
    world: &VoxelWorld,
    from: Coord,
    to: Coord,
    classification: &BlockClassification,
    d: u32,
) -> bool {
    let view = WorldView::new(world, classification);
    visible_in_view(&view, from, to, d)
}

pub(crate) fn visible_in_view(view: &WorldView<'_>, from: Coord, to: Coord, d: u32) -> bool {
    from.dist2(to) <= d as u64 * d as u64 && clear_between(view, from, to)
}

/// Every headspace of the world, sorted ascending by (y, z, x).
pub fn enumerate_headspaces(
    world: &VoxelWorld,
    classification: &BlockClassification,
) -> Vec<Headspace> {
    let view = WorldView::new(world, classification);
    enumerate_headspaces_in_view(&view)
}

fn enumerate_headspaces_in_view(view: &WorldView<'_>) -> Vec<Headspace> {
    view.world
        .iter_coords()
        .filter(|&head| {
            view.is_enterable(head)
                && view.is_enterable(head.offset(0, -1, 0))
                && view.is_standable(head.offset(0, -2, 0))
        })
        .map(Headspace::new)
        .collect()
}

/// Precomputed per-world state shared by every isovist in a run.
pub struct WorldContext<'w> {
    view: WorldView<'w>,
    headspaces: Vec<Headspace>,
    /// Standing-position support heights per (x, z) column, ascending.
    column_supports: HashMap<(i32, i32), Vec<i32>>,
    /// Surface blocks with at least one transparent 26-neighbor, scan order.
    exposed_surfaces: Vec<(Coord, u16)>,
    /// World-shell blocks of transparent type, candidates for sky rays.
    shell_transparent: Vec<Coord>,
}

impl<'w> WorldContext<'w> {
    pub fn build(world: &'w VoxelWorld, classification: &BlockClassification) -> Self {
        let view = WorldView::new(world, classification);
        let headspaces = enumerate_headspaces_in_view(&view);

        let mut column_supports: HashMap<(i32, i32), Vec<i32>> = HashMap::new();
        for hs in &headspaces {
            let s = hs.support();
            column_supports.entry((s.x, s.z)).or_default().push(s.y);
        }
        for heights in column_supports.values_mut() {
            heights.sort_unstable();
        }

        let lo = world.min_corner();
        let hi = world.max_corner();
        let mut exposed_surfaces = Vec::new();
        let mut shell_transparent = Vec::new();
        for c in world.iter_coords() {
            let idx = world.palette_index_at(c).expect("in-world coord");
            if view.surface_idx(idx) && view.is_exposed(c) {
                exposed_surfaces.push((c, idx));
            }
            let on_shell = c.x == lo.x
                || c.x == hi.x
                || c.y == lo.y
                || c.y == hi.y
                || c.z == lo.z
                || c.z == hi.z;
            if on_shell && view.transparent_idx(idx) {
                shell_transparent.push(c);
            }
        }

        WorldContext {
            view,
            headspaces,
            column_supports,
            exposed_surfaces,
            shell_transparent,
        }
    }

    pub fn headspaces(&self) -> &[Headspace] {
        &self.headspaces
    }

    pub fn world(&self) -> &VoxelWorld {
        self.view.world
    }

    /// True when every block of the world lies within `d` of `head`, i.e.
    /// the view sphere swallows the whole world box.
    fn ball_contains_world(&self, head: Coord, d2: u64) -> bool {
        let lo = self.view.world.min_corner();
        let hi = self.view.world.max_corner();
        for &x in &[lo.x, hi.x] {
            for &y in &[lo.y, hi.y] {
                for &z in &[lo.z, hi.z] {
                    if head.dist2(Coord::new(x, y, z)) > d2 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Movement successors of a standing support: 4 lateral directions, a
    /// one-block step up or any drop, destination must itself be a standing
    /// position. Stepping up additionally needs the two blocks above the
    /// source head to permit passage.
    fn walk_neighbors(&self, s: Coord, out: &mut Vec<Coord>) {
        out.clear();
        let step_up_clear =
            self.view.is_enterable(s.offset(0, 3, 0)) && self.view.is_enterable(s.offset(0, 4, 0));
        for (dx, dz) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if let Some(heights) = self.column_supports.get(&(s.x + dx, s.z + dz)) {
                for &ty in heights {
                    if ty > s.y + 1 {
                        break;
                    }
                    if ty == s.y + 1 && !step_up_clear {
                        continue;
                    }
                    out.push(Coord::new(s.x + dx, ty, s.z + dz));
                }
            }
        }
    }

    fn reachable_from(&self, start: Coord, budget: u32) -> Vec<Coord> {
        if !self.view.is_standing_position(start) {
            return Vec::new();
        }
        let mut dist: HashMap<Coord, u32> = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(start, 0);
        queue.push_back(start);
        let mut neighbors = Vec::new();
        while let Some(cur) = queue.pop_front() {
            let steps = dist[&cur];
            if steps == budget {
                continue;
            }
            self.walk_neighbors(cur, &mut neighbors);
            for &next in &neighbors {
                if !dist.contains_key(&next) {
                    dist.insert(next, steps + 1);
                    queue.push_back(next);
                }
            }
        }
        let mut result: Vec<Coord> = dist.into_keys().collect();
        result.sort_by_key(|c| c.yzx_key());
        result
    }

    /// Full isovist set assembly for one headspace.
    pub fn compute_isovist(&self, hs: Headspace, d: u32, n: u32) -> IsovistSets {
        let head = hs.head;
        let d2 = d as u64 * d as u64;

        let mut visible_headspaces = Vec::new();
        for other in &self.headspaces {
            if head.dist2(other.head) <= d2 && clear_between(&self.view, head, other.head) {
                visible_headspaces.push(other.head);
            }
        }
        let support_blocks: Vec<Coord> = visible_headspaces
            .iter()
            .map(|c| c.offset(0, -2, 0))
            .collect();

        let mut perimeter = Vec::new();
        for &(c, idx) in &self.exposed_surfaces {
            if head.dist2(c) <= d2 && clear_between(&self.view, head, c) {
                perimeter.push((c, idx));
            }
        }
        // Buried surfaces are invisible except from a directly adjacent
        // head, where the open segment is empty.
        for dy in -1..=1 {
            for dz in -1..=1 {
                for dx in -1..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let c = head.offset(dx, dy, dz);
                    if head.dist2(c) > d2 {
                        continue;
                    }
                    if let Some(idx) = self.view.world.palette_index_at(c) {
                        if self.view.surface_idx(idx) && !self.view.is_exposed(c) {
                            perimeter.push((c, idx));
                        }
                    }
                }
            }
        }
        perimeter.sort_by_key(|&(c, _)| c.yzx_key());

        let real_perimeter: Vec<(Coord, u16)> = perimeter
            .iter()
            .copied()
            .filter(|&(_, idx)| !self.view.transparent_idx(idx))
            .collect();
        let radial_endpoints: Vec<Coord> = perimeter.iter().map(|&(c, _)| c).collect();
        let radials: Vec<f64> = radial_endpoints.iter().map(|&c| head.dist(c)).collect();

        let mut sky_radial_count = 0usize;
        if self.ball_contains_world(head, d2) {
            for &c in &self.shell_transparent {
                if clear_between(&self.view, head, c) {
                    sky_radial_count += 1;
                }
            }
        } else {
            sky_radial_count = self.count_sky_rays_clipped(head, d, d2);
        }

        let reachable = self.reachable_from(hs.support(), n);

        IsovistSets {
            centroid: hs,
            visible_headspaces,
            support_blocks,
            perimeter,
            real_perimeter,
            reachable,
            radials,
            radial_endpoints,
            sky_radial_count,
            sky_radial_length: d as f64,
        }
    }

    /// Sky rays when the view sphere is smaller than the world: target the
    /// boundary blocks of (world box ∩ view ball), i.e. in-range blocks with
    /// a 6-neighbor that is out of the world or beyond the view distance.
    fn count_sky_rays_clipped(&self, head: Coord, d: u32, d2: u64) -> usize {
        let world = self.view.world;
        let lo = world.min_corner();
        let hi = world.max_corner();
        let d = d as i32;
        let x0 = lo.x.max(head.x - d);
        let x1 = hi.x.min(head.x + d);
        let y0 = lo.y.max(head.y - d);
        let y1 = hi.y.min(head.y + d);
        let z0 = lo.z.max(head.z - d);
        let z1 = hi.z.min(head.z + d);
        let mut count = 0;
        for y in y0..=y1 {
            for z in z0..=z1 {
                for x in x0..=x1 {
                    let c = Coord::new(x, y, z);
                    if head.dist2(c) > d2 {
                        continue;
                    }
                    let idx = world.palette_index_at(c).expect("in-world coord");
                    if !self.view.transparent_idx(idx) {
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
                    if on_boundary && clear_between(&self.view, head, c) {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// Walkable supports within `budget` lateral steps of `start`, which must
/// be a standing position (standable with two enterable blocks above).
pub fn reachable_set(
    world: &VoxelWorld,
    start: Coord,
    classification: &BlockClassification,
    budget: u32,
) -> Vec<Coord> {
    let ctx = WorldContext::build(world, classification);
    ctx.reachable_from(start, budget)
}

/// Convenience wrapper building a fresh context per call; batch runs
/// should build one [`WorldContext`] and reuse it.
pub fn compute_isovist(
    world: &VoxelWorld,
    hs: Headspace,
    classification: &BlockClassification,
    d: u32,
    n: u32,
) -> IsovistSets {
    WorldContext::build(world, classification).compute_isovist(hs, d, n)
}

/// Per-Y-level random sub-sampling: within each head.y level, selects
/// ceil(fraction * count) headspaces uniformly without replacement from a
/// generator seeded with `seed`, processing levels in ascending order.
/// Output sorted (y, z, x); deterministic per seed.
pub fn subsample_headspaces(
    headspaces: &[Headspace],
    fraction: f64,
    seed: u64,
) -> Result<Vec<Headspace>, IsovistError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(IsovistError::InvalidFraction(fraction));
    }
    let mut levels: BTreeMap<i32, Vec<Headspace>> = BTreeMap::new();
    for hs in headspaces {
        levels.entry(hs.head.y).or_default().push(*hs);
    }
    let mut rng = SeededRng::new(seed);
    let mut selected = Vec::new();
    for level in levels.values() {
        let take = ceil_fraction(level.len(), fraction);
        for i in rng.sample_indices(level.len(), take) {
            selected.push(level[i]);
        }
    }
    selected.sort_by_key(|hs| hs.head.yzx_key());
    Ok(selected)
}
