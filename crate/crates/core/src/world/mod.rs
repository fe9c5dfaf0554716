//! Voxel world model: the immutable block grid, the block classification
//! lists that drive visibility and movement, and world generation.

mod gen;
mod voxgrid;

pub use gen::{apply_toy_generator, generate_flat_world, plan_toy_structures, ToyStructure};
pub use voxgrid::{load_world, save_world};

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },
    #[error("payload length mismatch at byte {offset}: expected {expected} block indices, found {found}")]
    PayloadLength {
        offset: usize,
        expected: u64,
        found: u64,
    },
    #[error("palette index {index} out of range ({palette_len} entries) at byte {offset}")]
    PaletteIndex {
        offset: usize,
        index: u16,
        palette_len: usize,
    },
    #[error("invalid palette: {reason}")]
    InvalidPalette { reason: String },
    #[error("invalid dimensions {dims:?}: {reason}")]
    InvalidDims {
        dims: (u32, u32, u32),
        reason: String,
    },
    #[error("grid length {found} does not match dims {dims:?} ({expected} blocks)")]
    GridLength {
        dims: (u32, u32, u32),
        expected: u64,
        found: usize,
    },
    #[error("invalid ground height {height} for world height {sy}")]
    GroundHeight { height: u32, sy: u32 },
    #[error("invalid generator params: {reason}")]
    InvalidParams { reason: String },
    #[error("classification config line {line}: {reason}")]
    Classification { line: usize, reason: String },
}

/// A signed block position. One block occupies one unit cube; the
/// coordinate names the cube's lattice corner and all geometry (distances,
/// ray casts) is taken between cube centers, which offsets every endpoint
/// by the same +0.5 and therefore cancels in integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Coord { x, y, z }
    }

    pub fn offset(self, dx: i32, dy: i32, dz: i32) -> Self {
        Coord::new(self.x + dx, self.y + dy, self.z + dz)
    }

    /// Squared Euclidean distance between block centers, exact in integers.
    pub fn dist2(self, other: Coord) -> u64 {
        let dx = (self.x - other.x) as i64;
        let dy = (self.y - other.y) as i64;
        let dz = (self.z - other.z) as i64;
        (dx * dx + dy * dy + dz * dz) as u64
    }

    pub fn dist(self, other: Coord) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }

    /// Sort key used for every ordered output in the pipeline.
    pub fn yzx_key(self) -> (i32, i32, i32) {
        (self.y, self.z, self.x)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Immutable dense voxel grid with a block-type palette.
///
/// Grid storage is x-fastest, then z, then y:
/// `index = x + sx * (z + sz * y)` in local (origin-relative) coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoxelWorld {
    dims: (u32, u32, u32),
    origin: (i32, i32, i32),
    palette: Vec<String>,
    grid: Vec<u16>,
}

impl VoxelWorld {
    pub fn new(
        dims: (u32, u32, u32),
        origin: (i32, i32, i32),
        palette: Vec<String>,
        grid: Vec<u16>,
    ) -> Result<Self, WorldError> {
        let (sx, sy, sz) = dims;
        if sx == 0 || sy == 0 || sz == 0 {
            return Err(WorldError::InvalidDims {
                dims,
                reason: "all dimensions must be positive".into(),
            });
        }
        let expected = sx as u64 * sy as u64 * sz as u64;
        if expected > (1 << 31) {
            return Err(WorldError::InvalidDims {
                dims,
                reason: "world exceeds 2^31 blocks".into(),
            });
        }
        if grid.len() as u64 != expected {
            return Err(WorldError::GridLength {
                dims,
                expected,
                found: grid.len(),
            });
        }
        validate_palette(&palette)?;
        let palette_len = palette.len() as u16;
        if let Some(pos) = grid.iter().position(|&i| i >= palette_len) {
            return Err(WorldError::PaletteIndex {
                offset: pos,
                index: grid[pos],
                palette_len: palette.len(),
            });
        }
        Ok(VoxelWorld {
            dims,
            origin,
            palette,
            grid,
        })
    }

    pub fn dims(&self) -> (u32, u32, u32) {
        self.dims
    }

    pub fn origin(&self) -> (i32, i32, i32) {
        self.origin
    }

    pub fn palette(&self) -> &[String] {
        &self.palette
    }

    pub fn grid(&self) -> &[u16] {
        &self.grid
    }

    pub fn block_count(&self) -> usize {
        self.grid.len()
    }

    /// Smallest in-world coordinate.
    pub fn min_corner(&self) -> Coord {
        Coord::new(self.origin.0, self.origin.1, self.origin.2)
    }

    /// Largest in-world coordinate (inclusive).
    pub fn max_corner(&self) -> Coord {
        Coord::new(
            self.origin.0 + self.dims.0 as i32 - 1,
            self.origin.1 + self.dims.1 as i32 - 1,
            self.origin.2 + self.dims.2 as i32 - 1,
        )
    }

    pub fn contains(&self, c: Coord) -> bool {
        let lo = self.min_corner();
        let hi = self.max_corner();
        c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y && c.z >= lo.z && c.z <= hi.z
    }

    /// Grid index for an in-bounds coordinate.
    pub fn index_of(&self, c: Coord) -> Option<usize> {
        if !self.contains(c) {
            return None;
        }
        let lx = (c.x - self.origin.0) as usize;
        let ly = (c.y - self.origin.1) as usize;
        let lz = (c.z - self.origin.2) as usize;
        let (sx, _, sz) = self.dims;
        Some(lx + sx as usize * (lz + sz as usize * ly))
    }

    /// Palette index at a coordinate, `None` outside the world.
    pub fn palette_index_at(&self, c: Coord) -> Option<u16> {
        self.index_of(c).map(|i| self.grid[i])
    }

    /// Block-type name at a coordinate, `None` when out of bounds.
    /// Out-of-bounds positions are transparent, non-enterable, and
    /// non-standable for every consumer.
    pub fn block_at(&self, c: Coord) -> Option<&str> {
        self.palette_index_at(c)
            .map(|i| self.palette[i as usize].as_str())
    }

    /// Iterates all in-world coordinates in (y, z, x)-ascending order.
    pub fn iter_coords(&self) -> impl Iterator<Item = Coord> + '_ {
        let lo = self.min_corner();
        let (sx, sy, sz) = self.dims;
        (0..sy as i32).flat_map(move |y| {
            (0..sz as i32).flat_map(move |z| {
                (0..sx as i32).map(move |x| Coord::new(lo.x + x, lo.y + y, lo.z + z))
            })
        })
    }
}

fn validate_palette(palette: &[String]) -> Result<(), WorldError> {
    if palette.is_empty() {
        return Err(WorldError::InvalidPalette {
            reason: "palette is empty".into(),
        });
    }
    if palette.len() > u16::MAX as usize {
        return Err(WorldError::InvalidPalette {
            reason: format!("{} entries exceed the u16 index space", palette.len()),
        });
    }
    let mut seen = HashSet::new();
    for name in palette {
        if name.is_empty() {
            return Err(WorldError::InvalidPalette {
                reason: "palette entry is empty".into(),
            });
        }
        if !seen.insert(name.as_str()) {
            return Err(WorldError::InvalidPalette {
                reason: format!("duplicate palette entry {name:?}"),
            });
        }
    }
    Ok(())
}

/// The transparent / enterable / standable block-type lists.
///
/// The three sets are independent: glass is transparent but not enterable,
/// a closed door could be enterable but opaque. Types absent from a set are
/// simply not members.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockClassification {
    transparent: HashSet<String>,
    enterable: HashSet<String>,
    standable: HashSet<String>,
}

impl BlockClassification {
    pub fn new<I, J, K, S>(transparent: I, enterable: J, standable: K) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = S>,
        K: IntoIterator<Item = S>,
        S: Into<String>,
    {
        BlockClassification {
            transparent: transparent.into_iter().map(Into::into).collect(),
            enterable: enterable.into_iter().map(Into::into).collect(),
            standable: standable.into_iter().map(Into::into).collect(),
        }
    }

    /// The classification shipped with the tool (see assets/default_blocks.cfg).
    pub fn default_lists() -> Self {
        Self::parse(DEFAULT_CLASSIFICATION_CFG).expect("bundled classification parses")
    }

    /// Parses the line-oriented config format: `[transparent]`, `[enterable]`,
    /// `[standable]` section headers, one block-type name per line, `#`
    /// comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, WorldError> {
        let mut cls = BlockClassification::default();
        let mut section: Option<&str> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => raw[..pos].trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(WorldError::Classification {
                    line: i + 1,
                    reason: format!("unterminated section header {line:?}"),
                })?;
                section = match name {
                    "transparent" => Some("transparent"),
                    "enterable" => Some("enterable"),
                    "standable" => Some("standable"),
                    other => {
                        return Err(WorldError::Classification {
                            line: i + 1,
                            reason: format!("unknown section {other:?}"),
                        })
                    }
                };
                continue;
            }
            let set = match section {
                Some("transparent") => &mut cls.transparent,
                Some("enterable") => &mut cls.enterable,
                Some("standable") => &mut cls.standable,
                _ => {
                    return Err(WorldError::Classification {
                        line: i + 1,
                        reason: format!("block name {line:?} before any section header"),
                    })
                }
            };
            set.insert(line.to_string());
        }
        Ok(cls)
    }

    pub fn is_transparent(&self, block: &str) -> bool {
        self.transparent.contains(block)
    }

    pub fn is_enterable(&self, block: &str) -> bool {
        self.enterable.contains(block)
    }

    pub fn is_standable(&self, block: &str) -> bool {
        self.standable.contains(block)
    }
}

const DEFAULT_CLASSIFICATION_CFG: &str = include_str!("../../../../assets/default_blocks.cfg");

/// Toy structure generator parameters: hollow rectangular walled boxes
/// dropped onto the surface, a desk-scale stand-in for a settlement
/// generator.
#[derive(Debug, Clone)]
pub struct ToyGeneratorParams {
    pub structure_count: u32,
    /// Inclusive (min, max) side length of each structure footprint.
    pub footprint: (u32, u32),
    /// Inclusive (min, max) wall height.
    pub wall_height: (u32, u32),
    pub material: String,
    pub seed: u64,
}

impl ToyGeneratorParams {
    pub fn validate(&self) -> Result<(), WorldError> {
        if self.footprint.0 > self.footprint.1 {
            return Err(WorldError::InvalidParams {
                reason: format!(
                    "footprint min {} > max {}",
                    self.footprint.0, self.footprint.1
                ),
            });
        }
        if self.wall_height.0 > self.wall_height.1 {
            return Err(WorldError::InvalidParams {
                reason: format!(
                    "wall height min {} > max {}",
                    self.wall_height.0, self.wall_height.1
                ),
            });
        }
        if self.material.is_empty() {
            return Err(WorldError::InvalidParams {
                reason: "structure material is empty".into(),
            });
        }
        Ok(())
    }
}
