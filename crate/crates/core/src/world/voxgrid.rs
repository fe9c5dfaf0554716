//! The voxgrid binary world-file format.
//!
//! Layout (all multi-byte values little-endian):
//!
//! ```text
//! magic "VOXG"          4 bytes
//! format version        u16 (= 1)
//! origin                3 x i32
//! dims                  3 x u32
//! palette count         u16
//! palette entries       per entry: u8 length + UTF-8 name
//! payload               sx*sy*sz palette indices as u16,
//!                       x-fastest, then z, then y
//! ```
//!
//! No compression in version 1.

use super::{VoxelWorld, WorldError};

const MAGIC: &[u8; 4] = b"VOXG";
const VERSION: u16 = 1;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], WorldError> {
        if self.pos + n > self.bytes.len() {
            return Err(WorldError::MalformedHeader {
                offset: self.pos,
                reason: format!("truncated while reading {what}"),
            });
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u16(&mut self, what: &str) -> Result<u16, WorldError> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32, WorldError> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn i32(&mut self, what: &str) -> Result<i32, WorldError> {
        let b = self.take(4, what)?;
        Ok(i32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Parses a voxgrid file. Errors carry the byte offset of the fault.
pub fn load_world(bytes: &[u8]) -> Result<VoxelWorld, WorldError> {
    let mut r = Reader { bytes, pos: 0 };

    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(WorldError::MalformedHeader {
            offset: 0,
            reason: format!("bad magic {magic:?}, expected \"VOXG\""),
        });
    }
    let version_offset = r.pos;
    let version = r.u16("format version")?;
    if version != VERSION {
        return Err(WorldError::MalformedHeader {
            offset: version_offset,
            reason: format!("unsupported format version {version}"),
        });
    }

    let origin = (r.i32("origin.x")?, r.i32("origin.y")?, r.i32("origin.z")?);
    let dims_offset = r.pos;
    let dims = (r.u32("dims.x")?, r.u32("dims.y")?, r.u32("dims.z")?);
    if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
        return Err(WorldError::MalformedHeader {
            offset: dims_offset,
            reason: format!("dimensions {dims:?} must all be positive"),
        });
    }
    let block_count = dims.0 as u64 * dims.1 as u64 * dims.2 as u64;
    if block_count > (1 << 31) {
        return Err(WorldError::MalformedHeader {
            offset: dims_offset,
            reason: format!("dimensions {dims:?} exceed 2^31 blocks"),
        });
    }

    let palette_count_offset = r.pos;
    let palette_count = r.u16("palette count")?;
    if palette_count == 0 {
        return Err(WorldError::MalformedHeader {
            offset: palette_count_offset,
            reason: "palette count is zero".into(),
        });
    }
    let mut palette = Vec::with_capacity(palette_count as usize);
    for i in 0..palette_count {
        let name_offset = r.pos;
        let len = r.take(1, "palette entry length")?[0] as usize;
        let raw = r.take(len, "palette entry name")?;
        let name = std::str::from_utf8(raw).map_err(|_| WorldError::MalformedHeader {
            offset: name_offset,
            reason: format!("palette entry {i} is not valid UTF-8"),
        })?;
        palette.push(name.to_string());
    }

    let payload_offset = r.pos;
    let available = (bytes.len() - payload_offset) as u64;
    if available != block_count * 2 {
        return Err(WorldError::PayloadLength {
            offset: payload_offset,
            expected: block_count,
            found: available / 2,
        });
    }
    let mut grid = Vec::with_capacity(block_count as usize);
    for i in 0..block_count as usize {
        let at = payload_offset + i * 2;
        let index = u16::from_le_bytes([bytes[at], bytes[at + 1]]);
        if index as usize >= palette.len() {
            return Err(WorldError::PaletteIndex {
                offset: at,
                index,
                palette_len: palette.len(),
            });
        }
        grid.push(index);
    }

    VoxelWorld::new(dims, origin, palette, grid)
}

/// Serializes a world; `load_world(save_world(w))` reproduces `w` exactly.
pub fn save_world(world: &VoxelWorld) -> Vec<u8> {
    let (sx, sy, sz) = world.dims();
    let (ox, oy, oz) = world.origin();
    let palette = world.palette();
    let grid = world.grid();

    let mut out = Vec::with_capacity(32 + palette.len() * 8 + grid.len() * 2);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [ox, oy, oz] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in [sx, sy, sz] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(palette.len() as u16).to_le_bytes());
    for name in palette {
        debug_assert!(name.len() <= u8::MAX as usize);
        out.push(name.len() as u8);
        out.extend_from_slice(name.as_bytes());
    }
    for &index in grid {
        out.extend_from_slice(&index.to_le_bytes());
    }
    out
}
