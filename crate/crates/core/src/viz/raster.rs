//! Overhead PC-1 overlay rendered as a binary P6 pixmap.
//!
//! One pixel per (x, z) column of the world: pixel column = x - origin.x,
//! pixel row = z - origin.z (top row is the lowest z). The pixel value is
//! the column's aggregated PC-1 over headspaces at or above the ground
//! threshold, mapped linearly from the data minimum to maximum onto the
//! 256-entry color ramp. Columns with no qualifying headspace use
//! [`NO_DATA_COLOR`].

use std::collections::HashMap;

use crate::isovist::Headspace;
use crate::world::VoxelWorld;

use super::{PlotSpec, VizError};

/// Magenta, outside the ramp's gamut on purpose.
pub const NO_DATA_COLOR: [u8; 3] = [255, 0, 255];

/// How to aggregate the qualifying headspaces of one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnAgg {
    /// Mean PC-1 over every qualifying headspace.
    Mean,
    /// PC-1 of the highest qualifying headspace only.
    Highest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB triples.
    pub pixels: Vec<[u8; 3]>,
}

impl RasterImage {
    pub fn pixel(&self, col: u32, row: u32) -> [u8; 3] {
        self.pixels[(row * self.width + col) as usize]
    }
}

/// Renders the overhead overlay. `projected` pairs each headspace with its
/// PC point; only the first component is used.
pub fn render_overlay(
    world: &VoxelWorld,
    projected: &[(Headspace, [f64; 2])],
    ground_threshold: i32,
    agg: ColumnAgg,
    _spec: &PlotSpec,
    ramp: &super::ColorRamp,
) -> Result<RasterImage, VizError> {
    let lo = world.min_corner();
    let hi = world.max_corner();
    if ground_threshold < lo.y || ground_threshold > hi.y {
        return Err(VizError::ThresholdOutOfRange {
            threshold: ground_threshold,
            lo: lo.y,
            hi: hi.y,
        });
    }
    for (index, (_, p)) in projected.iter().enumerate() {
        if !p[0].is_finite() {
            return Err(VizError::NonFinitePoint { index });
        }
    }

    // Qualifying headspaces per column.
    let mut columns: HashMap<(i32, i32), Vec<(i32, f64)>> = HashMap::new();
    for (hs, p) in projected {
        if hs.head.y >= ground_threshold {
            columns
                .entry((hs.head.x, hs.head.z))
                .or_default()
                .push((hs.head.y, p[0]));
        }
    }
    let mut values: HashMap<(i32, i32), f64> = HashMap::with_capacity(columns.len());
    for (col, mut entries) in columns {
        let v = match agg {
            ColumnAgg::Mean => entries.iter().map(|&(_, v)| v).sum::<f64>() / entries.len() as f64,
            ColumnAgg::Highest => {
                entries.sort_by_key(|&(y, _)| y);
                entries.last().expect("non-empty column").1
            }
        };
        values.insert(col, v);
    }

    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values.values() {
        min = min.min(v);
        max = max.max(v);
    }
    let span = max - min;

    let (sx, _, sz) = world.dims();
    let mut pixels = Vec::with_capacity((sx * sz) as usize);
    for z in 0..sz as i32 {
        for x in 0..sx as i32 {
            let key = (lo.x + x, lo.z + z);
            match values.get(&key) {
                Some(&v) => {
                    let index = if span > 0.0 {
                        (((v - min) / span) * 255.0).round().clamp(0.0, 255.0) as u8
                    } else {
                        0
                    };
                    pixels.push(ramp.color(index));
                }
                None => pixels.push(NO_DATA_COLOR),
            }
        }
    }
    Ok(RasterImage {
        width: sx,
        height: sz,
        pixels,
    })
}

/// Binary P6 serialization.
pub fn write_ppm(image: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    for px in &image.pixels {
        out.extend_from_slice(px);
    }
    out
}

pub fn parse_ppm(bytes: &[u8]) -> Result<RasterImage, VizError> {
    let err = |msg: &str| VizError::Ppm(msg.to_string());
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String, VizError> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(err("truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token(bytes)? != "P6" {
        return Err(err("not a P6 pixmap"));
    }
    let width: u32 = token(bytes)?.parse().map_err(|_| err("bad width"))?;
    let height: u32 = token(bytes)?.parse().map_err(|_| err("bad height"))?;
    let maxval: u32 = token(bytes)?.parse().map_err(|_| err("bad maxval"))?;
    if maxval != 255 {
        return Err(err("only maxval 255 supported"));
    }
    pos += 1; // single whitespace byte after maxval
    let expected = width as usize * height as usize * 3;
    if bytes.len() - pos != expected {
        return Err(err("payload length mismatch"));
    }
    let pixels = bytes[pos..]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    Ok(RasterImage {
        width,
        height,
        pixels,
    })
}
