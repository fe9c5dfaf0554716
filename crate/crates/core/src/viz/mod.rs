//! Plot and overlay rendering: SVG scatter/flow plots and P6 raster
//! overlays. No imaging dependencies; every renderer is deterministic
//! byte-for-byte for identical input.

mod raster;
mod svg;

pub use raster::{parse_ppm, render_overlay, write_ppm, ColumnAgg, RasterImage, NO_DATA_COLOR};
pub use svg::{
    render_era_scatter, render_flow_plot, AxisTransform, FLOW_HIGHLIGHT_COLOR, FLOW_STROKE_COLOR,
    MARGIN_BOTTOM, MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VizError {
    #[error("plot input is empty")]
    EmptyInput,
    #[error("non-finite point at index {index}")]
    NonFinitePoint { index: usize },
    #[error("invalid plot spec: {0}")]
    InvalidSpec(String),
    #[error("overlay threshold {threshold} outside world y-range {lo}..={hi}")]
    ThresholdOutOfRange { threshold: i32, lo: i32, hi: i32 },
    #[error("ppm parse error: {0}")]
    Ppm(String),
    #[error("color ramp parse error at line {line}: {reason}")]
    Ramp { line: usize, reason: String },
}

/// A 256-entry RGB color ramp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorRamp {
    pub name: String,
    colors: Box<[[u8; 3]; 256]>,
}

impl ColorRamp {
    /// The viridis-like ramp shipped in assets/colorramp_viridis.txt.
    pub fn viridis() -> Self {
        Self::parse(
            "viridis",
            include_str!("../../../../assets/colorramp_viridis.txt"),
        )
        .expect("bundled ramp parses")
    }

    /// Parses a 256-line `r g b` text table.
    pub fn parse(name: &str, text: &str) -> Result<Self, VizError> {
        let mut colors = Box::new([[0u8; 3]; 256]);
        let mut count = 0usize;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if count >= 256 {
                return Err(VizError::Ramp {
                    line: i + 1,
                    reason: "more than 256 entries".into(),
                });
            }
            let mut parts = line.split_whitespace();
            for c in 0..3 {
                let tok = parts.next().ok_or_else(|| VizError::Ramp {
                    line: i + 1,
                    reason: "expected three components".into(),
                })?;
                colors[count][c] = tok.parse().map_err(|_| VizError::Ramp {
                    line: i + 1,
                    reason: format!("bad component {tok:?}"),
                })?;
            }
            count += 1;
        }
        if count != 256 {
            return Err(VizError::Ramp {
                line: 0,
                reason: format!("expected 256 entries, found {count}"),
            });
        }
        Ok(ColorRamp {
            name: name.to_string(),
            colors,
        })
    }

    pub fn color(&self, index: u8) -> [u8; 3] {
        self.colors[index as usize]
    }

    /// Index of an exact color, if present (used by read-back checks).
    pub fn index_of(&self, color: [u8; 3]) -> Option<u8> {
        self.colors
            .iter()
            .position(|&c| c == color)
            .map(|i| i as u8)
    }
}

/// Rendering parameters shared by the plot surfaces.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub width: u32,
    pub height: u32,
    /// Fixed data range per axis; `None` auto-fits to the data padded 5%.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub ramp: ColorRamp,
    pub highlight_count: usize,
    pub title: String,
}

impl PlotSpec {
    pub fn new(width: u32, height: u32) -> Result<Self, VizError> {
        if width == 0 || height == 0 {
            return Err(VizError::InvalidSpec(format!(
                "dimensions {width}x{height} must be positive"
            )));
        }
        Ok(PlotSpec {
            width,
            height,
            x_range: None,
            y_range: None,
            ramp: ColorRamp::viridis(),
            highlight_count: 5,
            title: String::new(),
        })
    }

    pub fn with_title(mut self, title: &str) -> Self {
        self.title = title.to_string();
        self
    }

    pub fn with_highlight_count(mut self, k: usize) -> Self {
        self.highlight_count = k;
        self
    }
}
