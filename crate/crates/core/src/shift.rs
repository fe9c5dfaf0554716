//! Generative shift: pair locations across a base and a generated world,
//! project both metric vectors into PC space, and rank locations by how
//! far the generation step moved them.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::isovist::Headspace;
use crate::metrics::IsovistMetrics;
use crate::numfmt::sig9;
use crate::pca::{project, PcaModel};
use crate::rng::{ceil_fraction, SeededRng};
use crate::world::Coord;

pub const SHIFT_CSV_HEADER: &str = "base_x,base_y,base_z,gen_x,gen_y,gen_z,pre_pc1,pre_pc2,post_pc1,post_pc2,delta_pc1,delta_pc2,magnitude";

#[derive(Debug, Error)]
pub enum ShiftError {
    #[error("pairing requires non-empty base and generated record lists")]
    EmptyInput,
    #[error("pairing fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
    #[error("match radius {0} must be finite and >= 0")]
    InvalidRadius(f64),
    #[error("shift projection needs a model with at least 2 components, got {0}")]
    ModelTooSmall(usize),
    #[error(transparent)]
    Pca(#[from] crate::pca::PcaError),
    #[error("summary requires at least one record")]
    EmptySummary,
    #[error("shift CSV line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// A base-world location matched with its generated-world counterpart.
#[derive(Debug, Clone)]
pub struct LocationPair {
    pub base_head: Coord,
    pub gen_head: Coord,
    pub base_metrics: IsovistMetrics,
    pub gen_metrics: IsovistMetrics,
}

/// One paired location's movement in PC space.
#[derive(Debug, Clone)]
pub struct ShiftRecord {
    pub pair: LocationPair,
    pub pre: [f64; 2],
    pub post: [f64; 2],
    pub delta: [f64; 2],
    pub magnitude: f64,
}

#[derive(Debug, Clone)]
pub struct PairingOutcome {
    pub pairs: Vec<LocationPair>,
    /// Sampled base locations with no usable match.
    pub dropped: usize,
    /// Number of base locations sampled (= pairs + dropped).
    pub sampled: usize,
}

/// Samples ceil(fraction * |base|) base records without replacement, then
/// matches each to a generated-world headspace: first an unused headspace
/// in the same (x, z) column with minimal |Δy| (ties: lower y), otherwise,
/// when `match_radius > 0`, the nearest unused headspace within that
/// Euclidean radius (ties: lexicographic (y, z, x)). Unmatched samples are
/// dropped and counted. No generated headspace is used twice.
pub fn pair_locations(
    base: &[(Headspace, IsovistMetrics)],
    gen: &[(Headspace, IsovistMetrics)],
    fraction: f64,
    match_radius: f64,
    seed: u64,
) -> Result<PairingOutcome, ShiftError> {
    if base.is_empty() || gen.is_empty() {
        return Err(ShiftError::EmptyInput);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(ShiftError::InvalidFraction(fraction));
    }
    if !match_radius.is_finite() || match_radius < 0.0 {
        return Err(ShiftError::InvalidRadius(match_radius));
    }

    let mut rng = SeededRng::new(seed);
    let take = ceil_fraction(base.len(), fraction);
    let mut sampled: Vec<&(Headspace, IsovistMetrics)> = rng
        .sample_indices(base.len(), take)
        .into_iter()
        .map(|i| &base[i])
        .collect();
    sampled.sort_by_key(|(hs, _)| hs.head.yzx_key());

    // Column index of the generated world: (x, z) -> gen indices by ascending y.
    let mut columns: HashMap<(i32, i32), Vec<usize>> = HashMap::new();
    for (i, (hs, _)) in gen.iter().enumerate() {
        columns.entry((hs.head.x, hs.head.z)).or_default().push(i);
    }
    for indices in columns.values_mut() {
        indices.sort_by_key(|&i| gen[i].0.head.y);
    }

    let radius2 = match_radius * match_radius;
    let mut used: HashSet<usize> = HashSet::new();
    let mut pairs = Vec::with_capacity(sampled.len());
    let mut dropped = 0usize;

    for (base_hs, base_metrics) in sampled.iter() {
        let head = base_hs.head;
        let mut chosen: Option<usize> = None;

        if let Some(candidates) = columns.get(&(head.x, head.z)) {
            let mut best: Option<(i64, i32, usize)> = None;
            for &gi in candidates {
                if used.contains(&gi) {
                    continue;
                }
                let y = gen[gi].0.head.y;
                let key = ((y - head.y).abs() as i64, y);
                match best {
                    Some((bd, by, _)) if (bd, by) <= key => {}
                    _ => best = Some((key.0, key.1, gi)),
                }
            }
            chosen = best.map(|(_, _, gi)| gi);
        }

        if chosen.is_none() && match_radius > 0.0 {
            let mut best: Option<(u64, (i32, i32, i32), usize)> = None;
            for (gi, (gen_hs, _)) in gen.iter().enumerate() {
                if used.contains(&gi) {
                    continue;
                }
                let d2 = head.dist2(gen_hs.head);
                if d2 as f64 > radius2 {
                    continue;
                }
                let key = (d2, gen_hs.head.yzx_key());
                match best {
                    Some((bd, bk, _)) if (bd, bk) <= key => {}
                    _ => best = Some((key.0, key.1, gi)),
                }
            }
            chosen = best.map(|(_, _, gi)| gi);
        }

        match chosen {
            Some(gi) => {
                used.insert(gi);
                pairs.push(LocationPair {
                    base_head: head,
                    gen_head: gen[gi].0.head,
                    base_metrics: base_metrics.clone(),
                    gen_metrics: gen[gi].1.clone(),
                });
            }
            None => dropped += 1,
        }
    }

    Ok(PairingOutcome {
        pairs,
        dropped,
        sampled: take,
    })
}

/// Projects both sides of each pair onto the model's first two components
/// and takes the difference. Output preserves input order.
pub fn compute_shift(
    pairs: &[LocationPair],
    model: &PcaModel,
) -> Result<Vec<ShiftRecord>, ShiftError> {
    if model.component_count() < 2 {
        return Err(ShiftError::ModelTooSmall(model.component_count()));
    }
    pairs
        .iter()
        .map(|pair| {
            let pre_full = project(model, &pair.base_metrics.as_row())?;
            let post_full = project(model, &pair.gen_metrics.as_row())?;
            let pre = [pre_full[0], pre_full[1]];
            let post = [post_full[0], post_full[1]];
            let delta = [post[0] - pre[0], post[1] - pre[1]];
            let magnitude = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
            Ok(ShiftRecord {
                pair: pair.clone(),
                pre,
                post,
                delta,
                magnitude,
            })
        })
        .collect()
}

/// The k records of largest magnitude, sorted descending; ties broken by
/// (y, z, x) of the base head. Asking for more than exist returns all.
pub fn top_k_shifts(records: &[ShiftRecord], k: usize) -> Vec<ShiftRecord> {
    let mut sorted: Vec<ShiftRecord> = records.to_vec();
    sorted.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then_with(|| a.pair.base_head.yzx_key().cmp(&b.pair.base_head.yzx_key()))
    });
    sorted.truncate(k);
    sorted
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSummary {
    pub count: usize,
    pub dropped: usize,
    pub mean_magnitude: f64,
    pub median_magnitude: f64,
    pub max_magnitude: f64,
    /// Aggregate drift direction in PC space.
    pub mean_delta: [f64; 2],
}

pub fn shift_summary(records: &[ShiftRecord], dropped: usize) -> Result<ShiftSummary, ShiftError> {
    if records.is_empty() {
        return Err(ShiftError::EmptySummary);
    }
    let n = records.len() as f64;
    let mut magnitudes: Vec<f64> = records.iter().map(|r| r.magnitude).collect();
    magnitudes.sort_by(f64::total_cmp);
    let median = if magnitudes.len() % 2 == 1 {
        magnitudes[magnitudes.len() / 2]
    } else {
        let mid = magnitudes.len() / 2;
        (magnitudes[mid - 1] + magnitudes[mid]) / 2.0
    };
    Ok(ShiftSummary {
        count: records.len(),
        dropped,
        mean_magnitude: magnitudes.iter().sum::<f64>() / n,
        median_magnitude: median,
        max_magnitude: *magnitudes.last().expect("non-empty"),
        mean_delta: [
            records.iter().map(|r| r.delta[0]).sum::<f64>() / n,
            records.iter().map(|r| r.delta[1]).sum::<f64>() / n,
        ],
    })
}

impl ShiftSummary {
    /// Line-oriented `key: value` text block.
    pub fn to_text(&self) -> String {
        format!(
            "count: {}\ndropped: {}\nmean_magnitude: {}\nmedian_magnitude: {}\nmax_magnitude: {}\nmean_delta_pc1: {}\nmean_delta_pc2: {}\n",
            self.count,
            self.dropped,
            sig9(self.mean_magnitude),
            sig9(self.median_magnitude),
            sig9(self.max_magnitude),
            sig9(self.mean_delta[0]),
            sig9(self.mean_delta[1]),
        )
    }
}

/// Serializes shift records in input order, floats at 9 significant digits.
pub fn write_shift_csv(records: &[ShiftRecord]) -> String {
    let mut out = String::with_capacity(96 * (records.len() + 1));
    out.push_str(SHIFT_CSV_HEADER);
    out.push('\n');
    for r in records {
        let b = r.pair.base_head;
        let g = r.pair.gen_head;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            b.x,
            b.y,
            b.z,
            g.x,
            g.y,
            g.z,
            sig9(r.pre[0]),
            sig9(r.pre[1]),
            sig9(r.post[0]),
            sig9(r.post[1]),
            sig9(r.delta[0]),
            sig9(r.delta[1]),
            sig9(r.magnitude),
        ));
    }
    out
}

/// Minimal shift record parsed back from the CSV (coordinates and PC data).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCsvRow {
    pub base_head: Coord,
    pub gen_head: Coord,
    pub pre: [f64; 2],
    pub post: [f64; 2],
    pub delta: [f64; 2],
    pub magnitude: f64,
}

pub fn parse_shift_csv(text: &str) -> Result<Vec<ShiftCsvRow>, ShiftError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SHIFT_CSV_HEADER => {}
        _ => {
            return Err(ShiftError::Csv {
                line: 1,
                reason: "missing or unexpected header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(ShiftError::Csv {
                line: i + 1,
                reason: format!("expected 13 fields, found {}", fields.len()),
            });
        }
        let err = |what: &str| ShiftError::Csv {
            line: i + 1,
            reason: format!("bad {what} value"),
        };
        let int = |s: &str, what: &str| s.parse::<i32>().map_err(|_| err(what));
        let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| err(what));
        out.push(ShiftCsvRow {
            base_head: Coord::new(
                int(fields[0], "base_x")?,
                int(fields[1], "base_y")?,
                int(fields[2], "base_z")?,
            ),
            gen_head: Coord::new(
                int(fields[3], "gen_x")?,
                int(fields[4], "gen_y")?,
                int(fields[5], "gen_z")?,
            ),
            pre: [float(fields[6], "pre_pc1")?, float(fields[7], "pre_pc2")?],
            post: [float(fields[8], "post_pc1")?, float(fields[9], "post_pc2")?],
            delta: [
                float(fields[10], "delta_pc1")?,
                float(fields[11], "delta_pc2")?,
            ],
            magnitude: float(fields[12], "magnitude")?,
        });
    }
    Ok(out)
}
