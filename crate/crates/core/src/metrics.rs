//! The 13 scalar isovist metrics and their matrix/CSV forms.

use thiserror::Error;

use crate::isovist::{Headspace, IsovistSets};
use crate::numfmt::sig9;
use crate::world::Coord;

pub const METRIC_COUNT: usize = 13;

/// Column order of the metric matrix and of every CSV.
pub const METRIC_NAMES: [&str; METRIC_COUNT] = [
    "area",
    "perimeter",
    "diversity",
    "var_radials",
    "mean_radials",
    "roundness",
    "openness",
    "clutter",
    "reachability",
    "occlusivity",
    "drift_length",
    "vista_length",
    "real_perimeter_size",
];

pub const METRICS_CSV_HEADER: &str = "x,y,z,area,perimeter,diversity,var_radials,mean_radials,roundness,openness,clutter,reachability,occlusivity,drift_length,vista_length,real_perimeter_size,degenerate";

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("metric matrix needs at least one record")]
    EmptyInput,
    #[error("metrics CSV line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// The 13 metrics of one location.
///
/// Ratio metrics fall back to 0 when their denominator is empty so the
/// vector is always total; such rows carry the `degenerate` marker.
#[derive(Debug, Clone, PartialEq)]
pub struct IsovistMetrics {
    /// Number of visible headspaces (self included).
    pub area: usize,
    /// Number of visible view-limiting blocks.
    pub perimeter: usize,
    /// Distinct block types in the perimeter.
    pub diversity: usize,
    /// Population variance of the radial lengths (sky rays included).
    pub var_radials: f64,
    pub mean_radials: f64,
    /// area / perimeter.
    pub roundness: f64,
    /// area / real_perimeter_size.
    pub openness: f64,
    /// |supports of visible headspaces ∩ perimeter coordinates| / area.
    pub clutter: f64,
    /// Number of walkable supports within the step budget.
    pub reachability: usize,
    /// |reachable ∩ supports of visible headspaces| / reachability.
    pub occlusivity: f64,
    /// Distance from the centroid head to the mean perimeter coordinate.
    pub drift_length: f64,
    /// Longest radial (sky rays included).
    pub vista_length: f64,
    pub real_perimeter_size: usize,
    /// True when any ratio denominator was empty.
    pub degenerate: bool,
}

impl IsovistMetrics {
    /// The metric vector in [`METRIC_NAMES`] order.
    pub fn as_row(&self) -> [f64; METRIC_COUNT] {
        [
            self.area as f64,
            self.perimeter as f64,
            self.diversity as f64,
            self.var_radials,
            self.mean_radials,
            self.roundness,
            self.openness,
            self.clutter,
            self.reachability as f64,
            self.occlusivity,
            self.drift_length,
            self.vista_length,
            self.real_perimeter_size as f64,
        ]
    }
}

/// Count of common elements between two (y, z, x)-sorted coordinate lists.
fn sorted_intersection_count(a: &[Coord], b: &[Coord]) -> usize {
    let mut i = 0;
    let mut j = 0;
    let mut count = 0;
    while i < a.len() && j < b.len() {
        match a[i].yzx_key().cmp(&b[j].yzx_key()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

pub fn compute_metrics(sets: &IsovistSets) -> IsovistMetrics {
    let area = sets.visible_headspaces.len();
    let perimeter = sets.perimeter.len();
    let real_perimeter_size = sets.real_perimeter.len();
    let reachability = sets.reachable.len();

    let diversity = {
        let mut types: Vec<u16> = sets.perimeter.iter().map(|&(_, t)| t).collect();
        types.sort_unstable();
        types.dedup();
        types.len()
    };

    let perimeter_coords: Vec<Coord> = sets.perimeter.iter().map(|&(c, _)| c).collect();
    let support_in_perimeter = sorted_intersection_count(&sets.support_blocks, &perimeter_coords);
    let reachable_supports = sorted_intersection_count(&sets.reachable, &sets.support_blocks);

    let roundness = if perimeter > 0 {
        area as f64 / perimeter as f64
    } else {
        0.0
    };
    let openness = if real_perimeter_size > 0 {
        area as f64 / real_perimeter_size as f64
    } else {
        0.0
    };
    let occlusivity = if reachability > 0 {
        reachable_supports as f64 / reachability as f64
    } else {
        0.0
    };
    let clutter = if area > 0 {
        support_in_perimeter as f64 / area as f64
    } else {
        0.0
    };

    // Radial statistics over the perimeter rays plus the sky rays, which
    // all carry the view-distance length. Two-pass population variance.
    let ray_count = sets.radials.len() + sets.sky_radial_count;
    let (mean_radials, var_radials, vista_length) = if ray_count == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let sky = sets.sky_radial_count as f64;
        let sum: f64 = sets.radials.iter().sum::<f64>() + sky * sets.sky_radial_length;
        let mean = sum / ray_count as f64;
        let ss: f64 = sets
            .radials
            .iter()
            .map(|&r| (r - mean) * (r - mean))
            .sum::<f64>()
            + sky * (sets.sky_radial_length - mean) * (sets.sky_radial_length - mean);
        let mut vista = sets.radials.iter().fold(0.0f64, |m, &r| m.max(r));
        if sets.sky_radial_count > 0 {
            vista = vista.max(sets.sky_radial_length);
        }
        (mean, ss / ray_count as f64, vista)
    };

    // Drift: distance from the centroid head to the center of visual mass,
    // the arithmetic mean of the perimeter coordinates. Sky rays have no
    // endpoint and do not contribute.
    let drift_length = if sets.radial_endpoints.is_empty() {
        0.0
    } else {
        let n = sets.radial_endpoints.len() as f64;
        let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
        for c in &sets.radial_endpoints {
            sx += c.x as f64;
            sy += c.y as f64;
            sz += c.z as f64;
        }
        let head = sets.centroid.head;
        let dx = sx / n - head.x as f64;
        let dy = sy / n - head.y as f64;
        let dz = sz / n - head.z as f64;
        (dx * dx + dy * dy + dz * dz).sqrt()
    };

    let degenerate = perimeter == 0 || real_perimeter_size == 0 || ray_count == 0;

    IsovistMetrics {
        area,
        perimeter,
        diversity,
        var_radials,
        mean_radials,
        roundness,
        openness,
        clutter,
        reachability,
        occlusivity,
        drift_length,
        vista_length,
        real_perimeter_size,
        degenerate,
    }
}

/// Assembles the n x 13 metric matrix, rows ordered by (y, z, x) of the
/// centroid head, plus the row-index-to-coordinate map.
pub fn metrics_matrix(
    records: &[(Headspace, IsovistMetrics)],
) -> Result<(Vec<[f64; METRIC_COUNT]>, Vec<Coord>), MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut ordered: Vec<&(Headspace, IsovistMetrics)> = records.iter().collect();
    ordered.sort_by_key(|(hs, _)| hs.head.yzx_key());
    let rows = ordered.iter().map(|(_, m)| m.as_row()).collect();
    let coords = ordered.iter().map(|(hs, _)| hs.head).collect();
    Ok((rows, coords))
}

/// Serializes records as the metrics CSV, rows ordered by (y, z, x) of the
/// head coordinate, floats at 9 significant digits.
pub fn write_metrics_csv(records: &[(Headspace, IsovistMetrics)]) -> String {
    let mut ordered: Vec<&(Headspace, IsovistMetrics)> = records.iter().collect();
    ordered.sort_by_key(|(hs, _)| hs.head.yzx_key());
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(METRICS_CSV_HEADER);
    out.push('\n');
    for (hs, m) in ordered {
        let h = hs.head;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            h.x,
            h.y,
            h.z,
            m.area,
            m.perimeter,
            m.diversity,
            sig9(m.var_radials),
            sig9(m.mean_radials),
            sig9(m.roundness),
            sig9(m.openness),
            sig9(m.clutter),
            m.reachability,
            sig9(m.occlusivity),
            sig9(m.drift_length),
            sig9(m.vista_length),
            m.real_perimeter_size,
            if m.degenerate { 1 } else { 0 },
        ));
    }
    out
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<(Coord, IsovistMetrics)>, MetricsError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == METRICS_CSV_HEADER => {}
        Some((_, header)) => {
            return Err(MetricsError::Csv {
                line: 1,
                reason: format!("unexpected header {header:?}"),
            })
        }
        None => {
            return Err(MetricsError::Csv {
                line: 1,
                reason: "empty file".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 17 {
            return Err(MetricsError::Csv {
                line: i + 1,
                reason: format!("expected 17 fields, found {}", fields.len()),
            });
        }
        let err = |what: &str| MetricsError::Csv {
            line: i + 1,
            reason: format!("bad {what} value"),
        };
        let int = |s: &str, what: &str| s.parse::<i64>().map_err(|_| err(what));
        let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| err(what));
        let coord = Coord::new(
            int(fields[0], "x")? as i32,
            int(fields[1], "y")? as i32,
            int(fields[2], "z")? as i32,
        );
        let metrics = IsovistMetrics {
            area: int(fields[3], "area")? as usize,
            perimeter: int(fields[4], "perimeter")? as usize,
            diversity: int(fields[5], "diversity")? as usize,
            var_radials: float(fields[6], "var_radials")?,
            mean_radials: float(fields[7], "mean_radials")?,
            roundness: float(fields[8], "roundness")?,
            openness: float(fields[9], "openness")?,
            clutter: float(fields[10], "clutter")?,
            reachability: int(fields[11], "reachability")? as usize,
            occlusivity: float(fields[12], "occlusivity")?,
            drift_length: float(fields[13], "drift_length")?,
            vista_length: float(fields[14], "vista_length")?,
            real_perimeter_size: int(fields[15], "real_perimeter_size")? as usize,
            degenerate: fields[16] == "1",
        };
        out.push((coord, metrics));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isovist::compute_isovist;
    use crate::world::{BlockClassification, VoxelWorld};

    fn sealed_cavity_sets() -> IsovistSets {
        let palette = vec!["stone".to_string(), "air".to_string()];
        let mut grid = vec![0u16; 3 * 4 * 3];
        let w0 = VoxelWorld::new((3, 4, 3), (0, 0, 0), palette.clone(), grid.clone()).unwrap();
        for c in [Coord::new(1, 1, 1), Coord::new(1, 2, 1)] {
            grid[w0.index_of(c).unwrap()] = 1;
        }
        let w = VoxelWorld::new((3, 4, 3), (0, 0, 0), palette, grid).unwrap();
        compute_isovist(
            &w,
            Headspace::new(Coord::new(1, 2, 1)),
            &BlockClassification::default_lists(),
            256,
            32,
        )
    }

    #[test]
    fn sealed_cavity_metrics() {
        let m = compute_metrics(&sealed_cavity_sets());
        assert_eq!(m.area, 1);
        assert_eq!(m.diversity, 1);
        assert_eq!(m.reachability, 1);
        assert_eq!(m.occlusivity, 1.0);
        assert!(!m.degenerate);
        assert!(m.perimeter > 0);
        assert_eq!(m.real_perimeter_size, m.perimeter);
    }

    #[test]
    fn roundness_and_openness_follow_their_definitions() {
        let sets = sealed_cavity_sets();
        let m = compute_metrics(&sets);
        assert_eq!(m.roundness, m.area as f64 / m.perimeter as f64);
        assert_eq!(m.openness, m.area as f64 / m.real_perimeter_size as f64);
        assert!((m.roundness * m.perimeter as f64 - m.area as f64).abs() < 1e-9);
    }

    #[test]
    fn constant_radials_have_zero_variance() {
        let mut sets = sealed_cavity_sets();
        let len = 7.25;
        sets.radials = vec![len; sets.radial_endpoints.len()];
        sets.sky_radial_count = 0;
        let m = compute_metrics(&sets);
        assert_eq!(m.var_radials, 0.0);
        assert_eq!(m.mean_radials, len);
        assert_eq!(m.vista_length, len);
    }

    #[test]
    fn sky_rays_fold_into_radial_statistics() {
        let mut sets = sealed_cavity_sets();
        sets.radials = vec![2.0, 4.0];
        sets.radial_endpoints.truncate(2);
        sets.perimeter.truncate(2);
        sets.real_perimeter.truncate(2);
        sets.sky_radial_count = 2;
        sets.sky_radial_length = 6.0;
        let m = compute_metrics(&sets);
        // Rays: 2, 4, 6, 6 -> mean 4.5, var (6.25+0.25+2.25+2.25)/4 = 2.75.
        assert!((m.mean_radials - 4.5).abs() < 1e-12);
        assert!((m.var_radials - 2.75).abs() < 1e-12);
        assert_eq!(m.vista_length, 6.0);
    }

    #[test]
    fn empty_sets_produce_defined_values() {
        let mut sets = sealed_cavity_sets();
        sets.perimeter.clear();
        sets.real_perimeter.clear();
        sets.radials.clear();
        sets.radial_endpoints.clear();
        sets.sky_radial_count = 0;
        let m = compute_metrics(&sets);
        assert!(m.degenerate);
        assert_eq!(m.roundness, 0.0);
        assert_eq!(m.openness, 0.0);
        assert_eq!(m.var_radials, 0.0);
        assert_eq!(m.mean_radials, 0.0);
        assert_eq!(m.vista_length, 0.0);
        assert_eq!(m.drift_length, 0.0);
        assert_eq!(m.diversity, 0);
    }

    #[test]
    fn matrix_rows_follow_head_order() {
        let m = compute_metrics(&sealed_cavity_sets());
        let records = vec![
            (Headspace::new(Coord::new(5, 3, 1)), m.clone()),
            (Headspace::new(Coord::new(0, 2, 9)), m.clone()),
            (Headspace::new(Coord::new(9, 2, 0)), m.clone()),
        ];
        let (rows, coords) = metrics_matrix(&records).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(
            coords,
            vec![
                Coord::new(9, 2, 0),
                Coord::new(0, 2, 9),
                Coord::new(5, 3, 1)
            ]
        );
        assert_eq!(rows[0], m.as_row());
        assert_eq!(rows[1], rows[2], "identical metrics give identical rows");

        let (single, _) = metrics_matrix(&records[..1]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].len(), METRIC_COUNT);
        assert!(metrics_matrix(&[]).is_err());
    }

    #[test]
    fn csv_round_trips() {
        let m = compute_metrics(&sealed_cavity_sets());
        let records = vec![
            (Headspace::new(Coord::new(1, 2, 1)), m.clone()),
            (Headspace::new(Coord::new(-3, 2, 4)), m),
        ];
        let csv = write_metrics_csv(&records);
        let parsed = parse_metrics_csv(&csv).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].0, Coord::new(1, 2, 1));
        assert_eq!(parsed[1].0, Coord::new(-3, 2, 4));
        let (orig_rows, _) = metrics_matrix(&records_from(&parsed)).unwrap();
        for (a, b) in orig_rows[0].iter().zip(records[0].1.as_row()) {
            let rel = if b == 0.0 {
                a.abs()
            } else {
                ((a - b) / b).abs()
            };
            assert!(rel < 1e-8);
        }
    }

    fn records_from(parsed: &[(Coord, IsovistMetrics)]) -> Vec<(Headspace, IsovistMetrics)> {
        parsed
            .iter()
            .map(|(c, m)| (Headspace::new(*c), m.clone()))
            .collect()
    }

    #[test]
    fn csv_rejects_wrong_header_and_short_rows() {
        assert!(parse_metrics_csv("x,y,z\n").is_err());
        let bad = format!("{METRICS_CSV_HEADER}\n1,2\n");
        assert!(parse_metrics_csv(&bad).is_err());
    }
}
