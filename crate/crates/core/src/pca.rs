//! Standardization and principal component analysis of the 13-column
//! metric matrix.
//!
//! The eigenproblem is a fixed 13x13 symmetric matrix, solved with cyclic
//! Jacobi rotations: sweeps run over the upper triangle in row-major order
//! until the off-diagonal Frobenius norm drops below 1e-12, which makes the
//! fit bit-deterministic for identical inputs.

use thiserror::Error;

use crate::metrics::METRIC_COUNT;
use crate::numfmt::sig12;

const N: usize = METRIC_COUNT;
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 128;

#[derive(Debug, Error)]
pub enum PcaError {
    #[error("need at least 2 rows to fit, got {0}")]
    TooFewRows(usize),
    #[error("component count {0} outside 1..=13")]
    InvalidComponentCount(usize),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("model file line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },
    #[error("jacobi sweep limit reached")]
    NoConvergence,
}

/// Per-column centering and scaling parameters.
///
/// Scales are the per-column sample standard deviation; constant columns
/// get scale 1 and therefore contribute exact zeros after standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationParams {
    pub means: [f64; N],
    pub scales: [f64; N],
}

impl StandardizationParams {
    pub fn apply(&self, row: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = (row[i] - self.means[i]) / self.scales[i];
        }
        out
    }
}

/// A fitted PCA model: standardization parameters, the top-k orthonormal
/// loading vectors (largest-magnitude entry positive), and the fraction of
/// total variance each component explains.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub params: StandardizationParams,
    pub loadings: Vec<[f64; N]>,
    pub explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn component_count(&self) -> usize {
        self.loadings.len()
    }

    /// Model text format: means line, scales line, one line per loading
    /// vector, one line of explained-variance ratios; whitespace separated,
    /// 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let line = |vals: &[f64]| vals.iter().map(|&v| sig12(v)).collect::<Vec<_>>().join(" ");
        out.push_str(&line(&self.params.means));
        out.push('\n');
        out.push_str(&line(&self.params.scales));
        out.push('\n');
        for loading in &self.loadings {
            out.push_str(&line(loading));
            out.push('\n');
        }
        out.push_str(&line(&self.explained_variance_ratio));
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, PcaError> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>().map_err(|_| PcaError::ModelFormat {
                            line: i + 1,
                            reason: format!("bad number {tok:?}"),
                        })
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        if rows.len() < 4 {
            return Err(PcaError::ModelFormat {
                line: rows.len(),
                reason: "expected means, scales, loadings, and ratios".into(),
            });
        }
        let k = rows.len() - 3;
        let widths_ok =
            rows[..rows.len() - 1].iter().all(|r| r.len() == N) && rows[rows.len() - 1].len() == k;
        if !widths_ok {
            return Err(PcaError::ModelFormat {
                line: 1,
                reason: format!("expected {N}-wide vectors and {k} ratios"),
            });
        }
        let to_arr = |v: &[f64]| {
            let mut a = [0.0; N];
            a.copy_from_slice(v);
            a
        };
        Ok(PcaModel {
            params: StandardizationParams {
                means: to_arr(&rows[0]),
                scales: to_arr(&rows[1]),
            },
            loadings: rows[2..2 + k].iter().map(|r| to_arr(r)).collect(),
            explained_variance_ratio: rows[rows.len() - 1].clone(),
        })
    }
}

fn check_finite(rows: &[[f64; N]]) -> Result<(), PcaError> {
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(PcaError::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

fn standardization(rows: &[[f64; N]]) -> StandardizationParams {
    let n = rows.len() as f64;
    let mut means = [0.0; N];
    for row in rows {
        for i in 0..N {
            means[i] += row[i];
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut scales = [0.0; N];
    for row in rows {
        for i in 0..N {
            let d = row[i] - means[i];
            scales[i] += d * d;
        }
    }
    for s in &mut scales {
        // Sample standard deviation, consistent with the n-1 covariance.
        *s = (*s / (n - 1.0)).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    StandardizationParams { means, scales }
}

/// Covariance (divide by n-1) of already-standardized rows.
fn covariance(rows: &[[f64; N]], params: &StandardizationParams) -> [[f64; N]; N] {
    let n = rows.len() as f64;
    let mut cov = [[0.0; N]; N];
    for row in rows {
        let z = params.apply(row);
        for i in 0..N {
            for j in i..N {
                cov[i][j] += z[i] * z[j];
            }
        }
    }
    for i in 0..N {
        for j in i..N {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}

fn off_diagonal_norm(a: &[[f64; N]; N]) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in (i + 1)..N {
            sum += 2.0 * a[i][j] * a[i][j];
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvectors as columns of V), unsorted.
fn jacobi_eigen(mut a: [[f64; N]; N]) -> Result<([f64; N], [[f64; N]; N]), PcaError> {
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < OFF_DIAGONAL_TOLERANCE {
            let mut eig = [0.0; N];
            for i in 0..N {
                eig[i] = a[i][i];
            }
            return Ok((eig, v));
        }
        for p in 0..N - 1 {
            for q in (p + 1)..N {
                if a[p][q] == 0.0 {
                    continue;
                }
                // Rotation angle that zeroes a[p][q].
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..N {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(PcaError::NoConvergence)
}

/// Fits the model: center, scale to unit variance, eigendecompose the
/// covariance of the standardized data, keep the top-k components by
/// eigenvalue. The explained ratio divides by the total variance across
/// all 13 components.
pub fn fit_pca(rows: &[[f64; N]], k: usize) -> Result<PcaModel, PcaError> {
    if rows.len() < 2 {
        return Err(PcaError::TooFewRows(rows.len()));
    }
    if !(1..=N).contains(&k) {
        return Err(PcaError::InvalidComponentCount(k));
    }
    check_finite(rows)?;

    let params = standardization(rows);
    let cov = covariance(rows, &params);
    let (eigenvalues, vectors) = jacobi_eigen(cov)?;

    // Order components by eigenvalue, descending; ties keep original index
    // order so the fit stays deterministic.
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| {
        eigenvalues[j]
            .partial_cmp(&eigenvalues[i])
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });

    let total: f64 = eigenvalues.iter().map(|&l| l.max(0.0)).sum();
    let mut loadings = Vec::with_capacity(k);
    let mut ratios = Vec::with_capacity(k);
    for &col in order.iter().take(k) {
        let mut loading = [0.0; N];
        for i in 0..N {
            loading[i] = vectors[i][col];
        }
        // Sign convention: the entry of largest magnitude is positive.
        let dominant = (0..N)
            .max_by(|&i, &j| {
                loading[i]
                    .abs()
                    .partial_cmp(&loading[j].abs())
                    .expect("finite loading")
                    .then(j.cmp(&i))
            })
            .expect("non-empty loading");
        if loading[dominant] < 0.0 {
            for x in &mut loading {
                *x = -*x;
            }
        }
        loadings.push(loading);
        ratios.push(if total > 0.0 {
            eigenvalues[col].max(0.0) / total
        } else {
            0.0
        });
    }

    Ok(PcaModel {
        params,
        loadings,
        explained_variance_ratio: ratios,
    })
}

/// Projects one metric row onto the model's components.
pub fn project(model: &PcaModel, row: &[f64; N]) -> Result<Vec<f64>, PcaError> {
    for (c, v) in row.iter().enumerate() {
        if !v.is_finite() {
            return Err(PcaError::NonFinite { row: 0, col: c });
        }
    }
    let z = model.params.apply(row);
    Ok(model
        .loadings
        .iter()
        .map(|loading| loading.iter().zip(&z).map(|(l, v)| l * v).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank1_rows(n: usize) -> Vec<[f64; N]> {
        (0..n)
            .map(|i| {
                let t = i as f64;
                let mut row = [5.0; N];
                row[0] = t;
                row[1] = 3.0 * t;
                row
            })
            .collect()
    }

    #[test]
    fn rank1_data_explains_everything_with_one_component() {
        let model = fit_pca(&rank1_rows(20), 1).unwrap();
        assert!((model.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn isotropic_two_column_data_splits_variance_evenly() {
        // Points at (+-1, +-1) in columns 0 and 1: the sample covariance of
        // the standardized data is the identity on those two columns, so the
        // two eigenvalues are equal and each ratio is 0.5.
        let mut rows = Vec::new();
        for &a in &[-1.0, 1.0] {
            for &b in &[-1.0, 1.0] {
                let mut row = [0.0; N];
                row[0] = a;
                row[1] = b;
                rows.push(row);
            }
        }
        let model = fit_pca(&rows, 2).unwrap();
        assert!((model.explained_variance_ratio[0] - 0.5).abs() < 1e-9);
        assert!((model.explained_variance_ratio[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn loadings_are_orthonormal_and_ratios_monotone() {
        let mut rng = crate::rng::SeededRng::new(11);
        let rows: Vec<[f64; N]> = (0..100)
            .map(|_| {
                let mut row = [0.0; N];
                for v in &mut row {
                    *v = (rng.next_u64() % 1000) as f64 / 100.0;
                }
                row
            })
            .collect();
        let model = fit_pca(&rows, N).unwrap();
        for i in 0..N {
            for j in i..N {
                let dot: f64 = model.loadings[i]
                    .iter()
                    .zip(&model.loadings[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9, "dot({i},{j}) = {dot}");
            }
        }
        for pair in model.explained_variance_ratio.windows(2) {
            assert!(pair[0] >= pair[1] - 1e-12);
        }
        let sum: f64 = model.explained_variance_ratio.iter().sum();
        assert!(sum <= 1.0 + 1e-9);
        // Sign convention: dominant entry positive.
        for loading in &model.loadings {
            let dominant =
                loading
                    .iter()
                    .cloned()
                    .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(dominant > 0.0);
        }
    }

    #[test]
    fn projection_of_the_mean_is_zero() {
        let model = fit_pca(&rank1_rows(10), 2).unwrap();
        let proj = project(&model, &model.params.means.clone()).unwrap();
        for v in proj {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn projections_are_centered_with_eigenvalue_variance() {
        let mut rng = crate::rng::SeededRng::new(3);
        let rows: Vec<[f64; N]> = (0..200)
            .map(|_| {
                let mut row = [0.0; N];
                for v in &mut row {
                    *v = (rng.next_u64() % 997) as f64 / 97.0;
                }
                row
            })
            .collect();
        let model = fit_pca(&rows, 3).unwrap();
        let projections: Vec<Vec<f64>> = rows.iter().map(|r| project(&model, r).unwrap()).collect();
        let n = rows.len() as f64;
        // All 13 columns vary here, so the total standardized variance is 13
        // and each component's eigenvalue is its ratio times that.
        for c in 0..3 {
            let mean: f64 = projections.iter().map(|p| p[c]).sum::<f64>() / n;
            assert!(mean.abs() < 1e-9, "component {c} mean {mean}");
            let var: f64 = projections
                .iter()
                .map(|p| (p[c] - mean) * (p[c] - mean))
                .sum::<f64>()
                / (n - 1.0);
            let eigenvalue = model.explained_variance_ratio[c] * N as f64;
            assert!(
                (var - eigenvalue).abs() < 1e-8,
                "component {c}: projected variance {var} vs eigenvalue {eigenvalue}"
            );
        }
    }

    #[test]
    fn total_projected_variance_matches_standardized_variance() {
        let mut rng = crate::rng::SeededRng::new(8);
        let rows: Vec<[f64; N]> = (0..150)
            .map(|_| {
                let mut row = [0.0; N];
                for v in &mut row {
                    *v = (rng.next_u64() % 513) as f64 / 10.0;
                }
                row
            })
            .collect();
        let model = fit_pca(&rows, N).unwrap();
        let n = rows.len() as f64;
        let projections: Vec<Vec<f64>> = rows.iter().map(|r| project(&model, r).unwrap()).collect();
        let mut projected_var = 0.0;
        for c in 0..N {
            let mean: f64 = projections.iter().map(|p| p[c]).sum::<f64>() / n;
            projected_var += projections
                .iter()
                .map(|p| (p[c] - mean) * (p[c] - mean))
                .sum::<f64>()
                / (n - 1.0);
        }
        // Standardized data has unit variance per non-constant column.
        let standardized_var: f64 = N as f64;
        assert!((projected_var - standardized_var).abs() < 1e-8);
    }

    #[test]
    fn fit_is_bit_deterministic() {
        let rows = rank1_rows(50);
        let a = fit_pca(&rows, 4).unwrap();
        let b = fit_pca(&rows, 4).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn model_text_round_trips() {
        let model = fit_pca(&rank1_rows(12), 2).unwrap();
        let text = model.to_text();
        let back = PcaModel::parse(&text).unwrap();
        assert_eq!(back.component_count(), 2);
        for (a, b) in model.loadings[0].iter().zip(&back.loadings[0]) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            fit_pca(&rank1_rows(1), 2),
            Err(PcaError::TooFewRows(1))
        ));
        assert!(matches!(
            fit_pca(&rank1_rows(5), 0),
            Err(PcaError::InvalidComponentCount(0))
        ));
        assert!(matches!(
            fit_pca(&rank1_rows(5), 14),
            Err(PcaError::InvalidComponentCount(14))
        ));
        let mut rows = rank1_rows(5);
        rows[2][4] = f64::NAN;
        assert!(matches!(
            fit_pca(&rows, 2),
            Err(PcaError::NonFinite { row: 2, col: 4 })
        ));
    }
}
