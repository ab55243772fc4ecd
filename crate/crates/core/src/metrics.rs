//! Geodesic distance on the sphere and Hamming-space estimators of it.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BinaryCode;
use crate::error::{Error, Result};
use crate::types::Dataset;

/// Angle between `x` and `y` divided by `pi`, in `[0, 1]`.
///
/// Evaluated as `2 atan2(|x - y|, |x + y|)` on the normalized inputs, which
/// equals `arccos(<x, y>)` but stays exact at both ends: identical inputs give
/// exactly 0 and antipodal inputs exactly 1.
pub fn geodesic(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::InvalidDimension("geodesic distance of a zero vector".into()));
    }
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = (a / nx, b / ny);
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    Ok((2.0 * diff.sqrt().atan2(sum.sqrt()) / PI).clamp(0.0, 1.0))
}

fn check_pair(a: &BinaryCode, b: &BinaryCode) -> Result<()> {
    if a.n_bits() != b.n_bits() || a.n_blocks() != b.n_blocks() {
        return Err(Error::CodeMismatch(format!(
            "{} bits / {} blocks vs {} bits / {} blocks",
            a.n_bits(),
            a.n_blocks(),
            b.n_bits(),
            b.n_blocks()
        )));
    }
    Ok(())
}

/// Fraction of positions where `a` and `b` differ.
pub fn hamming_norm(a: &BinaryCode, b: &BinaryCode) -> Result<f64> {
    check_pair(a, b)?;
    let differing: u32 = a.words().iter().zip(b.words()).map(|(x, y)| (x ^ y).count_ones()).sum();
    Ok(differing as f64 / a.n_bits() as f64)
}

/// Median over the `B` consecutive blocks of the per-block normalized Hamming
/// distance. For even `B` the two central values are averaged.
pub fn median_block_hamming(a: &BinaryCode, b: &BinaryCode) -> Result<f64> {
    check_pair(a, b)?;
    let len = a.block_len();
    let mut counts: Vec<u32> = (0..a.n_blocks()).map(|j| a.xor_count_range(b, j * len, len)).collect();
    counts.sort_unstable();
    let mid = counts.len() / 2;
    let twice_median = if counts.len() % 2 == 1 {
        2 * counts[mid]
    } else {
        counts[mid - 1] + counts[mid]
    };
    Ok(twice_median as f64 / (2 * len) as f64)
}

/// Which code-space estimator to compare against geodesic distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeMetric {
    Hamming,
    MedianBlock,
}

impl CodeMetric {
    pub fn distance(self, a: &BinaryCode, b: &BinaryCode) -> Result<f64> {
        match self {
            CodeMetric::Hamming => hamming_norm(a, b),
            CodeMetric::MedianBlock => median_block_hamming(a, b),
        }
    }
}

impl std::str::FromStr for CodeMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(CodeMetric::Hamming),
            "median_block" | "median-block" => Ok(CodeMetric::MedianBlock),
            other => Err(Error::InvalidConfig(format!("unknown code metric `{other}`"))),
        }
    }
}

/// Worst and average `|estimate - geodesic|` over all unordered pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub max_abs_distortion: f64,
    pub mean_abs_distortion: f64,
    pub n_pairs: usize,
}

/// Geodesic distances of every unordered pair of a dataset, upper triangle row-major.
#[derive(Debug, Clone)]
pub struct GeodesicTable {
    n_points: usize,
    values: Vec<f64>,
}

impl GeodesicTable {
    pub fn new(data: &Dataset) -> Self {
        let n = data.n_points();
        let values = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                (i + 1..n).map(move |j| geodesic(data.row(i), data.row(j)).expect("rows share a dimension"))
            })
            .collect();
        Self { n_points: n, values }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_pairs(&self) -> usize {
        self.values.len()
    }

    /// Distances in `(0,1), (0,2), ..., (1,2), ...` order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Compares `codes` against the stored distances.
    pub fn distortion(&self, codes: &[BinaryCode], metric: CodeMetric) -> Result<DistortionReport> {
        let n = self.n_points;
        if codes.len() != n {
            return Err(Error::Alignment {
                codes: codes.len(),
                points: n,
            });
        }
        let offsets: Vec<usize> = (0..n).map(|i| i * n - i * (i + 1) / 2).collect();
        let (max, sum) = (0..n)
            .into_par_iter()
            .map(|i| {
                let row = &self.values[offsets[i]..offsets[i] + (n - i - 1)];
                let mut acc = (0.0f64, 0.0f64);
                for (j, &g) in (i + 1..n).zip(row) {
                    let err = (metric.distance(&codes[i], &codes[j])? - g).abs();
                    acc = (acc.0.max(err), acc.1 + err);
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1 + b.1));
        let n_pairs = self.values.len();
        Ok(DistortionReport {
            max_abs_distortion: max,
            mean_abs_distortion: if n_pairs == 0 { 0.0 } else { sum / n_pairs as f64 },
            n_pairs,
        })
    }
}

/// Distortion of `codes` over every pair of rows of `data`.
pub fn pairwise_distortion(data: &Dataset, codes: &[BinaryCode], metric: CodeMetric) -> Result<DistortionReport> {
    if codes.len() != data.n_points() {
        return Err(Error::Alignment {
            codes: codes.len(),
            points: data.n_points(),
        });
    }
    GeodesicTable::new(data).distortion(codes, metric)
}
