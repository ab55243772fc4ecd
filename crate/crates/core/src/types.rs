//! Input vectors, datasets and embedder configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of a row norm from 1.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;

fn norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_unit(values: &[f64], row: usize) -> Result<()> {
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let n = norm(values);
    if (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(Error::NotUnitVector { row, norm: n });
    }
    Ok(())
}

/// A point on the unit sphere in `p >= 2` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "unit vectors need p >= 2, got {}",
                values.len()
            )));
        }
        check_unit(&values, 0)?;
        Ok(Self(values))
    }

    /// Scales `values` onto the sphere.
    pub fn normalize(mut values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let n = norm(&values);
        if n == 0.0 {
            return Err(Error::NotUnitVector { row: 0, norm: 0.0 });
        }
        values.iter_mut().for_each(|v| *v /= n);
        Self::new(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Neg for &UnitVector {
    type Output = UnitVector;

    fn neg(self) -> UnitVector {
        UnitVector(self.0.iter().map(|v| -v).collect())
    }
}

/// `N >= 1` unit vectors of dimension `p`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    data: Vec<f64>,
}

impl Dataset {
    /// Wraps row-major data, checking every row is a unit vector.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(format!("dataset dim must be >= 2, got {dim}")));
        }
        if data.is_empty() || data.len() % dim != 0 {
            return Err(Error::InvalidDimension(format!(
                "{} values do not form a whole number of rows of length {dim}",
                data.len()
            )));
        }
        for (row, chunk) in data.chunks_exact(dim).enumerate() {
            check_unit(chunk, row).map_err(|e| match e {
                Error::NonFinite { index } => Error::NonFinite {
                    index: row * dim + index,
                },
                other => other,
            })?;
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[UnitVector]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidDimension("a dataset needs at least one row".into()))?;
        let dim = first.dim();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: r.dim(),
                });
            }
            data.extend_from_slice(r.as_slice());
        }
        Ok(Self { dim, data })
    }

    pub fn n_points(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// New dataset made of the given rows, in order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidDimension("a dataset needs at least one row".into()));
        }
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Ok(Self { dim: self.dim, data })
    }
}

/// Which embedding pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Sign of a dense Gaussian projection.
    Urp,
    /// Hadamard sketch followed by `B` partial Gaussian Toeplitz blocks.
    Fbe,
    /// Hadamard sketch followed by a dense Gaussian projection.
    Fbe2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Urp, Algorithm::Fbe, Algorithm::Fbe2];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Urp => "urp",
            Algorithm::Fbe => "fbe",
            Algorithm::Fbe2 => "fbe2",
        }
    }

    pub(crate) fn code(self) -> u64 {
        match self {
            Algorithm::Urp => 1,
            Algorithm::Fbe => 2,
            Algorithm::Fbe2 => 3,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "urp" => Ok(Algorithm::Urp),
            "fbe" => Ok(Algorithm::Fbe),
            "fbe2" | "fbe-2" => Ok(Algorithm::Fbe2),
            other => Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// `ceil(1.3 m)`, the intermediate dimension used for the fast pipelines.
pub fn default_intermediate_dim(code_bits: usize) -> usize {
    (13 * code_bits).div_ceil(10)
}

/// `max(1, round(1.8 ln N))`, before any adjustment to divide `m`.
pub fn target_blocks(n_points: usize) -> usize {
    let b = (1.8 * (n_points.max(1) as f64).ln()).round() as usize;
    b.max(1)
}

/// The divisor of `code_bits` closest to [`target_blocks`] (ties go to the smaller divisor).
pub fn default_blocks(n_points: usize, code_bits: usize) -> usize {
    let target = target_blocks(n_points);
    (1..=code_bits.max(1))
        .filter(|b| code_bits % b == 0)
        .min_by_key(|&b| (b.abs_diff(target), b))
        .unwrap_or(1)
}

/// Smallest multiple of `blocks` that is at least `code_bits`.
pub fn round_up_to_blocks(code_bits: usize, blocks: usize) -> usize {
    code_bits.div_ceil(blocks) * blocks
}

/// Everything needed to fit an [`crate::Embedder`] deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EmbedderConfig {
    pub algorithm: Algorithm,
    pub input_dim: usize,
    pub code_bits: usize,
    /// Sketch output dimension `n`; `None` for URP.
    pub intermediate_dim: Option<usize>,
    pub blocks: usize,
    pub seed: u64,
}

impl EmbedderConfig {
    pub fn urp(input_dim: usize, code_bits: usize, seed: u64) -> Self {
        Self {
            algorithm: Algorithm::Urp,
            input_dim,
            code_bits,
            intermediate_dim: None,
            blocks: 1,
            seed,
        }
    }

    pub fn fbe(input_dim: usize, code_bits: usize, intermediate_dim: usize, blocks: usize, seed: u64) -> Self {
        Self {
            algorithm: Algorithm::Fbe,
            input_dim,
            code_bits,
            intermediate_dim: Some(intermediate_dim),
            blocks,
            seed,
        }
    }

    pub fn fbe2(input_dim: usize, code_bits: usize, intermediate_dim: usize, seed: u64) -> Self {
        Self {
            algorithm: Algorithm::Fbe2,
            input_dim,
            code_bits,
            intermediate_dim: Some(intermediate_dim),
            blocks: 1,
            seed,
        }
    }

    /// Config with `n = ceil(1.3 m)` and, for FBE, `B` from [`default_blocks`].
    pub fn with_defaults(algorithm: Algorithm, input_dim: usize, code_bits: usize, n_points: usize, seed: u64) -> Self {
        let n = default_intermediate_dim(code_bits);
        match algorithm {
            Algorithm::Urp => Self::urp(input_dim, code_bits, seed),
            Algorithm::Fbe => Self::fbe(input_dim, code_bits, n, default_blocks(n_points, code_bits), seed),
            Algorithm::Fbe2 => Self::fbe2(input_dim, code_bits, n, seed),
        }
    }

    /// Bits per block, `m / B`.
    pub fn block_len(&self) -> usize {
        self.code_bits / self.blocks.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.input_dim < 2 {
            return bad(format!("input dimension must be >= 2, got {}", self.input_dim));
        }
        if self.code_bits == 0 {
            return bad("code length m must be >= 1".into());
        }
        match self.algorithm {
            Algorithm::Urp => {
                if self.blocks != 1 {
                    return bad(format!("URP codes have a single block, got B={}", self.blocks));
                }
                if self.intermediate_dim.is_some() {
                    return bad("URP has no intermediate dimension".into());
                }
            }
            Algorithm::Fbe => {
                let Some(n) = self.intermediate_dim else {
                    return bad("FBE needs an intermediate dimension n".into());
                };
                if n == 0 {
                    return bad("intermediate dimension n must be >= 1".into());
                }
                if self.blocks == 0 || self.code_bits % self.blocks != 0 {
                    return bad(format!(
                        "B={} does not divide m={} (raise m to {} or pick another B)",
                        self.blocks,
                        self.code_bits,
                        round_up_to_blocks(self.code_bits, self.blocks.max(1))
                    ));
                }
                if self.block_len() > n {
                    return bad(format!(
                        "block length m/B={} exceeds intermediate dimension n={n}",
                        self.block_len()
                    ));
                }
            }
            Algorithm::Fbe2 => {
                if self.blocks != 1 {
                    return bad(format!("FBE-2 codes have a single block, got B={}", self.blocks));
                }
                match self.intermediate_dim {
                    Some(n) if n >= 1 => {}
                    _ => return bad("FBE-2 needs an intermediate dimension n >= 1".into()),
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vector_checks() {
        assert!(UnitVector::new(vec![1.0, 0.0]).is_ok());
        assert!(UnitVector::new(vec![1.0]).is_err());
        assert!(UnitVector::new(vec![1.0, 1.0]).is_err());
        assert!(UnitVector::new(vec![f64::NAN, 0.0]).is_err());
        let v = UnitVector::normalize(vec![3.0, 4.0]).unwrap();
        assert!((v.as_slice()[0] - 0.6).abs() < 1e-15);
        assert!(UnitVector::normalize(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn dataset_checks_every_row() {
        let ok = Dataset::from_flat(2, vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(ok.n_points(), 2);
        assert_eq!(ok.row(1), &[0.0, -1.0]);
        assert!(matches!(
            Dataset::from_flat(2, vec![1.0, 0.0, 0.5, 0.5]),
            Err(Error::NotUnitVector { row: 1, .. })
        ));
        assert!(Dataset::from_flat(2, vec![]).is_err());
        assert!(Dataset::from_flat(2, vec![1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn default_parameters() {
        assert_eq!(default_intermediate_dim(1000), 1300);
        assert_eq!(default_intermediate_dim(960), 1248);
        assert_eq!(default_intermediate_dim(1), 2);
        assert_eq!(target_blocks(300), 10);
        assert_eq!(target_blocks(1), 1);
        assert_eq!(default_blocks(300, 1000), 10);
        // 1.8 ln 3000 = 14.4 -> 14; 14 does not divide 1000, nearest divisors are 10 and 20.
        assert_eq!(default_blocks(3000, 1000), 10);
        assert_eq!(default_blocks(300, 7), 7);
        assert_eq!(round_up_to_blocks(100, 3), 102);
    }

    #[test]
    fn config_validation() {
        assert!(EmbedderConfig::urp(512, 1000, 0).validate().is_ok());
        assert!(EmbedderConfig::urp(512, 0, 0).validate().is_err());
        assert!(EmbedderConfig::fbe(512, 960, 1248, 16, 0).validate().is_ok());
        assert!(EmbedderConfig::fbe(512, 100, 130, 3, 0).validate().is_err());
        // m/B = 100 > n = 50
        assert!(EmbedderConfig::fbe(512, 100, 50, 1, 0).validate().is_err());
        assert!(EmbedderConfig::fbe2(512, 100, 130, 0).validate().is_ok());
        assert!(EmbedderConfig::fbe2(512, 100, 0, 0).validate().is_err());
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("lsh".parse::<Algorithm>().is_err());
    }
}
