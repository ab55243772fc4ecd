//! Fast Walsh-Hadamard transform and the subsampled randomized Hadamard sketch.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{SeedLabel, SeedTree};

/// In-place orthonormal Walsh-Hadamard transform (`H^T H = I`, so `H H v = v`).
pub fn fwht_inplace(v: &mut [f64]) -> Result<()> {
    let len = v.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let mut h = 1;
    while h < len {
        for chunk in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (len as f64).sqrt();
    v.iter_mut().for_each(|x| *x *= scale);
    Ok(())
}

/// `y = sqrt(p'/n) * P H D x`: random sign flip, orthonormal Hadamard transform
/// on the zero-padded input, then `n` rows drawn uniformly with replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardSketch {
    input_dim: usize,
    padded_dim: usize,
    diag_signs: Vec<f64>,
    row_indices: Vec<usize>,
    scale: f64,
}

impl HadamardSketch {
    pub fn build(input_dim: usize, out_dim: usize, seeds: &SeedTree) -> Result<Self> {
        if input_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidDimension(format!(
                "Hadamard sketch needs p >= 1 and n >= 1, got p={input_dim}, n={out_dim}"
            )));
        }
        let padded_dim = input_dim.next_power_of_two();
        let mut rng = seeds.rng(SeedLabel::HadamardDiag, 0);
        let diag_signs = (0..padded_dim)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let mut rng = seeds.rng(SeedLabel::HadamardRows, 0);
        let row_indices = (0..out_dim).map(|_| rng.random_range(0..padded_dim)).collect();
        Self::from_parts(input_dim, diag_signs, row_indices)
    }

    /// Builds a sketch from explicit signs and row selections.
    pub fn from_parts(input_dim: usize, diag_signs: Vec<f64>, row_indices: Vec<usize>) -> Result<Self> {
        let padded_dim = diag_signs.len();
        if !padded_dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(padded_dim));
        }
        if input_dim == 0 || input_dim > padded_dim || padded_dim != input_dim.next_power_of_two() {
            return Err(Error::InvalidDimension(format!(
                "input dim {input_dim} does not pad to {padded_dim}"
            )));
        }
        if diag_signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidDimension("sign diagonal must contain only +1/-1".into()));
        }
        if row_indices.is_empty() {
            return Err(Error::InvalidDimension("a sketch needs at least one row".into()));
        }
        if let Some(&bad) = row_indices.iter().find(|&&r| r >= padded_dim) {
            return Err(Error::InvalidDimension(format!(
                "row index {bad} outside [0, {padded_dim})"
            )));
        }
        let scale = (padded_dim as f64 / row_indices.len() as f64).sqrt();
        Ok(Self {
            input_dim,
            padded_dim,
            diag_signs,
            row_indices,
            scale,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn padded_dim(&self) -> usize {
        self.padded_dim
    }

    pub fn out_dim(&self) -> usize {
        self.row_indices.len()
    }

    pub fn diag_signs(&self) -> &[f64] {
        &self.diag_signs
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_indices
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut scratch = vec![0.0; self.padded_dim];
        let mut out = vec![0.0; self.out_dim()];
        self.apply_into(x, &mut scratch, &mut out)?;
        Ok(out)
    }

    /// [`HadamardSketch::apply`] with caller-provided buffers of length `p'` and `n`.
    pub fn apply_into(&self, x: &[f64], scratch: &mut [f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        debug_assert_eq!(scratch.len(), self.padded_dim);
        debug_assert_eq!(out.len(), self.out_dim());
        for (i, s) in scratch.iter_mut().enumerate() {
            *s = if i < x.len() { x[i] * self.diag_signs[i] } else { 0.0 };
        }
        fwht_inplace(scratch)?;
        for (o, &r) in out.iter_mut().zip(&self.row_indices) {
            *o = self.scale * scratch[r];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_point_transform() {
        let mut v = [1.0, 0.0];
        fwht_inplace(&mut v).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert_relative_eq!(v[0], r, max_relative = 1e-15);
        assert_relative_eq!(v[1], r, max_relative = 1e-15);
    }

    #[test]
    fn constant_vector_concentrates() {
        let mut v = [1.0; 4];
        fwht_inplace(&mut v).unwrap();
        assert_eq!(v, [2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(fwht_inplace(&mut [1.0; 6]), Err(Error::NotPowerOfTwo(6))));
        assert!(fwht_inplace(&mut []).is_err());
    }

    #[test]
    fn involution_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut v = x.clone();
        fwht_inplace(&mut v).unwrap();
        fwht_inplace(&mut v).unwrap();
        for (a, b) in v.iter().zip(&x) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn sketch_is_deterministic_and_padded() {
        let seeds = SeedTree::new(5);
        let a = HadamardSketch::build(512, 666, &seeds).unwrap();
        let b = HadamardSketch::build(512, 666, &seeds).unwrap();
        assert_eq!(a, b);
        let c = HadamardSketch::build(500, 64, &seeds).unwrap();
        assert_eq!(c.padded_dim(), 512);
        assert_relative_eq!(c.scale(), 8f64.sqrt());
        assert!(c.row_indices().iter().all(|&r| r < 512));
    }

    #[test]
    fn diag_signs_are_balanced() {
        let s = HadamardSketch::build(10_000, 1, &SeedTree::new(11)).unwrap();
        // 16384 signs; 3 sigma of the mean is ~0.023.
        let mean: f64 = s.diag_signs().iter().sum::<f64>() / s.padded_dim() as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn sketch_of_zero_is_zero() {
        let s = HadamardSketch::build(12, 20, &SeedTree::new(1)).unwrap();
        assert!(s.apply(&[0.0; 12]).unwrap().iter().all(|&v| v == 0.0));
        assert!(matches!(s.apply(&[0.0; 11]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn from_parts_validation() {
        assert!(HadamardSketch::from_parts(3, vec![1.0; 4], vec![0, 3]).is_ok());
        assert!(HadamardSketch::from_parts(3, vec![1.0; 4], vec![4]).is_err());
        assert!(HadamardSketch::from_parts(3, vec![1.0; 8], vec![0]).is_err());
        assert!(HadamardSketch::from_parts(3, vec![1.0, 0.5, 1.0, 1.0], vec![0]).is_err());
    }

    proptest! {
        #[test]
        fn fwht_preserves_norm(log_len in 1u32..=12, seed in any::<u64>()) {
            let len = 1usize << log_len;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut v = x.clone();
            fwht_inplace(&mut v).unwrap();
            let n0: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let n1: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            prop_assert!((n0 - n1).abs() <= 1e-6 * n0);
        }

        #[test]
        fn sketch_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let s = HadamardSketch::build(37, 50, &SeedTree::new(seed)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            let x: Vec<f64> = (0..37).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..37).map(|_| rng.random_range(-1.0..1.0)).collect();
            let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let lhs = s.apply(&combo).unwrap();
            let (sx, sy) = (s.apply(&x).unwrap(), s.apply(&y).unwrap());
            for i in 0..lhs.len() {
                let rhs = a * sx[i] + b * sy[i];
                prop_assert!((lhs[i] - rhs).abs() <= 1e-6 * (1.0 + rhs.abs()));
            }
        }
    }
}
