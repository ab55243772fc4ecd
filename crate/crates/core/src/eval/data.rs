use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed::{SeedLabel, SeedTree};
use crate::types::Dataset;

/// `n_points` i.i.d. uniform points on the sphere in `dim` dimensions.
///
/// Rows are normalized Gaussian vectors rounded to `f32` precision, so a
/// dataset written to a vector file reads back bit-identically.
pub fn gen_sphere_dataset(n_points: usize, dim: usize, seed: u64) -> Result<Dataset> {
    if n_points == 0 || dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "need N >= 1 and p >= 2, got N={n_points}, p={dim}"
        )));
    }
    let mut rng = SeedTree::new(seed).rng(SeedLabel::Dataset, 0);
    let mut data = Vec::with_capacity(n_points * dim);
    let mut row = vec![0.0f64; dim];
    for _ in 0..n_points {
        let norm = loop {
            row.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        data.extend(row.iter().map(|v| f64::from((v / norm) as f32)));
    }
    Dataset::from_flat(dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_unit_and_reproducible() {
        let d = gen_sphere_dataset(50, 17, 3).unwrap();
        for row in d.rows() {
            let n: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-6);
        }
        assert_eq!(d, gen_sphere_dataset(50, 17, 3).unwrap());
        assert_ne!(d, gen_sphere_dataset(50, 17, 4).unwrap());
    }

    #[test]
    fn coordinates_are_centred() {
        let d = gen_sphere_dataset(10_000, 8, 12).unwrap();
        for c in 0..8 {
            let mean = d.rows().map(|r| r[c]).sum::<f64>() / 10_000.0;
            // each coordinate has variance 1/8; 3 sigma of the mean is ~0.011
            assert!(mean.abs() < 0.04, "coordinate {c} mean {mean}");
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(gen_sphere_dataset(0, 4, 0).is_err());
        assert!(gen_sphere_dataset(4, 1, 0).is_err());
    }
}
