//! Dense i.i.d. standard normal projection matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Row-major `rows x cols` matrix of standard normals, stored in single precision.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

pub fn sample_gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Result<GaussianMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidDimension(format!(
            "Gaussian matrix needs rows, cols >= 1, got {rows}x{cols}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    Ok(GaussianMatrix { rows, cols, data })
}

impl GaussianMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `out = inputs * A^T` for `n_points` row-major inputs of length `cols`.
    ///
    /// Each output entry is accumulated in the same order regardless of
    /// `n_points`, so projecting one point alone or inside a batch gives
    /// bit-identical values.
    pub fn project_batch(&self, inputs: &[f32], n_points: usize, out: &mut [f32]) {
        assert_eq!(inputs.len(), n_points * self.cols, "input shape");
        assert_eq!(out.len(), n_points * self.rows, "output shape");
        if n_points == 0 {
            return;
        }
        // SAFETY: the asserts above bound every access of the strided views:
        // inputs is n_points x cols (row stride cols), A^T is cols x rows read
        // from the row-major A (row stride 1, column stride cols), and out is
        // n_points x rows.
        unsafe {
            matrixmultiply::sgemm(
                n_points,
                self.cols,
                self.rows,
                1.0,
                inputs.as_ptr(),
                self.cols as isize,
                1,
                self.data.as_ptr(),
                1,
                self.cols as isize,
                0.0,
                out.as_mut_ptr(),
                self.rows as isize,
                1,
            );
        }
    }
}
