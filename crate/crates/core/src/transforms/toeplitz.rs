//! Partial Gaussian Toeplitz projections, `y -> first m' rows of T D y`.
//!
//! `T` is the `n x n` Toeplitz matrix with `T[i][j] = g[i - j + n - 1]`
//! (zero-based) for a generator `g` of length `2n - 1`. Application embeds
//! `T` in a circulant of power-of-two length `L >= 2n - 1` and convolves in
//! the frequency domain: with `c = g (*) z` circularly, row `i` of `T z` is
//! `c[i + n - 1]`, and no index in that range wraps around.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::seed::{SeedLabel, SeedTree};

/// Row `i` of the `n x n` Toeplitz matrix generated by `generator`.
pub fn toeplitz_row(generator: &[f64], i: usize) -> Vec<f64> {
    let n = generator.len().div_ceil(2);
    (0..n).map(|j| generator[i + n - 1 - j]).collect()
}

pub(crate) fn rademacher(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

pub(crate) fn standard_normals(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// One `m' x n` block `P T D` with its precomputed circulant spectrum.
#[derive(Clone)]
pub struct ToeplitzBlock {
    dim: usize,
    rows_out: usize,
    generator: Vec<f64>,
    diag_signs: Vec<f64>,
    spectrum: Arc<[Complex64]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for ToeplitzBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ToeplitzBlock")
            .field("dim", &self.dim)
            .field("rows_out", &self.rows_out)
            .field("circulant_len", &self.spectrum.len())
            .finish_non_exhaustive()
    }
}

impl PartialEq for ToeplitzBlock {
    fn eq(&self, other: &Self) -> bool {
        self.rows_out == other.rows_out
            && self.generator == other.generator
            && self.diag_signs == other.diag_signs
    }
}

/// Reusable buffers for [`ToeplitzBlock::apply_into`].
pub struct ToeplitzWorkspace {
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl ToeplitzWorkspace {
    pub fn new(block: &ToeplitzBlock) -> Self {
        let scratch_len = block
            .forward
            .get_inplace_scratch_len()
            .max(block.inverse.get_inplace_scratch_len());
        Self {
            buf: vec![Complex64::default(); block.circulant_len()],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }
}

impl ToeplitzBlock {
    /// Draws block `index`: generator from `toeplitz_gen`, signs from `toeplitz_diag`.
    pub fn build(dim: usize, rows_out: usize, seeds: &SeedTree, index: u64) -> Result<Self> {
        Self::build_with_planner(dim, rows_out, seeds, index, &mut FftPlanner::new())
    }

    pub(crate) fn build_with_planner(
        dim: usize,
        rows_out: usize,
        seeds: &SeedTree,
        index: u64,
        planner: &mut FftPlanner<f64>,
    ) -> Result<Self> {
        check_shape(dim, rows_out)?;
        let generator = standard_normals(&mut seeds.rng(SeedLabel::ToeplitzGen, index), 2 * dim - 1);
        let diag_signs = rademacher(&mut seeds.rng(SeedLabel::ToeplitzDiag, index), dim);
        Self::assemble(generator, diag_signs, rows_out, planner)
    }

    /// Block from an explicit generator (length `2n - 1`) and sign diagonal (length `n`).
    pub fn from_parts(generator: Vec<f64>, diag_signs: Vec<f64>, rows_out: usize) -> Result<Self> {
        let dim = diag_signs.len();
        check_shape(dim, rows_out)?;
        if generator.len() != 2 * dim - 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * dim - 1,
                actual: generator.len(),
            });
        }
        if let Some(index) = generator.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Self::assemble(generator, diag_signs, rows_out, &mut FftPlanner::new())
    }

    fn assemble(
        generator: Vec<f64>,
        diag_signs: Vec<f64>,
        rows_out: usize,
        planner: &mut FftPlanner<f64>,
    ) -> Result<Self> {
        let dim = diag_signs.len();
        let len = (2 * dim - 1).next_power_of_two();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut spectrum = vec![Complex64::default(); len];
        for (s, &g) in spectrum.iter_mut().zip(&generator) {
            s.re = g;
        }
        forward.process(&mut spectrum);
        // Fold the 1/L of the unnormalized inverse into the spectrum.
        let inv_len = 1.0 / len as f64;
        spectrum.iter_mut().for_each(|s| *s *= inv_len);
        Ok(Self {
            dim,
            rows_out,
            generator,
            diag_signs,
            spectrum: spectrum.into(),
            forward,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows_out(&self) -> usize {
        self.rows_out
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    pub fn diag_signs(&self) -> &[f64] {
        &self.diag_signs
    }

    pub fn circulant_len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        toeplitz_row(&self.generator, i)
    }

    /// First `m'` entries of `T D y`, in `O(n log n)`.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut ws = ToeplitzWorkspace::new(self);
        let mut out = vec![0.0; self.rows_out];
        self.apply_into(y, &mut ws, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, y: &[f64], ws: &mut ToeplitzWorkspace, out: &mut [f64]) -> Result<()> {
        self.check_input(y)?;
        debug_assert_eq!(out.len(), self.rows_out);
        let buf = &mut ws.buf;
        buf.resize(self.circulant_len(), Complex64::default());
        for (j, b) in buf.iter_mut().enumerate() {
            *b = if j < self.dim {
                Complex64::new(y[j] * self.diag_signs[j], 0.0)
            } else {
                Complex64::default()
            };
        }
        self.forward.process_with_scratch(buf, &mut ws.scratch);
        for (b, s) in buf.iter_mut().zip(self.spectrum.iter()) {
            *b *= s;
        }
        self.inverse.process_with_scratch(buf, &mut ws.scratch);
        for (i, o) in out.iter_mut().enumerate() {
            *o = buf[i + self.dim - 1].re;
        }
        Ok(())
    }

    /// Direct `O(n m')` evaluation of the same product; the reference for [`ToeplitzBlock::apply`].
    pub fn apply_naive(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_input(y)?;
        let n = self.dim;
        Ok((0..self.rows_out)
            .map(|i| {
                (0..n)
                    .map(|j| self.generator[i + n - 1 - j] * self.diag_signs[j] * y[j])
                    .sum()
            })
            .collect())
    }

    fn check_input(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: y.len(),
            });
        }
        Ok(())
    }
}

fn check_shape(dim: usize, rows_out: usize) -> Result<()> {
    if dim == 0 || rows_out == 0 {
        return Err(Error::InvalidDimension(format!(
            "Toeplitz block needs n >= 1 and m' >= 1, got n={dim}, m'={rows_out}"
        )));
    }
    if rows_out > dim {
        return Err(Error::RowsExceedDim { rows: rows_out, dim });
    }
    Ok(())
}
