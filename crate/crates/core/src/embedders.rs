//! The three embedding pipelines.
//!
//! * URP: `b = sign(A x)` with `A` an `m x p` standard normal matrix.
//! * FBE: `y = Phi x` with a subsampled Hadamard sketch `Phi` (`p -> n`),
//!   then `B` independent partial Toeplitz blocks each emit `m / B` bits of
//!   `sign(Psi_j y)`, concatenated in block order.
//! * FBE-2: `b = sign(A Phi x)` with a dense `m x n` matrix `A`.
//!
//! `sign` maps zero to the set bit. FBE codes are meant to be compared with
//! [`crate::metrics::median_block_hamming`]; URP and FBE-2 codes use plain
//! normalized Hamming distance.
//!
//! The fast-pipeline guarantees hold for `B` proportional to `ln N`; the
//! defaults here use the experimental constant `B ~ 1.8 ln N`, which is much
//! smaller than the `16 ln N` the worst-case analysis asks for.

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::bits::{pack_signs, BinaryCode};
use crate::error::{Error, Result};
use crate::seed::{SeedLabel, SeedTree};
use crate::transforms::{sample_gaussian_matrix, GaussianMatrix, HadamardSketch, ToeplitzBlock, ToeplitzWorkspace};
use crate::types::{Algorithm, Dataset, EmbedderConfig};

/// Rows projected together in one dense product.
const CHUNK_ROWS: usize = 64;

/// `v_k >= 0` maps to `true`.
pub fn sign_quantize(v: &[f64]) -> Result<Vec<bool>> {
    v.iter()
        .enumerate()
        .map(|(index, &x)| {
            if x.is_finite() {
                Ok(x >= 0.0)
            } else {
                Err(Error::NonFinite { index })
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
enum Projection {
    Urp(GaussianMatrix),
    Fbe {
        sketch: HadamardSketch,
        blocks: Vec<ToeplitzBlock>,
    },
    Fbe2 {
        sketch: HadamardSketch,
        matrix: GaussianMatrix,
    },
}

/// A fitted, immutable embedding pipeline.
#[derive(Debug, Clone)]
pub struct Embedder {
    config: EmbedderConfig,
    projection: Projection,
}

impl Embedder {
    /// Draws every random component from the config's seed tree.
    pub fn fit(config: EmbedderConfig) -> Result<Self> {
        config.validate()?;
        let seeds = SeedTree::new(config.seed);
        let p = config.input_dim;
        let m = config.code_bits;
        let projection = match config.algorithm {
            Algorithm::Urp => {
                Projection::Urp(sample_gaussian_matrix(m, p, seeds.derive(SeedLabel::GaussianDense, 0))?)
            }
            Algorithm::Fbe => {
                let n = config.intermediate_dim.expect("validated");
                let sketch = HadamardSketch::build(p, n, &seeds)?;
                let mut planner = FftPlanner::new();
                let blocks = (0..config.blocks as u64)
                    .map(|j| ToeplitzBlock::build_with_planner(n, config.block_len(), &seeds, j, &mut planner))
                    .collect::<Result<_>>()?;
                Projection::Fbe { sketch, blocks }
            }
            Algorithm::Fbe2 => {
                let n = config.intermediate_dim.expect("validated");
                let sketch = HadamardSketch::build(p, n, &seeds)?;
                let matrix = sample_gaussian_matrix(m, n, seeds.derive(SeedLabel::GaussianDense, 0))?;
                Projection::Fbe2 { sketch, matrix }
            }
        };
        Ok(Self { config, projection })
    }

    /// Assembles an FBE embedder from explicit operators, e.g. to reorder blocks.
    pub fn from_fbe_parts(config: EmbedderConfig, sketch: HadamardSketch, blocks: Vec<ToeplitzBlock>) -> Result<Self> {
        config.validate()?;
        if config.algorithm != Algorithm::Fbe {
            return Err(Error::InvalidConfig("from_fbe_parts needs an FBE config".into()));
        }
        let n = config.intermediate_dim.expect("validated");
        if sketch.input_dim() != config.input_dim || sketch.out_dim() != n {
            return Err(Error::InvalidConfig("sketch shape does not match the config".into()));
        }
        if blocks.len() != config.blocks
            || blocks.iter().any(|b| b.dim() != n || b.rows_out() != config.block_len())
        {
            return Err(Error::InvalidConfig("Toeplitz blocks do not match the config".into()));
        }
        Ok(Self {
            config,
            projection: Projection::Fbe { sketch, blocks },
        })
    }

    pub fn config(&self) -> &EmbedderConfig {
        &self.config
    }

    pub fn sketch(&self) -> Option<&HadamardSketch> {
        match &self.projection {
            Projection::Urp(_) => None,
            Projection::Fbe { sketch, .. } | Projection::Fbe2 { sketch, .. } => Some(sketch),
        }
    }

    /// Toeplitz blocks of an FBE embedder; empty for the other pipelines.
    pub fn blocks(&self) -> &[ToeplitzBlock] {
        match &self.projection {
            Projection::Fbe { blocks, .. } => blocks,
            _ => &[],
        }
    }

    pub fn dense_matrix(&self) -> Option<&GaussianMatrix> {
        match &self.projection {
            Projection::Urp(a) | Projection::Fbe2 { matrix: a, .. } => Some(a),
            Projection::Fbe { .. } => None,
        }
    }

    /// The real-valued vector that gets sign-quantized into the code.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.project_chunk(x, 1)
    }

    pub fn embed(&self, x: &[f64]) -> Result<BinaryCode> {
        pack_signs(&self.project(x)?, self.config.blocks)
    }

    /// Embeds every row; identical to calling [`Embedder::embed`] row by row.
    pub fn embed_batch(&self, data: &Dataset) -> Result<Vec<BinaryCode>> {
        self.check_dim(data.dim())?;
        let p = data.dim();
        let m = self.config.code_bits;
        let chunks: Vec<Vec<BinaryCode>> = data
            .as_flat()
            .par_chunks(CHUNK_ROWS * p)
            .map(|chunk| {
                let rows = chunk.len() / p;
                let projected = self.project_chunk(chunk, rows)?;
                projected
                    .chunks_exact(m)
                    .map(|v| pack_signs(v, self.config.blocks))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(chunks.into_iter().flatten().collect())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.config.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.config.input_dim,
                actual: dim,
            });
        }
        Ok(())
    }

    /// Projects `rows` row-major inputs into a `rows x m` buffer.
    fn project_chunk(&self, inputs: &[f64], rows: usize) -> Result<Vec<f64>> {
        let p = self.config.input_dim;
        if inputs.len() != rows * p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: inputs.len() / rows.max(1),
            });
        }
        let m = self.config.code_bits;
        match &self.projection {
            Projection::Urp(a) => {
                let xs: Vec<f32> = inputs.iter().map(|&v| v as f32).collect();
                Ok(dense(a, &xs, rows))
            }
            Projection::Fbe2 { sketch, matrix } => {
                let n = sketch.out_dim();
                let mut scratch = vec![0.0; sketch.padded_dim()];
                let mut y = vec![0.0; n];
                let mut ys = Vec::with_capacity(rows * n);
                for x in inputs.chunks_exact(p) {
                    sketch.apply_into(x, &mut scratch, &mut y)?;
                    ys.extend(y.iter().map(|&v| v as f32));
                }
                Ok(dense(matrix, &ys, rows))
            }
            Projection::Fbe { sketch, blocks } => {
                let mut scratch = vec![0.0; sketch.padded_dim()];
                let mut y = vec![0.0; sketch.out_dim()];
                let mut ws = ToeplitzWorkspace::new(&blocks[0]);
                let block_len = self.config.block_len();
                let mut out = vec![0.0; rows * m];
                for (x, code) in inputs.chunks_exact(p).zip(out.chunks_exact_mut(m)) {
                    sketch.apply_into(x, &mut scratch, &mut y)?;
                    for (block, dst) in blocks.iter().zip(code.chunks_exact_mut(block_len)) {
                        block.apply_into(&y, &mut ws, dst)?;
                    }
                }
                Ok(out)
            }
        }
    }
}

fn dense(a: &GaussianMatrix, inputs: &[f32], rows: usize) -> Vec<f64> {
    let mut out = vec![0.0f32; rows * a.rows()];
    a.project_batch(inputs, rows, &mut out);
    out.into_iter().map(f64::from).collect()
}

/// Free-function form of [`Embedder::fit`].
pub fn fit(config: EmbedderConfig) -> Result<Embedder> {
    Embedder::fit(config)
}
