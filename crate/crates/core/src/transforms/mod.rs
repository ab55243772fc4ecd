//! Randomized linear operators: the subsampled Hadamard sketch, partial
//! Gaussian Toeplitz blocks and dense Gaussian matrices.

mod gaussian;
mod hadamard;
mod toeplitz;

pub use gaussian::{sample_gaussian_matrix, GaussianMatrix};
pub use hadamard::{fwht_inplace, HadamardSketch};
pub use toeplitz::{toeplitz_row, ToeplitzBlock, ToeplitzWorkspace};

pub(crate) use toeplitz::{rademacher, standard_normals};
