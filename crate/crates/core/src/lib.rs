//! Binary embeddings of points on the unit sphere.
//!
//! Three embedders map `x ∈ S^{p-1}` to an `m`-bit code whose normalized
//! Hamming distance approximates the geodesic distance `d(x, y) = angle / π`:
//!
//! * [`Algorithm::Urp`]: `sign(A x)` with a dense Gaussian `A`.
//! * [`Algorithm::Fbe`]: a subsampled Hadamard sketch followed by `B`
//!   sign-flipped partial Gaussian Toeplitz blocks, compared with the median
//!   of per-block Hamming distances.
//! * [`Algorithm::Fbe2`]: the same sketch followed by a dense Gaussian matrix.
//!
//! ```
//! use binembed::{eval::gen_sphere_dataset, CodeMetric, Embedder, EmbedderConfig, Algorithm};
//!
//! let data = gen_sphere_dataset(10, 64, 1).unwrap();
//! let cfg = EmbedderConfig::with_defaults(Algorithm::Fbe, 64, 256, data.n_points(), 7);
//! let embedder = Embedder::fit(cfg).unwrap();
//! let codes = embedder.embed_batch(&data).unwrap();
//! let d = CodeMetric::MedianBlock.distance(&codes[0], &codes[1]).unwrap();
//! assert!((0.0..=1.0).contains(&d));
//! ```

pub mod bits;
pub mod embedders;
pub mod error;
pub mod eval;
pub mod io;
pub mod metrics;
pub mod seed;
pub mod transforms;
pub mod types;

pub use bits::{pack_bits, pack_signs, unpack_bits, BinaryCode};
pub use embedders::{fit, sign_quantize, Embedder};
pub use error::{Error, Result};
pub use metrics::{
    geodesic, hamming_norm, median_block_hamming, pairwise_distortion, CodeMetric, DistortionReport, GeodesicTable,
};
pub use seed::{derive_seed, SeedLabel, SeedTree};
pub use types::{Algorithm, Dataset, EmbedderConfig, UnitVector};
