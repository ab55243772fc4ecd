//! Seed derivation.
//!
//! Every random component of an embedder draws from its own ChaCha8 stream,
//! seeded by a child seed derived from one master seed:
//!
//! ```text
//! child(master, label, index) = splitmix64(splitmix64(master ^ fnv1a64(label)) + index)
//! ```
//!
//! `splitmix64` is a bijection on `u64`, so distinct indices under the same
//! label and master always give distinct children.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const FORK_SALT: u64 = 0x5EED_F0E4_A11C_E5ED;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// The random components that draw seeds from a [`SeedTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedLabel {
    HadamardDiag,
    HadamardRows,
    ToeplitzGen,
    ToeplitzDiag,
    GaussianDense,
    Dataset,
}

impl SeedLabel {
    pub const ALL: [SeedLabel; 6] = [
        SeedLabel::HadamardDiag,
        SeedLabel::HadamardRows,
        SeedLabel::ToeplitzGen,
        SeedLabel::ToeplitzDiag,
        SeedLabel::GaussianDense,
        SeedLabel::Dataset,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeedLabel::HadamardDiag => "hadamard_diag",
            SeedLabel::HadamardRows => "hadamard_rows",
            SeedLabel::ToeplitzGen => "toeplitz_gen",
            SeedLabel::ToeplitzDiag => "toeplitz_diag",
            SeedLabel::GaussianDense => "gaussian_dense",
            SeedLabel::Dataset => "dataset",
        }
    }
}

impl fmt::Display for SeedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeedLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeedLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownSeedLabel(s.to_string()))
    }
}

/// A master seed from which per-component seeds are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn derive(&self, label: SeedLabel, index: u64) -> u64 {
        let base = splitmix64(self.master ^ fnv1a64(label.as_str().as_bytes()));
        splitmix64(base.wrapping_add(index))
    }

    /// String-labelled variant of [`SeedTree::derive`]; rejects labels outside [`SeedLabel::ALL`].
    pub fn derive_named(&self, label: &str, index: u64) -> Result<u64> {
        Ok(self.derive(label.parse()?, index))
    }

    /// A fresh ChaCha8 stream for `(label, index)`.
    pub fn rng(&self, label: SeedLabel, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive(label, index))
    }

    /// Subtree keyed by `index`, used to give each experiment cell its own master.
    pub fn fork(&self, index: u64) -> SeedTree {
        SeedTree::new(splitmix64(self.master ^ splitmix64(index ^ FORK_SALT)))
    }
}

/// Convenience wrapper matching the free-function form `derive_seed(tree, label, index)`.
pub fn derive_seed(tree: &SeedTree, label: &str, index: u64) -> Result<u64> {
    tree.derive_named(label, index)
}
