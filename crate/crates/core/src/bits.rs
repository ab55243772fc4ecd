//! Packed binary codes.
//!
//! Bit `k` of an `m`-bit code lives in word `k / 64` at bit position `k % 64`
//! (least-significant bit first). Bits above `m` in the last word are always
//! zero, so XOR + popcount over whole words counts exactly the differing
//! positions. A code is split into `B` consecutive blocks of `m / B` bits.

use crate::error::{Error, Result};

/// Number of 64-bit words needed to hold `n_bits` bits.
pub fn words_per_code(n_bits: usize) -> usize {
    n_bits.div_ceil(64)
}

fn check_layout(n_bits: usize, n_blocks: usize) -> Result<()> {
    if n_bits == 0 {
        return Err(Error::InvalidDimension("a code needs at least one bit".into()));
    }
    if n_blocks == 0 || n_bits % n_blocks != 0 {
        return Err(Error::BlocksDoNotDivide {
            bits: n_bits,
            blocks: n_blocks,
        });
    }
    Ok(())
}

/// An `m`-bit code partitioned into `B` equal blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    n_bits: usize,
    n_blocks: usize,
    words: Vec<u64>,
}

impl BinaryCode {
    /// Builds a code from packed words, rejecting wrong lengths and nonzero pad bits.
    pub fn from_words(n_bits: usize, n_blocks: usize, words: Vec<u64>) -> Result<Self> {
        check_layout(n_bits, n_blocks)?;
        if words.len() != words_per_code(n_bits) {
            return Err(Error::DimensionMismatch {
                expected: words_per_code(n_bits),
                actual: words.len(),
            });
        }
        let code = Self {
            n_bits,
            n_blocks,
            words,
        };
        let last = *code.words.last().unwrap();
        if last & !code.last_word_mask() != 0 {
            return Err(Error::Format("pad bits above the code length are set".into()));
        }
        Ok(code)
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn block_len(&self) -> usize {
        self.n_bits / self.n_blocks
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bit(&self, k: usize) -> bool {
        assert!(k < self.n_bits, "bit {k} out of range for {} bits", self.n_bits);
        (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Mask of valid bits in the final word.
    pub fn last_word_mask(&self) -> u64 {
        match self.n_bits % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    /// Bitwise complement, keeping pad bits zero.
    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let mask = self.last_word_mask();
        *words.last_mut().unwrap() &= mask;
        Self { words, ..*self }
    }

    pub fn unpack_bits(&self) -> Vec<bool> {
        (0..self.n_bits).map(|k| self.bit(k)).collect()
    }

    /// The code restricted to block `j`, as a standalone single-block code.
    pub fn block(&self, j: usize) -> BinaryCode {
        let len = self.block_len();
        let bits: Vec<bool> = (j * len..(j + 1) * len).map(|k| self.bit(k)).collect();
        pack_bits(&bits, 1).expect("block length is nonzero")
    }

    /// Number of differing positions in bits `[start, start + len)`.
    pub(crate) fn xor_count_range(&self, other: &BinaryCode, start: usize, len: usize) -> u32 {
        xor_count_range(&self.words, &other.words, start, len)
    }
}

pub(crate) fn xor_count_range(a: &[u64], b: &[u64], start: usize, len: usize) -> u32 {
    if len == 0 {
        return 0;
    }
    let end = start + len;
    let first = start / 64;
    let last = (end - 1) / 64;
    let lo_mask = u64::MAX << (start % 64);
    let hi_mask = match end % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    };
    if first == last {
        return ((a[first] ^ b[first]) & lo_mask & hi_mask).count_ones();
    }
    let mut count = ((a[first] ^ b[first]) & lo_mask).count_ones();
    for w in first + 1..last {
        count += (a[w] ^ b[w]).count_ones();
    }
    count + ((a[last] ^ b[last]) & hi_mask).count_ones()
}

/// Packs `bits` into a code of `bits.len()` bits split into `blocks` blocks.
pub fn pack_bits(bits: &[bool], blocks: usize) -> Result<BinaryCode> {
    check_layout(bits.len(), blocks)?;
    let mut words = vec![0u64; words_per_code(bits.len())];
    for (k, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        words[k / 64] |= 1u64 << (k % 64);
    }
    Ok(BinaryCode {
        n_bits: bits.len(),
        n_blocks: blocks,
        words,
    })
}

pub fn unpack_bits(code: &BinaryCode) -> Vec<bool> {
    code.unpack_bits()
}

/// Sign-quantizes `values` straight into a packed code (`v >= 0` sets the bit).
pub fn pack_signs(values: &[f64], blocks: usize) -> Result<BinaryCode> {
    check_layout(values.len(), blocks)?;
    let mut words = vec![0u64; words_per_code(values.len())];
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: k });
        }
        if v >= 0.0 {
            words[k / 64] |= 1u64 << (k % 64);
        }
    }
    Ok(BinaryCode {
        n_bits: values.len(),
        n_blocks: blocks,
        words,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits_from(pattern: &[u8]) -> Vec<bool> {
        pattern.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn packs_lsb_first() {
        let code = pack_bits(&bits_from(&[1, 0, 1, 0]), 1).unwrap();
        assert_eq!(code.words(), &[0b0101]);
        assert_eq!(code.n_bits(), 4);
        assert_eq!(code.unpack_bits(), bits_from(&[1, 0, 1, 0]));
    }

    #[test]
    fn zero_code() {
        let code = pack_bits(&[false; 64], 4).unwrap();
        assert_eq!(code.words(), &[0]);
        assert_eq!(code.n_blocks(), 4);
        assert_eq!(code.unpack_bits(), vec![false; 64]);
    }

    #[test]
    fn sixty_five_ones_spill_into_second_word() {
        let code = pack_bits(&[true; 65], 5).unwrap();
        assert_eq!(code.words(), &[0xFFFF_FFFF_FFFF_FFFF, 0x1]);
        assert_eq!(code.unpack_bits(), vec![true; 65]);
    }

    #[test]
    fn rejects_indivisible_blocks() {
        assert!(matches!(
            pack_bits(&[true; 10], 3),
            Err(Error::BlocksDoNotDivide { bits: 10, blocks: 3 })
        ));
        assert!(pack_bits(&[], 1).is_err());
        assert!(pack_bits(&[true; 4], 0).is_err());
    }

    #[test]
    fn from_words_rejects_pad_bits() {
        assert!(BinaryCode::from_words(4, 1, vec![0b1_0000]).is_err());
        assert!(BinaryCode::from_words(4, 1, vec![0b1111]).is_ok());
        assert!(BinaryCode::from_words(65, 1, vec![0]).is_err());
    }

    #[test]
    fn complement_keeps_pad_zero() {
        let code = pack_bits(&[false; 70], 1).unwrap();
        let c = code.complement();
        assert_eq!(c.count_ones(), 70);
        assert_eq!(c.words()[1], (1 << 6) - 1);
    }

    #[test]
    fn pack_signs_tie_maps_to_one() {
        let code = pack_signs(&[0.3, -0.2, 0.0], 1).unwrap();
        assert_eq!(code.unpack_bits(), vec![true, false, true]);
        assert!(matches!(
            pack_signs(&[1.0, f64::NAN], 1),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn block_extraction() {
        let bits: Vec<bool> = (0..130).map(|k| k % 3 == 0).collect();
        let code = pack_bits(&bits, 2).unwrap();
        assert_eq!(code.block(1).unpack_bits(), bits[65..].to_vec());
    }

    fn bits_and_blocks() -> impl Strategy<Value = (Vec<bool>, usize)> {
        (1usize..=1024).prop_flat_map(|m| {
            let divisors: Vec<usize> = (1..=m).filter(|b| m % b == 0).collect();
            (proptest::collection::vec(any::<bool>(), m), proptest::sample::select(divisors))
        })
    }

    proptest! {
        #[test]
        fn round_trip_and_popcount((bits, blocks) in bits_and_blocks()) {
            let code = pack_bits(&bits, blocks).unwrap();
            prop_assert_eq!(code.unpack_bits(), bits.clone());
            prop_assert_eq!(code.count_ones() as usize, bits.iter().filter(|&&b| b).count());
            let last = *code.words().last().unwrap();
            prop_assert_eq!(last & !code.last_word_mask(), 0);
        }

        #[test]
        fn range_count_matches_bitwise(
            a in proptest::collection::vec(any::<bool>(), 200),
            b in proptest::collection::vec(any::<bool>(), 200),
            start in 0usize..200,
            len in 0usize..200,
        ) {
            let len = len.min(200 - start);
            let ca = pack_bits(&a, 1).unwrap();
            let cb = pack_bits(&b, 1).unwrap();
            let expected = (start..start + len).filter(|&k| a[k] != b[k]).count() as u32;
            prop_assert_eq!(ca.xor_count_range(&cb, start, len), expected);
        }
    }
}
