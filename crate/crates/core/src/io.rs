//! Binary file formats.
//!
//! Vector files (`BEMB`), all integers little-endian:
//!
//! ```text
//! "BEMB" | u32 version = 1 | u64 N | u64 p | N*p f32, row-major
//! ```
//!
//! Code files (`BCOD`):
//!
//! ```text
//! "BCOD" | u32 version = 1 | u64 N | u64 m | u32 B | N rows of ceil(m/64) u64 words
//! ```

use std::io::{Read, Write};

use crate::bits::{words_per_code, BinaryCode};
use crate::error::{Error, Result};
use crate::types::Dataset;

pub const VECTOR_MAGIC: &[u8; 4] = b"BEMB";
pub const CODE_MAGIC: &[u8; 4] = b"BCOD";
pub const FORMAT_VERSION: u32 = 1;

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

fn read_header<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let found: [u8; 4] = read_array(r)?;
    if &found != magic {
        return Err(Error::Format(format!(
            "expected magic {:?}, found {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&found)
        )));
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    Ok(())
}

fn to_usize(v: u64, what: &str) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Format(format!("{what} {v} does not fit in memory")))
}

/// Writes `data` as a `BEMB` file; coordinates are stored as `f32`.
pub fn write_vectors<W: Write>(w: &mut W, data: &Dataset) -> Result<()> {
    w.write_all(VECTOR_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(data.n_points() as u64).to_le_bytes())?;
    w.write_all(&(data.dim() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(4 * data.as_flat().len());
    for &v in data.as_flat() {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads the raw header and payload of a `BEMB` file without validating norms.
pub fn read_vectors_raw<R: Read>(r: &mut R) -> Result<(usize, usize, Vec<f32>)> {
    read_header(r, VECTOR_MAGIC)?;
    let n = to_usize(read_u64(r)?, "N")?;
    let p = to_usize(read_u64(r)?, "p")?;
    let len = n
        .checked_mul(p)
        .and_then(|l| l.checked_mul(4))
        .ok_or_else(|| Error::Format("N*p overflows".into()))?;
    let mut bytes = vec![0u8; len];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((n, p, values))
}

/// Reads a `BEMB` file; every row must be a unit vector.
pub fn read_vectors<R: Read>(r: &mut R) -> Result<Dataset> {
    let (_, p, values) = read_vectors_raw(r)?;
    Dataset::from_flat(p, values.into_iter().map(f64::from).collect())
}

/// Writes codes that share one `(m, B)` layout as a `BCOD` file.
pub fn write_codes<W: Write>(w: &mut W, codes: &[BinaryCode]) -> Result<()> {
    let (m, b) = match codes.first() {
        Some(c) => (c.n_bits(), c.n_blocks()),
        None => return Err(Error::Format("cannot infer the code layout of an empty set".into())),
    };
    if let Some(bad) = codes.iter().find(|c| c.n_bits() != m || c.n_blocks() != b) {
        return Err(Error::CodeMismatch(format!(
            "mixed layouts: {m} bits/{b} blocks and {} bits/{} blocks",
            bad.n_bits(),
            bad.n_blocks()
        )));
    }
    w.write_all(CODE_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(codes.len() as u64).to_le_bytes())?;
    w.write_all(&(m as u64).to_le_bytes())?;
    w.write_all(&(b as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * codes.len() * words_per_code(m));
    for c in codes {
        for word in c.words() {
            buf.extend_from_slice(&word.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_codes<R: Read>(r: &mut R) -> Result<Vec<BinaryCode>> {
    read_header(r, CODE_MAGIC)?;
    let n = to_usize(read_u64(r)?, "N")?;
    let m = to_usize(read_u64(r)?, "m")?;
    let b = read_u32(r)? as usize;
    let words = words_per_code(m);
    let mut bytes = vec![0u8; 8 * words];
    (0..n)
        .map(|_| {
            r.read_exact(&mut bytes)?;
            let row = bytes
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            BinaryCode::from_words(m, b, row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::pack_bits;
    use crate::eval::gen_sphere_dataset;

    #[test]
    fn vector_layout() {
        let d = Dataset::from_flat(2, vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        let mut buf = Vec::new();
        write_vectors(&mut buf, &d).unwrap();
        assert_eq!(&buf[..4], b"BEMB");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(&buf[8..16], &2u64.to_le_bytes());
        assert_eq!(&buf[16..24], &2u64.to_le_bytes());
        assert_eq!(buf.len(), 24 + 16);
        assert_eq!(&buf[36..40], &(-1.0f32).to_le_bytes());
        assert_eq!(read_vectors(&mut buf.as_slice()).unwrap(), d);
    }

    #[test]
    fn generated_datasets_round_trip_exactly() {
        let d = gen_sphere_dataset(20, 33, 4).unwrap();
        let mut buf = Vec::new();
        write_vectors(&mut buf, &d).unwrap();
        assert_eq!(read_vectors(&mut buf.as_slice()).unwrap(), d);
    }

    #[test]
    fn code_layout_and_round_trip() {
        let codes = vec![pack_bits(&[true; 65], 5).unwrap(), pack_bits(&[false; 65], 5).unwrap()];
        let mut buf = Vec::new();
        write_codes(&mut buf, &codes).unwrap();
        assert_eq!(&buf[..4], b"BCOD");
        assert_eq!(&buf[16..24], &65u64.to_le_bytes());
        assert_eq!(&buf[24..28], &5u32.to_le_bytes());
        assert_eq!(buf.len(), 28 + 2 * 2 * 8);
        assert_eq!(&buf[28..36], &u64::MAX.to_le_bytes());
        assert_eq!(&buf[36..44], &1u64.to_le_bytes());
        assert_eq!(read_codes(&mut buf.as_slice()).unwrap(), codes);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(read_codes(&mut &b"BEMB\x01\0\0\0"[..]), Err(Error::Format(_))));
        let mut buf = Vec::new();
        write_codes(&mut buf, &[pack_bits(&[true; 4], 1).unwrap()]).unwrap();
        buf[4] = 2;
        assert!(read_codes(&mut buf.as_slice()).is_err());
        buf[4] = 1;
        buf.truncate(buf.len() - 1);
        assert!(matches!(read_codes(&mut buf.as_slice()), Err(Error::Io(_))));
        assert!(write_codes(&mut Vec::new(), &[]).is_err());
        let mixed = [pack_bits(&[true; 4], 1).unwrap(), pack_bits(&[true; 4], 2).unwrap()];
        assert!(write_codes(&mut Vec::new(), &mixed).is_err());
    }

    #[test]
    fn non_unit_vectors_are_rejected() {
        let mut buf = Vec::new();
        buf.extend_from_slice(b"BEMB");
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&1u64.to_le_bytes());
        buf.extend_from_slice(&2u64.to_le_bytes());
        buf.extend_from_slice(&3.0f32.to_le_bytes());
        buf.extend_from_slice(&4.0f32.to_le_bytes());
        assert!(matches!(read_vectors(&mut buf.as_slice()), Err(Error::NotUnitVector { .. })));
        let (n, p, v) = read_vectors_raw(&mut buf.as_slice()).unwrap();
        assert_eq!((n, p, v), (1, 2, vec![3.0, 4.0]));
    }
}
