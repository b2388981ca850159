//! Binary hyperplane-sketch files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      4 bytes  "HPSK"
//! version    u16
//! seed       u64
//! k          u32
//! column_id  u32
//! offset     f64
//! dots       k × f64
//! rsums      k × f64
//! value_sum  f64
//! row_count  u64
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::hyperplane::{HyperplaneConfig, HyperplaneSketch};

pub const SKETCH_MAGIC: [u8; 4] = *b"HPSK";
pub const SKETCH_VERSION: u16 = 1;

pub fn write_sketch<W: Write>(mut w: W, s: &HyperplaneSketch) -> Result<()> {
    w.write_all(&SKETCH_MAGIC)?;
    w.write_all(&SKETCH_VERSION.to_le_bytes())?;
    w.write_all(&s.config.seed.to_le_bytes())?;
    w.write_all(&(s.config.k as u32).to_le_bytes())?;
    w.write_all(&s.column_id.to_le_bytes())?;
    w.write_all(&s.offset.to_le_bytes())?;
    for v in s.dots.iter().chain(&s.rsums) {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&s.value_sum.to_le_bytes())?;
    w.write_all(&s.row_count.to_le_bytes())?;
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Malformed(format!("truncated sketch: {e}")))?;
    Ok(buf)
}

fn f64_of<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(take(r)?))
}

pub fn read_sketch<R: Read>(mut r: R) -> Result<HyperplaneSketch> {
    if take::<4, _>(&mut r)? != SKETCH_MAGIC {
        return Err(Error::Malformed("bad sketch magic".into()));
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != SKETCH_VERSION {
        return Err(Error::VersionMismatch {
            expected: SKETCH_VERSION as u32,
            found: version as u32,
        });
    }
    let seed = u64::from_le_bytes(take(&mut r)?);
    let k = u32::from_le_bytes(take(&mut r)?) as usize;
    if k == 0 {
        return Err(Error::Malformed("sketch width 0".into()));
    }
    let column_id = u32::from_le_bytes(take(&mut r)?);
    let offset = f64_of(&mut r)?;
    let dots = (0..k).map(|_| f64_of(&mut r)).collect::<Result<Vec<_>>>()?;
    let rsums = (0..k).map(|_| f64_of(&mut r)).collect::<Result<Vec<_>>>()?;
    let value_sum = f64_of(&mut r)?;
    let row_count = u64::from_le_bytes(take(&mut r)?);
    Ok(HyperplaneSketch {
        column_id,
        config: HyperplaneConfig { k, seed },
        offset,
        dots,
        rsums,
        value_sum,
        row_count,
    })
}
