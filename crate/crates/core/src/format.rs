//! `T3R1` binary tensor files.
//!
//! Layout: the 4-byte magic `T3R1`, then `n1`, `n2`, `n3` as little-endian
//! `u64`, then `n1 * n2 * n3` little-endian `f64` values in slice-major,
//! row-major order (see [`crate::tensor`]).

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

pub const MAGIC: &[u8; 4] = b"T3R1";
const HEADER_LEN: usize = 4 + 3 * 8;

pub fn encode(t: &Tensor3) -> Vec<u8> {
    let (n1, n2, n3) = t.dims();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * t.len());
    out.extend_from_slice(MAGIC);
    for d in [n1, n2, n3] {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Tensor3> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "{} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let dim = |i: usize| -> Result<usize> {
        let raw = u64::from_le_bytes(bytes[4 + 8 * i..12 + 8 * i].try_into().expect("8 bytes"));
        usize::try_from(raw).map_err(|_| Error::Format(format!("dimension {raw} too large")))
    };
    let (n1, n2, n3) = (dim(0)?, dim(1)?, dim(2)?);
    let count = n1
        .checked_mul(n2)
        .and_then(|x| x.checked_mul(n3))
        .filter(|&c| c > 0)
        .ok_or_else(|| Error::Format(format!("invalid dimensions {n1}x{n2}x{n3}")))?;
    let payload = &bytes[HEADER_LEN..];
    if count.checked_mul(8) != Some(payload.len()) {
        return Err(Error::Format(format!(
            "payload is {} bytes, expected {} values",
            payload.len(),
            count
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Tensor3::from_vec((n1, n2, n3), data)
}

pub fn write_to(t: &Tensor3, mut w: impl Write) -> Result<()> {
    w.write_all(&encode(t))?;
    Ok(())
}

pub fn read_from(mut r: impl Read) -> Result<Tensor3> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    decode(&buf)
}
