//! Field snapshots: flat little-endian f64, row-major, node (i, j) at
//! (i/n, j/n), real and imaginary parts interleaved. No header; `n` follows
//! from the file length.

use crate::error::{Error, Result};
use crate::harmonic::GridField;
use num_complex::Complex64;
use std::path::Path;

pub fn field_bytes(f: &GridField) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * f.values().len());
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn field_from_bytes(bytes: &[u8]) -> Result<GridField> {
    if !bytes.len().is_multiple_of(16) {
        return Err(Error::Config(format!(
            "snapshot length {} is not a whole number of nodes",
            bytes.len()
        )));
    }
    let nodes = bytes.len() / 16;
    let n = (nodes as f64).sqrt().round() as usize;
    if n * n != nodes || n == 0 {
        return Err(Error::Config(format!(
            "snapshot holds {nodes} nodes, not a square grid"
        )));
    }
    let num = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8 bytes"));
    let values = bytes
        .chunks_exact(16)
        .map(|c| Complex64::new(num(&c[..8]), num(&c[8..])))
        .collect();
    GridField::new(n, values)
}

pub fn write_field(f: &GridField, path: &Path) -> Result<()> {
    std::fs::write(path, field_bytes(f))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<GridField> {
    field_from_bytes(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bytes_round_trip() {
        let f = GridField::from_fn(8, |x| Complex64::new(x.x.sin(), -x.y / 3.0));
        let b = field_bytes(&f);
        assert_eq!(b.len(), 8 * 8 * 16);
        assert_eq!(field_from_bytes(&b).unwrap(), f);
        assert!(field_from_bytes(&b[..b.len() - 16]).is_err());
        assert!(field_from_bytes(&b[..5]).is_err());
    }
}
