//! Field serialization.
//!
//! Binary container, all little-endian:
//!
//! | bytes      | content                         |
//! |------------|---------------------------------|
//! | 4          | magic `AGNF`                    |
//! | 4          | `u32` format version (1)        |
//! | 4          | `u32` dimension `n`             |
//! | 8·n        | `u64` points per axis           |
//! | 8·n        | `f64` period per axis           |
//! | 8·∏Nᵢ      | `f64` values, axis 1 fastest    |

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{GridSpec, RealField};

pub const MAGIC: [u8; 4] = *b"AGNF";
pub const VERSION: u32 = 1;

/// Largest grid written by [`write_csv`].
pub const CSV_MAX_POINTS: usize = 65_536;

pub fn write_field<W: Write>(f: &RealField, mut w: W) -> Result<()> {
    let grid = f.grid();
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &n in grid.sizes() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for &l in grid.lengths() {
        w.write_all(&l.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(8 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_field<R: Read>(mut r: R) -> Result<RealField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::Parse("not a field container (bad magic)".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported container version {version}")));
    }
    let n = read_u32(&mut r)? as usize;
    if n == 0 || n > super::MAX_DIM {
        return Err(Error::Parse(format!("bad dimension {n}")));
    }
    let sizes = (0..n)
        .map(|_| read_u64(&mut r).map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let lengths = (0..n).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
    let grid = GridSpec::new(sizes, lengths)?;
    let mut bytes = vec![0u8; 8 * grid.len()];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    RealField::new(grid, values)
}

pub fn save_field(f: &RealField, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(f, std::io::BufWriter::new(file))
}

pub fn load_field(path: &Path) -> Result<RealField> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}

/// CSV with columns `x1..xn,value`, one row per grid point in storage order.
pub fn write_csv<W: Write>(f: &RealField, w: W) -> Result<()> {
    let grid = f.grid();
    if grid.len() > CSV_MAX_POINTS {
        return Err(Error::InvalidArgument(format!(
            "grid has {} points; CSV export is limited to {CSV_MAX_POINTS}",
            grid.len()
        )));
    }
    let n = grid.dim();
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    out.write_record(&header)?;
    for (flat, v) in f.values().iter().enumerate() {
        let idx = grid.unravel(flat);
        let mut row: Vec<String> = (0..n).map(|a| grid.coord(a, idx[a]).to_string()).collect();
        row.push(v.to_string());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn container_round_trip() {
        let g = GridSpec::new(vec![8, 16], vec![1.5, 2.0]).unwrap();
        let f = RealField::from_fn(&g, |x| x[0].sin() * x[1]).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 12 + 16 + 16 + 8 * 128);
        assert_eq!(&buf[..4], b"AGNF");
        let back = read_field(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let g = GridSpec::torus(1, 8).unwrap();
        let mut buf = Vec::new();
        write_field(&RealField::constant(&g, 1.0), &mut buf).unwrap();
        assert!(read_field(&buf[..buf.len() - 1]).is_err());
        buf[0] = b'X';
        assert!(read_field(&buf[..]).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = GridSpec::isotropic(1, 8, 8.0).unwrap();
        let f = RealField::from_fn(&g, |x| 2.0 * x[0]).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,value");
        assert_eq!(lines[3], "2,4");
        assert_eq!(lines.len(), 9);
    }
}
