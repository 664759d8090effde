//! Binary field snapshots.
//!
//! Layout (little-endian): magic `CNLB`, format version `u32`, dimension
//! `u32`, resolution `u32`, component count `u32`, time `f64`, then each
//! component as `res^dim` `(re, im)` pairs of `f64` in row-major frequency
//! order over the full spectrum.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Field, Grid};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CNLB";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub grid: Grid,
    pub components: Vec<Vec<Complex64>>,
}

impl Snapshot {
    pub fn from_field<F: Field>(field: &F, time: f64) -> Self {
        Self {
            time,
            grid: field.grid(),
            components: field.components().to_vec(),
        }
    }

    pub fn into_field<F: Field>(self) -> Result<F> {
        F::from_components(self.grid, self.components)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        w.write_all(&(self.grid.res() as u32).to_le_bytes())?;
        w.write_all(&(self.components.len() as u32).to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.grid.len());
        for comp in &self.components {
            if comp.len() != self.grid.len() {
                return Err(Error::Shape("component length does not match grid".into()));
            }
            buf.clear();
            for c in comp {
                buf.extend_from_slice(&c.re.to_le_bytes());
                buf.extend_from_slice(&c.im.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {version}"
            )));
        }
        let dim = read_u32(&mut r)? as usize;
        let res = read_u32(&mut r)? as usize;
        let count = read_u32(&mut r)? as usize;
        let mut t = [0u8; 8];
        r.read_exact(&mut t)?;
        let time = f64::from_le_bytes(t);
        let grid = Grid::new(dim, res).map_err(|e| Error::Format(e.to_string()))?;
        if count == 0 || count > dim * dim {
            return Err(Error::Format(format!(
                "implausible component count {count}"
            )));
        }
        let mut raw = vec![0u8; 16 * grid.len()];
        let mut components = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut raw)?;
            components.push(
                raw.chunks_exact(16)
                    .map(|b| {
                        Complex64::new(
                            f64::from_le_bytes(b[..8].try_into().expect("8 bytes")),
                            f64::from_le_bytes(b[8..].try_into().expect("8 bytes")),
                        )
                    })
                    .collect(),
            );
        }
        Ok(Self {
            time,
            grid,
            components,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralVectorField;

    #[test]
    fn header_layout() {
        let g = Grid::new(2, 8).unwrap();
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode(1, &[1, 2], Complex64::new(0.25, -1.5));
        let mut bytes = Vec::new();
        Snapshot::from_field(&f, 0.75).write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"CNLB");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 8);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 0.75);
        assert_eq!(bytes.len(), 28 + 2 * 64 * 16);
        // component 1, index of k = (1, 2) is 1*8 + 2 = 10
        let off = 28 + 64 * 16 + 10 * 16;
        assert_eq!(
            f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()),
            0.25
        );
        assert_eq!(
            f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap()),
            -1.5
        );
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(Snapshot::read_from(&b"XXXX"[..]).is_err());
        let g = Grid::new(2, 8).unwrap();
        let mut bytes = Vec::new();
        Snapshot::from_field(&SpectralVectorField::zeros(g), 0.0)
            .write_to(&mut bytes)
            .unwrap();
        bytes.truncate(bytes.len() - 1);
        assert!(Snapshot::read_from(&bytes[..]).is_err());
        bytes[4] = 9;
        assert!(matches!(
            Snapshot::read_from(&bytes[..]),
            Err(Error::Format(_))
        ));
    }
}
