//! `NSF2` snapshot files.
//!
//! Layout (little endian): magic `b"NSF2"`, `u32` version (1), `f64` side
//! length, `f64` time, `u32` M, then `2 M^2` complex coefficients stored as
//! `(f64 re, f64 im)`, first component then second, each in row-major wrapped
//! mode order (`k1` outer, `k2` inner).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::grid::WaveGrid;

pub const MAGIC: &[u8; 4] = b"NSF2";
pub const VERSION: u32 = 1;

/// A field stamped with its time.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: SpectralVelocity,
}

impl Snapshot {
    pub fn new(time: f64, field: SpectralVelocity) -> Self {
        Snapshot { time, field }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let grid = self.field.grid();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&grid.length().to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        w.write_all(&(grid.points() as u32).to_le_bytes())?;
        for c in 0..2 {
            for z in self.field.component(c) {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(28 + 32 * self.field.grid().len());
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    /// Reads a snapshot; `grid` is reused when it matches the header.
    pub fn read_from<R: Read>(mut r: R, grid: Option<&WaveGrid>) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let version = u32::from_le_bytes(read_array(&mut r)?);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let length = f64::from_le_bytes(read_array(&mut r)?);
        let time = f64::from_le_bytes(read_array(&mut r)?);
        let points = u32::from_le_bytes(read_array(&mut r)?) as usize;
        let grid = match grid {
            Some(g) if g.points() == points && g.length().to_bits() == length.to_bits() => g.clone(),
            _ => WaveGrid::new(length, points)?,
        };
        let n = grid.len();
        let mut comps = [Vec::with_capacity(n), Vec::with_capacity(n)];
        for comp in comps.iter_mut() {
            for _ in 0..n {
                let re = f64::from_le_bytes(read_array(&mut r)?);
                let im = f64::from_le_bytes(read_array(&mut r)?);
                comp.push(Complex64::new(re, im));
            }
        }
        let [a, b] = comps;
        Ok(Snapshot {
            time,
            field: SpectralVelocity::from_components(&grid, a, b)?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path, grid: Option<&WaveGrid>) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::read_from(BufReader::new(file), grid)
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| Error::Format(format!("truncated snapshot: {e}")))
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    read_exact(r, &mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::random::{random_field, FieldKind};

    #[test]
    fn header_layout() {
        let g = make_grid(2.0, 8).unwrap();
        let f = random_field(&g, FieldKind::Solenoidal, 2.0, 5);
        let bytes = Snapshot::new(1.5, f.clone()).to_bytes();
        assert_eq!(bytes.len(), 4 + 4 + 8 + 8 + 4 + 2 * 64 * 16);
        assert_eq!(&bytes[0..4], b"NSF2");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2.0);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 1.5);
        assert_eq!(u32::from_le_bytes(bytes[24..28].try_into().unwrap()), 8);
        // first coefficient of the second component, mode (0, 1)
        let idx = g.index(0, 1);
        let off = 28 + 64 * 16 + idx * 16;
        let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        assert_eq!(re, f.component(1)[idx].re);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(Snapshot::read_from(&b"NSF1\x01\0\0\0"[..], None), Err(Error::Format(_))));
        let g = make_grid(2.0, 8).unwrap();
        let mut bytes = Snapshot::new(0.0, SpectralVelocity::zeros(&g)).to_bytes();
        bytes.truncate(100);
        assert!(Snapshot::read_from(&bytes[..], None).is_err());
        let mut bytes = Snapshot::new(0.0, SpectralVelocity::zeros(&g)).to_bytes();
        bytes[4] = 2;
        assert!(Snapshot::read_from(&bytes[..], None).is_err());
    }
}
