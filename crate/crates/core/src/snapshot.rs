//! NSEF binary snapshots: real-space velocity samples with time and viscosity.
//!
//! Layout, little endian throughout:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `NSEF` |
//! | 4 | version `u32`, currently 1 |
//! | 4 | `n` as `u32` |
//! | 8 | time `f64` |
//! | 8 | viscosity `f64` |
//! | 24 n³ | three components, each `n³` samples in `x`-fastest order |

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::spectral::{FourierField, Grid, RealField};

pub const MAGIC: &[u8; 4] = b"NSEF";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 28;

/// Largest accepted grid; keeps a hostile header from requesting huge buffers.
pub const MAX_N: u32 = 1024;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot truncated: {0} bytes, header needs {HEADER_LEN}")]
    Truncated(usize),
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("invalid grid size {0}")]
    GridSize(u32),
    #[error("payload length {got} does not match grid size {n} (expected {expected})")]
    Length { n: u32, got: usize, expected: usize },
    #[error("non-finite {0} in snapshot")]
    NonFinite(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Decoded snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub viscosity: f64,
    pub field: RealField,
}

impl Snapshot {
    pub fn from_fourier(time: f64, viscosity: f64, field: &FourierField) -> Self {
        Snapshot {
            time,
            viscosity,
            field: field.to_real(),
        }
    }
}

pub fn encode(snap: &Snapshot) -> Vec<u8> {
    let g = snap.field.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + 24 * g.real_len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&snap.time.to_le_bytes());
    out.extend_from_slice(&snap.viscosity.to_le_bytes());
    for comp in &snap.field.comps {
        for v in comp {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    if bytes.len() < HEADER_LEN {
        return Err(SnapshotError::Truncated(bytes.len()));
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if &magic != MAGIC {
        return Err(SnapshotError::BadMagic(magic));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let n = u32_at(bytes, 8);
    if n > MAX_N {
        return Err(SnapshotError::GridSize(n));
    }
    let grid = Grid::new(n as usize).map_err(|_| SnapshotError::GridSize(n))?;
    let time = f64_at(bytes, 12);
    let viscosity = f64_at(bytes, 20);
    if !time.is_finite() {
        return Err(SnapshotError::NonFinite("time"));
    }
    if !viscosity.is_finite() {
        return Err(SnapshotError::NonFinite("viscosity"));
    }
    let len = grid.real_len();
    let expected = HEADER_LEN + 24 * len;
    if bytes.len() != expected {
        return Err(SnapshotError::Length {
            n,
            got: bytes.len(),
            expected,
        });
    }
    let mut field = RealField::zeros(grid);
    for (c, comp) in field.comps.iter_mut().enumerate() {
        let base = HEADER_LEN + 8 * len * c;
        for (i, v) in comp.iter_mut().enumerate() {
            *v = f64_at(bytes, base + 8 * i);
            if !v.is_finite() {
                return Err(SnapshotError::NonFinite("sample"));
            }
        }
    }
    Ok(Snapshot {
        time,
        viscosity,
        field,
    })
}

pub fn write_file(path: &Path, snap: &Snapshot) -> Result<(), SnapshotError> {
    fs::write(path, encode(snap)).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_file(path: &Path) -> Result<Snapshot, SnapshotError> {
    let bytes = fs::read(path).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        let g = Grid::new(8).unwrap();
        Snapshot {
            time: 0.25,
            viscosity: 0.5,
            field: RealField::from_fn(g, |x, y, z| [x, y * 2.0, -z]),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let s = sample();
        let bytes = encode(&s);
        assert_eq!(bytes.len(), HEADER_LEN + 24 * 512);
        assert_eq!(&bytes[..4], b"NSEF");
        assert_eq!(decode(&bytes).unwrap(), s);
    }

    #[test]
    fn x_is_fastest() {
        let bytes = encode(&sample());
        let second = f64::from_le_bytes(bytes[HEADER_LEN + 8..HEADER_LEN + 16].try_into().unwrap());
        assert_eq!(second, Grid::new(8).unwrap().dx());
    }

    #[test]
    fn rejects_damage() {
        let bytes = encode(&sample());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(SnapshotError::BadMagic(_))));
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(decode(&bad), Err(SnapshotError::Version(2))));
        let mut bad = bytes.clone();
        bad[8] = 12;
        assert!(matches!(decode(&bad), Err(SnapshotError::GridSize(12))));
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(SnapshotError::Length { .. })
        ));
        assert!(matches!(decode(&bytes[..10]), Err(SnapshotError::Truncated(10))));
        let mut bad = bytes;
        bad[HEADER_LEN..HEADER_LEN + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(decode(&bad), Err(SnapshotError::NonFinite("sample"))));
    }
}
