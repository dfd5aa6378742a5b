//! Binary checkpoints of an Elsasser state.
//!
//! Little-endian layout:
//!
//! ```text
//! "MHDE"  u32 version=1  u32 n
//! f64 time  f64 re  f64 rm  f64 s
//! W⁺ then W⁻: for i0 in 0..n, i1 in 0..n, i2 in 0..=n/2:
//!     (re, im) of component 0, 1, 2
//! ```
//!
//! Only the half-spectrum `i2 ≤ n/2` is stored; the rest follows from
//! Hermitian symmetry.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{ElsasserState, FluidParams};
use crate::spectral::{Grid, SpectralVectorField};

pub const MAGIC: &[u8; 4] = b"MHDE";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 * 8;

fn stored_len(n: usize) -> usize {
    n * n * (n / 2 + 1)
}

pub fn checkpoint_to_bytes(state: &ElsasserState, params: &FluidParams) -> Vec<u8> {
    let grid = state.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * 3 * 16 * stored_len(n));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for v in [state.time, params.re(), params.rm(), params.s_coupling()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for field in [&state.w_plus, &state.w_minus] {
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..=n / 2 {
                    let idx = grid.index([i0, i1, i2]);
                    for c in field.coeff(idx) {
                        out.extend_from_slice(&c.re.to_le_bytes());
                        out.extend_from_slice(&c.im.to_le_bytes());
                    }
                }
            }
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::CorruptCheckpoint(format!("truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length is N"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

/// Parses a checkpoint, returning the state and its parameters.
pub fn checkpoint_from_bytes(bytes: &[u8]) -> Result<(ElsasserState, FluidParams)> {
    let mut cur = Cursor { bytes, pos: 0 };
    if &cur.take::<4>()? != MAGIC {
        return Err(Error::CorruptCheckpoint("bad magic".into()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = cur.u32()? as usize;
    let grid =
        Grid::new(n).map_err(|_| Error::CorruptCheckpoint(format!("invalid grid size {n}")))?;
    let time = cur.f64()?;
    let re = cur.f64()?;
    let rm = cur.f64()?;
    let s = cur.f64()?;
    let params = FluidParams::new(re, rm, s)
        .map_err(|e| Error::CorruptCheckpoint(format!("invalid parameters: {e}")))?;
    let expected = HEADER_LEN + 2 * 3 * 16 * stored_len(n);
    if bytes.len() != expected {
        return Err(Error::CorruptCheckpoint(format!(
            "expected {expected} bytes for n={n}, found {}",
            bytes.len()
        )));
    }

    let mut read_field = || -> Result<SpectralVectorField> {
        let mut comps = [0, 1, 2].map(|_| vec![Complex64::default(); grid.len()]);
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..=n / 2 {
                    let idx = grid.index([i0, i1, i2]);
                    for comp in comps.iter_mut() {
                        let re = cur.f64()?;
                        let im = cur.f64()?;
                        comp[idx] = Complex64::new(re, im);
                    }
                }
            }
        }
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in n / 2 + 1..n {
                    let idx = grid.index([i0, i1, i2]);
                    let partner = grid.conj_index(idx);
                    for comp in comps.iter_mut() {
                        comp[idx] = comp[partner].conj();
                    }
                }
            }
        }
        SpectralVectorField::from_components(grid, comps)
    };
    let w_plus = read_field()?;
    let w_minus = read_field()?;
    if !w_plus.is_finite() || !w_minus.is_finite() {
        return Err(Error::CorruptCheckpoint("non-finite coefficients".into()));
    }
    Ok((
        ElsasserState {
            w_plus,
            w_minus,
            time,
        },
        params,
    ))
}

pub fn checkpoint_write(state: &ElsasserState, params: &FluidParams, path: &Path) -> Result<()> {
    std::fs::write(path, checkpoint_to_bytes(state, params)).map_err(|e| Error::io(path, e))
}

pub fn checkpoint_read(path: &Path) -> Result<(ElsasserState, FluidParams)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    checkpoint_from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{generate_initial, make_params, to_elsasser, InitialDataSpec, InitialKind};

    fn state() -> (ElsasserState, FluidParams) {
        let spec = InitialDataSpec {
            kind: InitialKind::RandomSolenoidal,
            seed: 11,
            k0: 2,
            ..InitialDataSpec::default()
        }
        .with_magnetic(0.4, 0.3);
        let mut e = to_elsasser(&generate_initial(&spec, Grid::new(8).unwrap()).unwrap()).unwrap();
        e.time = 0.125;
        (e, make_params(3.0, 7.0, 0.5).unwrap())
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let (e, p) = state();
        let bytes = checkpoint_to_bytes(&e, &p);
        let (back, bp) = checkpoint_from_bytes(&bytes).unwrap();
        assert_eq!(back, e);
        assert_eq!(bp, p);
        assert_eq!(checkpoint_to_bytes(&back, &bp), bytes);
    }

    #[test]
    fn truncation_and_magic() {
        let (e, p) = state();
        let bytes = checkpoint_to_bytes(&e, &p);
        for cut in [0, 3, 20, bytes.len() - 1] {
            assert!(matches!(
                checkpoint_from_bytes(&bytes[..cut]),
                Err(Error::CorruptCheckpoint(_))
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            checkpoint_from_bytes(&bad),
            Err(Error::CorruptCheckpoint(_))
        ));
        let mut v2 = bytes;
        v2[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(
            checkpoint_from_bytes(&v2),
            Err(Error::UnsupportedVersion(2))
        ));
    }
}
