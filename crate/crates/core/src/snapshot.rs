//! Binary `KBOX` snapshot format.
//!
//! Layout (all little-endian): magic `KBOX`, format version `u32`, dimension
//! `u32`, points per axis `u32`, side `f64`, then one record per field: a
//! 4-byte tag followed by `n^d` `f64` values in row-major order. Fields are
//! written in the order `u__1 .. u__d`, `omeg`, `k___`, `p___`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::{Grid, ScalarField, VectorField};
use crate::model::State;

pub const MAGIC: &[u8; 4] = b"KBOX";
pub const FORMAT_VERSION: u32 = 1;

const OMEGA_TAG: &[u8; 4] = b"omeg";
const K_TAG: &[u8; 4] = b"k___";
const P_TAG: &[u8; 4] = b"p___";

fn velocity_tag(i: usize) -> [u8; 4] {
    [b'u', b'_', b'_', b'1' + i as u8]
}

fn write_field<W: Write>(w: &mut W, tag: &[u8; 4], f: &ScalarField) -> Result<()> {
    w.write_all(tag)?;
    let mut buf = Vec::with_capacity(8 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Serializes `state` (its time is not part of the format).
pub fn write_state<W: Write>(w: &mut W, state: &State) -> Result<()> {
    let g = state.grid();
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.side().to_le_bytes())?;
    for (i, c) in state.u.components().iter().enumerate() {
        write_field(w, &velocity_tag(i), c)?;
    }
    write_field(w, OMEGA_TAG, &state.omega)?;
    write_field(w, K_TAG, &state.k)?;
    write_field(w, P_TAG, &state.p)?;
    Ok(())
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| Error::Snapshot(format!("truncated: {e}")))?;
    Ok(b)
}

fn read_field<R: Read>(r: &mut R, grid: Grid, tag: &[u8; 4]) -> Result<ScalarField> {
    let got: [u8; 4] = read_array(r)?;
    if &got != tag {
        return Err(Error::Snapshot(format!(
            "expected field {:?}, found {:?}",
            String::from_utf8_lossy(tag),
            String::from_utf8_lossy(&got)
        )));
    }
    let mut bytes = vec![0u8; 8 * grid.len()];
    r.read_exact(&mut bytes).map_err(|e| Error::Snapshot(format!("truncated field: {e}")))?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    ScalarField::from_values(grid, values)
}

/// Reads a snapshot; the returned state carries time `t`.
pub fn read_state<R: Read>(r: &mut R, t: f64) -> Result<State> {
    let magic: [u8; 4] = read_array(r)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != FORMAT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let dim = u32::from_le_bytes(read_array(r)?) as usize;
    let n = u32::from_le_bytes(read_array(r)?) as usize;
    let side = f64::from_le_bytes(read_array(r)?);
    let grid = Grid::new(dim, n, side)?;
    let comps = (0..dim).map(|i| read_field(r, grid, &velocity_tag(i))).collect::<Result<Vec<_>>>()?;
    let u = VectorField::new(comps)?;
    let omega = read_field(r, grid, OMEGA_TAG)?;
    let k = read_field(r, grid, K_TAG)?;
    let p = read_field(r, grid, P_TAG)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Snapshot("trailing bytes".into()));
    }
    Ok(State { t, u, omega, k, p })
}

pub fn save(path: &Path, state: &State) -> Result<()> {
    let mut buf = Vec::new();
    write_state(&mut buf, state)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load(path: &Path, t: f64) -> Result<State> {
    let bytes = std::fs::read(path)?;
    read_state(&mut bytes.as_slice(), t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_state() -> State {
        let g = Grid::new(2, 4, 1.5).unwrap();
        State {
            t: 0.25,
            u: VectorField::new(vec![
                ScalarField::from_fn(g, |x| x[0] + 0.1),
                ScalarField::from_fn(g, |x| -x[1]),
            ])
            .unwrap(),
            omega: ScalarField::from_fn(g, |x| 1.0 + x[0] * x[1]),
            k: ScalarField::constant(g, 0.5),
            p: ScalarField::from_fn(g, |x| (x[0] * 3.0).sin()),
        }
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_state(&mut buf, &sample_state()).unwrap();
        assert_eq!(&buf[..4], b"KBOX");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 1.5);
        assert_eq!(&buf[24..28], b"u__1");
        assert_eq!(buf.len(), 24 + 5 * (4 + 16 * 8));
    }

    #[test]
    fn write_read_write_is_byte_identical() {
        let s = sample_state();
        let mut a = Vec::new();
        write_state(&mut a, &s).unwrap();
        let back = read_state(&mut a.as_slice(), s.t).unwrap();
        assert_eq!(back, s);
        let mut b = Vec::new();
        write_state(&mut b, &back).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_corruption() {
        let mut a = Vec::new();
        write_state(&mut a, &sample_state()).unwrap();
        let mut bad = a.clone();
        bad[0] = b'X';
        assert!(read_state(&mut bad.as_slice(), 0.0).is_err());
        let short = &a[..a.len() - 3];
        assert!(read_state(&mut &short[..], 0.0).is_err());
        let mut long = a.clone();
        long.push(0);
        assert!(read_state(&mut long.as_slice(), 0.0).is_err());
    }
}
