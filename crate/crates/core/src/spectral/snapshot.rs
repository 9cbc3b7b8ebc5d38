//! `KP5LAB1` field snapshots.
//!
//! Layout, all little-endian: the 7-byte magic `KP5LAB1`, `nx` and `ny` as
//! `u64`, `λ` as `f64`, then `(re, im)` pairs of `f64` for the half spectrum
//! in m-major order (`m = 0..=nx/2`, and for each `m` the `ny` y-indices in
//! FFT order).

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{SpectralField, TorusGrid};
use crate::numtheory::Lambda;
use crate::{Error, Result};

pub const MAGIC: &[u8; 7] = b"KP5LAB1";

pub fn write_snapshot<W: Write>(mut w: W, u: &SpectralField) -> Result<()> {
    let g = u.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.nx() as u64).to_le_bytes())?;
    w.write_all(&(g.ny() as u64).to_le_bytes())?;
    w.write_all(&g.lambda_f64().to_le_bytes())?;
    let mut buf = Vec::with_capacity(u.coeffs().len() * 16);
    for c in u.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Reads a snapshot. `λ` must be the square root of an integer; the grid
/// gets the default 2/3 dealiasing.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<SpectralField> {
    let magic: [u8; 7] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let nx = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let ny = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let lambda = f64::from_le_bytes(read_array(&mut r)?);
    let radicand = (lambda * lambda).round();
    if !(radicand >= 1.0) || Lambda::new(radicand as u64)?.to_f64() != lambda {
        return Err(Error::Format(format!("λ = {lambda} is not the square root of an integer")));
    }
    let grid = TorusGrid::with_lambda(nx, ny, Lambda::new(radicand as u64)?)
        .map_err(|e| Error::Format(e.to_string()))?;
    let mut bytes = vec![0u8; grid.spectral_len() * 16];
    r.read_exact(&mut bytes)?;
    let coeffs = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}
