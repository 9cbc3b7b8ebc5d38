use std::f64::consts::PI;

use num_traits::ToPrimitive;

use crate::numtheory::{AdmissibleIndex, Lambda};
use crate::{Error, Result};

/// Discretization of `[0, 2π) × [0, 2π/λ)`.
///
/// Spectral coefficients are stored on the half spectrum `m = 0..=nx/2`
/// (the field is real) times all `ny` y-indices in FFT order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    nx: usize,
    ny: usize,
    lambda: Lambda,
    dealias: (u32, u32),
}

/// Largest `nx·ny` accepted.
pub const MAX_POINTS: usize = 1 << 28;

fn check_size(name: &str, n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "{name} = {n} must be a power of two and at least 8"
        )));
    }
    Ok(())
}

impl TorusGrid {
    /// `λ = √35` with 2/3 dealiasing.
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        Self::with_lambda(nx, ny, Lambda::KP5)
    }

    pub fn with_lambda(nx: usize, ny: usize, lambda: Lambda) -> Result<Self> {
        check_size("nx", nx)?;
        check_size("ny", ny)?;
        if nx.checked_mul(ny).map_or(true, |p| p > MAX_POINTS) {
            return Err(Error::InvalidArgument(format!("grid {nx}×{ny} exceeds {MAX_POINTS} points")));
        }
        Ok(TorusGrid {
            nx,
            ny,
            lambda,
            dealias: (2, 3),
        })
    }

    /// Retain `|m| ≤ (num/den)·nx/2`. `num/den = 1` keeps every mode below
    /// the Nyquist frequency.
    pub fn with_dealias(mut self, num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidArgument(format!("dealias fraction {num}/{den} must lie in (0, 1]")));
        }
        self.dealias = (num, den);
        Ok(self)
    }

    /// Sizing rule for an admissible index: `nx ≥ 8(n+2)` and
    /// `ny ≥ 4·alpha_index`, both rounded up to powers of two.
    pub fn for_admissible(idx: &AdmissibleIndex) -> Result<Self> {
        let (n, alpha) = idx.lattice_i64()?;
        let size = |v: i64, f: usize| (v as usize).checked_mul(f).and_then(usize::checked_next_power_of_two);
        match (size(n + 2, 8), size(alpha, 4)) {
            (Some(nx), Some(ny)) => Self::new(nx.max(8), ny.max(8)),
            _ => Err(Error::InvalidArgument(format!("no grid fits n = {n}"))),
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }

    /// `λ²` as a float; exact because it is a small integer.
    pub fn lambda_sq(&self) -> f64 {
        self.lambda.squared() as f64
    }

    pub fn dealias(&self) -> (u32, u32) {
        self.dealias
    }

    pub fn lx(&self) -> f64 {
        2.0 * PI
    }

    pub fn ly(&self) -> f64 {
        2.0 * PI / self.lambda_f64()
    }

    /// Lebesgue measure of the torus, `4π²/λ`.
    pub fn area(&self) -> f64 {
        self.lx() * self.ly()
    }

    /// Number of stored x-modes, `nx/2 + 1`.
    pub fn mx_len(&self) -> usize {
        self.nx / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.mx_len() * self.ny
    }

    pub fn physical_len(&self) -> usize {
        self.nx * self.ny
    }

    /// Largest retained `|m|`.
    pub fn m_max(&self) -> i64 {
        let (num, den) = self.dealias;
        let m = (num as usize * self.nx) / (2 * den as usize);
        m.min(self.nx / 2 - 1) as i64
    }

    /// Largest retained `|k|`.
    pub fn k_max(&self) -> i64 {
        let (num, den) = self.dealias;
        let k = (num as usize * self.ny) / (2 * den as usize);
        k.min(self.ny / 2 - 1) as i64
    }

    /// Signed y-index stored at FFT position `ik`.
    pub fn k_of(&self, ik: usize) -> i64 {
        if ik < self.ny / 2 {
            ik as i64
        } else {
            ik as i64 - self.ny as i64
        }
    }

    /// FFT position of `k`, if representable.
    pub fn ik_of(&self, k: i64) -> Option<usize> {
        let half = (self.ny / 2) as i64;
        if k >= -half && k < half {
            Some(k.rem_euclid(self.ny as i64) as usize)
        } else {
            None
        }
    }

    pub fn retains(&self, m: i64, k: i64) -> bool {
        m.abs() <= self.m_max() && k.abs() <= self.k_max()
    }

    /// Fails unless `(m, k)` is inside the retained region.
    pub fn require(&self, m: i64, k: i64) -> Result<()> {
        if self.retains(m, k) {
            Ok(())
        } else {
            Err(Error::ModeOutsideGrid {
                m,
                k,
                nx: self.nx,
                ny: self.ny,
            })
        }
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.lx() * ix as f64 / self.nx as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.ly() * iy as f64 / self.ny as f64
    }

    /// Smallest power-of-two grid that represents, without aliasing, a
    /// product whose spectrum reaches `|m| ≤ m_reach`, `|k| ≤ k_reach`.
    pub fn covering(lambda: Lambda, m_reach: i64, k_reach: i64) -> Result<Self> {
        let size = |reach: i64| (2 * reach.max(0) as usize + 2).next_power_of_two().max(8);
        TorusGrid::with_lambda(size(m_reach), size(k_reach), lambda)?.with_dealias(1, 1)
    }
}

/// The sizing rule as plain numbers, for reporting.
pub fn sizing_rule(idx: &AdmissibleIndex) -> Option<(usize, usize)> {
    let n = idx.n().to_usize()?;
    let alpha = idx.alpha_index().to_usize()?;
    Some(((8 * (n + 2)).next_power_of_two(), (4 * alpha).next_power_of_two()))
}
