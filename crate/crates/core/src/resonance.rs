//! Dispersion symbols and three-wave resonance functions in exact rationals.
//!
//! A lattice frequency `(m, k)` stands for the physical frequency `(m, λk)`.
//! Every quantity below only involves `λ² = 35`, so `ω` and `Ω` are exact
//! rationals and resonance is decided without rounding.
//!
//! Fifth-order KP-I: `ω(m, n) = m⁵ + n²/m` and
//!
//! ```text
//! Ω(f₁, f₂) = ω(f₁ + f₂) − ω(f₁) − ω(f₂)
//!           = m₁m₂/(m₁+m₂) · { 5(m₁+m₂)²(m₁²+m₁m₂+m₂²) − (n₁/m₁ − n₂/m₂)² }
//! ```
//!
//! KP-II (for contrast): `ω̃(m, n) = m³ − n²/m`, whose resonance function is
//! bounded below by `|m₁m₂(m₁+m₂)|`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::numtheory::{AdmissibleIndex, Lambda};
use crate::{Error, Result};

pub type ExactRational = BigRational;

/// `(m, k)` on the dual lattice of `T × λ⁻¹T`; physical frequency `(m, λk)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeFrequency {
    pub m: BigInt,
    pub k: BigInt,
}

impl LatticeFrequency {
    pub fn new(m: impl Into<BigInt>, k: impl Into<BigInt>) -> Self {
        LatticeFrequency {
            m: m.into(),
            k: k.into(),
        }
    }

    fn sum(&self, other: &Self) -> Self {
        LatticeFrequency {
            m: &self.m + &other.m,
            k: &self.k + &other.k,
        }
    }
}

impl std::fmt::Display for LatticeFrequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.m, self.k)
    }
}

fn lambda_sq() -> BigInt {
    BigInt::from(Lambda::KP5.squared())
}

fn rational(n: BigInt) -> ExactRational {
    BigRational::from_integer(n)
}

fn check_nonzero(f: &LatticeFrequency) -> Result<()> {
    if f.m.is_zero() {
        return Err(Error::ZeroFrequency {
            m1: f.m.to_string(),
            m2: "-".into(),
        });
    }
    Ok(())
}

fn check_pair(f1: &LatticeFrequency, f2: &LatticeFrequency) -> Result<()> {
    if f1.m.is_zero() || f2.m.is_zero() || (&f1.m + &f2.m).is_zero() {
        return Err(Error::ZeroFrequency {
            m1: f1.m.to_string(),
            m2: f2.m.to_string(),
        });
    }
    Ok(())
}

/// `n²/m = 35k²/m`.
fn transverse_term(f: &LatticeFrequency) -> ExactRational {
    BigRational::new(lambda_sq() * &f.k * &f.k, f.m.clone())
}

/// KP-I symbol `ω(m, λk) = m⁵ + 35k²/m`.
pub fn omega(f: &LatticeFrequency) -> Result<ExactRational> {
    check_nonzero(f)?;
    Ok(rational(num_traits::pow(f.m.clone(), 5)) + transverse_term(f))
}

/// KP-II symbol `ω̃(m, λk) = m³ − 35k²/m`.
pub fn omega_kpii(f: &LatticeFrequency) -> Result<ExactRational> {
    check_nonzero(f)?;
    Ok(rational(num_traits::pow(f.m.clone(), 3)) - transverse_term(f))
}

/// `(n₁/m₁ − n₂/m₂)² = 35(k₁/m₁ − k₂/m₂)²`.
fn slope_gap_sq(f1: &LatticeFrequency, f2: &LatticeFrequency) -> ExactRational {
    let gap = BigRational::new(f1.k.clone(), f1.m.clone()) - BigRational::new(f2.k.clone(), f2.m.clone());
    rational(lambda_sq()) * &gap * &gap
}

fn agree(closed: ExactRational, difference: ExactRational) -> Result<ExactRational> {
    if closed != difference {
        return Err(Error::RouteMismatch {
            closed: closed.to_string(),
            difference: difference.to_string(),
        });
    }
    Ok(closed)
}

/// KP-I resonance function by the factored closed form, checked against the
/// direct symbol difference.
pub fn resonance_kpi5(f1: &LatticeFrequency, f2: &LatticeFrequency) -> Result<ExactRational> {
    check_pair(f1, f2)?;
    let (m1, m2) = (&f1.m, &f2.m);
    let s = m1 + m2;
    let prefactor = BigRational::new(m1 * m2, s.clone());
    let dispersive = rational(BigInt::from(5) * &s * &s * (m1 * m1 + m1 * m2 + m2 * m2));
    let closed = prefactor * (dispersive - slope_gap_sq(f1, f2));
    let difference = omega(&f1.sum(f2))? - omega(f1)? - omega(f2)?;
    agree(closed, difference)
}

/// KP-II resonance function, closed form checked against the symbol
/// difference.
pub fn resonance_kpii(f1: &LatticeFrequency, f2: &LatticeFrequency) -> Result<ExactRational> {
    check_pair(f1, f2)?;
    let (m1, m2) = (&f1.m, &f2.m);
    let s = m1 + m2;
    let prefactor = BigRational::new(m1 * m2, s.clone());
    let closed = prefactor * (rational(BigInt::from(3) * &s * &s) + slope_gap_sq(f1, f2));
    let difference = omega_kpii(&f1.sum(f2))? - omega_kpii(f1)? - omega_kpii(f2)?;
    agree(closed, difference)
}

/// `(Ω_{n−1}, Ω_{n+1})` with `Ω_{n±1} = ±Ω(1, 0, n±1, α(n))`.
pub fn omega_npm1(idx: &AdmissibleIndex) -> Result<(ExactRational, ExactRational)> {
    let low = LatticeFrequency::new(1, 0);
    let alpha = idx.alpha_index().clone();
    let below = LatticeFrequency::new(idx.n() - 1u32, alpha.clone());
    let above = LatticeFrequency::new(idx.n() + 1u32, alpha);
    let minus = -resonance_kpi5(&low, &below)?;
    let plus = resonance_kpi5(&low, &above)?;
    Ok((minus, plus))
}

/// An exactly resonant pair `Ω(f₁, f₂) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonantPair {
    pub f1: LatticeFrequency,
    pub f2: LatticeFrequency,
    pub omega: ExactRational,
}

/// Integer form of `Ω = 0`: the bracket of the closed form times `m₁²m₂²`,
/// `5(m₁+m₂)²(m₁²+m₁m₂+m₂²)m₁²m₂² = 35(k₁m₂ − k₂m₁)²`.
fn resonant_i128(m1: i128, k1: i128, m2: i128, k2: i128) -> bool {
    let s = m1 + m2;
    let lhs = 5 * s * s * (m1 * m1 + m1 * m2 + m2 * m2) * m1 * m1 * m2 * m2;
    let cross = k1 * m2 - k2 * m1;
    lhs == 35 * cross * cross
}

/// Every pair with `|m| ≤ max_m`, `|k| ≤ max_k`, nonzero non-cancelling
/// x-frequencies, and `Ω = 0` exactly. Ordered lexicographically in
/// `(m₁, k₁, m₂, k₂)`.
pub fn resonance_search(max_m: u32, max_k: u32) -> Result<Vec<ResonantPair>> {
    if max_m == 0 {
        return Err(Error::InvalidArgument("max_m must be at least 1".into()));
    }
    let (mm, kk) = (max_m as i128, max_k as i128);
    let ms: Vec<i128> = (-mm..=mm).filter(|&m| m != 0).collect();
    let mut out = Vec::new();
    for &m1 in &ms {
        for k1 in -kk..=kk {
            for &m2 in &ms {
                if m1 + m2 == 0 {
                    continue;
                }
                for k2 in -kk..=kk {
                    if resonant_i128(m1, k1, m2, k2) {
                        let f1 = LatticeFrequency::new(m1 as i64, k1 as i64);
                        let f2 = LatticeFrequency::new(m2 as i64, k2 as i64);
                        let omega = resonance_kpi5(&f1, &f2)?;
                        debug_assert!(omega.is_zero());
                        out.push(ResonantPair { f1, f2, omega });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Lossy conversion for the floating-point side of the laboratory.
pub fn to_f64(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
