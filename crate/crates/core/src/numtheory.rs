//! Exact integer machinery for the torus period.
//!
//! The resonance `Ω(1,0,n,α(n)) = 0` forces `α(n) = n(n+1)√(5(n²+n+1))`.
//! On the torus `T × λ⁻¹T` with `λ = √(5ℓ)` this is a lattice point exactly
//! when `n² + n + 1 = ℓ·n₁²`, i.e. when `(X, Y) = (2n+1, 2n₁)` solves
//!
//! ```text
//! X² − ℓY² = −3.
//! ```
//!
//! All solutions of that hyperbola are seeds multiplied by powers of the
//! fundamental unit of `ℤ[√ℓ]`; we keep the ones with `X` odd and `Y` even.
//! Everything here is arbitrary-precision integer arithmetic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// The hyperbola right-hand side `X² − ℓY² = −3`.
const HYPERBOLA_RHS: i64 = -3;

/// Coefficient `ℓ` used throughout the laboratory: `λ = √(5·7) = √35`.
pub const ELL: u64 = 7;

/// `λ = √radicand`, kept symbolic so that `λ²` stays an integer in exact
/// computations. Converted to `f64` only at the spectral grid boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lambda {
    radicand: u64,
}

impl Lambda {
    /// `λ = √35`.
    pub const KP5: Lambda = Lambda { radicand: 35 };

    pub fn new(radicand: u64) -> Result<Self> {
        if radicand == 0 {
            return Err(Error::InvalidArgument("λ² must be positive".into()));
        }
        Ok(Lambda { radicand })
    }

    /// `λ = √(5ℓ)`.
    pub fn from_ell(ell: u64) -> Result<Self> {
        Lambda::new(5 * ell)
    }

    /// `λ²` as an exact integer.
    pub fn squared(&self) -> u64 {
        self.radicand
    }

    pub fn to_f64(&self) -> f64 {
        (self.radicand as f64).sqrt()
    }
}

impl Default for Lambda {
    fn default() -> Self {
        Lambda::KP5
    }
}

/// A point on `X² − ℓY² = −3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PellSolution {
    pub x: BigInt,
    pub y: BigInt,
    pub ell: u64,
}

impl PellSolution {
    pub fn norm(&self) -> BigInt {
        &self.x * &self.x - BigInt::from(self.ell) * &self.y * &self.y
    }

    /// `(X + Y√ℓ)(u + v√ℓ)`. Preserves the norm when `u² − ℓv² = 1`.
    pub fn compose(&self, unit: &FundamentalUnit) -> PellSolution {
        let ell = BigInt::from(self.ell);
        PellSolution {
            x: &self.x * &unit.u + &ell * &self.y * &unit.v,
            y: &self.x * &unit.v + &self.y * &unit.u,
            ell: self.ell,
        }
    }
}

/// Fundamental solution of `u² − ℓv² = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub u: BigInt,
    pub v: BigInt,
    pub ell: u64,
}

/// A high frequency `n` for which `α(n) = λ·alpha_index` is on the lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleIndex {
    n: BigInt,
    n1: BigInt,
    alpha_index: BigInt,
}

impl AdmissibleIndex {
    /// Checks `n² + n + 1 = 7·n₁²` and derives the witness.
    pub fn new(n: u64) -> Result<Self> {
        let n = BigInt::from(n);
        let value = &n * &n + &n + 1u32;
        let not_admissible = || Error::NotAdmissible {
            n: n.to_string(),
            value: value.to_string(),
        };
        if n.is_zero() {
            return Err(not_admissible());
        }
        let (q, r) = value.div_rem(&BigInt::from(ELL));
        if !r.is_zero() {
            return Err(not_admissible());
        }
        let n1 = q.sqrt();
        if &n1 * &n1 != q {
            return Err(not_admissible());
        }
        Ok(Self::from_witness(n, n1))
    }

    fn from_witness(n: BigInt, n1: BigInt) -> Self {
        let alpha_index = &n * (&n + 1u32) * &n1;
        AdmissibleIndex { n, n1, alpha_index }
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn n1(&self) -> &BigInt {
        &self.n1
    }

    /// `α(n) / λ = n(n+1)n₁`.
    pub fn alpha_index(&self) -> &BigInt {
        &self.alpha_index
    }

    /// `(X, Y) = (2n+1, 2n₁)`.
    pub fn hyperbola_point(&self) -> PellSolution {
        PellSolution {
            x: BigInt::from(2) * &self.n + 1u32,
            y: BigInt::from(2) * &self.n1,
            ell: ELL,
        }
    }

    /// `n` as a machine integer, when it fits.
    pub fn n_i64(&self) -> Option<i64> {
        self.n.to_i64()
    }

    pub fn alpha_index_i64(&self) -> Option<i64> {
        self.alpha_index.to_i64()
    }

    /// Both lattice coordinates as machine integers, or an error naming the
    /// overflow.
    pub fn lattice_i64(&self) -> Result<(i64, i64)> {
        match (self.n_i64(), self.alpha_index_i64()) {
            (Some(n), Some(a)) => Ok((n, a)),
            _ => Err(Error::InvalidArgument(format!(
                "admissible index n = {} is too large for floating-point work",
                self.n
            ))),
        }
    }
}

fn is_perfect_square(x: u64) -> bool {
    let r = x.sqrt();
    r * r == x
}

fn is_squarefree(x: u64) -> bool {
    let mut d = 2u64;
    while d * d <= x {
        if x % (d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Fundamental solution of `u² − ℓv² = 1` from the continued fraction of
/// `√ℓ`: the first convergent `p/q` with `p² − ℓq² = 1`.
pub fn pell_fundamental(ell: u64) -> Result<FundamentalUnit> {
    if ell < 2 {
        return Err(Error::InvalidArgument(format!("ℓ must be at least 2, got {ell}")));
    }
    if is_perfect_square(ell) {
        return Err(Error::PerfectSquare { ell });
    }
    if !is_squarefree(ell) {
        return Err(Error::NotSquarefree { ell });
    }

    let a0 = ell.sqrt();
    let big_ell = BigInt::from(ell);
    // Continued fraction state: √ℓ = a0 + ..., with (m, d, a) recurrence.
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::from(a0));
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        if &p * &p - &big_ell * &q * &q == BigInt::one() {
            return Ok(FundamentalUnit { u: p, v: q, ell });
        }
        m = d * a - m;
        d = (ell - m * m) / d;
        a = (a0 + m) / d;
        let p_next = BigInt::from(a) * &p + &p_prev;
        let q_next = BigInt::from(a) * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}

/// Representatives of every class of solutions to `X² − ℓY² = −3`.
///
/// Uses the classical bound for negative right-hand sides,
/// `0 < Y ≤ v·√3 / √(2(u − 1))`, and returns both signs of `X`. Every
/// solution is `±seed·unitᵏ` for one of these seeds and some `k ∈ ℤ`.
pub fn hyperbola_seeds(unit: &FundamentalUnit) -> Vec<PellSolution> {
    let ell = BigInt::from(unit.ell);
    let rhs = BigInt::from(HYPERBOLA_RHS);
    // Y² ≤ 3v² / (2(u − 1))
    let y_sq_max = BigInt::from(-HYPERBOLA_RHS) * &unit.v * &unit.v / (BigInt::from(2) * (&unit.u - 1u32));
    let y_max = y_sq_max.sqrt();

    // Both orderings of each candidate pair are tried; only genuine points
    // of the hyperbola survive.
    let mut seeds = BTreeSet::new();
    let mut y = BigInt::one();
    while y <= y_max {
        let x_sq = &rhs + &ell * &y * &y;
        if !x_sq.is_negative() {
            let x = x_sq.sqrt();
            if &x * &x == x_sq {
                for (a, b) in [(x.clone(), y.clone()), (y.clone(), x.clone())] {
                    for sign in [1, -1] {
                        let candidate = PellSolution {
                            x: &a * sign,
                            y: b.clone(),
                            ell: unit.ell,
                        };
                        if candidate.norm() == rhs {
                            seeds.insert(candidate);
                        }
                    }
                }
            }
        }
        y += 1u32;
    }
    seeds.into_iter().collect()
}

/// The first `count` admissible indices for `ℓ = 7`, increasing in `n`.
pub fn generate_admissible(count: usize) -> Result<Vec<AdmissibleIndex>> {
    generate_admissible_for(ELL, count)
}

/// Admissible indices for a general `ℓ` (`n² + n + 1 = ℓ·n₁²`).
pub fn generate_admissible_for(ell: u64, count: usize) -> Result<Vec<AdmissibleIndex>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let unit = pell_fundamental(ell)?;
    let seeds = hyperbola_seeds(&unit);
    if seeds.is_empty() {
        return Err(Error::InvalidArgument(format!("X² − {ell}Y² = −3 has no integer solution")));
    }

    // Each orbit seed·unitᵏ is increasing once positive, so walking every
    // orbit up to a common bound on X and sorting gives the exact prefix.
    let mut bound = BigInt::from(1_000u32);
    loop {
        let mut found = BTreeSet::new();
        let mut saw_positive = 0usize;
        for seed in &seeds {
            let mut point = seed.clone();
            // Negative seeds need at least one unit multiplication to turn
            // positive; a few extra steps are harmless.
            let mut guard = 0;
            while point.x <= bound && guard < 10_000 {
                if point.x.is_positive() && point.y.is_positive() {
                    saw_positive += 1;
                    if point.x.is_odd() && point.y.is_even() {
                        let n: BigInt = (&point.x - 1u32) / 2u32;
                        let n1: BigInt = &point.y / 2u32;
                        if n.is_positive() {
                            found.insert(AdmissibleIndex::from_witness(n, n1));
                        }
                    }
                }
                point = point.compose(&unit);
                guard += 1;
            }
        }
        if found.len() >= count {
            return Ok(found.into_iter().take(count).collect());
        }
        // Parity of (X, Y) along an orbit is periodic with period at most 3.
        if found.is_empty() && saw_positive > 8 * seeds.len() {
            return Err(Error::InvalidArgument(format!(
                "no solution of X² − {ell}Y² = −3 has X odd and Y even"
            )));
        }
        bound = &bound * &bound;
    }
}

/// Direct scan of `n = 1..=limit` for `n² + n + 1 = 7·(perfect square)`.
/// Independent of the Pell machinery; used as its oracle.
pub fn brute_force_admissible(limit: u64) -> Vec<AdmissibleIndex> {
    (1..=limit)
        .filter_map(|n| {
            let n = n as u128;
            let value = n * n + n + 1;
            if value % 7 != 0 {
                return None;
            }
            let q = value / 7;
            let r = q.sqrt();
            (r * r == q).then(|| AdmissibleIndex::from_witness(BigInt::from(n), BigInt::from(r)))
        })
        .collect()
}
