//! Numerical laboratory for the periodic fifth-order KP-I equation
//!
//! ```text
//! ∂ₜu − ∂ₓ⁵u − ∂ₓ⁻¹∂ᵧ²u + u∂ₓu = 0   on   T × λ⁻¹T,  λ = √35
//! ```
//!
//! The crate is split along the data flow of the experiments:
//!
//! * [`numtheory`] picks the torus period and generates the admissible
//!   high frequencies `n` from a Pell-type hyperbola, in exact integers.
//! * [`resonance`] evaluates the dispersion symbol and the three-wave
//!   resonance function as exact rationals.
//! * [`spectral`] holds fields on the torus, Fourier multipliers, norms and
//!   the snapshot file format.
//! * [`evolve`] integrates the equation (and its y-independent reduction)
//!   with an integrating-factor RK4 scheme.
//! * [`ansatz`] builds the explicit two-mode approximate solutions and
//!   measures how well they solve the equation.

pub mod ansatz;
pub mod error;
pub mod evolve;
pub mod numtheory;
pub mod resonance;
pub mod spectral;

pub use error::{Error, Result};
