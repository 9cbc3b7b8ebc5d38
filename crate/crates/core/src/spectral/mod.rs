//! Fields, transforms, multipliers and norms on the torus `T × λ⁻¹T`.
//!
//! All integrals use plain Lebesgue measure on `[0, 2π) × [0, 2π/λ)`; no
//! division by the area anywhere.

mod field;
mod field1d;
mod grid;
mod ops;
pub mod snapshot;
mod transform;

pub use field::{SpectralField, D0_TOLERANCE};
pub use field1d::Field1d;
pub use grid::{sizing_rule, TorusGrid};
pub use ops::{energy_norms, galilean_1d, norms, norms_with, x_derivative, y_derivative, GalileanSign, NormReport};
pub use transform::Transform;
