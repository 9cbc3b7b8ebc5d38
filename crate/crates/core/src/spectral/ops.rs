//! Fourier multipliers, energy norms and the Galilean transformation.

use num_complex::Complex64;

use super::{Field1d, SpectralField, Transform};
use crate::{Error, Result};

/// `∂ₓ^order` for integer `order ≥ −1`, multiplier `(im)^order`.
///
/// `order = −1` is only defined on `D₀′`; the `m = 0` column must carry no
/// more than the `D₀′` tolerance of the energy and is then dropped.
pub fn x_derivative(u: &SpectralField, order: i32) -> Result<SpectralField> {
    if order < -1 {
        return Err(Error::InvalidArgument(format!("x-derivative order {order} is below −1")));
    }
    if order == 0 {
        return Ok(u.clone());
    }
    if order < 0 {
        u.check_d0()?;
    }
    let base = u.project_d0();
    Ok(base.map_modes(|m, _| {
        if m == 0 {
            Complex64::default()
        } else {
            Complex64::new(0.0, m as f64).powi(order)
        }
    }))
}

/// `∂ᵧ`, multiplier `iλk`.
pub fn y_derivative(u: &SpectralField) -> SpectralField {
    let lam = u.grid().lambda_f64();
    u.map_modes(|_, k| Complex64::new(0.0, lam * k as f64))
}

/// Norms and energy of a field in `D₀′`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct NormReport {
    pub l2: f64,
    /// `‖u‖_{E²}`: L², `∂ₓ²` and `∂ₓ⁻¹∂ᵧ` parts.
    pub e2: f64,
    /// `‖u‖_{E^σ}`: L², `∂ₓ^σ`, `∂ₓ⁻¹∂ᵧ` and `∂ₓ^{σ−3}∂ᵧ` parts.
    pub e_sigma: f64,
    /// `½‖∂ₓ²u‖² + ½‖∂ₓ⁻¹∂ᵧu‖² − ⅙∫u³`.
    pub hamiltonian: f64,
    /// `‖∂ₓ^σ u‖_{L²}` on its own.
    pub dx_sigma: f64,
    pub sigma: f64,
}

/// Quadratic parts of the norms, all computed from the spectrum.
struct Quadratic {
    l2_sq: f64,
    dx2_sq: f64,
    dxs_sq: f64,
    anti_sq: f64,
    mixed_sq: f64,
}

fn quadratic_parts(u: &SpectralField, sigma: f64) -> Quadratic {
    let area = u.grid().area();
    let lam_sq = u.grid().lambda_sq();
    let mut q = Quadratic {
        l2_sq: 0.0,
        dx2_sq: 0.0,
        dxs_sq: 0.0,
        anti_sq: 0.0,
        mixed_sq: 0.0,
    };
    // The m = 0 column contributes only to L² (it is zero on D₀′).
    let ny = u.grid().ny();
    let nyq = u.grid().mx_len() - 1;
    for (im, row) in u.coeffs().chunks(ny).enumerate() {
        let mult = if im == 0 || im == nyq { 1.0 } else { 2.0 };
        let m = im as f64;
        for (ik, c) in row.iter().enumerate() {
            let e = c.norm_sqr();
            if e == 0.0 {
                continue;
            }
            let e = mult * e;
            q.l2_sq += e;
            if im == 0 {
                continue;
            }
            let k = u.grid().k_of(ik) as f64;
            let ky_sq = lam_sq * k * k;
            q.dx2_sq += m.powi(4) * e;
            q.dxs_sq += m.powf(2.0 * sigma) * e;
            q.anti_sq += ky_sq / (m * m) * e;
            q.mixed_sq += m.powf(2.0 * (sigma - 3.0)) * ky_sq * e;
        }
    }
    for v in [&mut q.l2_sq, &mut q.dx2_sq, &mut q.dxs_sq, &mut q.anti_sq, &mut q.mixed_sq] {
        *v *= area;
    }
    q
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 2.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("σ = {sigma} must be at least 2")));
    }
    Ok(())
}

/// All norms including the Hamiltonian. The cubic term is a grid quadrature,
/// exact for dealiased fields.
pub fn norms(u: &SpectralField, sigma: f64) -> Result<NormReport> {
    let mut transform = Transform::new(*u.grid());
    norms_with(&mut transform, u, sigma)
}

/// [`norms`] reusing a transform plan.
pub fn norms_with(transform: &mut Transform, u: &SpectralField, sigma: f64) -> Result<NormReport> {
    let mut report = energy_norms(u, sigma)?;
    let grid = u.grid();
    let mut phys = vec![0.0; grid.physical_len()];
    transform.inverse(u.coeffs(), &mut phys);
    let cubic: f64 = phys.iter().map(|v| v * v * v).sum::<f64>() * grid.area() / grid.physical_len() as f64;
    let q = quadratic_parts(u, sigma);
    report.hamiltonian = 0.5 * q.dx2_sq + 0.5 * q.anti_sq - cubic / 6.0;
    Ok(report)
}

/// Norms without the Hamiltonian; no transform needed.
pub fn energy_norms(u: &SpectralField, sigma: f64) -> Result<NormReport> {
    check_sigma(sigma)?;
    u.check_d0()?;
    let q = quadratic_parts(u, sigma);
    Ok(NormReport {
        l2: q.l2_sq.sqrt(),
        e2: (q.l2_sq + q.dx2_sq + q.anti_sq).sqrt(),
        e_sigma: (q.l2_sq + q.dxs_sq + q.anti_sq + q.mixed_sq).sqrt(),
        hamiltonian: 0.0,
        dx_sigma: q.dxs_sq.sqrt(),
        sigma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GalileanSign {
    Plus,
    Minus,
}

impl GalileanSign {
    fn value(self) -> f64 {
        match self {
            GalileanSign::Plus => 1.0,
            GalileanSign::Minus => -1.0,
        }
    }
}

/// `G_t^±(u₀) = u₀(· ± t·mean(u₀)) ∓ mean(u₀)`, with the translation done as
/// a phase `exp(±imt·mean)`.
pub fn galilean_1d(u0: &Field1d, t: f64, sign: GalileanSign) -> Field1d {
    let s = sign.value();
    let mean = u0.mean();
    let mut out = u0.translate(s * t * mean);
    out.add_constant(-s * mean);
    out
}
