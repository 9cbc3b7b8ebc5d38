//! Explicit approximate solutions `u_{θ,n}` and their equation residual.
//!
//! ```text
//! u_{θ,n}(t) = u₁(t) + C·a·cos φ_n + S·a·sin φ_{n+1} + R(t)
//! ```
//!
//! with `a = n^{−σ}`, `C = cos(θt/2)`, `S = sin(θt/2)` and `u₁` the flow of
//! `θn⁻¹cos x`. The phases are `φ₁ = x + t`,
//! `φ_n = nx + α y + ω(n, α)t`, `φ_{n+1} = (n+1)x + α y + ω(n+1, α)t`, and
//! `φ₁ + φ_n = φ_{n+1}` because the triple is resonant.
//!
//! The corrector `R` cancels the two non-resonant products of `u₁` with the
//! high modes. [`Remainder::Corrected`] is
//!
//! ```text
//! R = (θ/2)·a·[ C·Ω₋⁻¹·cos(φ_n − φ₁) − Ω₋⁻¹·cos ψ + S·Ω₊⁻¹·sin(φ_{n+1} + φ₁) ]
//! ```
//!
//! where `ψ = (n−1)x + α y + ω(n−1, α)t` is a free wave making `R(0) = 0`.
//! [`Remainder::Literal`] drops the `θ/2` factor and the free wave,
//! [`Remainder::Omitted`] sets `R = 0`.

use num_complex::Complex64;

use crate::evolve::{embed_1d, evolve_1d_kdv5, fit_dt, EvolveConfig, Trajectory1d};
use crate::numtheory::AdmissibleIndex;
use crate::resonance::{omega, omega_npm1, to_f64, ExactRational, LatticeFrequency};
use crate::spectral::{Field1d, SpectralField, TorusGrid, Transform};
use crate::{Error, Result};

/// Largest `|ν|·t` accepted for a double-precision phase; the rounding
/// error of the phase is then below `10⁻⁷` rad.
pub const PHASE_BUDGET: f64 = 1e9;

/// Points of the 1D grid carrying the low-frequency flow.
pub const LOWFREQ_POINTS: usize = 64;

/// A linear phase `mx + λky + ωt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSpec {
    pub m: i64,
    pub k: i64,
    pub omega: ExactRational,
}

impl PhaseSpec {
    fn of(m: i64, k: i64) -> Result<Self> {
        Ok(PhaseSpec {
            m,
            k,
            omega: omega(&LatticeFrequency::new(m, k))?,
        })
    }
}

/// `(φ₁, φ_n, φ_{n+1})` for an arbitrary lattice point `(n, alpha)`. Fails
/// with [`Error::PhaseMismatch`] unless `ω(n+1, α) = ω(1, 0) + ω(n, α)`.
pub fn phase_triple(n: i64, alpha: i64) -> Result<(PhaseSpec, PhaseSpec, PhaseSpec)> {
    let p1 = PhaseSpec::of(1, 0)?;
    let pn = PhaseSpec::of(n, alpha)?;
    let pn1 = PhaseSpec::of(n + 1, alpha)?;
    let rhs = &p1.omega + &pn.omega;
    if pn1.omega != rhs {
        return Err(Error::PhaseMismatch {
            lhs: pn1.omega.to_string(),
            rhs: rhs.to_string(),
        });
    }
    Ok((p1, pn, pn1))
}

/// Exact-arithmetic version of [`phase_triple`] for any admissible index.
pub fn phases(idx: &AdmissibleIndex) -> Result<(ExactRational, ExactRational, ExactRational)> {
    let alpha = idx.alpha_index().clone();
    let w1 = omega(&LatticeFrequency::new(1, 0))?;
    let wn = omega(&LatticeFrequency::new(idx.n().clone(), alpha.clone()))?;
    let wn1 = omega(&LatticeFrequency::new(idx.n() + 1u32, alpha))?;
    let rhs = &w1 + &wn;
    if wn1 != rhs {
        return Err(Error::PhaseMismatch {
            lhs: wn1.to_string(),
            rhs: rhs.to_string(),
        });
    }
    Ok((w1, wn, wn1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Remainder {
    #[default]
    Corrected,
    Literal,
    Omitted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzParams {
    pub theta: f64,
    pub idx: AdmissibleIndex,
    pub sigma: f64,
    pub remainder: Remainder,
}

impl AnsatzParams {
    pub fn new(theta: f64, idx: AdmissibleIndex, sigma: f64) -> Result<Self> {
        if !(theta.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!("θ = {theta} must lie in [−1, 1]")));
        }
        if !(sigma >= 2.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!("σ = {sigma} must be at least 2")));
        }
        Ok(AnsatzParams {
            theta,
            idx,
            sigma,
            remainder: Remainder::Corrected,
        })
    }

    pub fn with_remainder(mut self, remainder: Remainder) -> Self {
        self.remainder = remainder;
        self
    }

    /// `n^{−σ}`.
    pub fn amplitude(&self) -> Result<f64> {
        let (n, _) = self.idx.lattice_i64()?;
        Ok((n as f64).powf(-self.sigma))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Cos,
    Sin,
}

/// `A(t)·shape(mx + λky + νt)` with its envelope derivative and the
/// detuning `ν − ω(m, k)` of its time frequency from the linear one.
#[derive(Clone, Debug, PartialEq)]
pub struct Wave {
    pub label: &'static str,
    pub m: i64,
    pub k: i64,
    pub shape: Shape,
    pub amplitude: f64,
    pub amplitude_rate: f64,
    pub phase: f64,
    pub detuning: f64,
}

impl Wave {
    fn add_to(&self, u: &mut SpectralField) -> Result<()> {
        match self.shape {
            Shape::Cos => u.add_cos(self.m, self.k, self.amplitude, self.phase),
            Shape::Sin => u.add_sin(self.m, self.k, self.amplitude, self.phase),
        }
    }

    /// Adds `(∂ₜ − L)` of the wave: `A′cos Θ − Aδ sin Θ` for a cosine,
    /// `A′sin Θ + Aδ cos Θ` for a sine.
    fn add_linear_defect(&self, u: &mut SpectralField) -> Result<()> {
        let (a, da, d) = (self.amplitude, self.amplitude_rate, self.detuning);
        match self.shape {
            Shape::Cos => {
                u.add_cos(self.m, self.k, da, self.phase)?;
                u.add_sin(self.m, self.k, -a * d, self.phase)
            }
            Shape::Sin => {
                u.add_sin(self.m, self.k, da, self.phase)?;
                u.add_cos(self.m, self.k, a * d, self.phase)
            }
        }
    }
}

fn check_phase(nu: f64, t: f64) -> Result<f64> {
    let phase = nu * t;
    if !(phase.abs() <= PHASE_BUDGET) {
        return Err(Error::PhaseBudget { phase });
    }
    Ok(phase)
}

/// Refuses parameters whose largest phase at time `t` exceeds the budget.
pub fn check_phase_budget(idx: &AdmissibleIndex, t: f64) -> Result<()> {
    let (_, _, wn1) = phases(idx)?;
    let nu = to_f64(&(wn1 + omega(&LatticeFrequency::new(1, 0))?));
    check_phase(nu, t).map(|_| ())
}

/// The high-frequency waves of `u_{θ,n}(t)` (everything except `u₁`).
pub fn waves(p: &AnsatzParams, t: f64) -> Result<Vec<Wave>> {
    check_phase_budget(&p.idx, t)?;
    let (n, alpha) = p.idx.lattice_i64()?;
    let a = p.amplitude()?;
    let th = p.theta;
    let (c, s) = ((0.5 * th * t).cos(), (0.5 * th * t).sin());
    let (dc, ds) = (-0.5 * th * s, 0.5 * th * c);
    let (w1, wn, wn1) = phases(&p.idx)?;
    let (om_minus, om_plus) = omega_npm1(&p.idx)?;
    let (om_minus, om_plus) = (to_f64(&om_minus), to_f64(&om_plus));

    let wave = |label, m: i64, k: i64, shape, amplitude: f64, amplitude_rate: f64, nu: &ExactRational| -> Result<Wave> {
        let detuning = to_f64(&(nu - omega(&LatticeFrequency::new(m, k))?));
        Ok(Wave {
            label,
            m,
            k,
            shape,
            amplitude,
            amplitude_rate,
            phase: check_phase(to_f64(nu), t)?,
            detuning,
        })
    };

    let mut out = vec![
        wave("u2", n, alpha, Shape::Cos, a * c, a * dc, &wn)?,
        wave("u3", n + 1, alpha, Shape::Sin, a * s, a * ds, &wn1)?,
    ];
    let gain = match p.remainder {
        Remainder::Omitted => return Ok(out),
        Remainder::Corrected => 0.5 * th * a,
        Remainder::Literal => a,
    };
    let below = &wn - &w1;
    let above = &wn1 + &w1;
    out.push(wave("r1", n - 1, alpha, Shape::Cos, gain * c / om_minus, gain * dc / om_minus, &below)?);
    if p.remainder == Remainder::Corrected {
        let free = omega(&LatticeFrequency::new(n - 1, alpha))?;
        out.push(wave("free", n - 1, alpha, Shape::Cos, -gain / om_minus, 0.0, &free)?);
    }
    out.push(wave("r2", n + 2, alpha, Shape::Sin, gain * s / om_plus, gain * ds / om_plus, &above)?);
    Ok(out)
}

fn check_lowfreq(p: &AnsatzParams, lowfreq: &Trajectory1d) -> Result<()> {
    let (n, _) = p.idx.lattice_i64()?;
    let u0 = lowfreq.at(0.0)?;
    let mut expected = Field1d::zeros(u0.len())?;
    expected.add_cos(1, p.theta / n as f64, 0.0)?;
    let gap = u0.sub(&expected)?.l2();
    if gap > 1e-12 * expected.l2().max(1e-300) && gap > 1e-300 {
        return Err(Error::InvalidArgument(format!(
            "low-frequency trajectory does not start at θn⁻¹cos x (gap {gap:e})"
        )));
    }
    Ok(())
}

fn require_modes(ws: &[Wave], grid: &TorusGrid) -> Result<()> {
    ws.iter().try_for_each(|w| grid.require(w.m, w.k))
}

/// `u_{θ,n}(t)` on `grid`.
pub fn build_ansatz(p: &AnsatzParams, t: f64, lowfreq: &Trajectory1d, grid: TorusGrid) -> Result<SpectralField> {
    check_lowfreq(p, lowfreq)?;
    let ws = waves(p, t)?;
    require_modes(&ws, &grid)?;
    let mut u = embed_1d(lowfreq.at(t)?, grid);
    for w in &ws {
        w.add_to(&mut u)?;
    }
    Ok(u)
}

/// `(∂ₜ − L)u_{θ,n} + u_{θ,n}∂ₓu_{θ,n}` as a field.
///
/// With `h = u_{θ,n} − u₁` and `u₁` an exact solution this equals
/// `(∂ₜ − L)h + ∂ₓ(h·(u₁ + h/2))`. The linear part is assembled wave by
/// wave; the product is formed without truncation on a grid large enough
/// to hold its whole spectrum (and at least as large as `grid`).
pub fn residual_field(p: &AnsatzParams, t: f64, lowfreq: &Trajectory1d, grid: TorusGrid) -> Result<SpectralField> {
    check_lowfreq(p, lowfreq)?;
    let ws = waves(p, t)?;
    require_modes(&ws, &grid)?;
    let u1 = lowfreq.at(t)?;

    let m_low = u1
        .coeffs()
        .iter()
        .rposition(|c| c.norm_sqr() != 0.0)
        .unwrap_or(0) as i64;
    let m_high = ws.iter().map(|w| w.m).max().unwrap_or(0);
    let k_high = ws.iter().map(|w| w.k.abs()).max().unwrap_or(0);
    let cover = TorusGrid::covering(grid.lambda(), m_high + m_high.max(m_low), 2 * k_high)?;
    let work = TorusGrid::with_lambda(cover.nx().max(grid.nx()), cover.ny().max(grid.ny()), grid.lambda())?
        .with_dealias(1, 1)?;

    let mut h = SpectralField::zeros(work);
    let mut out = SpectralField::zeros(work);
    for w in &ws {
        w.add_to(&mut h)?;
        w.add_linear_defect(&mut out)?;
    }
    let partner = embed_1d(u1, work).axpy(0.5, &h)?;

    let mut transform = Transform::new(work);
    let mut ph = vec![0.0; work.physical_len()];
    let mut pw = vec![0.0; work.physical_len()];
    transform.inverse(h.coeffs(), &mut ph);
    transform.inverse(partner.coeffs(), &mut pw);
    ph.iter_mut().zip(&pw).for_each(|(a, b)| *a *= b);
    let mut product = vec![Complex64::default(); work.spectral_len()];
    transform.forward(&ph, &mut product);

    let ny = work.ny();
    for (im, (dst, src)) in out.coeffs_mut().chunks_mut(ny).zip(product.chunks(ny)).enumerate() {
        let dx = Complex64::new(0.0, im as f64);
        for (d, s) in dst.iter_mut().zip(src) {
            *d += dx * s;
        }
    }
    Ok(out)
}

/// `‖(∂ₜ − L)u_{θ,n} + u_{θ,n}∂ₓu_{θ,n}‖_{L²}`.
pub fn residual(p: &AnsatzParams, t: f64, lowfreq: &Trajectory1d, grid: TorusGrid) -> Result<f64> {
    Ok(residual_field(p, t, lowfreq, grid)?.l2())
}

/// 1D flow of `θn⁻¹cos x` on [`LOWFREQ_POINTS`] points, logged at every
/// multiple of `sample` up to `t_end`.
pub fn lowfreq_trajectory(theta: f64, idx: &AdmissibleIndex, t_end: f64, sample: f64) -> Result<Trajectory1d> {
    let dt = fit_dt(1e-3, sample);
    let mut cfg = EvolveConfig::new(dt, t_end);
    cfg.log_every = (sample / dt).round() as usize;
    lowfreq_for(theta, idx, &cfg)
}

/// 1D flow of `θn⁻¹cos x` on the step and logging schedule of `cfg`, so
/// that its logged times coincide with those of a 2D run under `cfg`.
pub fn lowfreq_for(theta: f64, idx: &AdmissibleIndex, cfg: &EvolveConfig) -> Result<Trajectory1d> {
    let (n, _) = idx.lattice_i64()?;
    let mut u0 = Field1d::zeros(LOWFREQ_POINTS)?;
    u0.add_cos(1, theta / n as f64, 0.0)?;
    let mut cfg = cfg.clone();
    cfg.nonlinear = true;
    cfg.snapshot_every = None;
    evolve_1d_kdv5(&u0, &cfg)
}

/// `‖u₁(t) − θn⁻¹cos(x + t)‖_{L²}` on the torus `T × λ⁻¹T`.
pub fn lowfreq_gap(lowfreq: &Trajectory1d, theta: f64, n: i64, t: f64, lambda: f64) -> Result<f64> {
    let u1 = lowfreq.at(t)?;
    let mut linear = Field1d::zeros(u1.len())?;
    linear.add_cos(1, theta / n as f64, t)?;
    Ok(u1.sub(&linear)?.l2() * (2.0 * std::f64::consts::PI / lambda).sqrt())
}

/// [`lowfreq_gap`] for the flow of `θn⁻¹cos x` computed on the spot.
pub fn lemma_lowfreq_gap(theta: f64, idx: &AdmissibleIndex, t: f64) -> Result<f64> {
    if !(theta.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!("θ = {theta} must lie in [−1, 1]")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} must lie in [0, 1]")));
    }
    let (n, _) = idx.lattice_i64()?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let traj = lowfreq_trajectory(theta, idx, t, t)?;
    lowfreq_gap(&traj, theta, n, t, crate::numtheory::Lambda::KP5.to_f64())
}
