//! Integrating-factor RK4 for the 2D equation and its y-independent
//! reduction `∂ₜu = ∂ₓ⁵u − u∂ₓu`.
//!
//! In Fourier variables `∂ₜû = iωû + N̂(u)` with `N(u) = −½∂ₓ(u²)`. The
//! linear factor `exp(iω·dt/2)` is applied exactly; only `N` is discretized.
//! Products are formed on the physical grid and truncated to the retained
//! region, which keeps them alias-free there.

use num_complex::Complex64;

use crate::spectral::{norms_with, Field1d, NormReport, SpectralField, TorusGrid, Transform};
use crate::{Error, Result};

/// Post-step tolerance for the `D₀′` and Hermitian invariants.
pub const INVARIANT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record norms every this many steps (and at `t = 0`).
    pub log_every: usize,
    /// Fail when the relative L² drift exceeds `l2_tolerance`.
    pub conserve_check: bool,
    pub l2_tolerance: f64,
    /// Abort once `‖u‖_{E^σ}` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    pub sigma: f64,
    pub nonlinear: bool,
    /// Keep a copy of the field every this many steps.
    pub snapshot_every: Option<usize>,
    /// Run transforms on the ambient rayon pool.
    pub parallel: bool,
}

impl EvolveConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        EvolveConfig {
            dt,
            t_end,
            log_every: 1,
            conserve_check: false,
            l2_tolerance: 1e-8,
            blowup_factor: 10.0,
            sigma: 2.0,
            nonlinear: true,
            snapshot_every: None,
            parallel: false,
        }
    }

    /// Number of steps; `t_end` must be a whole number of steps.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidArgument(format!("t_end = {} must be positive", self.t_end)));
        }
        if self.dt > self.t_end {
            return Err(Error::InvalidArgument(format!("dt = {} exceeds t_end = {}", self.dt, self.t_end)));
        }
        if self.log_every == 0 {
            return Err(Error::InvalidArgument("log_every must be at least 1".into()));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(Error::InvalidArgument(format!(
                "t_end = {} is not a whole number of steps dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }
}

/// `min(10⁻³, 0.5/(max|u|·m_max))`.
pub fn recommended_dt(max_abs: f64, m_max: i64) -> f64 {
    let transport = 0.5 / (max_abs * m_max.max(1) as f64);
    if transport.is_finite() {
        transport.min(1e-3)
    } else {
        1e-3
    }
}

/// Largest step not above `dt_max` that divides `interval` evenly.
pub fn fit_dt(dt_max: f64, interval: f64) -> f64 {
    interval / (interval / dt_max - 1e-9).ceil().max(1.0)
}

struct Workspace {
    stage: Vec<Complex64>,
    nl: Vec<Complex64>,
    acc: Vec<Complex64>,
}

impl Workspace {
    fn new(len: usize) -> Self {
        Workspace {
            stage: vec![Complex64::default(); len],
            nl: vec![Complex64::default(); len],
            acc: vec![Complex64::default(); len],
        }
    }
}

/// One IF-RK4 step of `v' = E(t)·N(E(−t)v)` written in the original
/// variable. `e[i] = exp(iω_i·dt/2)`; `nonlinear` writes `N̂(v)` into its
/// second argument.
fn if_rk4<F>(u: &mut [Complex64], e: &[Complex64], dt: f64, ws: &mut Workspace, nonlinear: Option<F>)
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let Some(mut nonlinear) = nonlinear else {
        for (ui, ei) in u.iter_mut().zip(e) {
            *ui *= ei * ei;
        }
        return;
    };
    let Workspace { stage, nl, acc } = ws;
    let sixth = 1.0 / 6.0;

    nonlinear(u, nl);
    for i in 0..u.len() {
        let k1 = nl[i] * dt;
        acc[i] = e[i] * e[i] * k1;
        stage[i] = e[i] * (u[i] + k1 * 0.5);
    }
    nonlinear(stage, nl);
    for i in 0..u.len() {
        let k2 = nl[i] * dt;
        acc[i] += e[i] * k2 * 2.0;
        stage[i] = e[i] * u[i] + k2 * 0.5;
    }
    nonlinear(stage, nl);
    for i in 0..u.len() {
        let k3 = nl[i] * dt;
        acc[i] += e[i] * k3 * 2.0;
        stage[i] = e[i] * (e[i] * u[i] + k3);
    }
    nonlinear(stage, nl);
    for i in 0..u.len() {
        let k4 = nl[i] * dt;
        u[i] = e[i] * e[i] * u[i] + (acc[i] + k4) * sixth;
    }
}

/// `ω(m, λk) = m⁵ + λ²k²/m` in floating point.
fn omega_f64(m: i64, k: i64, lambda_sq: f64) -> f64 {
    let m = m as f64;
    let k = k as f64;
    m.powi(5) + lambda_sq * k * k / m
}

/// Relative `D₀′` and Hermitian defects of a half spectrum.
fn invariant_defects(grid: &TorusGrid, c: &[Complex64]) -> (f64, f64) {
    let ny = grid.ny();
    let nyq = grid.mx_len() - 1;
    let mut total = 0.0;
    let mut scale: f64 = 0.0;
    for (im, row) in c.chunks(ny).enumerate() {
        let mult = if im == 0 || im == nyq { 1.0 } else { 2.0 };
        for v in row {
            let e = v.norm_sqr();
            total += mult * e;
            scale = scale.max(e);
        }
    }
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let zero_row: f64 = c[..ny].iter().map(|v| v.norm_sqr()).sum();
    let mut herm: f64 = 0.0;
    for base in [0, nyq * ny] {
        for ik in 0..ny {
            let jk = (ny - ik) % ny;
            herm = herm.max((c[base + ik] - c[base + jk].conj()).norm());
        }
    }
    (zero_row / total, herm / scale.sqrt())
}

/// Stepper for the 2D equation holding its transform plan and buffers.
pub struct Integrator {
    u: SpectralField,
    transform: Transform,
    e_half: Vec<Complex64>,
    ws: Workspace,
    phys: Vec<f64>,
    dt: f64,
    steps: usize,
    nonlinear: bool,
}

impl std::fmt::Debug for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Integrator")
            .field("grid", self.u.grid())
            .field("dt", &self.dt)
            .field("steps", &self.steps)
            .field("nonlinear", &self.nonlinear)
            .finish()
    }
}

impl Integrator {
    /// `u0` must lie in `D₀′` with no energy outside the retained region.
    pub fn new(u0: SpectralField, dt: f64, nonlinear: bool) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
        }
        u0.check_d0()?;
        let grid = *u0.grid();
        if let Some(&(m, k, _)) = u0.support().iter().find(|(m, k, _)| !grid.retains(*m, *k)) {
            return Err(Error::ModeOutsideGrid {
                m,
                k,
                nx: grid.nx(),
                ny: grid.ny(),
            });
        }
        let ny = grid.ny();
        let lambda_sq = grid.lambda_sq();
        let (m_max, k_max) = (grid.m_max(), grid.k_max());
        let mut e_half = vec![Complex64::default(); grid.spectral_len()];
        for (im, row) in e_half.chunks_mut(ny).enumerate() {
            let m = im as i64;
            if m == 0 || m > m_max {
                continue;
            }
            for (ik, e) in row.iter_mut().enumerate() {
                let k = grid.k_of(ik);
                if k.abs() <= k_max {
                    *e = Complex64::from_polar(1.0, 0.5 * dt * omega_f64(m, k, lambda_sq));
                }
            }
        }
        Ok(Integrator {
            transform: Transform::new(grid),
            ws: Workspace::new(grid.spectral_len()),
            phys: vec![0.0; grid.physical_len()],
            u: u0,
            e_half,
            dt,
            steps: 0,
            nonlinear,
        })
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.transform = Transform::new(*self.u.grid()).parallel(on);
        self
    }

    pub fn field(&self) -> &SpectralField {
        &self.u
    }

    pub fn into_field(self) -> SpectralField {
        self.u
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    /// `steps·dt`, without accumulated rounding.
    pub fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn step(&mut self) -> Result<()> {
        let grid = *self.u.grid();
        let (ny, m_max, k_max) = (grid.ny(), grid.m_max(), grid.k_max());
        let Integrator {
            u,
            transform,
            e_half,
            ws,
            phys,
            dt,
            nonlinear,
            ..
        } = self;
        let rhs = |v: &[Complex64], out: &mut [Complex64]| {
            transform.inverse(v, phys);
            phys.iter_mut().for_each(|p| *p *= *p);
            transform.forward_limited(phys, out, m_max as usize);
            for (im, row) in out.chunks_mut(ny).take(m_max as usize + 1).enumerate() {
                let factor = Complex64::new(0.0, -0.5 * im as f64);
                for (ik, c) in row.iter_mut().enumerate() {
                    if grid.k_of(ik).abs() > k_max {
                        *c = Complex64::default();
                    } else {
                        *c *= factor;
                    }
                }
            }
        };
        if_rk4(u.coeffs_mut(), e_half, *dt, ws, (*nonlinear).then_some(rhs));
        self.steps += 1;

        let (d0, herm) = invariant_defects(&grid, self.u.coeffs());
        if !(d0 <= INVARIANT_TOLERANCE) {
            return Err(Error::ConstraintViolation {
                fraction: d0,
                tolerance: INVARIANT_TOLERANCE,
            });
        }
        if !(herm <= INVARIANT_TOLERANCE) {
            return Err(Error::HermitianViolation { defect: herm });
        }
        Ok(())
    }

    pub fn norms(&mut self, sigma: f64) -> Result<NormReport> {
        norms_with(&mut self.transform, &self.u, sigma)
    }
}

/// One IF-RK4 step of size `dt`.
pub fn step_if_rk4(u: &SpectralField, dt: f64, nonlinear: bool) -> Result<SpectralField> {
    let mut stepper = Integrator::new(u.clone(), dt, nonlinear)?;
    stepper.step()?;
    Ok(stepper.into_field())
}

fn relative_drift(values: impl Iterator<Item = f64>) -> f64 {
    let mut first = None;
    let mut worst: f64 = 0.0;
    for v in values {
        let v0 = *first.get_or_insert(v);
        let d = if v0 != 0.0 { (v - v0).abs() / v0.abs() } else { v.abs() };
        worst = worst.max(d);
    }
    worst
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norm_history: Vec<NormReport>,
    pub snapshots: Vec<(f64, SpectralField)>,
    pub final_field: SpectralField,
    pub dt: f64,
}

impl Trajectory {
    /// Largest `|L²(t) − L²(0)|/L²(0)` over the logged times.
    pub fn max_l2_drift(&self) -> f64 {
        relative_drift(self.norm_history.iter().map(|r| r.l2))
    }

    pub fn max_hamiltonian_drift(&self) -> f64 {
        relative_drift(self.norm_history.iter().map(|r| r.hamiltonian))
    }
}

/// Conservation and blow-up monitor shared by the drivers.
#[derive(Clone, Debug)]
pub struct Monitor {
    l2_0: f64,
    e_sigma_0: f64,
    conserve_check: bool,
    l2_tolerance: f64,
    blowup_factor: f64,
}

impl Monitor {
    pub fn new(cfg: &EvolveConfig, initial: &NormReport) -> Self {
        Monitor {
            l2_0: initial.l2,
            e_sigma_0: initial.e_sigma,
            conserve_check: cfg.conserve_check,
            l2_tolerance: cfg.l2_tolerance,
            blowup_factor: cfg.blowup_factor,
        }
    }

    pub fn check(&self, t: f64, r: &NormReport) -> Result<()> {
        let finite = [r.l2, r.e2, r.e_sigma, r.hamiltonian].iter().all(|v| v.is_finite());
        if !finite || r.e_sigma > self.blowup_factor * self.e_sigma_0.max(f64::MIN_POSITIVE) {
            return Err(Error::Instability {
                t,
                quantity: "E^σ norm",
                factor: r.e_sigma / self.e_sigma_0,
            });
        }
        if self.conserve_check && self.l2_0 > 0.0 {
            let drift = (r.l2 - self.l2_0).abs() / self.l2_0;
            if drift > self.l2_tolerance {
                return Err(Error::ConservationDrift {
                    t,
                    quantity: "L²",
                    drift,
                    tolerance: self.l2_tolerance,
                });
            }
        }
        Ok(())
    }
}

/// Integrates the 2D equation to `cfg.t_end`.
pub fn evolve(u0: &SpectralField, cfg: &EvolveConfig) -> Result<Trajectory> {
    evolve_observed(u0, cfg, |_, _| Ok(()))
}

/// [`evolve`] calling `observe(t, u)` at every logged time.
pub fn evolve_observed(
    u0: &SpectralField,
    cfg: &EvolveConfig,
    mut observe: impl FnMut(f64, &SpectralField) -> Result<()>,
) -> Result<Trajectory> {
    let steps = cfg.steps()?;
    let mut stepper = Integrator::new(u0.clone(), cfg.dt, cfg.nonlinear)?.parallel(cfg.parallel);
    let first = stepper.norms(cfg.sigma)?;
    let monitor = Monitor::new(cfg, &first);
    let mut traj = Trajectory {
        times: vec![0.0],
        norm_history: vec![first],
        snapshots: Vec::new(),
        final_field: u0.clone(),
        dt: cfg.dt,
    };
    observe(0.0, stepper.field())?;
    if cfg.snapshot_every.is_some() {
        traj.snapshots.push((0.0, u0.clone()));
    }
    for i in 1..=steps {
        stepper.step()?;
        let t = stepper.time();
        if i % cfg.log_every == 0 || i == steps {
            let report = stepper.norms(cfg.sigma)?;
            monitor.check(t, &report)?;
            traj.times.push(t);
            traj.norm_history.push(report);
            observe(t, stepper.field())?;
        }
        if cfg.snapshot_every.is_some_and(|every| every > 0 && i % every == 0) {
            traj.snapshots.push((t, stepper.field().clone()));
        }
    }
    traj.final_field = stepper.into_field();
    Ok(traj)
}

/// Logged states of the 1D reduction.
#[derive(Clone, Debug)]
pub struct Trajectory1d {
    pub times: Vec<f64>,
    pub fields: Vec<Field1d>,
    pub l2: Vec<f64>,
    pub dt: f64,
}

impl Trajectory1d {
    /// The logged state at `t`; only logged step times are available.
    pub fn at(&self, t: f64) -> Result<&Field1d> {
        let tol = 1e-9 * self.dt.max(f64::MIN_POSITIVE);
        self.times
            .iter()
            .position(|s| (s - t).abs() <= tol)
            .map(|i| &self.fields[i])
            .ok_or(Error::TimeNotSampled { t })
    }

    pub fn max_l2_drift(&self) -> f64 {
        relative_drift(self.l2.iter().copied())
    }
}

/// Integrates `∂ₜu = ∂ₓ⁵u − u∂ₓu` on `T`.
pub fn evolve_1d_kdv5(u0: &Field1d, cfg: &EvolveConfig) -> Result<Trajectory1d> {
    let steps = cfg.steps()?;
    if u0.mean().abs() > 1e-14 * u0.l2().max(1.0) {
        return Err(Error::InvalidArgument(format!("1D data must have zero mean, got {}", u0.mean())));
    }
    let n = u0.len();
    let m_max = u0.m_max();
    if u0.coeffs().iter().skip(m_max + 1).any(|c| c.norm_sqr() != 0.0) {
        return Err(Error::InvalidArgument(format!("1D data has modes above the retained |m| ≤ {m_max}")));
    }
    let e_half: Vec<Complex64> = (0..=n / 2)
        .map(|m| {
            if m <= m_max {
                Complex64::from_polar(1.0, 0.5 * cfg.dt * (m as f64).powi(5))
            } else {
                Complex64::default()
            }
        })
        .collect();

    let mut planner = realfft::RealFftPlanner::<f64>::new();
    let r2c = planner.plan_fft_forward(n);
    let c2r = planner.plan_fft_inverse(n);
    let mut phys = vec![0.0; n];
    let mut spec = vec![Complex64::default(); n / 2 + 1];
    let mut scratch_f = r2c.make_scratch_vec();
    let mut scratch_i = c2r.make_scratch_vec();
    let scale = 1.0 / n as f64;
    let rhs = |v: &[Complex64], out: &mut [Complex64]| {
        spec.copy_from_slice(v);
        spec[0].im = 0.0;
        spec[n / 2].im = 0.0;
        c2r.process_with_scratch(&mut spec, &mut phys, &mut scratch_i)
            .expect("sizes fixed by the plan");
        phys.iter_mut().for_each(|p| *p *= *p);
        r2c.process_with_scratch(&mut phys, out, &mut scratch_f)
            .expect("sizes fixed by the plan");
        for (m, c) in out.iter_mut().enumerate() {
            *c = if m <= m_max {
                *c * Complex64::new(0.0, -0.5 * m as f64 * scale)
            } else {
                Complex64::default()
            };
        }
    };
    let mut rhs = Some(rhs);

    let mut u = u0.coeffs().to_vec();
    let mut ws = Workspace::new(u.len());
    let mut traj = Trajectory1d {
        times: vec![0.0],
        fields: vec![u0.clone()],
        l2: vec![u0.l2()],
        dt: cfg.dt,
    };
    let l2_0 = u0.l2();
    for i in 1..=steps {
        let f = if cfg.nonlinear { rhs.as_mut() } else { None };
        if_rk4(&mut u, &e_half, cfg.dt, &mut ws, f);
        if i % cfg.log_every == 0 || i == steps {
            let t = i as f64 * cfg.dt;
            let field = Field1d::from_coeffs(n, u.clone())?;
            let l2 = field.l2();
            if !l2.is_finite() || l2 > cfg.blowup_factor * l2_0.max(f64::MIN_POSITIVE) {
                return Err(Error::Instability {
                    t,
                    quantity: "L² norm",
                    factor: l2 / l2_0,
                });
            }
            if cfg.conserve_check && l2_0 > 0.0 && (l2 - l2_0).abs() / l2_0 > cfg.l2_tolerance {
                return Err(Error::ConservationDrift {
                    t,
                    quantity: "L²",
                    drift: (l2 - l2_0).abs() / l2_0,
                    tolerance: cfg.l2_tolerance,
                });
            }
            traj.times.push(t);
            traj.fields.push(field);
            traj.l2.push(l2);
        }
    }
    Ok(traj)
}

/// Places a 1D field on the `k = 0` row of `grid`. Modes at or above the
/// x-Nyquist frequency of `grid` are dropped.
pub fn embed_1d(u: &Field1d, grid: TorusGrid) -> SpectralField {
    let mut out = SpectralField::zeros(grid);
    let ny = grid.ny();
    let top = (grid.mx_len() - 1).min(u.coeffs().len());
    for (m, c) in u.coeffs().iter().enumerate().take(top) {
        let mut c = *c;
        if m == 0 {
            c.im = 0.0;
        }
        out.coeffs_mut()[m * ny] = c;
    }
    out
}
