//! The experiments. Each one writes its CSV files into an [`OutputDir`] and
//! returns a manifest describing the run.

use std::f64::consts::PI;
use std::time::Instant;

use kp5_core::ansatz::{
    build_ansatz, check_phase_budget, lowfreq_for, lowfreq_gap, lowfreq_trajectory, residual, AnsatzParams,
    Remainder,
};
use kp5_core::evolve::{evolve_observed, fit_dt, recommended_dt, EvolveConfig, Integrator, Monitor};
use kp5_core::numtheory::{brute_force_admissible, generate_admissible, AdmissibleIndex};
use kp5_core::resonance::{omega_npm1, resonance_search, to_f64};
use kp5_core::spectral::{energy_norms, galilean_1d, snapshot, Field1d, GalileanSign, SpectralField, TorusGrid};
use serde_json::json;

use crate::error::{LabError, LabResult};
use crate::manifest::ExperimentManifest;
use crate::output::{format_value, Csv, OutputDir};

/// Parameters shared by the evolution experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub idx: AdmissibleIndex,
    pub sigma: f64,
    pub theta: f64,
    /// `None` applies the sizing rule.
    pub grid: Option<TorusGrid>,
    /// `None` applies the step-size rule.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// CSV sampling interval.
    pub sample: f64,
    pub threads: usize,
    /// Fail when the relative L² drift exceeds the solver tolerance.
    pub conserve_check: bool,
}

impl RunSpec {
    pub fn new(n: u64) -> LabResult<Self> {
        Ok(RunSpec {
            idx: AdmissibleIndex::new(n)?,
            sigma: 2.0,
            theta: 1.0,
            grid: None,
            dt: None,
            t_end: 1.0,
            sample: 0.01,
            threads: 1,
            conserve_check: false,
        })
    }

    pub fn n(&self) -> LabResult<i64> {
        Ok(self.idx.lattice_i64()?.0)
    }

    fn grid(&self) -> LabResult<(TorusGrid, &'static str)> {
        match self.grid {
            Some(g) => Ok((g, "given")),
            None => Ok((TorusGrid::for_admissible(&self.idx)?, "sizing rule")),
        }
    }

    fn validate(&self) -> LabResult<()> {
        if !(self.sample > 0.0) || !(self.t_end > 0.0) || self.sample > self.t_end {
            return Err(LabError::Param(format!(
                "need 0 < sample ≤ t_end, got sample = {}, t_end = {}",
                self.sample, self.t_end
            )));
        }
        if !(self.theta.abs() <= 1.0) {
            return Err(LabError::Param(format!("θ = {} must lie in [−1, 1]", self.theta)));
        }
        check_phase_budget(&self.idx, self.t_end)?;
        Ok(())
    }

    /// Step and logging schedule for initial data of sup norm `max_abs`.
    fn schedule(&self, max_abs: f64, grid: &TorusGrid) -> LabResult<EvolveConfig> {
        let dt = match self.dt {
            Some(dt) => dt,
            None => fit_dt(recommended_dt(max_abs, grid.m_max()), self.sample),
        };
        let per_sample = self.sample / dt;
        if !(dt > 0.0) || (per_sample - per_sample.round()).abs() > 1e-9 * per_sample {
            return Err(LabError::Param(format!(
                "dt = {dt} must divide the sampling interval {}",
                self.sample
            )));
        }
        let mut cfg = EvolveConfig::new(dt, self.t_end);
        cfg.log_every = per_sample.round() as usize;
        cfg.sigma = self.sigma;
        cfg.parallel = self.threads > 1;
        cfg.conserve_check = self.conserve_check;
        cfg.steps()?;
        Ok(cfg)
    }

    fn record(&self, m: &mut ExperimentManifest, grid: &TorusGrid, source: &str, cfg: Option<&EvolveConfig>) -> LabResult<()> {
        m.param("n", json!(self.idx.n_i64()))
            .param("sigma", self.sigma)
            .param("theta", self.theta)
            .param("grid", json!([grid.nx(), grid.ny()]))
            .param("grid_source", source)
            .param("t_end", self.t_end)
            .param("sample", self.sample)
            .param("threads", self.threads)
            .param("conserve_check", self.conserve_check);
        if let Some(cfg) = cfg {
            m.param("dt", cfg.dt).param("dt_source", if self.dt.is_some() { "given" } else { "step-size rule" });
        }
        Ok(())
    }

    fn params(&self, theta: f64) -> LabResult<AnsatzParams> {
        Ok(AnsatzParams::new(theta, self.idx.clone(), self.sigma)?)
    }

    /// `u_{θ,n}(0)` on `grid`.
    fn initial_data(&self, theta: f64, grid: TorusGrid) -> LabResult<SpectralField> {
        let low = lowfreq_trajectory(theta, &self.idx, self.sample, self.sample)?;
        Ok(build_ansatz(&self.params(theta)?, 0.0, &low, grid)?)
    }
}

/// Runtime guard for [`thm1_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct Thm1Options {
    /// Wall-clock budget; when the projected runtime exceeds it the run
    /// stops at `fallback_t_end` instead.
    pub budget_seconds: Option<f64>,
    pub fallback_t_end: f64,
}

impl Default for Thm1Options {
    fn default() -> Self {
        Thm1Options {
            budget_seconds: None,
            fallback_t_end: 0.5,
        }
    }
}

fn step_pair(a: &mut Integrator, b: &mut Integrator, concurrent: bool) -> kp5_core::Result<()> {
    if concurrent {
        let (ra, rb) = rayon::join(|| a.step(), || b.step());
        ra.and(rb)
    } else {
        a.step()?;
        b.step()
    }
}

/// Evolves `u_{−1,n}(0)` and `u_{1,n}(0)` side by side and records their
/// separation in `E^σ`.
pub fn thm1_experiment(spec: &RunSpec, opts: &Thm1Options, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    spec.validate()?;
    let n = spec.n()?;
    let (grid, source) = spec.grid()?;
    let u0 = spec.initial_data(-1.0, grid)?;
    let v0 = spec.initial_data(1.0, grid)?;
    let max_abs = u0.max_abs_physical().max(v0.max_abs_physical());
    let mut cfg = spec.schedule(max_abs, &grid)?;
    let concurrent = spec.threads > 1;

    let mut m = ExperimentManifest::new("thm1");
    spec.record(&mut m, &grid, source, Some(&cfg))?;

    let mut a = Integrator::new(u0, cfg.dt, true)?.parallel(concurrent);
    let mut b = Integrator::new(v0, cfg.dt, true)?.parallel(concurrent);
    let (ra0, rb0) = (a.norms(spec.sigma)?, b.norms(spec.sigma)?);
    let (mon_a, mon_b) = (Monitor::new(&cfg, &ra0), Monitor::new(&cfg, &rb0));

    let nf = n as f64;
    let sin_norm = (grid.area() / 2.0).sqrt();
    let envelope_amp = ((nf + 1.0) / nf).powf(spec.sigma) * sin_norm;
    let initial_diff = 2.0 / nf * grid.area().sqrt();

    let mut series = Csv::new(&["t", "e_sigma_u", "e_sigma_v", "e_sigma_diff", "dxsigma_l2_diff", "lower_envelope"]);
    let mut conservation = Csv::new(&["t", "l2_u", "l2_v", "hamiltonian_u", "hamiltonian_v"]);
    let mut l2 = (Vec::new(), Vec::new());
    let mut ham = (Vec::new(), Vec::new());
    let mut c = f64::INFINITY;
    let mut ratio = (f64::INFINITY, f64::NEG_INFINITY);
    let mut dx_ratio = (f64::INFINITY, f64::NEG_INFINITY);
    let mut diff0 = f64::NAN;

    let started = Instant::now();
    let mut steps = cfg.steps()?;
    let probe = steps.min(50);
    let mut i = 0;
    loop {
        if i % cfg.log_every == 0 || i == steps {
            let t = a.time();
            let (ra, rb) = if i == 0 { (ra0, rb0) } else { (a.norms(spec.sigma)?, b.norms(spec.sigma)?) };
            mon_a.check(t, &ra)?;
            mon_b.check(t, &rb)?;
            let d = energy_norms(&a.field().sub(b.field())?, spec.sigma)?;
            let envelope = 2.0 * (0.5 * t).sin().abs() * envelope_amp;
            series.push_timed(t, &[ra.e_sigma, rb.e_sigma, d.e_sigma, d.dx_sigma, envelope]);
            conservation.push_timed(t, &[ra.l2, rb.l2, ra.hamiltonian, rb.hamiltonian]);
            l2.0.push(ra.l2);
            l2.1.push(rb.l2);
            ham.0.push(ra.hamiltonian);
            ham.1.push(rb.hamiltonian);
            if i == 0 {
                diff0 = d.e_sigma;
            }
            if (0.2 - 1e-9..=1.0 + 1e-9).contains(&t) {
                c = c.min(d.e_sigma / t);
            }
            if (0.1 - 1e-9..=1.0 + 1e-9).contains(&t) {
                ratio = (ratio.0.min(d.e_sigma / envelope), ratio.1.max(d.e_sigma / envelope));
                dx_ratio = (dx_ratio.0.min(d.dx_sigma / envelope), dx_ratio.1.max(d.dx_sigma / envelope));
            }
        }
        if i == steps {
            break;
        }
        step_pair(&mut a, &mut b, concurrent)?;
        i += 1;
        if i == probe {
            if let Some(budget) = opts.budget_seconds {
                let projected = started.elapsed().as_secs_f64() / probe as f64 * steps as f64;
                if projected > budget && opts.fallback_t_end < cfg.t_end {
                    cfg.t_end = opts.fallback_t_end;
                    steps = cfg.steps()?;
                    m.note(format!(
                        "projected runtime {projected:.0} s exceeds the budget of {budget:.0} s; \
                         horizon shortened to t_end = {}",
                        cfg.t_end
                    ));
                }
            }
        }
    }

    let tag = format!("thm1_n{n}");
    let p1 = out.write_csv(&format!("{tag}_series.csv"), &series)?;
    let p2 = out.write_csv(&format!("{tag}_conservation.csv"), &conservation)?;
    m.output(&p1).output(&p2);
    let drift = |v: &[f64]| relative_drift(v);
    m.metric("initial_diff", initial_diff)
        .metric("initial_diff_measured", diff0)
        .metric("initial_diff_relative_error", (diff0 - initial_diff).abs() / initial_diff)
        .metric("separation_c", c)
        .metric("envelope_ratio_min", ratio.0)
        .metric("envelope_ratio_max", ratio.1)
        .metric("dxsigma_envelope_ratio_min", dx_ratio.0)
        .metric("dxsigma_envelope_ratio_max", dx_ratio.1)
        .metric("max_l2_drift_u", drift(&l2.0))
        .metric("max_l2_drift_v", drift(&l2.1))
        .metric("max_hamiltonian_drift_u", drift(&ham.0))
        .metric("max_hamiltonian_drift_v", drift(&ham.1))
        .metric("max_l2_drift", drift(&l2.0).max(drift(&l2.1)))
        .metric("max_hamiltonian_drift", drift(&ham.0).max(drift(&ham.1)))
        .metric("t_end_effective", cfg.t_end)
        .metric("runtime_seconds", started.elapsed().as_secs_f64());
    m.note(
        "the separation constant is measured at this single n; comparing two admissible n \
         is a two-point consistency check, not a limit along the sequence",
    );
    Ok(m)
}

fn relative_drift(v: &[f64]) -> f64 {
    let Some(&v0) = v.first() else { return 0.0 };
    v.iter()
        .map(|x| if v0 != 0.0 { (x - v0).abs() / v0.abs() } else { x.abs() })
        .fold(0.0, f64::max)
}

/// Evolves `u_{θ,n}(0)` and compares it with the ansatz at the logged times.
pub fn ansatz_vs_flow(spec: &RunSpec, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    spec.validate()?;
    let n = spec.n()?;
    let (grid, source) = spec.grid()?;
    let u0 = spec.initial_data(spec.theta, grid)?;
    let cfg = spec.schedule(u0.max_abs_physical(), &grid)?;
    let low = lowfreq_for(spec.theta, &spec.idx, &cfg)?;
    let p = spec.params(spec.theta)?;

    let mut m = ExperimentManifest::new("ansatz_vs_flow");
    spec.record(&mut m, &grid, source, Some(&cfg))?;

    let mut csv = Csv::new(&["t", "l2_gap", "dxsigma_gap"]);
    let (mut max_l2, mut max_dx) = (0.0f64, 0.0f64);
    let traj = evolve_observed(&u0, &cfg, |t, u| {
        let gap = u.sub(&build_ansatz(&p, t, &low, grid)?)?;
        let r = energy_norms(&gap, spec.sigma)?;
        csv.push_timed(t, &[r.l2, r.dx_sigma]);
        max_l2 = max_l2.max(r.l2);
        max_dx = max_dx.max(r.dx_sigma);
        Ok(())
    })?;
    let path = out.write_csv(&format!("avf_n{n}_theta{}.csv", spec.theta), &csv)?;
    m.output(&path)
        .metric("max_l2_gap", max_l2)
        .metric("max_dxsigma_gap", max_dx)
        .metric("max_l2_drift", traj.max_l2_drift())
        .metric("max_hamiltonian_drift", traj.max_hamiltonian_drift())
        .metric("lowfreq_max_l2_drift", low.max_l2_drift());
    Ok(m)
}

/// [`ansatz_vs_flow`] for several `n`, with the decay exponent
/// `δ̂ = −ln(gap_last/gap_first)/ln(n_last/n_first)` of the `∂ₓ^σ` gap.
pub fn compare(template: &RunSpec, ns: &[u64], out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    if ns.len() < 2 {
        return Err(LabError::Param("compare needs at least two values of n".into()));
    }
    let mut m = ExperimentManifest::new("compare");
    m.param("ns", json!(ns))
        .param("sigma", template.sigma)
        .param("theta", template.theta)
        .param("t_end", template.t_end)
        .param("sample", template.sample);
    let mut csv = Csv::new(&["n", "max_l2_gap", "max_dxsigma_gap"]);
    let mut gaps = Vec::new();
    for &n in ns {
        let spec = RunSpec {
            idx: AdmissibleIndex::new(n)?,
            grid: None,
            dt: None,
            ..template.clone()
        };
        let sub = ansatz_vs_flow(&spec, out)?;
        let gap = sub.metric_value("max_dxsigma_gap").unwrap_or(f64::NAN);
        csv.push_cells(&[
            n.to_string(),
            format_value(sub.metric_value("max_l2_gap").unwrap_or(f64::NAN)),
            format_value(gap),
        ]);
        gaps.push((n as f64, gap));
        m.absorb(&format!("n{n}_"), &sub);
    }
    let (first, last) = (gaps[0], gaps[gaps.len() - 1]);
    let path = out.write_csv("compare.csv", &csv)?;
    m.output(&path)
        .metric("gap_ratio", last.1 / first.1)
        .metric("delta_hat", -(last.1 / first.1).ln() / (last.0 / first.0).ln());
    Ok(m)
}

/// Evolves `u_{θ,n}(0)` and records its norms, optionally with snapshots.
pub fn evolve_run(spec: &RunSpec, snapshot_every: Option<usize>, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    spec.validate()?;
    let n = spec.n()?;
    let (grid, source) = spec.grid()?;
    let u0 = spec.initial_data(spec.theta, grid)?;
    let mut cfg = spec.schedule(u0.max_abs_physical(), &grid)?;
    cfg.snapshot_every = snapshot_every;
    let mut m = ExperimentManifest::new("evolve");
    spec.record(&mut m, &grid, source, Some(&cfg))?;

    let traj = evolve_observed(&u0, &cfg, |_, _| Ok(()))?;
    let mut csv = Csv::new(&["t", "l2", "e2", "e_sigma", "hamiltonian"]);
    for (t, r) in traj.times.iter().zip(&traj.norm_history) {
        csv.push_timed(*t, &[r.l2, r.e2, r.e_sigma, r.hamiltonian]);
    }
    let path = out.write_csv(&format!("evolve_n{n}.csv"), &csv)?;
    m.output(&path);
    for (i, (_, field)) in traj.snapshots.iter().enumerate() {
        let mut bytes = Vec::new();
        snapshot::write_snapshot(&mut bytes, field)?;
        let path = out.write(&format!("evolve_n{n}_snap{i:04}.kp5"), &bytes)?;
        m.output(&path);
    }
    m.metric("max_l2_drift", traj.max_l2_drift())
        .metric("max_hamiltonian_drift", traj.max_hamiltonian_drift());
    Ok(m)
}

/// Residual of the ansatz at the given times.
pub fn residual_run(spec: &RunSpec, times: &[f64], remainder: Remainder, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    spec.validate()?;
    let n = spec.n()?;
    let (grid, source) = spec.grid()?;
    let p = spec.params(spec.theta)?.with_remainder(remainder);
    let mut m = ExperimentManifest::new("residual");
    spec.record(&mut m, &grid, source, None)?;
    m.param("times", json!(times)).param("remainder", format!("{remainder:?}").to_lowercase());

    let mut csv = Csv::new(&["t", "residual_l2"]);
    let mut sum = 0.0;
    for &t in times {
        if !(0.0..=1.0).contains(&t) {
            return Err(LabError::Param(format!("residual time {t} must lie in [0, 1]")));
        }
        let low = if t > 0.0 {
            lowfreq_trajectory(spec.theta, &spec.idx, t, t)?
        } else {
            lowfreq_trajectory(spec.theta, &spec.idx, spec.sample, spec.sample)?
        };
        let r = residual(&p, t, &low, grid)?;
        csv.push_timed(t, &[r]);
        sum += r;
    }
    let path = out.write_csv(&format!("residual_n{n}_{}.csv", format!("{remainder:?}").to_lowercase()), &csv)?;
    m.output(&path).metric("mean_residual", sum / times.len().max(1) as f64);
    Ok(m)
}

/// `‖u₁(t) − θn⁻¹cos(x + t)‖_{L²}` along the low-frequency flow.
pub fn lowfreq_run(spec: &RunSpec, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    spec.validate()?;
    let n = spec.n()?;
    let lambda = kp5_core::numtheory::Lambda::KP5.to_f64();
    let low = lowfreq_trajectory(spec.theta, &spec.idx, spec.t_end, spec.sample)?;
    let mut m = ExperimentManifest::new("lowfreq");
    m.param("n", n)
        .param("theta", spec.theta)
        .param("t_end", spec.t_end)
        .param("sample", spec.sample)
        .param("dt", low.dt)
        .param("points", kp5_core::ansatz::LOWFREQ_POINTS);
    let mut csv = Csv::new(&["t", "gap_l2"]);
    let mut max_gap = 0.0f64;
    let mut last = 0.0;
    for &t in &low.times {
        let g = lowfreq_gap(&low, spec.theta, n, t, lambda)?;
        csv.push_timed(t, &[g]);
        max_gap = max_gap.max(g);
        last = g;
    }
    let path = out.write_csv(&format!("lowfreq_n{n}.csv"), &csv)?;
    m.output(&path)
        .metric("max_gap", max_gap)
        .metric("gap_at_t_end", last)
        .metric("max_gap_times_n_squared", max_gap * (n * n) as f64)
        .metric("max_l2_drift", low.max_l2_drift());
    Ok(m)
}

/// Writes `u_{θ,n}(t)` as a `KP5LAB1` snapshot.
pub fn ansatz_dump(spec: &RunSpec, t: f64, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    spec.validate()?;
    let n = spec.n()?;
    let (grid, source) = spec.grid()?;
    let low = if t > 0.0 {
        lowfreq_trajectory(spec.theta, &spec.idx, t, t)?
    } else {
        lowfreq_trajectory(spec.theta, &spec.idx, spec.sample, spec.sample)?
    };
    let u = build_ansatz(&spec.params(spec.theta)?, t, &low, grid)?;
    let mut bytes = Vec::new();
    snapshot::write_snapshot(&mut bytes, &u)?;
    let mut m = ExperimentManifest::new("ansatz_dump");
    spec.record(&mut m, &grid, source, None)?;
    m.param("time", t);
    let path = out.write(&format!("ansatz_n{n}_t{t}.kp5"), &bytes)?;
    m.output(&path).metric("l2", u.l2());
    Ok(m)
}

/// The first `count` admissible indices, optionally checked against the
/// brute-force scan up to `check_limit`.
pub fn pell_run(count: usize, check_limit: Option<u64>, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    if count == 0 {
        return Err(LabError::Param("count must be at least 1".into()));
    }
    let list = generate_admissible(count)?;
    let mut csv = Csv::new(&["n", "n1", "alpha_index", "X", "Y"]);
    for idx in &list {
        let h = idx.hyperbola_point();
        csv.push_cells(&[
            idx.n().to_string(),
            idx.n1().to_string(),
            idx.alpha_index().to_string(),
            h.x.to_string(),
            h.y.to_string(),
        ]);
    }
    let mut m = ExperimentManifest::new("pell");
    m.param("count", count);
    if let Some(limit) = check_limit {
        m.param("check_limit", limit);
        let brute = brute_force_admissible(limit);
        let generated = generate_until(limit)?;
        m.metric("brute_force_agrees", if brute == generated { 1.0 } else { 0.0 })
            .metric("admissible_below_limit", brute.len() as f64);
    }
    let path = out.write_csv("pell.csv", &csv)?;
    m.output(&path).metric("count", list.len() as f64);
    Ok(m)
}

/// Generated indices with `n ≤ limit`.
pub fn generate_until(limit: u64) -> LabResult<Vec<AdmissibleIndex>> {
    let fits = |i: &AdmissibleIndex| i.n_i64().is_some_and(|n| n as u64 <= limit);
    let mut count = 4;
    loop {
        let list = generate_admissible(count)?;
        if !fits(&list[list.len() - 1]) {
            return Ok(list.into_iter().filter(fits).collect());
        }
        count *= 2;
    }
}

/// Exactly resonant pairs in a box, plus `Ω_{n±1}` for the first
/// admissible indices.
pub fn resonance_run(max_m: u32, max_k: u32, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    let pairs = resonance_search(max_m, max_k)?;
    let mut csv = Csv::new(&["m1", "k1", "m2", "k2"]);
    for p in &pairs {
        csv.push_cells(&[p.f1.m.to_string(), p.f1.k.to_string(), p.f2.m.to_string(), p.f2.k.to_string()]);
    }
    let mut omegas = Csv::new(&["n", "alpha_index", "omega_minus", "omega_plus", "omega_minus_over_n3"]);
    for idx in generate_admissible(3)? {
        let (lo, hi) = omega_npm1(&idx)?;
        let n3 = idx.n_i64().map_or(f64::NAN, |n| (n as f64).powi(3));
        omegas.push_cells(&[
            idx.n().to_string(),
            idx.alpha_index().to_string(),
            lo.to_string(),
            hi.to_string(),
            format_value(to_f64(&lo) / n3),
        ]);
    }
    let mut m = ExperimentManifest::new("resonance");
    m.param("max_m", max_m).param("max_k", max_k);
    let p1 = out.write_csv("resonance_pairs.csv", &csv)?;
    let p2 = out.write_csv("resonance_omega_npm1.csv", &omegas)?;
    m.output(&p1).output(&p2).metric("pairs", pairs.len() as f64);
    Ok(m)
}

/// `u_n = n^{−s}cos(nx) + n⁻¹` against `v_n = n^{−s}cos(nx)` before and
/// after the Galilean map `G_t⁺`.
pub fn galilean_run(s: f64, ns: &[usize], t: f64, out: &mut OutputDir) -> LabResult<ExperimentManifest> {
    if ns.len() < 2 {
        return Err(LabError::Param("need at least two values of n".into()));
    }
    let unit = (2.0 * PI).sqrt();
    let mut csv = Csv::new(&["n", "diff_hs", "galilean_diff_hs", "galilean_diff_normalized"]);
    let mut pts = Vec::new();
    let mut normalized = Vec::new();
    for &n in ns {
        let points = (4 * n).next_power_of_two().max(8);
        let nf = n as f64;
        let v = Field1d::from_fn(points, |x| nf.powf(-s) * (nf * x).cos())?;
        let mut u = v.clone();
        u.add_constant(1.0 / nf);
        let diff = u.sub(&v)?.hs_norm(s);
        let g = galilean_1d(&u, t, GalileanSign::Plus)
            .sub(&galilean_1d(&v, t, GalileanSign::Plus))?
            .hs_norm(s);
        csv.push_cells(&[n.to_string(), format_value(diff), format_value(g), format_value(g / unit)]);
        pts.push((nf.ln(), diff.ln()));
        normalized.push(g / unit);
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let lo = normalized.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = normalized.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut m = ExperimentManifest::new("galilean");
    m.param("s", s).param("ns", json!(ns)).param("t", t);
    let path = out.write_csv("galilean.csv", &csv)?;
    m.output(&path)
        .metric("slope", slope)
        .metric("normalized_min", lo)
        .metric("normalized_max", hi)
        .metric("normalized_spread", hi / lo - 1.0)
        .metric("threshold", 0.8 * t.sin().abs());
    Ok(m)
}
