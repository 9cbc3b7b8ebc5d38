//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
//!
//! Criteria 5 to 8 write their CSVs into one directory; criterion 10 reruns
//! them single-threaded into a second one and compares the bytes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kp5_core::ansatz::{build_ansatz, lowfreq_trajectory, phase_triple, AnsatzParams, Remainder};
use kp5_core::evolve::{evolve, fit_dt, recommended_dt, EvolveConfig};
use kp5_core::numtheory::{brute_force_admissible, AdmissibleIndex};
use kp5_core::resonance::{omega, resonance_kpi5, LatticeFrequency};
use kp5_core::spectral::{SpectralField, TorusGrid};
use kp5lab::experiments::{galilean_run, generate_until, lowfreq_run, residual_run, thm1_experiment};
use kp5lab::{ExperimentManifest, OutputDir, RunSpec, Thm1Options};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

const RESIDUAL_TIMES: [f64; 3] = [0.25, 0.5, 0.75];
const THM1_BUDGET_SECONDS: f64 = 1800.0;

/// Results that later criteria build on.
#[derive(Default)]
struct Shared {
    thm1_n2: Option<ExperimentManifest>,
    thm1_n18: Option<ExperimentManifest>,
}

fn metric(m: &ExperimentManifest, key: &str) -> Result<f64, String> {
    m.metric_value(key).ok_or_else(|| format!("manifest lacks `{key}`"))
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn timed(limit: Duration, elapsed: Duration, ok: bool) -> bool {
    ok && elapsed <= limit
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `m⁵ + 35k²/m` with machine-integer rationals, independent of the library.
fn omega_oracle(m: i128, k: i128) -> Ratio<i128> {
    Ratio::from_integer(m.pow(5)) + Ratio::new(35 * k * k, m)
}

fn big(q: Ratio<i128>) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

fn first_three() -> Result<Vec<AdmissibleIndex>, String> {
    [2u64, 18, 653].iter().map(|&n| AdmissibleIndex::new(n).map_err(err)).collect()
}

fn c1_exact_resonance() -> Outcome {
    let mut detail = Vec::new();
    for idx in first_three()? {
        let (n, a) = idx.lattice_i64().map_err(err)?;
        let om = resonance_kpi5(&LatticeFrequency::new(1, 0), &LatticeFrequency::new(n, a)).map_err(err)?;
        let oracle = omega_oracle(n as i128 + 1, a as i128) - omega_oracle(1, 0) - omega_oracle(n as i128, a as i128);
        if om != BigRational::from_integer(0.into()) || oracle != Ratio::from_integer(0) {
            return Ok((false, format!("Ω(1,0,{n},{a}) = {om}, oracle {oracle}")));
        }
        detail.push(format!("n={n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b7035);
    let mut checked = 0;
    while checked < 10_000 {
        let (m1, m2) = (rng.gen_range(-40i64..=40), rng.gen_range(-40i64..=40));
        let (k1, k2) = (rng.gen_range(-40i64..=40), rng.gen_range(-40i64..=40));
        if m1 == 0 || m2 == 0 || m1 + m2 == 0 {
            continue;
        }
        let lib = resonance_kpi5(&LatticeFrequency::new(m1, k1), &LatticeFrequency::new(m2, k2)).map_err(err)?;
        let (m1, k1, m2, k2) = (m1 as i128, k1 as i128, m2 as i128, k2 as i128);
        let oracle = omega_oracle(m1 + m2, k1 + k2) - omega_oracle(m1, k1) - omega_oracle(m2, k2);
        if lib != big(oracle) {
            return Ok((false, format!("pair ({m1},{k1}),({m2},{k2}): {lib} vs {oracle}")));
        }
        checked += 1;
    }
    Ok((true, format!("Ω = 0 at {}; {checked} random pairs agree", detail.join(", "))))
}

fn c2_pell_oracle() -> Outcome {
    let generated = generate_until(10_000).map_err(err)?;
    let brute = brute_force_admissible(10_000);
    let ns: Vec<i64> = generated.iter().filter_map(|i| i.n_i64()).collect();
    let ok = generated == brute && ns.starts_with(&[2, 18, 653]);
    Ok((ok, format!("generated {ns:?}, brute force {} entries", brute.len())))
}

fn c3_phase_additivity() -> Outcome {
    let mut parts = Vec::new();
    for idx in first_three()? {
        let (n, a) = idx.lattice_i64().map_err(err)?;
        let lhs = omega(&LatticeFrequency::new(n + 1, a)).map_err(err)?;
        let rhs = omega(&LatticeFrequency::new(1, 0)).map_err(err)? + omega(&LatticeFrequency::new(n, a)).map_err(err)?;
        let oracle_lhs = omega_oracle(n as i128 + 1, a as i128);
        let oracle_rhs = omega_oracle(1, 0) + omega_oracle(n as i128, a as i128);
        if lhs != rhs || oracle_lhs != oracle_rhs || big(oracle_lhs) != lhs || phase_triple(n, a).is_err() {
            return Ok((false, format!("n={n}: {lhs} vs {rhs}")));
        }
        parts.push(format!("ω({},{a}) = {lhs}", n + 1));
    }
    Ok((true, parts.join("; ")))
}

/// `m⁵ + 35k²/m` in floating point.
fn omega_f64(m: i64, k: i64) -> f64 {
    let m = m as f64;
    m.powi(5) + 35.0 * (k * k) as f64 / m
}

fn linear_phase_error() -> Result<f64, String> {
    let idx = AdmissibleIndex::new(2).map_err(err)?;
    let grid = TorusGrid::for_admissible(&idx).map_err(err)?;
    let low = lowfreq_trajectory(1.0, &idx, 0.01, 0.01).map_err(err)?;
    let p = AnsatzParams::new(1.0, idx, 2.0).map_err(err)?;
    let u0 = build_ansatz(&p, 0.0, &low, grid).map_err(err)?;
    let dt = fit_dt(recommended_dt(u0.max_abs_physical(), grid.m_max()), 0.01);
    let mut cfg = EvolveConfig::new(dt, 1.0);
    cfg.nonlinear = false;
    cfg.log_every = 100;
    let traj = evolve(&u0, &cfg).map_err(err)?;
    let t = traj.times.last().copied().unwrap_or(0.0);
    let exact = u0.map_modes(|m, k| {
        if m == 0 {
            Complex64::default()
        } else {
            Complex64::from_polar(1.0, omega_f64(m, k) * t)
        }
    });
    Ok(traj.final_field.sub(&exact).map_err(err)?.l2() / u0.l2())
}

/// Error ratio under dt halving against a fine reference, for a
/// band-limited state on a small grid where `ω·dt` stays below one.
fn self_convergence_ratio() -> Result<f64, String> {
    let grid = TorusGrid::new(8, 8).map_err(err)?;
    let mut u0 = SpectralField::zeros(grid);
    u0.add_cos(1, 0, 0.5, 0.0).map_err(err)?;
    u0.add_cos(1, 1, 0.25, 0.3).map_err(err)?;
    let run = |dt: f64| -> Result<SpectralField, String> {
        let mut cfg = EvolveConfig::new(dt, 1.0);
        cfg.log_every = (0.01 / dt).round() as usize;
        Ok(evolve(&u0, &cfg).map_err(err)?.final_field)
    };
    let reference = run(0.005 / 16.0)?;
    let e = |dt: f64| -> Result<f64, String> { Ok(run(dt)?.sub(&reference).map_err(err)?.l2()) };
    Ok(e(0.01)? / e(0.005)?)
}

fn thm1(n: u64, budget: Option<f64>, t_end: f64, out: &Path) -> Result<ExperimentManifest, String> {
    let mut spec = RunSpec::new(n).map_err(err)?;
    spec.t_end = t_end;
    let opts = Thm1Options {
        budget_seconds: budget,
        fallback_t_end: 0.5,
    };
    let mut dir = OutputDir::new(out).map_err(err)?;
    thm1_experiment(&spec, &opts, &mut dir).map_err(err)
}

fn c4_solver(shared: &mut Shared, out: &Path) -> Outcome {
    let phase = linear_phase_error()?;
    let ratio = self_convergence_ratio()?;
    let m = thm1(2, None, 1.0, out)?;
    let l2 = metric(&m, "max_l2_drift")?;
    let h = metric(&m, "max_hamiltonian_drift")?;
    shared.thm1_n2 = Some(m);
    let ok = phase <= 1e-12 && l2 <= 1e-8 && h <= 1e-6 && within(ratio, 12.0, 20.0);
    Ok((
        ok,
        format!("linear phase error {phase:.2e}, L² drift {l2:.2e}, H drift {h:.2e}, convergence ratio {ratio:.3}"),
    ))
}

fn c5_lowfreq(out: &Path) -> Outcome {
    let mut gaps = Vec::new();
    for n in [2u64, 18] {
        let spec = RunSpec::new(n).map_err(err)?;
        let mut dir = OutputDir::new(out).map_err(err)?;
        gaps.push(metric(&lowfreq_run(&spec, &mut dir).map_err(err)?, "max_gap")?);
    }
    let target = (2.0f64 / 18.0).powi(2);
    let ratio = gaps[1] / gaps[0];
    Ok((
        within(ratio, target / 3.0, 3.0 * target),
        format!("gap(2) = {:.4e}, gap(18) = {:.4e}, ratio {ratio:.4e}, target {target:.4e}", gaps[0], gaps[1]),
    ))
}

fn mean_residual(n: u64, remainder: Remainder, out: &Path) -> Result<f64, String> {
    let spec = RunSpec::new(n).map_err(err)?;
    let mut dir = OutputDir::new(out).map_err(err)?;
    metric(&residual_run(&spec, &RESIDUAL_TIMES, remainder, &mut dir).map_err(err)?, "mean_residual")
}

fn c6_residual(out: &Path) -> Outcome {
    let r2 = mean_residual(2, Remainder::Corrected, out)?;
    let r18 = mean_residual(18, Remainder::Corrected, out)?;
    let r18_ablated = mean_residual(18, Remainder::Omitted, out)?;
    let target = (2.0f64 / 18.0).powi(3);
    let ratio = r18 / r2;
    let ablation = r18_ablated / r18;
    Ok((
        within(ratio, target / 3.0, 3.0 * target) && ablation >= 5.0,
        format!(
            "residual(2) = {r2:.4e}, residual(18) = {r18:.4e}, ratio {ratio:.4e} (target {target:.4e}), \
             ablation factor {ablation:.2}"
        ),
    ))
}

fn c7_separation(shared: &Shared) -> Outcome {
    let m = shared.thm1_n2.as_ref().ok_or("n = 2 run missing")?;
    let lambda = 35f64.sqrt();
    let oracle = 2.0 / 2.0 * (4.0 * PI * PI / lambda).sqrt();
    let measured = metric(m, "initial_diff_measured")?;
    let rel = (measured - oracle).abs() / oracle;
    let (lo, hi) = (metric(m, "envelope_ratio_min")?, metric(m, "envelope_ratio_max")?);
    let c = metric(m, "separation_c")?;
    let runtime = metric(m, "runtime_seconds")?;
    let ok = rel <= 1e-8 && lo >= 0.7 && hi <= 1.3 && c > 0.0 && runtime < 300.0;
    Ok((
        ok,
        format!(
            "initial diff {measured:.8} vs {oracle:.8} (rel {rel:.1e}), envelope ratio [{lo:.3}, {hi:.3}], \
             c = {c:.4}, run took {runtime:.1} s"
        ),
    ))
}

fn c8_uniformity(shared: &mut Shared, out: &Path) -> Outcome {
    let m18 = thm1(18, Some(THM1_BUDGET_SECONDS), 1.0, out)?;
    let m2 = shared.thm1_n2.as_ref().ok_or("n = 2 run missing")?;
    let (c2, c18) = (metric(m2, "separation_c")?, metric(&m18, "separation_c")?);
    let shrink = metric(m2, "initial_diff_measured")? / metric(&m18, "initial_diff_measured")?;
    let horizon = metric(&m18, "t_end_effective")?;
    let ratio = c18 / c2;
    let ok = c18 > 0.0 && within(ratio, 0.5, 2.0) && (shrink - 9.0).abs() < 1e-6;
    let detail = format!(
        "c(2) = {c2:.4}, c(18) = {c18:.4}, ratio {ratio:.3}, initial difference shrinks {shrink:.6}x, \
         n = 18 horizon t_end = {horizon}"
    );
    shared.thm1_n18 = Some(m18);
    Ok((ok, detail))
}

fn c9_galilean(out: &Path) -> Outcome {
    let mut dir = OutputDir::new(out).map_err(err)?;
    let m = galilean_run(2.0, &[16, 64, 256], 1.0, &mut dir).map_err(err)?;
    let slope = metric(&m, "slope")?;
    let (lo, hi) = (metric(&m, "normalized_min")?, metric(&m, "normalized_max")?);
    let threshold = 0.8 * 1f64.sin();
    let ok = (slope + 1.0).abs() <= 0.05 && lo >= threshold && hi / lo - 1.0 <= 0.05;
    Ok((
        ok,
        format!("slope {slope:.4}, normalized separation [{lo:.4}, {hi:.4}] vs threshold {threshold:.4}"),
    ))
}

fn csv_files(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(err)? {
        let path = entry.map_err(err)?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            files.insert(name, std::fs::read(&path).map_err(err)?);
        }
    }
    Ok(files)
}

fn c10_reproducible(shared: &Shared, first: &Path, second: &Path) -> Outcome {
    let horizon = match &shared.thm1_n18 {
        Some(m) => metric(m, "t_end_effective")?,
        None => 1.0,
    };
    c5_lowfreq(second)?;
    c6_residual(second)?;
    thm1(2, None, 1.0, second)?;
    thm1(18, None, horizon, second)?;
    let (a, b) = (csv_files(first)?, csv_files(second)?);
    let differing: Vec<&String> = b.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
    let ok = !b.is_empty() && differing.is_empty();
    Ok((ok, format!("{} CSV files compared, differing: {differing:?}", b.len())))
}

fn report(id: u32, name: &str, limit: Option<Duration>, outcome: Outcome, started: Instant) -> bool {
    let elapsed = started.elapsed();
    let (ok, detail) = match outcome {
        Ok((ok, detail)) => (ok, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let ok = match limit {
        Some(limit) => timed(limit, elapsed, ok),
        None => ok,
    };
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:2} {verdict} {name} ({:.1} s): {detail}", elapsed.as_secs_f64());
    ok
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let first = tempfile::tempdir().expect("temporary directory");
    let second = tempfile::tempdir().expect("temporary directory");
    let mut shared = Shared::default();
    let secs = Duration::from_secs;
    let mut all = true;

    let t = Instant::now();
    all &= report(1, "exact resonance", Some(secs(5)), c1_exact_resonance(), t);
    let t = Instant::now();
    all &= report(2, "Pell generator against brute force", Some(secs(10)), c2_pell_oracle(), t);
    let t = Instant::now();
    all &= report(3, "phase additivity", None, c3_phase_additivity(), t);
    let t = Instant::now();
    all &= report(4, "solver calibration", Some(secs(120)), c4_solver(&mut shared, first.path()), t);
    let t = Instant::now();
    all &= report(5, "low-frequency gap scaling", Some(secs(60)), c5_lowfreq(first.path()), t);
    let t = Instant::now();
    all &= report(6, "ansatz residual scaling and ablation", Some(secs(600)), c6_residual(first.path()), t);
    let t = Instant::now();
    all &= report(7, "separation at n = 2", None, c7_separation(&shared), t);
    let t = Instant::now();
    all &= report(8, "n-uniformity of the separation", None, c8_uniformity(&mut shared, first.path()), t);
    let t = Instant::now();
    all &= report(9, "Galilean demonstration", Some(secs(5)), c9_galilean(first.path()), t);
    let t = Instant::now();
    all &= report(10, "byte-identical reruns", None, c10_reproducible(&shared, first.path(), second.path()), t);

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
