use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kp5lab::config::parse_remainder;
use kp5lab::experiments::{self, RunSpec, Thm1Options};
use kp5lab::{ExperimentManifest, LabError, LabResult, OutputDir};
use kp5_core::spectral::TorusGrid;

#[derive(Parser)]
#[command(name = "kp5lab", version, about = "Fifth-order KP-I non-uniform continuity laboratory")]
struct Cli {
    /// Output directory for CSVs and manifests.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct RunArgs {
    /// Admissible index n (2, 18, 653, ...).
    #[arg(long, default_value_t = 2)]
    n: u64,
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Grid as NX,NY; sized automatically when omitted.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    /// Sampling interval of the time series.
    #[arg(long, default_value_t = 0.01)]
    sample: f64,
    /// Fail when the relative L² drift exceeds 1e-8.
    #[arg(long)]
    conserve_check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List admissible indices.
    Pell {
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Also cross-check against a brute-force search up to this bound.
        #[arg(long)]
        check: Option<u64>,
    },
    /// Tabulate the resonance function on a box of frequencies.
    Resonance {
        #[arg(long, default_value_t = 20)]
        max_m: u32,
        #[arg(long, default_value_t = 20)]
        max_k: u32,
    },
    /// Evolve the perturbed initial datum and record norms.
    Evolve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Residual of the ansatz at the given times.
    Residual {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        times: Vec<f64>,
        /// corrected, literal or omitted.
        #[arg(long, default_value = "corrected")]
        remainder: String,
    },
    /// Physical values of the ansatz at one time.
    AnsatzDump {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Distance between the 1D low-frequency flow and the modulated cosine.
    Lowfreq {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Paired evolution and the separation series.
    Thm1 {
        #[command(flatten)]
        run: RunArgs,
        /// Wall-clock budget; shorten the run when exceeded.
        #[arg(long)]
        budget_seconds: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        fallback_t_end: f64,
    },
    /// Ansatz against the computed flow.
    AnsatzVsFlow {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Separation constants across several n.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "2,18")]
        ns: Vec<u64>,
    },
    /// Galilean transformation on T.
    Galilean {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Run a JSON configuration file.
    Run { config: PathBuf },
}

fn spec(run: &RunArgs, threads: usize) -> LabResult<RunSpec> {
    let mut spec = RunSpec::new(run.n)?;
    spec.sigma = run.sigma;
    spec.theta = run.theta;
    spec.grid = match run.grid.as_deref() {
        Some(&[nx, ny]) => Some(TorusGrid::new(nx, ny)?),
        Some(_) => return Err(LabError::Param("--grid takes NX,NY".into())),
        None => None,
    };
    spec.dt = run.dt;
    spec.t_end = run.t_end;
    spec.sample = run.sample;
    spec.threads = threads;
    spec.conserve_check = run.conserve_check;
    Ok(spec)
}

fn dispatch(cli: &Cli, out: &mut OutputDir) -> LabResult<(ExperimentManifest, &'static str)> {
    let th = cli.threads;
    Ok(match &cli.command {
        Command::Pell { count, check } => (experiments::pell_run(*count, *check, out)?, "pell"),
        Command::Resonance { max_m, max_k } => (experiments::resonance_run(*max_m, *max_k, out)?, "resonance"),
        Command::Evolve { run, snapshot_every } => {
            (experiments::evolve_run(&spec(run, th)?, *snapshot_every, out)?, "evolve")
        }
        Command::Residual { run, times, remainder } => (
            experiments::residual_run(&spec(run, th)?, times, parse_remainder(remainder)?, out)?,
            "residual",
        ),
        Command::AnsatzDump { run, t } => (experiments::ansatz_dump(&spec(run, th)?, *t, out)?, "ansatz_dump"),
        Command::Lowfreq { run } => (experiments::lowfreq_run(&spec(run, th)?, out)?, "lowfreq"),
        Command::Thm1 { run, budget_seconds, fallback_t_end } => {
            let opts = Thm1Options {
                budget_seconds: *budget_seconds,
                fallback_t_end: *fallback_t_end,
            };
            (experiments::thm1_experiment(&spec(run, th)?, &opts, out)?, "thm1")
        }
        Command::AnsatzVsFlow { run } => (experiments::ansatz_vs_flow(&spec(run, th)?, out)?, "ansatz_vs_flow"),
        Command::Compare { run, ns } => {
            let first = *ns.first().ok_or_else(|| LabError::Param("--ns is empty".into()))?;
            let template = spec(&RunArgs { n: first, ..run.clone() }, th)?;
            (experiments::compare(&template, ns, out)?, "compare")
        }
        Command::Galilean { s, ns, t } => (experiments::galilean_run(*s, ns, *t, out)?, "galilean"),
        Command::Run { .. } => unreachable!("handled before dispatch"),
    })
}

fn run(cli: &Cli) -> LabResult<()> {
    if cli.threads == 0 {
        return Err(LabError::Param("--threads must be at least 1".into()));
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    if let Command::Run { config } = &cli.command {
        let manifest = kp5lab::run_manifest(config, Some(&cli.out), cli.threads)?;
        print_summary(&manifest);
        return Ok(());
    }
    let mut out = OutputDir::new(cli.out.clone())?;
    match dispatch(cli, &mut out) {
        Ok((manifest, name)) => {
            manifest.save(&mut out, &format!("{name}_manifest.json"))?;
            print_summary(&manifest);
            Ok(())
        }
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn print_summary(m: &ExperimentManifest) {
    println!("{}", m.experiment_name);
    for (k, v) in &m.summary_metrics {
        println!("  {k} = {v:e}");
    }
    for f in &m.outputs {
        println!("  wrote {f}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
