//! Command-line front end for the rescat workbench.
//!
//! Exit codes: 0 success / verdict as expected, 1 verdict mismatch, 2 input
//! error, 3 numerical non-convergence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rescat_core::catalysis::{
    construct_dmax_broadcast, is_catalytic_channel, run_builtin_check, verify_broadcast,
};
use rescat_core::channel::ChannelJson;
use rescat_core::degrade::{run_protocol, trace_csv, SimConfig};
use rescat_core::freeset::FreeSetJson;
use rescat_core::monotone::{
    dmax, measured_rel_ent_resource_lb, rel_ent_resource, rev_rel_ent_resource, MeasurementSet,
    MonotoneResult,
};
use rescat_core::qmat::{ComplexMatrix, DensityMatrix, MatrixJson, RawMatrixJson};
use rescat_core::scan::threshold_scan;
use rescat_core::suite;

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "rescat", version, about = "Robust catalysis and resource broadcasting workbench")]
struct Cli {
    /// Master seed for randomized sweeps (RESCAT_SEED overrides).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Built-in paper examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Resource monotones of a state against a free-set family.
    Monotone {
        which: MonotoneWhich,
        /// State file (matrix JSON).
        #[arg(long)]
        state: PathBuf,
        /// Free-set descriptor file.
        #[arg(long)]
        freeset: PathBuf,
        /// POVM list file for the measured lower bound.
        #[arg(long)]
        povm: Option<PathBuf>,
        /// Write the result JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Input-agnostic catalysis check of a dilation.
    CatalyticCheck {
        /// Channel file (channel JSON).
        #[arg(long)]
        channel: PathBuf,
        /// Catalyst state file.
        #[arg(long)]
        catalyst: PathBuf,
        /// Decision tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Broadcasting constructions and verdicts.
    Broadcast {
        #[command(subcommand)]
        action: BroadcastAction,
    },
    /// Repeated-round degradation simulation.
    Simulate {
        /// Run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rounds: usize,
        /// CSV output path; the run manifest lands next to it as .json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid scans.
    Scan {
        #[command(subcommand)]
        action: ScanAction,
    },
    /// Acceptance criteria (1-8).
    Acceptance {
        /// Criterion id; all criteria when omitted.
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// Regression-check a builtin example; exit 0 when every check matches.
    Run { name: String },
    /// List the builtin example names.
    List,
}

#[derive(Subcommand)]
enum BroadcastAction {
    /// Build the measure-and-prepare broadcaster for a target state.
    Construct {
        /// Catalyst free state γ_C (matrix JSON).
        #[arg(long = "gamma-c")]
        gamma_c: PathBuf,
        /// System free-set descriptor.
        #[arg(long = "freeset-s")]
        freeset_s: PathBuf,
        /// Target state σ.
        #[arg(long)]
        sigma: PathBuf,
        /// Write the channel JSON of a feasible construction here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify that a channel broadcasts a state.
    Verify {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        freeset: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum ScanAction {
    /// Broadcastability threshold scan over the Bloch grid.
    Thm4 {
        #[arg(long, default_value_t = 21)]
        grid: usize,
        /// CSV output path; the summary JSON lands next to it as .json.
        #[arg(long)]
        out: PathBuf,
        /// Catalyst free state override (matrix JSON).
        #[arg(long = "gamma-c")]
        gamma_c: Option<PathBuf>,
        /// System free-set override.
        #[arg(long = "freeset-s")]
        freeset_s: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MonotoneWhich {
    Dmax,
    Relent,
    Revrelent,
    #[value(name = "measured-lb")]
    MeasuredLb,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn effective_seed(cli_seed: Option<u64>) -> u64 {
    if let Ok(text) = std::env::var("RESCAT_SEED") {
        if let Ok(v) = text.parse() {
            return v;
        }
    }
    cli_seed.unwrap_or(42)
}

fn stamp(mut value: Value) -> Value {
    if let Value::Object(map) = &mut value {
        map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    }
    value
}

fn emit(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_state(path: &Path) -> anyhow::Result<DensityMatrix> {
    let text = fs::read_to_string(path)?;
    let m: MatrixJson = serde_json::from_str(&text)?;
    Ok(m.to_state()?)
}

fn load_freeset(path: &Path) -> anyhow::Result<rescat_core::freeset::FreeSet> {
    let text = fs::read_to_string(path)?;
    let f: FreeSetJson = serde_json::from_str(&text)?;
    Ok(f.to_freeset()?)
}

fn load_channel(path: &Path) -> anyhow::Result<rescat_core::channel::QuantumChannel> {
    let text = fs::read_to_string(path)?;
    let c: ChannelJson = serde_json::from_str(&text)?;
    Ok(c.to_channel()?)
}

fn load_povms(path: &Path) -> anyhow::Result<MeasurementSet> {
    #[derive(serde::Deserialize)]
    struct PovmFile {
        povms: Vec<Vec<RawMatrixJson>>,
    }
    let text = fs::read_to_string(path)?;
    let file: PovmFile = serde_json::from_str(&text)?;
    let povms = file
        .povms
        .iter()
        .map(|povm| {
            povm.iter()
                .map(|m| m.matrix())
                .collect::<rescat_core::Result<Vec<ComplexMatrix>>>()
        })
        .collect::<rescat_core::Result<Vec<_>>>()?;
    Ok(MeasurementSet::new(povms)?)
}

/// `foo.csv` → `foo.manifest.json`, never clobbering the input config.
fn manifest_sibling(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}.manifest.json"))
}

fn monotone_exit(result: &MonotoneResult) -> u8 {
    // a finite value with a large certified gap means the optimizer did not
    // converge; infinite values and closed forms are exact
    if result.value_bits.is_finite() && result.residual.is_finite() && result.residual > 1e-6 {
        EXIT_NONCONVERGENCE
    } else {
        0
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Commands::Examples { action } => match action {
            ExamplesAction::List => {
                for name in rescat_core::catalysis::builtin::BUILTIN_NAMES {
                    println!("{name}");
                }
                Ok(0)
            }
            ExamplesAction::Run { name } => {
                let report = run_builtin_check(&name)?;
                let value = stamp(serde_json::to_value(&report)?);
                emit(&value, None)?;
                Ok(if report.passed { 0 } else { EXIT_MISMATCH })
            }
        },
        Commands::Monotone {
            which,
            state,
            freeset,
            povm,
            out,
        } => {
            let rho = load_state(&state)?;
            let family = load_freeset(&freeset)?;
            let result = match which {
                MonotoneWhich::Dmax => dmax(&rho, &family)?,
                MonotoneWhich::Relent => rel_ent_resource(&rho, &family)?,
                MonotoneWhich::Revrelent => rev_rel_ent_resource(&rho, &family)?,
                MonotoneWhich::MeasuredLb => {
                    let measurements = match povm {
                        Some(path) => load_povms(&path)?,
                        None => {
                            if rho.dim() != 2 {
                                anyhow::bail!(
                                    "the default informationally complete POVM is qubit-only; pass --povm"
                                );
                            }
                            MeasurementSet::informationally_complete_qubit()
                        }
                    };
                    measured_rel_ent_resource_lb(&rho, &family, &measurements)?
                }
            };
            let value = stamp(result.to_json());
            emit(&value, out.as_deref())?;
            Ok(monotone_exit(&result))
        }
        Commands::CatalyticCheck {
            channel,
            catalyst,
            tol,
        } => {
            let ch = load_channel(&channel)?;
            let tau = load_state(&catalyst)?;
            let report = is_catalytic_channel(&ch, &tau, tol)?;
            let value = stamp(json!({
                "catalytic": report.catalytic,
                "max_deviation": report.max_deviation,
                "worst_error": report.worst_error,
                "worst_state": MatrixJson::from_state(&report.worst_state),
            }));
            emit(&value, None)?;
            Ok(0)
        }
        Commands::Broadcast { action } => match action {
            BroadcastAction::Construct {
                gamma_c,
                freeset_s,
                sigma,
                out,
            } => {
                let gamma = load_state(&gamma_c)?;
                let family = load_freeset(&freeset_s)?;
                let target = load_state(&sigma)?;
                let built = construct_dmax_broadcast(&gamma, &family, &target)?;
                let value = stamp(json!({
                    "feasible": built.feasible,
                    "lambda1": built.lambda1,
                    "margin": built.margin,
                    "psi": MatrixJson::from_state(&built.psi),
                    "zeta": built.zeta.as_ref().map(MatrixJson::from_state),
                    "omega": built.omega.as_ref().map(MatrixJson::from_state),
                    "gamma_s": built.gamma_s.as_ref().map(MatrixJson::from_state),
                }));
                emit(&value, None)?;
                if let (Some(path), Some(channel)) = (out, built.channel.as_ref()) {
                    let cj = ChannelJson::from_channel("dmax_broadcaster", channel);
                    fs::write(path, serde_json::to_string_pretty(&cj)?)?;
                }
                Ok(0)
            }
            BroadcastAction::Verify {
                channel,
                state,
                freeset,
                tol,
            } => {
                let ch = load_channel(&channel)?;
                let tau = load_state(&state)?;
                let family = load_freeset(&freeset)?;
                let report = verify_broadcast(&ch, &tau, &family, tol)?;
                let value = stamp(serde_json::to_value(&report)?);
                emit(&value, None)?;
                Ok(0)
            }
        },
        Commands::Simulate {
            config,
            rounds,
            out,
        } => {
            let text = fs::read_to_string(&config)?;
            let mut cfg: SimConfig = serde_json::from_str(&text)?;
            if std::env::var("RESCAT_SEED").is_ok() || cli.seed.is_some() {
                cfg.seed = effective_seed(cli.seed);
            }
            let (channel, tau, rho, noise) = cfg.build()?;
            let traces = run_protocol(&channel, &tau, &rho, &noise, rounds)?;
            fs::write(&out, trace_csv(&traces, &rho))?;
            let manifest_path = manifest_sibling(&out);
            let manifest = stamp(cfg.manifest(rounds));
            fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
            println!(
                "wrote {} rounds to {} (manifest {})",
                traces.len(),
                out.display(),
                manifest_path.display()
            );
            Ok(0)
        }
        Commands::Scan { action } => match action {
            ScanAction::Thm4 {
                grid,
                out,
                gamma_c,
                freeset_s,
            } => {
                let gamma = match gamma_c {
                    Some(path) => load_state(&path)?,
                    None => DensityMatrix::from_probs(&[0.7, 0.3], "C")?,
                };
                let family = match freeset_s {
                    Some(path) => load_freeset(&path)?,
                    None => rescat_core::freeset::FreeSet::Singleton(DensityMatrix::from_probs(
                        &[0.6, 0.4],
                        "S",
                    )?),
                };
                let report = threshold_scan(&gamma, &family, grid, cli.jobs.max(1))?;
                fs::write(&out, report.to_csv())?;
                let summary = stamp(json!({
                    "grid": report.grid,
                    "threshold_bits": report.threshold_bits,
                    "points_total": report.points_total,
                    "points_skipped": report.points_skipped,
                    "feasible": report.feasible,
                    "mismatches": report.mismatches,
                    "check_failures": report.check_failures,
                }));
                let summary_path = out.with_extension("json");
                fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
                println!("{}", serde_json::to_string_pretty(&summary)?);
                Ok(if report.passed() { 0 } else { EXIT_MISMATCH })
            }
        },
        Commands::Acceptance { criterion } => {
            let jobs = cli.jobs.max(1);
            let reports = match criterion {
                Some(id) => vec![suite::run_one(id, jobs)?],
                None => suite::run_all(jobs)?,
            };
            let mut all_passed = true;
            for report in &reports {
                println!("{}", report.summary());
                if !report.passed {
                    all_passed = false;
                    for line in &report.details {
                        println!("  {line}");
                    }
                }
            }
            Ok(if all_passed { 0 } else { EXIT_MISMATCH })
        }
    }
}
