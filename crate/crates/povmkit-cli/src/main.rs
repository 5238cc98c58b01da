//! Command-line front end for povmkit.
//!
//! Subcommands: `construct`, `verify`, `search`, `tomo`, `clone`. Every run
//! echoes its fully-resolved configuration, the tool version, and the seed
//! into its output; identical invocations with identical seeds produce
//! byte-identical outputs.
//!
//! Exit codes: 0 success, 1 domain failure (not IC, not certified, not a
//! valid POVM), 2 I/O or parse failure, 3 bad arguments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use povmkit::cloning::{summarize_fidelity, CloningStrategy};
use povmkit::constructions::{
    basis_povm, mub_povm, random_rank_one_povm, sic_fiducial, sic_fiducial_numerical,
    sic_povm_from_fiducial,
};
use povmkit::designs::{is_t_design, search_2design, SearchOpts};
use povmkit::error::Error;
use povmkit::io::{self, FileMeta};
use povmkit::linops::Operator;
use povmkit::povm::{design_from_rank_one_povm, ic_check, tightness_check, DiscretePOVM};
use povmkit::tomo::{run_tomography, DualChoice, Estimator, StateEnsemble, TomographyConfig};
use povmkit::{tol, Result};

const TOOL: &str = "povmkit";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[clap(rename_all = "snake_case")]
enum EstimatorArg {
    Frequency,
    MubConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Sic,
    Mub,
    Basis,
    Random,
}

#[derive(Parser, Debug)]
#[command(name = TOOL, version, about = "Construct, verify, and exercise informationally complete POVMs")]
struct Cli {
    /// RNG seed for anything stochastic in the subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Certification / check tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Output file path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Stdout format; csv is available for `tomo` per-trial records.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a POVM and write it as JSON.
    Construct {
        /// Family: sic, mub, basis, or random.
        #[arg(value_enum)]
        kind: Kind,
        /// Dimension d (must be prime for mub).
        dim: usize,
        /// Outcome count for the random family (default 2d²).
        #[arg(long)]
        outcomes: Option<usize>,
    },
    /// Validate a POVM file and report completeness and tightness.
    Verify {
        /// POVM JSON file.
        file: PathBuf,
    },
    /// Numerically search for a weighted 2-design.
    Search {
        /// Dimension d.
        dim: usize,
        /// Number of points (at least d²).
        points: usize,
        /// Iteration cap per restart.
        #[arg(long, default_value_t = 30_000)]
        iters: usize,
        /// Independent restarts.
        #[arg(long, default_value_t = 12)]
        restarts: usize,
    },
    /// Monte Carlo linear tomography.
    Tomo {
        /// POVM file or builtin spec (sic:D, mub:P, basis:D, random:D:N).
        #[arg(long)]
        povm: String,
        /// State: a file, pure:random (Haar orbit), or mixed:id (I/d).
        #[arg(long, default_value = "pure:random")]
        state: String,
        /// Samples per trial.
        #[arg(long = "N", visible_alias = "samples")]
        n: u64,
        /// Number of trials.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Probability estimator.
        #[arg(long, value_enum, default_value_t = EstimatorArg::Frequency)]
        estimator: EstimatorArg,
    },
    /// Measurement-based cloning fidelity report.
    Clone {
        /// POVM file or builtin spec (sic:D, mub:P, basis:D, random:D:N).
        #[arg(long)]
        povm: String,
        /// Haar samples for the fidelity landscape.
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Gradient-descent refinement steps for the worst case.
        #[arg(long, default_value_t = 50)]
        refine: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Io(_) | Error::Json(_) => 2,
                Error::InvalidArgument(_) => 3,
                _ => 1,
            })
        }
    }
}

fn meta(seed: u64, config: serde_json::Value) -> FileMeta {
    FileMeta {
        tool: TOOL.into(),
        version: VERSION.into(),
        seed: Some(seed),
        config,
    }
}

fn envelope(seed: u64, config: &serde_json::Value, body: serde_json::Value) -> serde_json::Value {
    let mut out = json!({
        "tool": TOOL,
        "version": VERSION,
        "seed": seed,
        "config": config,
    });
    out.as_object_mut()
        .unwrap()
        .extend(body.as_object().cloned().unwrap_or_default());
    out
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Tomo { .. }) {
        return Err(Error::InvalidArgument(
            "csv output is only available for the tomo subcommand".into(),
        ));
    }
    match &cli.command {
        Command::Construct { kind, dim, outcomes } => cmd_construct(cli, *kind, *dim, *outcomes),
        Command::Verify { file } => cmd_verify(cli, file),
        Command::Search { dim, points, iters, restarts } => {
            cmd_search(cli, *dim, *points, *iters, *restarts)
        }
        Command::Tomo { povm, state, n, trials, estimator } => {
            cmd_tomo(cli, povm, state, *n, *trials, *estimator)
        }
        Command::Clone { povm, samples, refine } => cmd_clone(cli, povm, *samples, *refine),
    }
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn cmd_construct(cli: &Cli, kind: Kind, dim: usize, outcomes: Option<usize>) -> Result<ExitCode> {
    let (povm, certified) = match kind {
        Kind::Sic => {
            if dim == 2 || dim == 3 {
                (sic_povm_from_fiducial(&sic_fiducial(dim)?)?, true)
            } else {
                let fiducial = sic_fiducial_numerical(dim, cli.seed, &SearchOpts::default())?;
                let certified = fiducial.certified();
                (sic_povm_from_fiducial(&fiducial)?, certified)
            }
        }
        Kind::Mub => (mub_povm(dim)?, true),
        Kind::Basis => (basis_povm(dim)?, true),
        Kind::Random => {
            let n = outcomes.unwrap_or(2 * dim * dim);
            (random_rank_one_povm(dim, n, cli.seed)?, true)
        }
    };

    let config = json!({
        "command": "construct",
        "kind": format!("{kind:?}").to_lowercase(),
        "dim": dim,
        "outcomes": outcomes,
        "seed": cli.seed,
        "out": cli.out.as_ref().map(|p| p.display().to_string()),
    });

    let povd = povm.povd();
    let taus = povd.taus();
    let ic = ic_check(&povm, cli.tol.unwrap_or(tol::SPECTRAL_REL));
    let summary = envelope(
        cli.seed,
        &config,
        json!({
            "outcomes": povm.len(),
            "tau_min": taus.iter().cloned().fold(f64::INFINITY, f64::min),
            "tau_max": taus.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            "is_ic": ic.is_ic,
            "certified": certified,
        }),
    );

    let file_text = io::povm_to_json(&povm, Some(meta(cli.seed, config.clone())));
    match &cli.out {
        Some(path) => {
            std::fs::write(path, file_text)?;
            println!("{}", serde_json::to_string(&summary).expect("serializable"));
        }
        None => {
            println!("{file_text}");
            eprintln!("{}", serde_json::to_string(&summary).expect("serializable"));
        }
    }
    Ok(if certified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(cli: &Cli, file: &PathBuf) -> Result<ExitCode> {
    let povm = io::read_povm(file)?;
    let check_tol = cli.tol.unwrap_or(tol::TIGHTNESS_ABS);
    let diagnostics = povm.validate(cli.tol.unwrap_or(tol::POVM_SUM));
    let ic = ic_check(&povm, cli.tol.unwrap_or(tol::SPECTRAL_REL));
    let tightness = tightness_check(&povm, check_tol);

    // rank-one POVMs double as weighted designs; cross-check the 2-design
    // certificate against the superoperator one
    let two_design = match design_from_rank_one_povm(&povm, 1e-8) {
        Ok(design) => {
            let report = is_t_design(&design, 2, tol::DESIGN_CERT);
            json!({
                "applicable": true,
                "potential": report.potential,
                "bound": report.bound,
                "gap": report.gap,
                "is_design": report.is_design,
                "agrees_with_rank_one_tight": report.is_design == tightness.is_rank_one_tight,
            })
        }
        Err(_) => json!({ "applicable": false }),
    };

    let config = json!({
        "command": "verify",
        "file": file.display().to_string(),
        "tol": check_tol,
    });
    let dropped = povm.povd().dropped().to_vec();
    let report = envelope(
        cli.seed,
        &config,
        json!({
            "valid": diagnostics.pass,
            "diagnostics": diagnostics,
            "dropped_outcomes": dropped,
            "ic": ic,
            "tightness": tightness,
            "two_design": two_design,
        }),
    );
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    if let Some(path) = &cli.out {
        std::fs::write(path, &text)?;
    }
    println!("{text}");
    Ok(if diagnostics.pass && ic.is_ic { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

fn cmd_search(
    cli: &Cli,
    dim: usize,
    points: usize,
    iters: usize,
    restarts: usize,
) -> Result<ExitCode> {
    let opts = SearchOpts {
        max_iters: iters,
        restarts,
        cert_tol: cli.tol.unwrap_or(tol::DESIGN_CERT),
        optimize_weights: false,
    };
    let outcome = search_2design(dim, points, cli.seed, &opts)?;
    let config = json!({
        "command": "search",
        "dim": dim,
        "points": points,
        "iters": iters,
        "restarts": restarts,
        "cert_tol": opts.cert_tol,
        "seed": cli.seed,
        "out": cli.out.as_ref().map(|p| p.display().to_string()),
    });
    if let Some(path) = &cli.out {
        io::write_design(path, &outcome.design, Some(meta(cli.seed, config.clone())))?;
    }
    let report = envelope(
        cli.seed,
        &config,
        json!({
            "certified": outcome.certified,
            "report": outcome.report,
            "best_restart": outcome.best_restart,
        }),
    );
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    Ok(if outcome.certified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

// ---------------------------------------------------------------------------
// tomo
// ---------------------------------------------------------------------------

fn load_povm(spec: &str, seed: u64) -> Result<DiscretePOVM> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["sic", d] => {
            let dim: usize = parse_num(d, "sic dimension")?;
            if dim == 2 || dim == 3 {
                sic_povm_from_fiducial(&sic_fiducial(dim)?)
            } else {
                let fiducial = sic_fiducial_numerical(dim, seed, &SearchOpts::default())?;
                if !fiducial.certified() {
                    return Err(Error::InvalidArgument(format!(
                        "numerical SIC search for d={dim} failed to certify"
                    )));
                }
                sic_povm_from_fiducial(&fiducial)
            }
        }
        ["mub", p] => mub_povm(parse_num(p, "mub prime")?),
        ["basis", d] => basis_povm(parse_num(d, "basis dimension")?),
        ["random", d, n] => {
            random_rank_one_povm(parse_num(d, "random dimension")?, parse_num(n, "outcomes")?, seed)
        }
        _ => io::read_povm_validated(spec),
    }
}

fn parse_num<T: std::str::FromStr>(text: &str, what: &str) -> Result<T> {
    text.parse()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse {what} from {text:?}")))
}

fn load_state(spec: &str, dim: usize) -> Result<StateEnsemble> {
    match spec {
        // the Haar orbit of any pure state is the Haar ensemble of pure
        // states, so a fixed fiducial σ = |0⟩⟨0| suffices
        "pure:random" => {
            let sigma = Operator::from_fn(dim, |i, j| {
                if i == 0 && j == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            Ok(StateEnsemble::HaarOrbit(sigma))
        }
        "mixed:id" => Ok(StateEnsemble::Fixed(Operator::identity(dim).scale_re(1.0 / dim as f64))),
        path => Ok(StateEnsemble::Fixed(io::read_state(path)?)),
    }
}

fn cmd_tomo(
    cli: &Cli,
    povm_spec: &str,
    state_spec: &str,
    n: u64,
    trials: u64,
    estimator: EstimatorArg,
) -> Result<ExitCode> {
    let povm = load_povm(povm_spec, cli.seed)?;
    let ensemble = load_state(state_spec, povm.dim())?;
    let config = TomographyConfig {
        samples_per_trial: n,
        trials,
        seed: cli.seed,
        estimator: match estimator {
            EstimatorArg::Frequency => Estimator::Frequency,
            EstimatorArg::MubConstrained => Estimator::MubConstrained,
        },
        state_ensemble: ensemble,
        dual: DualChoice::Canonical,
        keep_trial_errors: true,
    };
    let stats = run_tomography(&povm, &config)?;

    let config_echo = json!({
        "command": "tomo",
        "povm": povm_spec,
        "state": state_spec,
        "N": n,
        "trials": trials,
        "estimator": config.estimator,
        "seed": cli.seed,
        "out": cli.out.as_ref().map(|p| p.display().to_string()),
    });

    let per_trial = stats.per_trial_errors.as_deref().unwrap_or(&[]);
    let mut csv = String::from("trial,sq_error\n");
    for (k, e) in per_trial.iter().enumerate() {
        csv.push_str(&format!("{k},{e}\n"));
    }

    let summary = envelope(
        cli.seed,
        &config_echo,
        json!({
            "mean": stats.mean_sq_error,
            "stderr": stats.std_error,
            "predicted": stats.predicted,
            "trials": stats.trials,
        }),
    );
    if let Some(path) = &cli.out {
        std::fs::write(path, &csv)?;
    }
    match cli.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"))
        }
        Format::Csv => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// clone
// ---------------------------------------------------------------------------

fn cmd_clone(cli: &Cli, povm_spec: &str, samples: usize, refine: usize) -> Result<ExitCode> {
    let povm = load_povm(povm_spec, cli.seed)?;
    let strategy = CloningStrategy::from_povd(povm)?;
    let report = summarize_fidelity(&strategy, samples, refine, cli.seed);
    let config = json!({
        "command": "clone",
        "povm": povm_spec,
        "samples": samples,
        "refine": refine,
        "seed": cli.seed,
        "out": cli.out.as_ref().map(|p| p.display().to_string()),
    });
    let out = envelope(cli.seed, &config, serde_json::to_value(&report)?);
    let text = serde_json::to_string_pretty(&out).expect("serializable");
    if let Some(path) = &cli.out {
        std::fs::write(path, &text)?;
    }
    println!("{text}");
    Ok(ExitCode::SUCCESS)
}
