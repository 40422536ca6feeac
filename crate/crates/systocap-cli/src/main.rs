//! Command-line front end: strict config parsing, command dispatch, and
//! bit-stable certificate reports.
//!
//! Exit status: 0 when every requested certificate passes, 1 for failing
//! certificates or component errors, 2 for usage and configuration errors.

mod config;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use systocap_core::capacity::{
    capacity_with, lower_certificate_with, CapacityOptions, CHZ_CITATION,
};
use systocap_core::embedding::verify_embedding_samples;
use systocap_core::lattice::{
    pull_back, systole_capped, unimodular_complete, UnimodularMatrix, DEFAULT_ENUM_CAP,
};
use systocap_core::Error;

use config::{config_echo, parse_config, parse_gram_matrix, Command, RunConfig};
use report::{fmt_human, fmt_machine, Val};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, Debug, Subcommand)]
enum CommandArg {
    /// Shortest lattice vector of the gauge with a certified minimizer.
    Systole,
    /// Full capacity certificate: value, both bounds, case classification.
    Capacity,
    /// Upper bound only: reduction, widths, embedding verification.
    CertifyUpper,
    /// Lower bound only: lattice emptiness and the product inclusion.
    CertifyLower,
    /// The sampling harness report for the cylinder embedding.
    VerifyEmbedding,
    /// Randomized gauge-axiom diagnostics.
    Axioms,
}

impl From<CommandArg> for Command {
    fn from(arg: CommandArg) -> Command {
        match arg {
            CommandArg::Systole => Command::Systole,
            CommandArg::Capacity => Command::Capacity,
            CommandArg::CertifyUpper => Command::CertifyUpper,
            CommandArg::CertifyLower => Command::CertifyLower,
            CommandArg::VerifyEmbedding => Command::VerifyEmbedding,
            CommandArg::Axioms => Command::Axioms,
        }
    }
}

/// Computes capacity certificates for flat reversible Finsler tori.
#[derive(Debug, Parser)]
#[command(name = "systocap", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<CommandArg>,

    /// Configuration document (JSON) describing the norm and the run.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Sample count override for randomized verification.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Seed override for every randomized component.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// File holding a minorant Gram matrix (JSON rows).
    #[arg(long = "minorant-gram", global = true)]
    minorant_gram: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match prepare(cli) {
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok((cfg, command, enum_cap)) => {
            let started = Instant::now();
            match dispatch(command, &cfg, enum_cap) {
                Ok((val, pass)) => {
                    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
                    match format {
                        Format::Machine => print!("{}", fmt_machine(&val)),
                        Format::Human => {
                            print!("{}", fmt_human(command.name(), &val, runtime_ms))
                        }
                    }
                    if pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(err) => {
                    match format {
                        Format::Machine => {
                            let block = Val::map(vec![(
                                "error",
                                Val::map(vec![
                                    ("kind", Val::Str(error_kind(&err).to_string())),
                                    ("message", Val::Str(err.to_string())),
                                ]),
                            )]);
                            eprint!("{}", fmt_machine(&block));
                        }
                        Format::Human => eprintln!("error: {err}"),
                    }
                    ExitCode::from(1)
                }
            }
        }
    }
}

/// Resolves the CLI surface against the config document. Usage errors only.
fn prepare(cli: Cli) -> Result<(RunConfig, Command, u128), String> {
    let path = cli
        .config
        .ok_or("a configuration document is required: --config <path>")?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg = parse_config(&text)?;

    let command = match (cli.command.map(Command::from), cfg.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(format!(
                "subcommand {a} disagrees with config command {b}"
            ));
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err("no command: pass a subcommand or set `command` in the config".into())
        }
    };

    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(path) = cli.minorant_gram {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        cfg.minorant_gram = Some(parse_gram_matrix(&text)?);
    }

    match command {
        Command::CertifyUpper | Command::VerifyEmbedding if cfg.samples < 2 => {
            return Err(format!(
                "{command} needs at least 2 samples, got {}",
                cfg.samples
            ));
        }
        Command::Axioms if cfg.samples < 1 => {
            return Err("axioms needs at least 1 sample".into());
        }
        _ => {}
    }

    let enum_cap = match std::env::var("SYSTOCAP_ENUM_CAP") {
        Err(std::env::VarError::NotPresent) => DEFAULT_ENUM_CAP,
        Err(e) => return Err(format!("SYSTOCAP_ENUM_CAP: {e}")),
        Ok(raw) => raw
            .parse::<u128>()
            .map_err(|e| format!("SYSTOCAP_ENUM_CAP {raw:?}: {e}"))?,
    };
    Ok((cfg, command, enum_cap))
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::InvalidSpec(_) => "invalid-spec",
        Error::Domain(_) => "domain",
        Error::ResourceLimit { .. } => "resource-limit",
        Error::Sampling { .. } => "sampling",
        Error::NotPrimitive { .. } => "not-primitive",
        Error::NotUnimodular { .. } => "not-unimodular",
        Error::Overflow => "overflow",
        Error::Singular => "singular",
        Error::Certificate(_) => "certificate",
    }
}

fn basis_block(a: &UnimodularMatrix) -> Val {
    Val::int_matrix(&a.matrix().to_rows())
}

fn dispatch(command: Command, cfg: &RunConfig, enum_cap: u128) -> Result<(Val, bool), Error> {
    // The echo closes the loop: parsing it reproduces this exact run.
    let echo = config_echo(cfg, command).map_err(Error::InvalidSpec)?;
    match command {
        Command::Systole => run_systole(cfg, enum_cap, echo),
        Command::Capacity => run_capacity(cfg, enum_cap, echo),
        Command::CertifyUpper => run_certify_upper(cfg, enum_cap, echo),
        Command::CertifyLower => run_certify_lower(cfg, enum_cap, echo),
        Command::VerifyEmbedding => run_verify_embedding(cfg, enum_cap, echo),
        Command::Axioms => run_axioms(cfg, echo),
    }
}

fn run_systole(cfg: &RunConfig, enum_cap: u128, echo: Val) -> Result<(Val, bool), Error> {
    let result = systole_capped(&cfg.spec, enum_cap)?;
    let val = Val::map(vec![
        ("command", Val::Str("systole".into())),
        ("config", echo),
        ("exhaustive", Val::Bool(result.exhaustive)),
        ("minimizer", Val::ints(&result.u)),
        ("systole", Val::Real(result.s)),
    ]);
    Ok((val, true))
}

fn embedding_report_block(report: &systocap_core::embedding::EmbeddingReport) -> Val {
    Val::map(vec![
        ("collision_pairs", Val::Int(report.collision_pairs as i128)),
        (
            "containment_failures",
            Val::Int(report.containment_failures as i128),
        ),
        (
            "max_symplectic_defect",
            Val::Real(report.max_symplectic_defect),
        ),
        ("r1", Val::Real(report.r1)),
        ("samples", Val::Int(report.samples as i128)),
        ("seed", Val::Int(report.seed as i128)),
    ])
}

/// Pass judgment against the (possibly overridden) defect tolerance.
fn report_passes(report: &systocap_core::embedding::EmbeddingReport, tol: f64) -> bool {
    report.max_symplectic_defect < tol
        && report.containment_failures == 0
        && report.collision_pairs == 0
}

fn run_capacity(cfg: &RunConfig, enum_cap: u128, echo: Val) -> Result<(Val, bool), Error> {
    let opts = CapacityOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        enum_cap,
        assume_hz: cfg.assume_hz,
        minorant_gram: cfg.minorant_gram.clone(),
        ..CapacityOptions::default()
    };
    let cert = capacity_with(&cfg.spec, &opts)?;
    let pass = report_passes(&cert.upper_report, cfg.tolerances.embedding_defect)
        && cert.lower_lattice_check;
    let val = Val::map(vec![
        ("basis", basis_block(&cert.basis)),
        ("case", Val::Str(cert.case.name().to_string())),
        ("citation", Val::Str(CHZ_CITATION.to_string())),
        ("command", Val::Str("capacity".into())),
        ("config", echo),
        ("exhaustive", Val::Bool(cert.systole.exhaustive)),
        ("lower_lattice_check", Val::Bool(cert.lower_lattice_check)),
        ("minimizer", Val::ints(&cert.systole.u)),
        ("notes", Val::Str(cert.notes.clone())),
        ("r1", Val::Real(cert.r1)),
        ("systole", Val::Real(cert.systole.s)),
        (
            "tolerances",
            Val::map(vec![(
                "embedding_defect",
                Val::Real(cfg.tolerances.embedding_defect),
            )]),
        ),
        ("upper_report", embedding_report_block(&cert.upper_report)),
        ("value", Val::Real(cert.value)),
        ("widths", Val::reals(&cert.widths)),
    ]);
    Ok((val, pass))
}

/// Reduction, widths, and the sampled embedding certificate.
fn upper_pipeline(
    cfg: &RunConfig,
    enum_cap: u128,
) -> Result<
    (
        systocap_core::lattice::SystoleResult,
        UnimodularMatrix,
        Vec<f64>,
        systocap_core::embedding::EmbeddingReport,
    ),
    Error,
> {
    let sys = systole_capped(&cfg.spec, enum_cap)?;
    let a = unimodular_complete(&sys.u)?;
    let spec_a = pull_back(&cfg.spec, &a)?;
    let n = cfg.spec.dim();
    let mut widths = Vec::with_capacity(n);
    let mut unit = vec![0.0; n];
    for k in 0..n {
        unit[k] = 1.0;
        widths.push(spec_a.gauge(&unit)?);
        unit[k] = 0.0;
    }
    let report = verify_embedding_samples(&cfg.spec, &a, &widths, cfg.samples, cfg.seed)?;
    Ok((sys, a, widths, report))
}

fn run_certify_upper(cfg: &RunConfig, enum_cap: u128, echo: Val) -> Result<(Val, bool), Error> {
    let (sys, a, widths, report) = upper_pipeline(cfg, enum_cap)?;
    let identity_residual =
        (std::f64::consts::PI * report.r1 * report.r1 - 2.0 * sys.s).abs();
    let pass = report_passes(&report, cfg.tolerances.embedding_defect)
        && identity_residual <= 1e-12 * (2.0 * sys.s).max(1.0);
    let val = Val::map(vec![
        ("basis", basis_block(&a)),
        ("command", Val::Str("certify-upper".into())),
        ("config", echo),
        ("cylinder_identity_residual", Val::Real(identity_residual)),
        ("pass", Val::Bool(pass)),
        ("r1", Val::Real(report.r1)),
        ("report", embedding_report_block(&report)),
        ("systole", Val::Real(sys.s)),
        (
            "tolerances",
            Val::map(vec![(
                "embedding_defect",
                Val::Real(cfg.tolerances.embedding_defect),
            )]),
        ),
        ("widths", Val::reals(&widths)),
    ]);
    Ok((val, pass))
}

fn run_certify_lower(cfg: &RunConfig, enum_cap: u128, echo: Val) -> Result<(Val, bool), Error> {
    let sys = systole_capped(&cfg.spec, enum_cap)?;
    let evidence = lower_certificate_with(&cfg.spec, sys.s, enum_cap, cfg.seed)?;
    let pass = evidence.holds();
    let val = Val::map(vec![
        ("citation", Val::Str(evidence.citation.to_string())),
        ("command", Val::Str("certify-lower".into())),
        ("config", echo),
        (
            "empty_below_systole",
            Val::Bool(evidence.empty_below_systole),
        ),
        ("exhaustive", Val::Bool(evidence.exhaustive)),
        (
            "inclusion_failures",
            Val::Int(evidence.inclusion_failures as i128),
        ),
        (
            "inclusion_samples",
            Val::Int(evidence.inclusion_samples as i128),
        ),
        ("pass", Val::Bool(pass)),
        ("status", Val::Str(evidence.status().to_string())),
        ("systole", Val::Real(sys.s)),
    ]);
    Ok((val, pass))
}

fn run_verify_embedding(cfg: &RunConfig, enum_cap: u128, echo: Val) -> Result<(Val, bool), Error> {
    let (_, a, widths, report) = upper_pipeline(cfg, enum_cap)?;
    let pass = report_passes(&report, cfg.tolerances.embedding_defect);
    let val = Val::map(vec![
        ("basis", basis_block(&a)),
        ("command", Val::Str("verify-embedding".into())),
        ("config", echo),
        ("pass", Val::Bool(pass)),
        ("report", embedding_report_block(&report)),
        (
            "tolerances",
            Val::map(vec![(
                "embedding_defect",
                Val::Real(cfg.tolerances.embedding_defect),
            )]),
        ),
        ("widths", Val::reals(&widths)),
    ]);
    Ok((val, pass))
}

fn run_axioms(cfg: &RunConfig, echo: Val) -> Result<(Val, bool), Error> {
    let report = cfg
        .spec
        .check_gauge_axioms(cfg.samples as usize, cfg.seed)?;
    let pass = report.passes();
    let val = Val::map(vec![
        ("command", Val::Str("axioms".into())),
        ("config", echo),
        (
            "max_homogeneity_violation",
            Val::Real(report.max_homogeneity_violation),
        ),
        (
            "max_reversibility_violation",
            Val::Real(report.max_reversibility_violation),
        ),
        (
            "max_triangle_violation",
            Val::Real(report.max_triangle_violation),
        ),
        ("pass", Val::Bool(pass)),
        (
            "positivity_failures",
            Val::Int(report.positivity_failures as i128),
        ),
        ("samples", Val::Int(report.samples as i128)),
        ("seed", Val::Int(report.seed as i128)),
        ("tolerance", Val::Real(report.tolerance)),
        ("violations", Val::Int(report.violations as i128)),
    ]);
    Ok((val, pass))
}
