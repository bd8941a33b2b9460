//! Argument parsing for `mzsim run`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mzsim_core::experiments::{alpha_grid, phi_grid, DEFAULT_ALPHA_STEPS, DEFAULT_PHI_STEPS, DEFAULT_SHOTS};
use mzsim_core::{ExperimentConfig, Mode, SpinSystem, Variant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected by clap itself: unknown flag, malformed value, `--help`.
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("invalid value for {flag}: {reason}")]
    Usage { flag: &'static str, reason: String },
}

impl CliError {
    fn usage(flag: &'static str, reason: impl Into<String>) -> Self {
        CliError::Usage { flag, reason: reason.into() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mzsim", version, about = "Mach-Zehnder delayed-choice interferometer simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one interferometer variant over its phase (and ancilla) grid.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "closed")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "ideal")]
    mode: ModeArg,
    /// Number of phases spread over [0, 2π], both ends included.
    #[arg(long, default_value_t = DEFAULT_PHI_STEPS)]
    phi_steps: usize,
    /// Comma-separated ancilla angles (quantum-delayed only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alphas: Option<Vec<f64>>,
    /// Depolarizing probability applied after the circuit.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    noise_p: f64,
    /// Residual purity of the pseudopure input state.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    purity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shots per phase (wheeler only).
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: usize,
    /// Target resonance offset in Hz.
    #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
    offset_target: f64,
    /// Ancilla resonance offset in Hz.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    offset_ancilla: f64,
    /// Scalar coupling in Hz.
    #[arg(long, default_value_t = 209.0, allow_hyphen_values = true)]
    j_coupling: f64,
    /// Read `--alphas` in degrees.
    #[arg(long)]
    degrees: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Sweep output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the `alpha,visibility,theory_visibility` table here.
    #[arg(long)]
    visibility_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Open,
    Closed,
    Wheeler,
    QuantumDelayed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Ideal,
    Pulse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A parsed `run` command.
#[derive(Clone, Debug, PartialEq)]
pub struct Invocation {
    pub config: ExperimentConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub visibility_out: Option<PathBuf>,
}

/// Parses a full argv, program name first.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let Command::Run(args) = Cli::try_parse_from(argv)?.command;
    let config = build_config(&args)?;
    Ok(Invocation {
        config,
        format: args.format,
        out: args.out,
        visibility_out: args.visibility_out,
    })
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let variant = match args.variant {
        VariantArg::Open => Variant::Open,
        VariantArg::Closed => Variant::Closed,
        VariantArg::Wheeler => Variant::Wheeler,
        VariantArg::QuantumDelayed => Variant::QuantumDelayed,
    };
    let mode = match args.mode {
        ModeArg::Ideal => Mode::IdealGate,
        ModeArg::Pulse => Mode::PulseSequence,
    };

    if args.phi_steps == 0 {
        return Err(CliError::usage("--phi-steps", "need at least one phase"));
    }
    if !(0.0..=1.0).contains(&args.noise_p) {
        return Err(CliError::usage("--noise-p", format!("{} is outside [0, 1]", args.noise_p)));
    }
    if !(args.purity > 0.0 && args.purity <= 1.0) {
        return Err(CliError::usage("--purity", format!("{} is outside (0, 1]", args.purity)));
    }
    if args.shots == 0 {
        return Err(CliError::usage("--shots", "need at least one shot"));
    }
    if !(args.j_coupling.is_finite() && args.j_coupling > 0.0) {
        return Err(CliError::usage("--j-coupling", format!("{} is not a positive frequency", args.j_coupling)));
    }
    if !args.offset_target.is_finite() {
        return Err(CliError::usage("--offset-target", "must be finite"));
    }
    if !args.offset_ancilla.is_finite() {
        return Err(CliError::usage("--offset-ancilla", "must be finite"));
    }

    let alphas = match (variant, &args.alphas) {
        (Variant::QuantumDelayed, None) => alpha_grid(DEFAULT_ALPHA_STEPS),
        (Variant::QuantumDelayed, Some(list)) => {
            if list.is_empty() {
                return Err(CliError::usage("--alphas", "list is empty"));
            }
            if let Some(bad) = list.iter().find(|a| !a.is_finite()) {
                return Err(CliError::usage("--alphas", format!("{bad} is not finite")));
            }
            if args.degrees {
                list.iter().map(|a| a.to_radians()).collect()
            } else {
                list.clone()
            }
        }
        (_, Some(_)) => {
            return Err(CliError::usage("--alphas", "only the quantum-delayed variant takes ancilla angles"))
        }
        (_, None) => Vec::new(),
    };

    let config = ExperimentConfig {
        variant,
        mode,
        alphas,
        phis: phi_grid(args.phi_steps),
        noise_p: args.noise_p,
        purity: args.purity,
        sys: SpinSystem {
            offset_target: args.offset_target,
            offset_ancilla: args.offset_ancilla,
            j_coupling: args.j_coupling,
            epsilon_prime: args.purity,
            ..SpinSystem::default()
        },
        rng_seed: args.seed,
        n_shots: args.shots,
    };
    config
        .validate()
        .map_err(|e| CliError::usage("run", e.to_string()))?;
    Ok(config)
}

/// Flags that reproduce `config` under [`parse_args`], without the program
/// name. Angles are written in radians.
pub fn config_to_args(config: &ExperimentConfig) -> Vec<String> {
    let variant = config.variant.name();
    let mode = config.mode.name();
    let mut args = vec![
        "run".to_string(),
        "--variant".into(),
        variant.into(),
        "--mode".into(),
        mode.into(),
        "--phi-steps".into(),
        config.phis.len().to_string(),
    ];
    if config.variant == Variant::QuantumDelayed {
        let list: Vec<String> = config.alphas.iter().map(|a| a.to_string()).collect();
        args.push("--alphas".into());
        args.push(list.join(","));
    }
    for (flag, value) in [
        ("--noise-p", config.noise_p.to_string()),
        ("--purity", config.purity.to_string()),
        ("--seed", config.rng_seed.to_string()),
        ("--shots", config.n_shots.to_string()),
        ("--offset-target", config.sys.offset_target.to_string()),
        ("--offset-ancilla", config.sys.offset_ancilla.to_string()),
        ("--j-coupling", config.sys.j_coupling.to_string()),
    ] {
        args.push(flag.into());
        args.push(value);
    }
    args
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> Result<Invocation, CliError> {
        parse_args(std::iter::once("mzsim").chain(line.split_whitespace()))
    }

    #[test]
    fn closed_with_defaults() {
        let inv = parse("run --variant closed").unwrap();
        assert_eq!(inv.config, ExperimentConfig::new(Variant::Closed, Mode::IdealGate));
        assert_eq!(inv.format, Format::Csv);
        assert_eq!(inv.config.sys.j_coupling, 209.0);
        assert_eq!(inv.config.sys.offset_target, 100.0);
        assert_eq!(inv.config.phis.len(), 21);
    }

    #[test]
    fn quantum_delayed_alpha_list() {
        let inv = parse("run --variant quantum-delayed --alphas 0,0.25,0.5,1.25,1.5").unwrap();
        assert_eq!(inv.config.alphas, vec![0.0, 0.25, 0.5, 1.25, 1.5]);
        let defaults = parse("run --variant quantum-delayed").unwrap();
        assert_eq!(defaults.config.alphas, alpha_grid(5));
    }

    #[test]
    fn degrees_convert_on_input() {
        let inv = parse("run --variant quantum-delayed --alphas 0,45,90 --degrees").unwrap();
        let expected: Vec<f64> = [0.0f64, 45.0, 90.0].iter().map(|d| d.to_radians()).collect();
        assert_eq!(inv.config.alphas, expected);
    }

    #[test]
    fn noise_out_of_range_names_the_flag() {
        match parse("run --noise-p 1.5") {
            Err(CliError::Usage { flag, .. }) => assert_eq!(flag, "--noise-p"),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn other_usage_errors() {
        let flag_of = |line: &str| match parse(line) {
            Err(CliError::Usage { flag, .. }) => flag,
            other => panic!("expected usage error for {line:?}, got {other:?}"),
        };
        assert_eq!(flag_of("run --purity 0"), "--purity");
        assert_eq!(flag_of("run --phi-steps 0"), "--phi-steps");
        assert_eq!(flag_of("run --variant wheeler --shots 0"), "--shots");
        assert_eq!(flag_of("run --variant closed --alphas 0.1"), "--alphas");
        assert_eq!(flag_of("run --j-coupling -3"), "--j-coupling");
    }

    #[test]
    fn unknown_flag_is_a_clap_error() {
        assert!(matches!(parse("run --bogus 3"), Err(CliError::Clap(_))));
        assert!(matches!(parse("run --variant sideways"), Err(CliError::Clap(_))));
    }

    #[test]
    fn echoed_flags_round_trip() {
        for line in [
            "run --variant closed --noise-p 0.03",
            "run --variant wheeler --seed 42 --shots 77 --mode pulse",
            "run --variant quantum-delayed --alphas 0.1,0.2 --phi-steps 9 --purity 0.3",
            "run --variant quantum-delayed --alphas 10,20 --degrees --offset-target -50",
        ] {
            let first = parse(line).unwrap().config;
            let echoed = config_to_args(&first);
            let second = parse_args(std::iter::once("mzsim".to_string()).chain(echoed)).unwrap().config;
            assert_eq!(first, second, "{line}");
        }
    }
}
