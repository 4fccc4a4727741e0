//! Command-line front end. Flags mirror the config-file keys; a subcommand
//! fixes the mode and `--config` supplies a file whose values the flags
//! override. All frequencies and rates are in units of gamma_cb.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lambda_sim::cli::{self, FigurePreset, OutputFormat};
use lambda_sim::error::{io_err, Error};

#[derive(Parser)]
#[command(
    name = "lambda-sim",
    version,
    about = "Driven three-level lambda-system simulator: steady states, detuning/phase scans, \
             and time-domain spectra of the field-free a->b transition.",
    after_help = "All frequencies and rates are in units of gamma_cb (hbar = 1). \
                  Scan parallelism honors LAMBDA_SIM_WORKERS (results are identical \
                  for any worker count). Exit codes: 0 ok, 2 config error, 3 solver \
                  error, 4 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every mode subcommand; each mirrors a config key.
#[derive(Args, Default)]
struct CommonArgs {
    /// Config file: flat `key = value` lines or a JSON object
    #[arg(long)]
    config: Option<PathBuf>,
    /// Probe Rabi frequency
    #[arg(long, allow_negative_numbers = true)]
    omega_p: Option<f64>,
    /// Drive Rabi frequency
    #[arg(long, allow_negative_numbers = true)]
    omega_l: Option<f64>,
    /// Probe phase (radians)
    #[arg(long, allow_negative_numbers = true)]
    phi_p: Option<f64>,
    /// Drive phase (radians)
    #[arg(long, allow_negative_numbers = true)]
    phi_l: Option<f64>,
    /// Probe detuning
    #[arg(long, allow_negative_numbers = true)]
    delta_p: Option<f64>,
    /// Drive detuning
    #[arg(long, allow_negative_numbers = true)]
    delta_l: Option<f64>,
    /// Decay rate c->a
    #[arg(long, allow_negative_numbers = true)]
    gamma_ca: Option<f64>,
    /// Decay rate c->b (the frequency unit)
    #[arg(long, allow_negative_numbers = true)]
    gamma_cb: Option<f64>,
    /// Detuning grid start
    #[arg(long, allow_negative_numbers = true)]
    dp_start: Option<f64>,
    /// Detuning grid stop
    #[arg(long, allow_negative_numbers = true)]
    dp_stop: Option<f64>,
    /// Detuning grid points
    #[arg(long)]
    dp_points: Option<usize>,
    /// Phase grid start (radians)
    #[arg(long, allow_negative_numbers = true)]
    phi_start: Option<f64>,
    /// Phase grid stop (radians)
    #[arg(long, allow_negative_numbers = true)]
    phi_stop: Option<f64>,
    /// Phase grid points
    #[arg(long)]
    phi_points: Option<usize>,
    /// Integration end time (units 1/gamma_cb)
    #[arg(long, allow_negative_numbers = true)]
    t_final: Option<f64>,
    /// Integrator tolerance (local error per unit time)
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Trajectory sample count
    #[arg(long)]
    samples: Option<usize>,
    /// Spectrum window: rectangular | hann
    #[arg(long)]
    window: Option<String>,
    /// Initial state for trajectories: a | b | c | mixed
    #[arg(long)]
    initial_state: Option<String>,
    /// Subtract the steady coherence before transforming: true | false
    #[arg(long)]
    steady_subtract: Option<String>,
    /// Peak-detection prominence floor
    #[arg(long, allow_negative_numbers = true)]
    min_prominence: Option<f64>,
    /// Output data file (a sibling .meta.json is written next to it)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
}

impl CommonArgs {
    fn overrides(&self, mode: &str) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![("mode".into(), mode.into())];
        let mut push_f64 = |key: &str, v: &Option<f64>| {
            if let Some(x) = v {
                out.push((key.into(), format!("{x:?}")));
            }
        };
        push_f64("omega_p", &self.omega_p);
        push_f64("omega_l", &self.omega_l);
        push_f64("phi_p", &self.phi_p);
        push_f64("phi_l", &self.phi_l);
        push_f64("delta_p", &self.delta_p);
        push_f64("delta_l", &self.delta_l);
        push_f64("gamma_ca", &self.gamma_ca);
        push_f64("gamma_cb", &self.gamma_cb);
        push_f64("dp_start", &self.dp_start);
        push_f64("dp_stop", &self.dp_stop);
        push_f64("phi_start", &self.phi_start);
        push_f64("phi_stop", &self.phi_stop);
        push_f64("t_final", &self.t_final);
        push_f64("tol", &self.tol);
        push_f64("min_prominence", &self.min_prominence);
        if let Some(n) = self.dp_points {
            out.push(("dp_points".into(), n.to_string()));
        }
        if let Some(n) = self.phi_points {
            out.push(("phi_points".into(), n.to_string()));
        }
        if let Some(n) = self.samples {
            out.push(("samples".into(), n.to_string()));
        }
        for (key, v) in [
            ("window", &self.window),
            ("initial_state", &self.initial_state),
            ("steady_subtract", &self.steady_subtract),
            ("format", &self.format),
        ] {
            if let Some(s) = v {
                out.push((key.into(), s.clone()));
            }
        }
        if let Some(path) = &self.output {
            out.push(("output".into(), path.display().to_string()));
        }
        out
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single steady state and report coherences and populations
    Steady(CommonArgs),
    /// Sweep the steady state over probe detuning
    Sweep(CommonArgs),
    /// Map the steady state over (detuning, relative phase)
    Map(CommonArgs),
    /// Integrate the master equation and Fourier-transform rho_ab(t)
    Spectrum(CommonArgs),
    /// Dressed-state doublet and the coherences at the dressed resonances
    Dressed(CommonArgs),
    /// Strong-probe (detuning, phase) map; omega_p defaults to 4.5
    StrongProbe(CommonArgs),
    /// Run a named preset: fig3a..fig3f, fig4a..fig4e, fig5a..fig5d
    Preset {
        id: String,
        /// Output data file (default: <id>.csv)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Output format: csv | json
        #[arg(long)]
        format: Option<String>,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, Error> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(Error::Parse {
            line: 0,
            msg: format!("unknown format `{other}` (csv|json)"),
        }),
    }
}

fn run_mode(mode: &str, args: &CommonArgs) -> Result<(), Error> {
    let text = match &args.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| io_err(path, e))?),
        None => None,
    };
    let cfg = cli::parse_config_with_overrides(text.as_deref(), &args.overrides(mode))?;
    cli::run(&cfg)
}

fn dispatch(cli_args: Cli) -> Result<(), Error> {
    match cli_args.command {
        Command::Steady(args) => run_mode("steady", &args),
        Command::Sweep(args) => run_mode("sweep", &args),
        Command::Map(args) => run_mode("map", &args),
        Command::Spectrum(args) => run_mode("spectrum", &args),
        Command::Dressed(args) => run_mode("dressed", &args),
        Command::StrongProbe(args) => run_mode("strong-probe", &args),
        Command::Preset { id, output, format } => {
            let preset = FigurePreset::from_id(&id).ok_or_else(|| Error::InvalidInput {
                what: format!(
                    "unknown preset `{id}` (expected one of {})",
                    FigurePreset::ALL.map(|p| p.id()).join(", ")
                ),
            })?;
            let format = format.as_deref().map(parse_format).transpose()?;
            cli::run_preset(preset, output, format)
        }
    }
}

fn main() -> ExitCode {
    let cli_args = Cli::parse();
    match dispatch(cli_args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
