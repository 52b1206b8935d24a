//! Command-line surface for `qphase`: grid evaluation with CSV/JSON export,
//! moments, the energy spectrum and the verification suites.

pub mod grid;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use qphase::oscillator::energy;
use qphase::phasespace::{mean_momentum, mean_position};
use qphase::quadrature::{moment_oracle, Moment};
use qphase::{Error, ModelParams, QuantumState};

use crate::grid::{Distribution, FormChoice, GridSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONSISTENCY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qphase", version)]
#[command(about = "Wigner and Husimi distributions of the q-deformed harmonic oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a distribution on a uniform (p, x) grid
    Grid(GridArgs),
    /// Print mean position, mean momentum and energy of a state
    Moments(MomentArgs),
    /// Print the energy levels 0..=n
    Spectrum(SpectrumArgs),
    /// Run the verification suites
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Photon number
    #[arg(long, default_value_t = 0)]
    pub n: usize,

    /// Deformation step h (default 1)
    #[arg(long, conflicts_with = "q")]
    pub h: Option<f64>,

    /// Deformation parameter q in (0, 1]; converted with h = sqrt(-ln q / λ)
    #[arg(long)]
    pub q: Option<f64>,

    #[arg(long, default_value_t = 1.0)]
    pub m: f64,

    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,

    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

impl ModelArgs {
    pub fn params(&self) -> qphase::Result<ModelParams> {
        match self.q {
            Some(q) => ModelParams::from_q(self.m, self.omega, self.hbar, q),
            None => ModelParams::new(self.m, self.omega, self.hbar, self.h.unwrap_or(1.0)),
        }
    }

    pub fn state(&self) -> qphase::Result<QuantumState> {
        QuantumState::new(self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long, value_enum, default_value_t = Distribution::Wigner)]
    pub dist: Distribution,

    #[arg(long, value_enum, default_value_t = FormChoice::Dsum)]
    pub form: FormChoice,

    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub pmin: f64,

    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub pmax: f64,

    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub xmin: f64,

    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub xmax: f64,

    #[arg(long = "np", default_value_t = 200)]
    pub n_p: usize,

    #[arg(long = "nx", default_value_t = 200)]
    pub n_x: usize,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file (default standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct MomentArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Also compute the moments by quadrature and report deviations
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Run only the named suite
    #[arg(long)]
    pub suite: Option<String>,

    /// Scale the wavefunction normalization constants (fault injection)
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub corrupt_norm: f64,
}

/// Failure of a command, carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_USAGE, message: e.to_string() }
    }

    fn io(e: io::Error) -> Self {
        CliError { code: EXIT_CONSISTENCY, message: format!("i/o error: {e}") }
    }

    /// Errors raised while evaluating, after the inputs were accepted.
    fn eval(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => EXIT_USAGE,
            _ => EXIT_CONSISTENCY,
        };
        CliError { code, message: e.to_string() }
    }
}

pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Grid(args) => cmd_grid(&args, out),
        Command::Moments(args) => cmd_moments(&args, out),
        Command::Spectrum(args) => cmd_spectrum(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
    }
}

fn cmd_grid(args: &GridArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let params = args.model.params().map_err(CliError::usage)?;
    let state = args.model.state().map_err(CliError::usage)?;
    let spec = GridSpec::new(args.pmin, args.pmax, args.xmin, args.xmax, args.n_p, args.n_x)
        .map_err(CliError::usage)?;
    let forms = args.form.resolve(args.dist).map_err(CliError::usage)?;

    let peak = mean_momentum(state, &params);
    if peak < spec.p_min || peak > spec.p_max {
        warn!(
            "the distribution peaks near p = {peak}, outside the grid [{}, {}]; widen it with --pmin/--pmax",
            spec.p_min, spec.p_max
        );
    }

    let output = grid::evaluate(&spec, args.dist, &forms, state, &params).map_err(CliError::eval)?;
    let text = match args.format {
        Format::Csv => output.to_csv(),
        Format::Json => output.to_json().map_err(|e| CliError { code: EXIT_CONSISTENCY, message: e.to_string() })?,
    };
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(CliError::io)?);
            w.write_all(text.as_bytes()).map_err(CliError::io)?;
            w.flush().map_err(CliError::io)?;
        }
        None => out.write_all(text.as_bytes()).map_err(CliError::io)?,
    }
    Ok(EXIT_OK)
}

// -0.0 prints as "-0"
fn tidy(v: f64) -> f64 {
    v + 0.0
}

fn cmd_moments(args: &MomentArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let params = args.model.params().map_err(CliError::usage)?;
    let state = args.model.state().map_err(CliError::usage)?;
    let x_mean = tidy(mean_position(state, &params));
    let p_mean = tidy(mean_momentum(state, &params));
    let e = energy(state, &params).value();
    let mut lines = vec![
        format!("# n={} h={} q={:.16e}", state.n(), params.h(), params.q().value()),
        format!("x_mean = {x_mean}"),
        format!("p_mean = {p_mean}"),
        format!("E = {e}"),
    ];
    if args.oracle {
        for (name, which, closed) in [("x_mean", Moment::Position, x_mean), ("p_mean", Moment::Momentum, p_mean)] {
            let est = moment_oracle(state, &params, which).map_err(CliError::eval)?;
            lines.push(format!(
                "{name}_oracle = {:e} (deviation {:.3e}, quadrature error {:.3e})",
                est.value,
                (est.value - closed).abs(),
                est.error
            ));
        }
    }
    for l in lines {
        writeln!(out, "{l}").map_err(CliError::io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_spectrum(args: &SpectrumArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let params = args.model.params().map_err(CliError::usage)?;
    args.model.state().map_err(CliError::usage)?;
    let hw = params.hbar() * params.omega();
    writeln!(out, "# h={} q={:.16e} units=hbar*omega", params.h(), params.q().value()).map_err(CliError::io)?;
    writeln!(out, "n,E,E_oscillator").map_err(CliError::io)?;
    for n in 0..=args.model.n {
        let e = energy(QuantumState::new(n).map_err(CliError::usage)?, &params).value() / hw;
        writeln!(out, "{n},{e},{}", n as f64 + 0.5).map_err(CliError::io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let suites = verify::select(args.suite.as_deref()).map_err(CliError::usage)?;
    let mut failed = 0usize;
    let mut total = 0usize;
    for suite in suites {
        for check in (suite.run)(args.corrupt_norm) {
            total += 1;
            if !check.passed() {
                failed += 1;
            }
            writeln!(out, "{}", check.line(suite.name)).map_err(CliError::io)?;
        }
    }
    writeln!(out, "{} of {total} checks passed", total - failed).map_err(CliError::io)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
