//! `tunnelsplit` command-line interface.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tunnelsplit::config::OutputFormat;

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "tunnelsplit",
    version,
    about = "Tunneling splittings in asymmetric double wells"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Output format; overrides the config file. Each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout; overrides the config file.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for scans and sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Turning,
    Regularized,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartWell {
    Right,
    Left,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// WKB splitting of one level.
    ///
    /// CSV columns: method, l, n, epsilon, Delta_l, Delta_l_eps, ln_Delta_l.
    Split {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
        method: MethodChoice,
        /// Apply the WKB forms to a potential with a kink at the barrier top.
        #[arg(long)]
        force_formal: bool,
    },
    /// Exact levels of the piecewise-quadratic potential.
    ///
    /// With --eps-range the detuning is swept at fixed alpha and n.
    /// CSV columns: epsilon, root_splitting, closed_form_splitting.
    ExactVd {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: u32,
        /// Detuning sweep `MIN,MAX`.
        #[arg(long, allow_hyphen_values = true)]
        eps_range: Option<String>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Finite-difference diagonalization.
    ///
    /// CSV columns: l, lower, upper, raw_gap, refined_gap, gap, extrapolated_gap.
    /// Wavefunction CSV columns: x, psi_0, psi_1, ...
    Oracle {
        config: PathBuf,
        /// Number of doublet levels to pair (levels 0..K-1).
        #[arg(long, default_value_t = 1)]
        levels: u32,
        #[arg(long)]
        grid: Option<usize>,
        /// Write the eigenvectors as CSV to this path.
        #[arg(long)]
        emit_wavefunctions: Option<PathBuf>,
    },
    /// Resonance curve over a tilt or detuning range.
    ///
    /// CSV columns: s_or_eps, Delta_l, Delta_l_eps, max_transfer.
    Scan {
        config: PathBuf,
        /// Tilt sweep `MIN,MAX`.
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "eps_range",
            required_unless_present = "eps_range"
        )]
        tilt_range: Option<String>,
        /// Detuning sweep `MIN,MAX` with Delta_l held at the base value.
        #[arg(long, allow_hyphen_values = true)]
        eps_range: Option<String>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long, value_enum, default_value_t = MethodChoice::Regularized)]
        method: MethodChoice,
        #[arg(long)]
        force_formal: bool,
    },
    /// Two-state trajectory.
    ///
    /// CSV columns: t, p_right, p_left.
    Dynamics {
        /// Tunneling splitting.
        #[arg(long = "Delta", allow_hyphen_values = true)]
        delta: f64,
        /// Detuning in units of hbar omega.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar_omega: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 1001)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = StartWell::Right)]
        initial: StartWell,
    },
    /// All applicable methods side by side.
    ///
    /// CSV columns: method, Delta_l, status.
    Compare {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        force_formal: bool,
    },
    /// Evaluate D_nu(z) and its derivative.
    #[command(hide = true)]
    PcfEval {
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    let jobs = g.jobs;
    let work = move || match cli.command {
        Command::Split {
            config,
            level,
            method,
            force_formal,
        } => commands::split(&g, &config, level, method, force_formal),
        Command::ExactVd {
            config,
            level,
            eps_range,
            points,
        } => commands::exact_vd(&g, &config, level, eps_range.as_deref(), points),
        Command::Oracle {
            config,
            levels,
            grid,
            emit_wavefunctions,
        } => commands::oracle(&g, &config, levels, grid, emit_wavefunctions.as_deref()),
        Command::Scan {
            config,
            tilt_range,
            eps_range,
            points,
            level,
            method,
            force_formal,
        } => commands::scan(
            &g,
            &config,
            tilt_range.as_deref(),
            eps_range.as_deref(),
            points,
            level,
            method,
            force_formal,
        ),
        Command::Dynamics {
            delta,
            epsilon,
            hbar_omega,
            hbar,
            t_max,
            steps,
            initial,
        } => commands::dynamics(&g, delta, epsilon, hbar_omega, hbar, t_max, steps, initial),
        Command::Compare {
            config,
            level,
            grid,
            force_formal,
        } => commands::compare(&g, &config, level, grid, force_formal),
        Command::PcfEval { nu, z } => commands::pcf_eval(&g, nu, z),
    };
    match jobs {
        None => work(),
        Some(0) => Err(Failure::invalid("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::io(format!("thread pool: {e}")))?
            .install(work),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
