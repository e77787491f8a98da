use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use erosion_cli::{parse_taus, run, CliError, Command, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "erosion", version, about = "Erosion flow experiments for radial Willmore minimizing movements")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Scheme and ODE levels on a uniform time grid.
    Simulate,
    /// Sup error of the scheme against the ODE over several time steps.
    Converge,
    /// Energies of the regularizing sequence.
    Coarea,
    /// Brute-force minimizer against the scheme on small step bases.
    Oracle,
    /// `W_p` of the profile and `F` of a candidate.
    Energy,
}

#[derive(clap::Args, Debug)]
struct Flags {
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// One or more comma separated time steps.
    #[arg(long, global = true)]
    tau: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Allow a profile with r(a-) = 0.
    #[arg(long, global = true)]
    exploratory: bool,
    /// Candidate profile for `energy`.
    #[arg(long, global = true)]
    candidate: Option<PathBuf>,
}

fn command(c: Cmd) -> Command {
    match c {
        Cmd::Simulate => Command::Simulate,
        Cmd::Converge => Command::Converge,
        Cmd::Coarea => Command::Coarea,
        Cmd::Oracle => Command::Oracle,
        Cmd::Energy => Command::Energy,
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let f = cli.flags;
    let mut cfg = match &f.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(Overrides {
        profile: f.profile,
        candidate: f.candidate,
        dim: f.dim,
        taus: f.tau.as_deref().map(parse_taus).transpose()?,
        p: f.p,
        t_max: f.t_max,
        out: f.out,
        seed: f.seed,
        exploratory: f.exploratory,
    });
    let csv = run(command(cli.command), &cfg)?.to_string();
    match cfg.out.as_deref().filter(|p| *p != Path::new("-")) {
        Some(path) => std::fs::write(path, csv).map_err(|source| CliError::Io {
            context: format!("cannot write {}", path.display()),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(csv.as_bytes())
            .map_err(|source| CliError::Io {
                context: "cannot write to stdout".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("erosion: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
