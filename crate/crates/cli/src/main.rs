use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use padic_orbits_cli::*;

#[derive(Parser)]
#[command(name = "padic-orbits", version, about = "p-adic orbit interpolation, DML solving and height experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    problem: PathBuf,
    /// Override the problem's prime.
    #[arg(long)]
    prime: Option<u64>,
    /// Override the p-adic working precision N.
    #[arg(long)]
    precision: Option<u32>,
    /// Override the horizon (for `orbit`, the number of iterates).
    #[arg(long)]
    horizon: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact iterates Φ^n(x) for n up to the horizon.
    Orbit(Common),
    /// Preperiod and period of the orbit modulo p.
    Period(Common),
    /// Mahler coefficients and analyticity certificates per residue class.
    MahlerFit(Common),
    /// Strassman and Weierstrass diagnostics of the interpolating series.
    SeriesDiag(Common),
    /// Solve every target in the problem file.
    DmlSolve(Common),
    /// Chart return sets of a P^1-valued observable.
    ReturnSet {
        #[command(flatten)]
        common: Common,
        /// Slack κ in #{n ∈ S : n ≤ κM} ≥ M.
        #[arg(long, default_value_t = 2)]
        kappa: u64,
    },
    /// Heights of f(Φ^n(x)) against log n.
    GapRatio(Common),
    /// Number of rationals of height at most N.
    CountHeights {
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(c: &Common) -> CliResult<Problem> {
    let text = std::fs::read_to_string(&c.problem).map_err(|e| CliError::Io(format!("{}: {e}", c.problem.display())))?;
    Problem::load(&text, Overrides { prime: c.prime, precision: c.precision, horizon: c.horizon })
}

fn run(cmd: Command) -> CliResult<(Report, Option<PathBuf>)> {
    let with = |c: Common, f: &dyn Fn(&Problem) -> CliResult<Report>| -> CliResult<(Report, Option<PathBuf>)> {
        let p = load(&c)?;
        Ok((f(&p)?, c.out))
    };
    match cmd {
        Command::Orbit(c) => with(c, &|p| cmd_orbit(p, p.file.horizon)),
        Command::Period(c) => with(c, &cmd_period),
        Command::MahlerFit(c) => with(c, &cmd_mahler_fit),
        Command::SeriesDiag(c) => with(c, &cmd_series_diag),
        Command::DmlSolve(c) => with(c, &cmd_dml_solve),
        Command::ReturnSet { common, kappa } => with(common, &|p| cmd_return_set(p, kappa)),
        Command::GapRatio(c) => with(c, &cmd_gap_ratio),
        Command::CountHeights { n, out } => Ok((cmd_count_heights(n)?, out)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command).and_then(|(report, out)| {
        let text = report.render();
        match out {
            Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_json()).expect("error payloads serialize"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
