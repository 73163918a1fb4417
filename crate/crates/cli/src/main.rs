//! `hubsim`: simulate convex preferential attachment trees and check the
//! persistent-hub certificates.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{resolve, Defaults, Flags, Format, ENV_WORKERS};

#[derive(Debug, Parser)]
#[command(name = "hubsim", version, about = "Convex preferential attachment simulator and exact walk analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow independent trees and report per-trial outcomes.
    #[command(after_help = "CSV columns: trial,seed,steps,final_max_degree,final_leader,\
distinct_sole_leaders,last_leader_change_step,watch_degrees\n\
final_leader is empty while the maximum is tied; watch_degrees is ';'-joined.\n\
--emit-edges writes trial,source,target.")]
    Generate(Flags),
    /// Hub persistence report across trials (JSON; CSV gives the histogram).
    #[command(after_help = "CSV columns: distinct_sole_leaders,trials")]
    Hubs(Flags),
    /// First-hit probabilities q(A, m) of the diagonal from (A, B).
    #[command(after_help = "CSV columns: m,q_A_m,cumulative,tail_bound\n\
tail_bound bounds q(A) minus the cumulative sum up to m.")]
    Walk(Flags),
    /// Limiting share of the trailing coordinate of the affine walk.
    #[command(after_help = "CSV columns: trial,seed,ratio")]
    Urn(Flags),
    /// Coupled convex and linear gap walks.
    #[command(after_help = "CSV columns: trial,seed,steps,violations,parity_violations,\
final_delta,final_delta_tilde")]
    Coupling(Flags),
    /// Fit the growth exponent of the maximal degree.
    #[command(after_help = "CSV columns: exponent,stderr,intercept,points,lower_bound")]
    Scaling(Flags),
    /// Run a verification suite; exits 2 on any violation.
    #[command(after_help = "CSV columns: suite,checked_states,violations,parity_violations")]
    Verify(Flags),
    /// Path counts, path probabilities and the q(A) decay profile.
    #[command(after_help = "CSV columns by --op:\n  count: A,B,m,count\n  \
enumerate, max-path: path,probability,exact\n  \
decay: A,q,q_upper,q_times_2_pow_A,uncertainty,exact")]
    Exact(Flags),
}

fn defaults(command: &Command) -> Defaults {
    let d = |steps, trials, format| Defaults {
        steps,
        trials,
        format,
    };
    match command {
        Command::Generate(_) => d(100_000, 64, Format::Csv),
        Command::Hubs(_) => d(100_000, 200, Format::Json),
        Command::Walk(_) | Command::Exact(_) => d(0, 1, Format::Csv),
        Command::Urn(_) => d(0, 20_000, Format::Csv),
        Command::Coupling(_) => d(10_000, 1_000, Format::Csv),
        Command::Scaling(_) => d(100_000, 50, Format::Json),
        Command::Verify(_) => d(100_000, 10, Format::Json),
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let defaults = defaults(&cli.command);
    let env = std::env::var(ENV_WORKERS).ok();
    let (flags, handler): (Flags, fn(&config::RunConfig) -> anyhow::Result<i32>) = match cli.command {
        Command::Generate(f) => (f, commands::generate),
        Command::Hubs(f) => (f, commands::hubs),
        Command::Walk(f) => (f, commands::walk),
        Command::Urn(f) => (f, commands::urn),
        Command::Coupling(f) => (f, commands::coupling),
        Command::Scaling(f) => (f, commands::scaling),
        Command::Verify(f) => (f, commands::verify),
        Command::Exact(f) => (f, commands::exact),
    };
    let cfg = resolve(flags, defaults, env.as_deref())?;
    handler(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
