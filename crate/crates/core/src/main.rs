use anyhow::Context;
use bcvw::cli::{render, run_cases, select_suites, CaseText, CliError, ConfigFile, RunConfig};
use bcvw::psmodel::AAction;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bcvw", version, about = "Exact checks of B/C VW-algebra actions on principal series models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relation suite on V^(x)k and on the model spaces.
    Verify(CaseArgs),
    /// Model vs Hecke principal series isomorphism on both sides.
    Psmap(CaseArgs),
    /// Non-unitarity verdicts over a nu grid; never fails the process.
    Unitary(CaseArgs),
    /// Run the suites named by --suite (default all).
    Run(CaseArgs),
}

#[derive(Args, Clone)]
struct CaseArgs {
    /// sp:2n or opq:p,q
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// "1", "triv:1" or "det:1"
    #[arg(long)]
    delta: Option<String>,
    /// comma separated, e.g. "3/2,-1" or "i,2i"
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// mu, mubar or both
    #[arg(long)]
    side: Option<String>,
    /// relations, psmap, unitary or all
    #[arg(long)]
    suite: Option<String>,
    /// semicolon separated nu vectors for the unitary suite
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// how a acts on the cyclic vector: rho (normalized) or nu
    #[arg(long, value_parser = parse_a_action)]
    a_action: Option<AAction>,
    /// TOML file with one [[case]] block per case; replaces the case flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// report path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_a_action(s: &str) -> Result<AAction, String> {
    match s {
        "rho" => Ok(AAction::Rho),
        "nu" => Ok(AAction::Nu),
        _ => Err(format!("expected rho or nu, got {s}")),
    }
}

fn cases(args: &CaseArgs, default_suite: &str) -> Result<Vec<CaseText>, CliError> {
    let mut list = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ConfigFile::parse(&text)?.case
        }
        None => {
            let group = args.group.clone().ok_or_else(|| CliError::Config("--group or --config is required".into()))?;
            vec![CaseText { group, k: args.k, delta: args.delta.clone(), nu: args.nu.clone(), side: args.side.clone(), suite: args.suite.clone(), grid: args.grid.clone(), a_action: args.a_action }]
        }
    };
    for c in &mut list {
        if c.suite.is_none() {
            c.suite = Some(default_suite.to_string());
        }
    }
    Ok(list)
}

fn execute(args: &CaseArgs, default_suite: &str) -> Result<(bool, String), CliError> {
    let mut prepared = Vec::new();
    for c in cases(args, default_suite)? {
        let suites = select_suites(c.suite.as_deref().unwrap_or(default_suite))?;
        prepared.push((RunConfig::from_text(&c)?, suites));
    }
    let (ok, report) = run_cases(&prepared)?;
    Ok((ok, render(&report)))
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let (args, suite) = match &cli.command {
        Command::Verify(a) => (a, "relations"),
        Command::Psmap(a) => (a, "psmap"),
        Command::Unitary(a) => (a, "unitary"),
        Command::Run(a) => (a, a.suite.as_deref().unwrap_or("all")),
    };
    let (ok, text) = match execute(args, suite) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(e.exit_code() as u8));
        }
    };
    match &args.out {
        Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
