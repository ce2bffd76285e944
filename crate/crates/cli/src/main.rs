use clap::{Args, Parser, Subcommand};
use diracop_cli::config::parse_hopf;
use diracop_cli::{execute, Overrides, RunConfig, Suite, EXIT_USAGE};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "diracop", version, about = "Numerical checks for Cauchy-type integrals of Dirac operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write report.json plus CSV tables.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Complex dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Circle grid size.
    #[arg(long)]
    nodes: Option<usize>,
    /// S³ grid as n_eta,n_theta1,n_theta2.
    #[arg(long, value_parser = |s: &str| parse_hopf(s).map_err(|e| e.to_string()))]
    hopf: Option<[usize; 3]>,
    /// Multiplier family for toeplitz-index.
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    /// Primary tolerance of the suite.
    #[arg(long)]
    tol: Option<f64>,
    /// Singular-value threshold for kernel counting.
    #[arg(long)]
    tau: Option<f64>,
    /// Low-mode energy fraction for kernel counting.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn resolve(a: VerifyArgs) -> Result<RunConfig, String> {
    let file = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            Overrides::parse_file(&text).map_err(|e| e.to_string())?
        }
        None => Overrides::default(),
    };
    let flags = Overrides {
        n: a.n,
        nodes: a.nodes,
        hopf: a.hopf,
        symbol: a.symbol,
        k: a.k,
        tol: a.tol,
        tau: a.tau,
        eta: a.eta,
        seed: a.seed,
        out: a.out,
    };
    RunConfig::resolve(a.suite, file.merge(flags)).map_err(|e| e.to_string())
}

fn main() {
    let Command::Verify(args) = Cli::parse().command;
    let code = match resolve(args) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    std::process::exit(code);
}
