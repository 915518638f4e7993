use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loctemp::experiments::Kind;
use loctemp_cli::{parse_config, render_plot, run_experiment, verify, CliError, PlotSpec};

#[derive(Parser)]
#[command(name = "loctemp", version, about = "Locality of temperature in the 3D lattice Bose gas")]
struct Cli {
    /// Worker threads (overrides the config file and LOCTEMP_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity of a block against smaller reference systems.
    Locality(RunArgs),
    /// Condensate fraction, T_c(L) and its extrapolation.
    Phase(RunArgs),
    /// Density-density correlation curves and decay exponents.
    Correlations(RunArgs),
    /// Fidelity, purity and entropy for the three block shapes.
    Subsystems(RunArgs),
    /// Fidelity against temperature and its minima.
    Profile(RunArgs),
    /// Compare the Gaussian formulas with exact Fock-space states.
    Verify,
    /// Render a row table as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output` in the file).
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Overrides such as `L0=60` or `lattice.LBC=8,12`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct PlotArgs {
    /// Row table written by one of the experiment commands.
    csv: PathBuf,

    /// SVG path; defaults to the table path with an .svg extension.
    #[arg(short, long)]
    output: Option<PathBuf>,

    #[arg(long)]
    x: Option<String>,

    #[arg(long)]
    y: Option<String>,

    #[arg(long)]
    group: Option<String>,

    #[arg(long)]
    log_x: Option<bool>,

    #[arg(long)]
    log_y: Option<bool>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let kind = match &cli.command {
        Command::Locality(_) => Kind::Locality,
        Command::Phase(_) => Kind::Phase,
        Command::Correlations(_) => Kind::Correlations,
        Command::Subsystems(_) => Kind::Subsystems,
        Command::Profile(_) => Kind::Profile,
        Command::Verify => return verify(&mut std::io::stdout().lock()),
        Command::Plot(p) => return plot(p),
    };
    let (Command::Locality(args)
    | Command::Phase(args)
    | Command::Correlations(args)
    | Command::Subsystems(args)
    | Command::Profile(args)) = cli.command
    else {
        unreachable!()
    };
    let mut cfg = parse_config(args.config.as_deref(), kind, &args.overrides)?;
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(o) = args.output {
        cfg.output = o;
    }
    let summary = run_experiment(&cfg)?;
    for row in summary {
        let r = row.record();
        let value = if r[5].is_empty() { "-".to_string() } else { r[5].clone() };
        let at: Vec<String> = [("T", &r[2]), ("L0", &r[3]), ("LBC", &r[4])]
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!("{:<16} {:<28} {:<24} {}", row.quantity, at.join(" "), value, row.note);
    }
    println!("wrote {}", cfg.output.display());
    Ok(())
}

fn plot(p: &PlotArgs) -> Result<(), CliError> {
    let out = p.output.clone().unwrap_or_else(|| p.csv.with_extension("svg"));
    let spec = if p.x.is_some() || p.y.is_some() || p.group.is_some() || p.log_x.is_some() || p.log_y.is_some() {
        let kind = std::fs::read_to_string(&p.csv)
            .map_err(|e| CliError::io(&p.csv, e))?
            .split_whitespace()
            .nth(2)
            .map(str::to_string)
            .unwrap_or_default();
        let mut s = PlotSpec::for_kind(&kind)
            .ok_or_else(|| CliError::Config(format!("unknown table kind `{kind}`")))?;
        if let Some(x) = &p.x {
            s.x = x.clone();
        }
        if let Some(y) = &p.y {
            s.y = y.clone();
        }
        if let Some(g) = &p.group {
            s.group = g.clone();
        }
        s.log_x = p.log_x.unwrap_or(s.log_x);
        s.log_y = p.log_y.unwrap_or(s.log_y);
        Some(s)
    } else {
        None
    };
    render_plot(&p.csv, &out, spec)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
