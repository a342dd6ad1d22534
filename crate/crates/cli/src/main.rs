use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use charpoly::resolve::ProbeParams;
use charpoly_cli::commands;
use charpoly_cli::job::{parse_job, JobFile};
use charpoly_cli::plot::PlotKind;
use charpoly_cli::{CliError, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::Value;

/// Characteristic polyhedra, preparation and blow-up charts, in exact arithmetic.
#[derive(Parser)]
#[command(name = "charpoly", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct PlotArgs {
    /// Also draw Δ (two u-variables only).
    #[arg(long)]
    plot: Option<PlotKind>,
    /// Write the drawing to this file instead of the JSON "plot" field.
    #[arg(long)]
    plot_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Δ(f,y,u) and its invariants.
    Polyhedron {
        /// Job file, or - for stdin.
        job: PathBuf,
        #[command(flatten)]
        plot: PlotArgs,
    },
    /// Normalize and dissolve vertices up to a level.
    Prepare {
        job: PathBuf,
        /// Largest vertex level |v| to prepare (a fraction such as 25/3).
        #[arg(long = "M")]
        m: Option<String>,
        /// Prepare every vertex until Δ is stable.
        #[arg(long)]
        totally: bool,
        #[command(flatten)]
        plot: PlotArgs,
    },
    /// One blow-up chart and the nearness of its origin.
    Blowup {
        job: PathBuf,
        /// point-u1, point-u2, translated, nonrational, curve-u1 or curve-u2.
        #[arg(long)]
        chart: String,
        /// φ ∈ k[u1] for translated, Φ(u1,u2) for nonrational.
        #[arg(long)]
        phi: Option<String>,
        #[command(flatten)]
        plot: PlotArgs,
    },
    /// Run fundamental units until the point is resolved.
    Resolve {
        job: PathBuf,
        #[arg(long)]
        max_units: Option<usize>,
        /// Declare that no permissible curve passes through the points of the run.
        #[arg(long)]
        isolated: bool,
    },
    /// The fundamental sequence of point-u1 charts.
    Fundamental { job: PathBuf },
    /// Hilbert function, polynomial and a-decomposition of a monomial quotient.
    Hilbert {
        /// Comma-separated monomials, e.g. "x^2,x*y".
        #[arg(long)]
        ideal: String,
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        /// Number of values H(0), H(1), ... to print.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Sequences I-III for y^p + y u1^N u2^N + u1^a u2^b (u1+u2)^{pA}.
    ProbeMaxContact {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long = "A")]
        big_a: u32,
        #[arg(long = "N")]
        n: u32,
        /// A single candidate γ(u1,u2) instead of the built-in family.
        #[arg(long)]
        gamma: Option<String>,
    },
}

fn read_job(path: &Path) -> Result<JobFile> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)?
    };
    parse_job(&text)
}

fn finish_plot(mut v: Value, plot: &PlotArgs) -> Result<Value> {
    if let (Some(path), Some(Value::String(s))) = (&plot.plot_out, v.get("plot")) {
        std::fs::write(path, s)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("plot");
        }
    }
    Ok(v)
}

fn run(cmd: Cmd) -> Result<Value> {
    match cmd {
        Cmd::Polyhedron { job, plot } => {
            let v = commands::polyhedron(&read_job(&job)?, plot.plot)?;
            finish_plot(v, &plot)
        }
        Cmd::Prepare {
            job,
            m,
            totally,
            plot,
        } => {
            let m = m
                .map(|s| {
                    s.parse::<BigRational>()
                        .map_err(|_| CliError::Usage(format!("--M {s} is not a fraction")))
                })
                .transpose()?;
            let v = commands::prepare_cmd(&read_job(&job)?, m, totally, plot.plot)?;
            finish_plot(v, &plot)
        }
        Cmd::Blowup {
            job,
            chart,
            phi,
            plot,
        } => {
            let v = commands::blowup(&read_job(&job)?, &chart, phi.as_deref(), plot.plot)?;
            finish_plot(v, &plot)
        }
        Cmd::Resolve {
            job,
            max_units,
            isolated,
        } => commands::resolve(&read_job(&job)?, max_units, isolated),
        Cmd::Fundamental { job } => commands::fundamental(&read_job(&job)?),
        Cmd::Hilbert { ideal, vars, count } => commands::hilbert(&ideal, &vars, count),
        Cmd::ProbeMaxContact {
            p,
            a,
            b,
            big_a,
            n,
            gamma,
        } => commands::probe(&ProbeParams { p, a, b, big_a, n }, gamma.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("JSON value");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
