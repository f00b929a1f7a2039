use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use khf_core::harness::{self, Input, SsTheory, VerifyKind, VerifyOptions};
use khf_core::report::Report;
use khf_core::theories::DEFAULT_CAP;
use khf_core::{Axis, Edge};

/// Khovanov homology over GF(2) and its relatives.
#[derive(Parser, Debug)]
#[command(name = "khf", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Refuse diagrams with more crossings than this.
    #[arg(long, global = true, env = harness::CAP_ENV, default_value_t = DEFAULT_CAP)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Planar diagram code, e.g. "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)".
    #[arg(long)]
    pd: Option<String>,
    /// Name of a built-in diagram.
    #[arg(long)]
    fixture: Option<String>,
    /// TOML theory file naming its own diagram.
    #[arg(long)]
    plugin: Option<PathBuf>,
}

impl InputArgs {
    fn input(&self) -> Input {
        match (&self.pd, &self.fixture, &self.plugin) {
            (Some(s), _, _) => Input::Pd(s.clone()),
            (_, Some(f), _) => Input::Fixture(f.clone()),
            (_, _, Some(p)) => Input::Plugin(p.clone()),
            _ => unreachable!("clap requires one input"),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoryArg {
    Kh,
    Bn,
    Plugin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AxisArg {
    X,
    Y,
    Z,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
            AxisArg::Z => Axis::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckArg {
    Splitting,
    Basepoint,
    Kunneth,
    Mutation,
    Skein,
    TwinArrows,
    Relations,
    All,
}

impl From<CheckArg> for VerifyKind {
    fn from(c: CheckArg) -> VerifyKind {
        match c {
            CheckArg::Splitting => VerifyKind::Splitting,
            CheckArg::Basepoint => VerifyKind::Basepoint,
            CheckArg::Kunneth => VerifyKind::Kunneth,
            CheckArg::Mutation => VerifyKind::Mutation,
            CheckArg::Skein => VerifyKind::Skein,
            CheckArg::TwinArrows => VerifyKind::TwinArrows,
            CheckArg::Relations => VerifyKind::Relations,
            CheckArg::All => VerifyKind::All,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Khovanov homology, or the plugin theory with --plugin.
    Kh {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Reduced homology at a basepoint edge.
    Reduced {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        basepoint: Edge,
    },
    /// Bar-Natan homology, graded by filtration level.
    Bn {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Pages of the spectral sequence of a filtered theory.
    Ss {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = TheoryArg::Kh)]
        theory: TheoryArg,
        /// Last page to compute; defaults past the point of collapse.
        #[arg(long)]
        pages: Option<usize>,
    },
    /// Mutate along a four-ended tangle.
    Mutate {
        #[command(flatten)]
        input: InputArgs,
        /// Boundary edges in cyclic order, e.g. "1,12,10,15".
        #[arg(long)]
        tangle: String,
        /// Indices of the crossings inside the tangle.
        #[arg(long)]
        crossings: String,
        #[arg(long, value_enum)]
        axis: AxisArg,
    },
    /// Check structural properties; exits 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        check: CheckArg,
        #[command(flatten)]
        input: InputArgs,
        /// Second summand for the connected-sum check (PD code or fixture name).
        #[arg(long)]
        with: Option<String>,
        #[arg(long)]
        tangle: Option<String>,
        #[arg(long)]
        crossings: Option<String>,
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
        #[arg(long)]
        pages: Option<usize>,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().with_context(|| format!("bad {what} entry {t:?}")))
        .collect()
}

fn parse_tangle(s: &str) -> anyhow::Result<[Edge; 4]> {
    let v: Vec<Edge> = parse_list(s, "tangle")?;
    match <[Edge; 4]>::try_from(v) {
        Ok(a) => Ok(a),
        Err(v) => bail!("a tangle has four boundary edges, got {}", v.len()),
    }
}

/// `--with` takes a fixture name or a PD code.
fn other_input(s: &str) -> Input {
    if khf_core::fixtures::fixture(s).is_ok() {
        Input::Fixture(s.to_string())
    } else {
        Input::Pd(s.to_string())
    }
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let cap = cli.cap;
    let rep = match &cli.command {
        Command::Kh { input } => harness::run_kh(&input.input(), cap)?,
        Command::Reduced { input, basepoint } => harness::run_reduced(&input.input(), *basepoint, cap)?,
        Command::Bn { input } => harness::run_bn(&input.input(), cap)?,
        Command::Ss { input, theory, pages } => {
            let t = match theory {
                TheoryArg::Kh => SsTheory::Kh,
                TheoryArg::Bn => SsTheory::Bn,
                TheoryArg::Plugin => SsTheory::Plugin,
            };
            harness::run_ss(&input.input(), t, *pages, cap)?
        }
        Command::Mutate {
            input,
            tangle,
            crossings,
            axis,
        } => harness::run_mutate(
            &input.input(),
            parse_tangle(tangle)?,
            parse_list(crossings, "crossing")?,
            (*axis).into(),
            cap,
        )?,
        Command::Verify {
            check,
            input,
            with,
            tangle,
            crossings,
            axis,
            pages,
        } => {
            let tangle = match (tangle, crossings) {
                (Some(t), Some(c)) => Some((parse_tangle(t)?, parse_list(c, "crossing")?)),
                (None, None) => None,
                _ => bail!("--tangle and --crossings go together"),
            };
            let opts = VerifyOptions {
                cap,
                with: with.as_deref().map(other_input),
                tangle,
                axis: axis.map(Axis::from),
                pages: *pages,
            };
            harness::run_verify(&input.input(), (*check).into(), &opts)?
        }
    };
    Ok(rep)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            match cli.format {
                Format::Text => print!("{}", rep.to_text()),
                Format::Json => println!("{}", rep.to_json()),
            }
            if rep.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("khf: {e:#}");
            ExitCode::from(3)
        }
    }
}
