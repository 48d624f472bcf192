use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mfe_lab::field::{self, FieldKind, Grid};
use mfe_lab::io;
use mfe_lab::suites::{self, RunConfig, Suite};
use mfe_lab::{Curve, Divisor, Error};

#[derive(Parser)]
#[command(name = "mfe-lab", version, about = "Canonical-metric verification lab for hyperelliptic curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write one JSON report per suite.
    Verify(VerifyArgs),
    /// Sample a field over an x-plane grid and emit CSV.
    Field(FieldArgs),
    /// Algebra self-checks.
    Effalg {
        #[command(subcommand)]
        command: EffalgCommand,
    },
}

#[derive(Subcommand)]
enum EffalgCommand {
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CurveArgs {
    /// Curve JSON file.
    #[arg(long, conflicts_with = "preset")]
    curve: Option<PathBuf>,
    /// Built-in curve: unity6 or unity8.
    #[arg(long)]
    preset: Option<String>,
    /// Hermitian form JSON file, or `identity`.
    #[arg(long, default_value = "identity")]
    hermitian: String,
    /// Divisor JSON file.
    #[arg(long)]
    divisor: Option<PathBuf>,
    /// Quadrature JSON file.
    #[arg(long)]
    quadrature: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Suite to run; repeatable. Defaults to every suite valid for the genus.
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Output directory; reports go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FieldArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// K, u, F_D or residual.
    #[arg(long)]
    field: String,
    /// "xmin,xmax,ymin,ymax,n".
    #[arg(long, default_value = "-2,2,-2,2,101", allow_hyphen_values = true)]
    grid: String,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Suites,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load(args: &CurveArgs) -> Result<RunConfig, Failure> {
    let curve = match (&args.curve, &args.preset) {
        (Some(path), _) => io::parse_curve(&io::read_file(path)?)?,
        (None, Some(name)) => Curve::preset(name)?,
        (None, None) => Curve::preset("unity6")?,
    };
    let mut cfg = RunConfig::new(curve);
    cfg.seed = args.seed;
    if args.hermitian != "identity" {
        cfg.form = io::parse_hermitian(&io::read_file(Path::new(&args.hermitian))?, cfg.curve.genus())?;
    }
    if let Some(path) = &args.divisor {
        cfg.divisor = Some(io::parse_divisor(&io::read_file(path)?, &cfg.curve)?);
    }
    if let Some(path) = &args.quadrature {
        cfg.quadrature = io::parse_quadrature(&io::read_file(path)?, &cfg.curve)?;
    }
    Ok(cfg)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let cfg = load(&args.curve)?;
    let suites: Vec<Suite> = if args.suites.is_empty() {
        let genus = cfg.curve.genus();
        Suite::ALL
            .into_iter()
            .filter(|s| {
                let ok = s.required_genus().map_or(true, |g| g == genus);
                if !ok {
                    eprintln!("not running {s}: requires genus {}", s.required_genus().unwrap_or(0));
                }
                ok
            })
            .collect()
    } else {
        args.suites.iter().map(|s| s.parse()).collect::<Result<_, Error>>()?
    };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    }
    let mut all_pass = true;
    for suite in suites {
        let report = suites::run_suite(suite, &cfg);
        let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        match &args.out {
            Some(dir) => write_out(&dir.join(format!("{suite}.json")), &json)?,
            None => print!("{json}"),
        }
        let status = if report.pass { "PASS" } else { "FAIL" };
        match &report.error {
            Some(e) => eprintln!("{suite}: {status} ({e})"),
            None => eprintln!("{suite}: {status}"),
        }
        all_pass &= report.pass;
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Suites)
    }
}

fn field_cmd(args: FieldArgs) -> Result<(), Failure> {
    let kind: FieldKind = args.field.parse()?;
    let grid: Grid = args.grid.parse()?;
    let cfg = load(&args.curve)?;
    let d = cfg.divisor.clone().unwrap_or_else(Divisor::zero);
    let csv = field::field_csv(&cfg.curve, &cfg.form, kind, &d, &grid);
    match &args.out {
        Some(path) => write_out(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn selftest(args: SelftestArgs) -> Result<(), Failure> {
    verify(VerifyArgs { curve: args.curve, suites: vec![Suite::EffalgSelftest.name().into()], out: args.out })
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("MFE_LAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Failure::Config(format!("MFE_LAB_THREADS={v:?} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Verify(args) => verify(args),
        Command::Field(args) => field_cmd(args),
        Command::Effalg { command: EffalgCommand::Selftest(args) } => selftest(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Suites) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
