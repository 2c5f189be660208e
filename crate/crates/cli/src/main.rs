//! `bunchent` command-line front end.
//!
//! Exit codes: 0 ok, 2 usage, 3 capacity, 4 invariant, 5 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bunchent::io::{
    fmt12, survey_json, write_survey_csv, write_text, ReductionReport, ReportRecord, StateFile,
};
use bunchent::state::{subsets, uniform_molecule_weights};
use bunchent::{
    bell_w_state, bunch_reduce, embedded_bell, entanglement_molecule, eof_bunches, ghz, ket_basis,
    survey_parallel, BunchPartition, DensityMatrix, Error, Tolerances,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bunchent",
    version,
    about = "Bunch-to-bunch entanglement of multipartite qubit states"
)]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Maximum |ρ − ρ†| entry accepted when reading states
    #[arg(long, global = true)]
    tol_hermiticity: Option<f64>,
    /// Maximum |tr ρ − 1| accepted when reading states
    #[arg(long, global = true)]
    tol_trace: Option<f64>,
    /// Most negative eigenvalue accepted (as a magnitude)
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            hermiticity: self.tol_hermiticity.unwrap_or(d.hermiticity),
            trace: self.tol_trace.unwrap_or(d.trace),
            psd: self.tol_psd.unwrap_or(d.psd),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a named state to a JSON state file
    Build(BuildArgs),
    /// Bunch-reduce a state and emit the reduction report
    Reduce(ReduceArgs),
    /// Concurrence and entanglement of formation between two bunches
    Eof(EofArgs),
    /// Entanglement between every pair of bunches
    Survey(SurveyArgs),
    /// Report density-matrix defects of a state file
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ghz,
    Bellw,
    Embedded,
    Molecule,
    Basis,
}

#[derive(Args)]
struct BuildArgs {
    kind: Kind,
    /// Qubit count (ghz, bellw) or subset size (molecule)
    #[arg(long)]
    n: Option<usize>,
    /// Leading zeros of the first branch (bellw, embedded, molecule)
    #[arg(long)]
    w: Option<usize>,
    /// Total qubit count (embedded, molecule)
    #[arg(long)]
    m: Option<usize>,
    /// Ascending qubit labels carrying the Bell-like state (embedded)
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    /// Uniform weights over every n-subset (molecule)
    #[arg(long)]
    uniform: bool,
    /// Explicit weights, e.g. `1-2-3:0.5,2-3-4:0.5` (molecule)
    #[arg(long, value_delimiter = ',')]
    weights: Vec<String>,
    /// Basis bits, e.g. `0101` (basis)
    #[arg(long)]
    bits: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    /// Bunch A labels, first label is the anchor
    #[arg(long = "a", value_delimiter = ',', required = true)]
    bunch_a: Vec<usize>,
    /// Bunch B labels, first label is the anchor
    #[arg(long = "b", value_delimiter = ',', required = true)]
    bunch_b: Vec<usize>,
}

#[derive(Args)]
struct ReduceArgs {
    state: PathBuf,
    #[command(flatten)]
    partition: PartitionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum ReportFormat {
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum EofFormat {
    Text,
    Json,
}

#[derive(Args)]
struct EofArgs {
    state: PathBuf,
    #[command(flatten)]
    partition: PartitionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EofFormat::Text)]
    format: EofFormat,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SurveyArgs {
    state: PathBuf,
    /// Only partitions whose bunches cover every qubit
    #[arg(long)]
    full_cover: bool,
    /// Largest allowed bunch size
    #[arg(long)]
    max_bunch: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    state: PathBuf,
}

/// CLI failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Argument(_) => 2,
            Error::Capacity { .. } => 3,
            Error::Invariant { .. } | Error::NoConvergence { .. } => 4,
            Error::Io(_) | Error::Parse(_) => 5,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid usage");
            eprintln!("error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let tol = cli.tol.tolerances();
    match cli.command {
        Command::Build(args) => cmd_build(&args).map(|_| 0),
        Command::Reduce(args) => cmd_reduce(&args, &tol).map(|_| 0),
        Command::Eof(args) => cmd_eof(&args, &tol).map(|_| 0),
        Command::Survey(args) => cmd_survey(&args, &tol).map(|_| 0),
        Command::Check(args) => cmd_check(&args, &tol),
    }
}

fn check_out(out: &Option<PathBuf>) -> Result<(), Failure> {
    if let Some(path) = out {
        let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = parent {
            if !dir.is_dir() {
                return Err(Failure {
                    code: 5,
                    message: format!("output directory {} does not exist", dir.display()),
                });
            }
        }
    }
    Ok(())
}

fn need(value: Option<usize>, flag: &str, kind: &str) -> Result<usize, Failure> {
    value.ok_or_else(|| usage(format!("build {kind} requires --{flag}")))
}

fn parse_weights(specs: &[String]) -> Result<Vec<(Vec<usize>, f64)>, Failure> {
    specs
        .iter()
        .map(|spec| {
            let (labels, weight) = spec
                .split_once(':')
                .ok_or_else(|| usage(format!("weight entry {spec:?} is not LABELS:WEIGHT")))?;
            let subset = labels
                .split('-')
                .map(|q| q.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| usage(format!("bad subset labels in {spec:?}")))?;
            let w = weight
                .trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad weight in {spec:?}")))?;
            Ok((subset, w))
        })
        .collect()
}

fn cmd_build(args: &BuildArgs) -> Result<(), Failure> {
    check_out(&args.out)?;
    let file = match args.kind {
        Kind::Ghz => StateFile::from_pure(&ghz(need(args.n, "n", "ghz")?)?),
        Kind::Bellw => StateFile::from_pure(&bell_w_state(
            need(args.n, "n", "bellw")?,
            need(args.w, "w", "bellw")?,
        )?),
        Kind::Embedded => {
            let m = need(args.m, "m", "embedded")?;
            if args.subset.is_empty() {
                return Err(usage("build embedded requires --subset"));
            }
            StateFile::from_pure(&embedded_bell(
                m,
                &args.subset,
                need(args.w, "w", "embedded")?,
            )?)
        }
        Kind::Molecule => {
            let m = need(args.m, "m", "molecule")?;
            let n = need(args.n, "n", "molecule")?;
            let w = need(args.w, "w", "molecule")?;
            let weights = match (args.uniform, args.weights.is_empty()) {
                (true, true) => uniform_molecule_weights(m, n),
                (false, false) => parse_weights(&args.weights)?,
                _ => {
                    return Err(usage(
                        "build molecule requires exactly one of --uniform or --weights",
                    ))
                }
            };
            if subsets(m, n).is_empty() {
                return Err(usage(format!("no {n}-subsets of {m} qubits")));
            }
            StateFile::from_density(&entanglement_molecule(m, n, w, &weights)?)
        }
        Kind::Basis => {
            let bits = args
                .bits
                .as_deref()
                .ok_or_else(|| usage("build basis requires --bits"))?;
            let bits = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    _ => Err(usage(format!("bit {c:?} is not 0 or 1"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            StateFile::from_pure(&ket_basis(bits.len(), &bits)?)
        }
    };
    write_text(args.out.as_deref(), &(file.to_json() + "\n"))?;
    Ok(())
}

fn load_state(path: &Path, tol: &Tolerances) -> Result<DensityMatrix, Failure> {
    let file = StateFile::read(path)?;
    Ok(file.validate(tol)?.to_density()?)
}

fn partition_for(args: &PartitionArgs, rho: &DensityMatrix) -> Result<BunchPartition, Failure> {
    let p = BunchPartition::new(args.bunch_a.clone(), args.bunch_b.clone())?;
    p.validate_for(rho.n_qubits())?;
    Ok(p)
}

fn cmd_reduce(args: &ReduceArgs, tol: &Tolerances) -> Result<(), Failure> {
    check_out(&args.out)?;
    let rho = load_state(&args.state, tol)?;
    let partition = partition_for(&args.partition, &rho)?;
    let red = bunch_reduce(&rho, &partition)?;
    let text = match args.format {
        ReportFormat::Json => serde_json::to_string_pretty(&ReductionReport::from(&red))
            .expect("reports always serialize"),
    };
    write_text(args.out.as_deref(), &(text + "\n"))?;
    Ok(())
}

fn cmd_eof(args: &EofArgs, tol: &Tolerances) -> Result<(), Failure> {
    check_out(&args.out)?;
    let rho = load_state(&args.state, tol)?;
    let partition = partition_for(&args.partition, &rho)?;
    let report = eof_bunches(&rho, &partition)?;
    let text = match args.format {
        EofFormat::Text => {
            let lambdas: Vec<String> = report.lambdas.iter().map(|&l| fmt12(l)).collect();
            format!(
                "partition: {partition}\nconcurrence: {}\neof: {}\nlambdas: {}\n",
                fmt12(report.concurrence),
                fmt12(report.eof),
                lambdas.join(" ")
            )
        }
        EofFormat::Json => {
            serde_json::to_string_pretty(&ReportRecord::from(&report))
                .expect("reports always serialize")
                + "\n"
        }
    };
    write_text(args.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_survey(args: &SurveyArgs, tol: &Tolerances) -> Result<(), Failure> {
    check_out(&args.out)?;
    if args.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    if args.max_bunch == Some(0) {
        return Err(usage("--max-bunch must be at least 1"));
    }
    let rho = load_state(&args.state, tol)?;
    let reports = survey_parallel(&rho, args.max_bunch, args.full_cover, args.jobs)?;
    let text = match args.format {
        TableFormat::Csv => {
            let mut buf = Vec::new();
            write_survey_csv(&reports, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        TableFormat::Json => survey_json(&reports) + "\n",
    };
    write_text(args.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_check(args: &CheckArgs, tol: &Tolerances) -> Result<u8, Failure> {
    let file = StateFile::read(&args.state)?;
    let diag = file.diagnostics()?;
    println!("hermiticity_defect: {}", fmt12(diag.hermiticity_defect));
    println!("trace_defect: {}", fmt12(diag.trace_defect));
    println!("min_eigenvalue: {}", fmt12(diag.min_eigenvalue));
    match file.validate(tol) {
        Ok(_) => {
            println!("status: ok");
            Ok(0)
        }
        Err(e) => Err(e.into()),
    }
}
