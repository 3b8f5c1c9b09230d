//! The `lospace` command line: argument parsing, file I/O, output
//! formatting, workspace reporting and the benchmark harness.

pub mod bench;

use clap::{Parser, Subcommand, ValueEnum};
use lospace::meter::{self, WorkspaceMeter};
use lospace::{
    determinant, eigendecompose, lin_solve, linear_regression, spectrum, svd, BigInt, Error, Fixed, Float, Seed, SolveOutcome,
    SolverConfig, SparseMatrix, SpectralConfig,
};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "lospace", version, about = "Exact and entry-wise approximate integer linear algebra in linear working space")]
pub struct Cli {
    /// Root seed of every random choice.
    #[arg(long, global = true, env = "LOSPACE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Print the peak working space (bits) and its breakdown to stderr.
    #[arg(long, global = true)]
    pub report_space: bool,
    /// Digits after the point in decimal output.
    #[arg(long, global = true, default_value_t = 12)]
    pub decimal_digits: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Float2exp)]
    pub format: Format,
    /// Run CRT residues and spectrum branches on the thread pool.
    #[arg(long, global = true)]
    pub parallel: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Exact `±m*2^e`.
    Float2exp,
    Decimal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact determinant.
    Det { matrix: PathBuf },
    /// Entry-wise approximation of A⁻¹b.
    Solve {
        matrix: PathBuf,
        vector: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
    /// Least squares argmin ‖Ax − b‖.
    Regress {
        matrix: PathBuf,
        vector: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
    /// Eigenvalues of a symmetric matrix, ascending.
    Eigs {
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Eigenpairs, one line per pair: value, then the vector.
    Eigvecs {
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Singular value decomposition, one line per column: `σ | u | v`.
    Svd {
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Time and working space of the solver on generated sparse systems.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const SINGULAR: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const RETRIES: i32 = 3;
}

#[derive(Debug)]
enum Failure {
    Singular,
    Input(String),
    Retries(String),
    Output(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Output(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular => Failure::Singular,
            Error::Parse { .. } | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::Overflow => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Retries(e.to_string()),
        }
    }
}

fn read_matrix(path: &Path) -> Result<SparseMatrix, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    SparseMatrix::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_vector(path: &Path) -> Result<Vec<BigInt>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    lospace::linop::parse_vector(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

struct Printer {
    format: Format,
    digits: usize,
}

impl Printer {
    fn float(&self, x: &Float) -> String {
        match self.format {
            Format::Float2exp => x.to_string(),
            Format::Decimal => x.to_decimal(self.digits),
        }
    }

    fn fixed(&self, x: &Fixed) -> String {
        match self.format {
            Format::Float2exp => x.to_float(x.scaled().bits().max(1) as u32).expect("exact conversion").to_string(),
            Format::Decimal => x.to_decimal(self.digits),
        }
    }

    fn fixed_row(&self, v: &[Fixed]) -> String {
        v.iter().map(|x| self.fixed(x)).collect::<Vec<_>>().join(" ")
    }
}

/// Runs a sink that writes to `out`, keeping the first I/O error apart from
/// library errors.
fn streaming<T>(
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn FnMut(T) -> lospace::Result<()>) -> lospace::Result<()>,
    mut line: impl FnMut(T) -> String,
) -> Result<(), Failure> {
    let mut io_err = None;
    let res = body(&mut |item| {
        writeln!(out, "{}", line(item)).and_then(|_| out.flush()).map_err(|e| {
            io_err = Some(e);
            Error::InvalidArgument("output closed".into())
        })
    });
    if let Some(e) = io_err {
        return Err(Failure::Output(e));
    }
    res.map_err(Failure::from)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let seed = Seed::new(cli.seed);
    let solver = SolverConfig { parallel: cli.parallel, ..SolverConfig::default() };
    let spectral = SpectralConfig { solver: SolverConfig { blocks: Some(1), ..solver.clone() }, ..SpectralConfig::default() };
    let pr = Printer { format: cli.format, digits: cli.decimal_digits };
    match &cli.command {
        Command::Det { matrix } => {
            let a = read_matrix(matrix)?;
            writeln!(out, "{}", determinant(&a, solver.c, seed)?)?;
        }
        Command::Solve { matrix, vector, epsilon } => {
            let (a, b) = (read_matrix(matrix)?, read_vector(vector)?);
            match lin_solve(&a, &b, *epsilon, seed, &solver)? {
                SolveOutcome::Singular => return Err(Failure::Singular),
                SolveOutcome::Solution(x) => {
                    for v in &x {
                        writeln!(out, "{}", pr.float(v))?;
                    }
                }
            }
        }
        Command::Regress { matrix, vector, epsilon } => {
            let (a, b) = (read_matrix(matrix)?, read_vector(vector)?);
            for v in &linear_regression(&a, &b, *epsilon, seed, &solver)? {
                writeln!(out, "{}", pr.float(v))?;
            }
        }
        Command::Eigs { matrix, epsilon } => {
            let a = read_matrix(matrix)?;
            for v in &spectrum(&a, *epsilon, seed, &spectral)? {
                writeln!(out, "{}", pr.fixed(v))?;
            }
        }
        Command::Eigvecs { matrix, epsilon } => {
            let a = read_matrix(matrix)?;
            streaming(
                out,
                |sink| eigendecompose(&a, *epsilon, seed, &spectral, sink),
                |p: lospace::EigenPair| format!("{} {}", pr.fixed(&p.value), pr.fixed_row(&p.vector)),
            )?;
        }
        Command::Svd { matrix, epsilon } => {
            let a = read_matrix(matrix)?;
            streaming(
                out,
                |sink| svd(&a, *epsilon, seed, &spectral, sink),
                |c: lospace::SvdColumn| {
                    let sigma = c.sigma.as_ref().map_or("-".to_string(), |s| pr.fixed(s));
                    let v = c.v.as_ref().map_or("-".to_string(), |v| pr.fixed_row(v));
                    format!("{sigma} | {} | {v}", pr.fixed_row(&c.u))
                },
            )?;
        }
        Command::Bench { sizes, epsilon } => {
            if sizes.is_empty() {
                return Err(Failure::Input("bench needs at least one size".into()));
            }
            writeln!(out, "{}", bench::CSV_HEADER)?;
            bench::bench_run(sizes, *epsilon, seed, &solver, |row| {
                writeln!(out, "{}", row.csv_line())?;
                out.flush()
            })
            .map_err(|e| match e {
                bench::BenchError::Solver(e) => Failure::from(e),
                bench::BenchError::Output(e) => Failure::Output(e),
            })?;
        }
    }
    Ok(())
}

fn report(meter: &WorkspaceMeter, err: &mut dyn Write) {
    let _ = writeln!(err, "workspace: peak_bits={} current_bits={}", meter.peak_bits(), meter.current_bits());
    for (label, stat) in meter.breakdown() {
        let _ = writeln!(err, "  {label}: peak_bits={}", stat.peak);
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { exit::INPUT } else { exit::OK };
        }
    };
    let m = WorkspaceMeter::new();
    let result = meter::with_meter(&m, || execute(&cli, out));
    if cli.report_space {
        report(&m, err);
    }
    debug_assert_eq!(m.current_bits(), 0, "workspace meter out of balance");
    match result {
        Ok(()) => exit::OK,
        Err(Failure::Singular) => {
            let _ = writeln!(out, "SINGULAR");
            exit::SINGULAR
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            exit::INPUT
        }
        Err(Failure::Retries(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            exit::RETRIES
        }
        Err(Failure::Output(e)) => {
            let _ = writeln!(err, "error: writing output: {e}");
            exit::INPUT
        }
    }
}

/// Convenience for tests: runs with captured output.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Parses the `--report-space` summary line back into `(peak, current)`.
pub fn parse_space_report(err: &str) -> Option<(u64, u64)> {
    let line = err.lines().find(|l| l.starts_with("workspace: "))?;
    let mut it = line.split_whitespace().skip(1).map(|kv| kv.split_once('=').and_then(|(_, v)| v.parse().ok()));
    Some((it.next()??, it.next()??))
}

pub use bench::{bench_run, tridiagonal_plus_noise, BenchRow};
