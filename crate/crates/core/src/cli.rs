//! Command-line front end.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::Error;
use crate::oracle::exhaustive_count;
use crate::tabulate::{
    tabulate, tabulate_basic, ParityChoice, TabulateError, TabulationRecord, TabulationRequest, TabulationSummary,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Odd,
    Even,
    Both,
}

impl From<ParityArg> for ParityChoice {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Odd => ParityChoice::Odd,
            ParityArg::Even => ParityChoice::Even,
            ParityArg::Both => ParityChoice::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Records,
    SummaryCsv,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Pruned enumeration.
    Fast,
    /// Unpruned enumeration over the full coefficient box.
    Basic,
    /// Fast run checked against an independent recount (q ∈ {5, 7}, B ≤ 5).
    Verify,
}

/// Tabulate cubic function fields over F_q(t) with imaginary or unusual
/// Hessian and discriminant degree at most B.
#[derive(Clone, Debug, Parser)]
#[command(name = "cubictab", version)]
pub struct CliConfig {
    /// Field size: a prime q ≥ 5 with gcd(q, 6) = 1.
    #[arg(long)]
    pub q: u32,
    /// Bound B on deg D.
    #[arg(long)]
    pub bound: u32,
    #[arg(long, value_enum, default_value_t = ParityArg::Both)]
    pub parity: ParityArg,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// With `both`, the summary goes to standard error when records go to
    /// standard output, and after the records otherwise.
    #[arg(long, value_enum, default_value_t = Format::Records)]
    pub format: Format,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Fast)]
    pub mode: Mode,
    /// Primitive root h defining the sign set S.
    #[arg(long)]
    pub primitive_root: Option<u32>,
    /// Append `q,B,parity,seconds` rows to this CSV file.
    #[arg(long)]
    pub emit_timing: Option<PathBuf>,
    /// Buffer all records and sort them by (deg D, D, a, b, c, d).
    #[arg(long)]
    pub sort: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] Error),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Parses `argv` (program name first) and runs; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cubictab: {e}");
            e.exit_code()
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn execute(config: &CliConfig) -> Result<(), CliError> {
    let workers = config.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let request = TabulationRequest::new(config.q, config.bound, config.parity.into())
        .workers(workers)
        .primitive_root(config.primitive_root);
    request.ring()?;
    if config.mode == Mode::Verify && (!matches!(config.q, 5 | 7) || config.bound > 5) {
        return Err(Error::OracleBounds { q: config.q, bound: config.bound }.into());
    }

    let to_stdout = config.output.is_none();
    let mut out: Box<dyn Write> = match &config.output {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(io_err(format!("cannot create {}", path.display())))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let write_records = config.format != Format::SummaryCsv;

    let mut buffered: Vec<TabulationRecord> = Vec::new();
    let sink = |rec: &TabulationRecord| -> io::Result<()> {
        if !write_records {
            return Ok(());
        }
        if config.sort {
            buffered.push(rec.clone());
            Ok(())
        } else {
            writeln!(out, "{rec}")
        }
    };
    let result = match config.mode {
        Mode::Fast | Mode::Verify => tabulate(&request, sink),
        Mode::Basic => tabulate_basic(&request, sink),
    };
    let summary = match result {
        Ok(s) => s,
        Err(TabulateError::Invalid(e)) => return Err(e.into()),
        Err(TabulateError::Pool(e)) => return Err(CliError::Pool(e)),
        Err(TabulateError::Sink { source, summary }) => {
            return Err(CliError::Io {
                context: format!("writing records (stopped after {} fields)", summary.total_fields()),
                source,
            })
        }
    };

    if config.sort {
        buffered.sort_by(|x, y| (x.deg_d(), &x.discriminant, &x.form).cmp(&(y.deg_d(), &y.discriminant, &y.form)));
        for rec in &buffered {
            writeln!(out, "{rec}").map_err(io_err("writing records"))?;
        }
    }

    if config.mode == Mode::Verify {
        let recount = exhaustive_count(config.q, config.bound, config.parity.into())?;
        if recount.by_degree != summary.by_degree {
            return Err(CliError::Verify(format!(
                "tabulated {} fields, recount found {}",
                summary.total_fields(),
                recount.total_fields()
            )));
        }
    }

    match config.format {
        Format::Records => {}
        Format::SummaryCsv => out.write_all(summary.to_csv().as_bytes()).map_err(io_err("writing summary"))?,
        Format::Both if to_stdout => eprint!("{}", summary.to_csv()),
        Format::Both => out.write_all(summary.to_csv().as_bytes()).map_err(io_err("writing summary"))?,
    }
    out.flush().map_err(io_err("flushing output"))?;

    if let Some(path) = &config.emit_timing {
        append_timing(path, &summary).map_err(io_err(format!("cannot write timing to {}", path.display())))?;
    }
    Ok(())
}

fn append_timing(path: &PathBuf, summary: &TabulationSummary) -> io::Result<()> {
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "q,B,parity,seconds")?;
    }
    writeln!(file, "{},{},{},{:.6}", summary.q, summary.bound, summary.parity, summary.elapsed.as_secs_f64())
}
