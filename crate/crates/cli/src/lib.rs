//! Command-line front end for `latsum-core`: norms of sequences, operators
//! and tensors read from JSON files, and seeded verification suites.
//!
//! Exit codes: 0 success, 1 a suite failed, 2 malformed input, 3 a parameter
//! combination no estimator supports.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latsum_core::{
    ideal::ideal_norm, seq::seq_norm, tensor_norm, CnSide, Exponent, IdealKind, NormParams, SearchConfig,
    SeqNorm, SeqNormKind, TensorNormKind,
};

mod error;
pub mod input;
pub mod report;
pub mod suites;

pub use error::CliError;
pub use report::OutFormat;
pub use suites::Suite;

use input::ExpValue;
use report::{FullReport, NormReport, SuiteLine, Summary, VerifyReport, TOOL, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "latsum", version, about = "Summing norms on finite-dimensional Banach lattices")]
pub struct Cli {
    #[command(flatten)]
    pub search: SearchArgs,
    /// Report format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub out: OutFormat,
    /// Write the report here instead of standard output.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Random starts per search.
    #[arg(long, global = true, default_value_t = 64)]
    pub starts: usize,
    /// Iteration cap per start.
    #[arg(long, global = true, default_value_t = 500)]
    pub max_iters: usize,
    /// Relative improvement below which an ascent stops.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, env = "LATSUM_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl SearchArgs {
    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            starts: self.starts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
            ..SearchConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeqKindArg {
    Strong,
    Weak,
    PosWeak,
    Cohen,
    PosStrong,
}

impl From<SeqKindArg> for SeqNormKind {
    fn from(k: SeqKindArg) -> Self {
        match k {
            SeqKindArg::Strong => SeqNormKind::Strong,
            SeqKindArg::Weak => SeqNormKind::Weak,
            SeqKindArg::PosWeak => SeqNormKind::PosWeak,
            SeqKindArg::Cohen => SeqNormKind::Cohen,
            SeqKindArg::PosStrong => SeqNormKind::PosStrong,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdealKindArg {
    Lambda,
    Dplus,
    Majorizing,
    CnLeft,
    CnRight,
    CnBoth,
}

impl From<IdealKindArg> for IdealKind {
    fn from(k: IdealKindArg) -> Self {
        match k {
            IdealKindArg::Lambda => IdealKind::Lambda,
            IdealKindArg::Dplus => IdealKind::DPlus,
            IdealKindArg::Majorizing => IdealKind::Majorizing,
            IdealKindArg::CnLeft => IdealKind::Cn(CnSide::Left),
            IdealKindArg::CnRight => IdealKind::Cn(CnSide::Right),
            IdealKindArg::CnBoth => IdealKind::Cn(CnSide::Both),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TensorKindArg {
    Wittstock,
    Fremlin,
    GrothEps,
    GrothPi,
    Delta,
}

impl From<TensorKindArg> for TensorNormKind {
    fn from(k: TensorKindArg) -> Self {
        match k {
            TensorKindArg::Wittstock => TensorNormKind::Wittstock,
            TensorKindArg::Fremlin => TensorNormKind::Fremlin,
            TensorKindArg::GrothEps => TensorNormKind::GrothEps,
            TensorKindArg::GrothPi => TensorNormKind::GrothPi,
            TensorKindArg::Delta => TensorNormKind::Delta,
        }
    }
}

fn exp_arg(s: &str) -> Result<f64, String> {
    input::parse_exponent(s)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Norm of a vector sequence.
    Seqnorm {
        #[arg(long, value_enum)]
        kind: SeqKindArg,
        /// Summing exponent (a number or `inf`).
        #[arg(long, visible_alias = "p", value_parser = exp_arg)]
        q: f64,
        /// Sequence file, `-` for standard input.
        #[arg(short, long)]
        input: String,
    },
    /// Operator ideal norm over witness sequences of length `m`.
    Opnorm {
        #[arg(long, value_enum)]
        kind: IdealKindArg,
        #[arg(long, value_parser = exp_arg)]
        p: f64,
        #[arg(long, value_parser = exp_arg)]
        q: f64,
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Operator file, `-` for standard input.
        #[arg(short, long)]
        input: String,
    },
    /// Tensor norm of an element of `l_p^m (x) X`.
    Tensornorm {
        #[arg(long, value_enum)]
        norm: TensorKindArg,
        /// Tensor file, `-` for standard input.
        #[arg(short, long)]
        input: String,
    },
    /// Runs one verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Number of random instances (per norm kind for `oracle-coherence`).
        #[arg(long)]
        count: Option<usize>,
        /// Also compare search values with brute-force grids where the
        /// instance is small enough.
        #[arg(long)]
        with_oracle: bool,
    },
    /// Runs every suite and prints one summary per suite.
    Report {
        /// Instances per suite; each suite's default when absent.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        with_oracle: bool,
    },
}

/// A rendered report and the exit code that goes with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
    /// The text is a diagnostic for standard error rather than a report.
    pub diagnostic: bool,
}

impl Outcome {
    fn report(text: String, code: i32) -> Self {
        Outcome {
            text,
            code,
            diagnostic: false,
        }
    }

    fn diagnostic(text: String, code: i32) -> Self {
        Outcome {
            text,
            code,
            diagnostic: true,
        }
    }
}

fn exponent(v: f64, field: &str) -> Result<Exponent, CliError> {
    input::exponent(ExpValue(v), field)
}

fn norm_report(
    command: &'static str,
    kind: &str,
    params: serde_json::Value,
    text: &str,
    cfg: &SearchConfig,
    est: &latsum_core::NormEstimate,
) -> NormReport {
    NormReport {
        tool: TOOL,
        version: VERSION,
        command,
        kind: kind.to_string(),
        params,
        input_sha256: report::sha256_hex(text),
        config: cfg.into(),
        estimate: est.into(),
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = cli.search.config();
    cfg.validate().map_err(|e| CliError::core("config", e))?;
    let ok = |text: String| Ok(Outcome::report(text, EXIT_OK));
    match &cli.command {
        Command::Seqnorm { kind, q, input: path } => {
            let text = input::read(path)?;
            let s = input::parse::<input::SequenceFile>(&text)?.build()?;
            let q = exponent(*q, "q")?;
            let kind = SeqNormKind::from(*kind);
            let est = seq_norm(&s, SeqNorm::new(kind, q), &cfg).map_err(|e| CliError::core("q", e))?;
            let params = serde_json::json!({ "q": ExpValue::from(q) });
            ok(norm_report("seqnorm", kind.as_str(), params, &text, &cfg, &est).render(cli.out))
        }
        Command::Opnorm {
            kind,
            p,
            q,
            m,
            input: path,
        } => {
            let text = input::read(path)?;
            let t = input::parse::<input::OperatorFile>(&text)?.build()?;
            let pq = NormParams::new(exponent(*p, "p")?, exponent(*q, "q")?).map_err(|e| CliError::core("q", e))?;
            let kind = IdealKind::from(*kind);
            let est = ideal_norm(kind, &t, pq, *m, &cfg).map_err(|e| CliError::core(kind.as_str(), e))?;
            let params = serde_json::json!({ "p": ExpValue::from(pq.p), "q": ExpValue::from(pq.q), "m": m });
            ok(norm_report("opnorm", kind.as_str(), params, &text, &cfg, &est).render(cli.out))
        }
        Command::Tensornorm { norm, input: path } => {
            let text = input::read(path)?;
            let u = input::parse::<input::TensorFile>(&text)?.build()?;
            let kind = TensorNormKind::from(*norm);
            let est = tensor_norm(&u, kind, &cfg).map_err(|e| CliError::core("p", e))?;
            let params = serde_json::json!({ "p": ExpValue::from(u.p()) });
            ok(norm_report("tensornorm", kind.as_str(), params, &text, &cfg, &est).render(cli.out))
        }
        Command::Verify {
            suite,
            count,
            with_oracle,
        } => {
            let count = count.unwrap_or(suite.default_count());
            let run = suites::run(*suite, count, cfg.seed, *with_oracle, &cfg)?;
            let summary = Summary::of(run.instances, &run.rows);
            let code = if summary.ok() { EXIT_OK } else { EXIT_SUITE_FAILED };
            let rep = VerifyReport {
                tool: TOOL,
                version: VERSION,
                command: "verify",
                suite: suite.name(),
                statement: suite.statement(),
                seed: cfg.seed,
                count,
                with_oracle: *with_oracle,
                config: (&run.config).into(),
                rows: run.rows,
                summary,
            };
            Ok(Outcome::report(rep.render(cli.out), code))
        }
        Command::Report { count, with_oracle } => {
            let mut suites = Vec::new();
            for suite in Suite::ALL {
                let n = count.unwrap_or(suite.default_count());
                let run = suites::run(suite, n, cfg.seed, *with_oracle, &cfg)?;
                suites.push(SuiteLine {
                    suite: suite.name(),
                    statement: suite.statement(),
                    count: n,
                    config: (&run.config).into(),
                    summary: Summary::of(run.instances, &run.rows),
                });
            }
            let rep = FullReport {
                tool: TOOL,
                version: VERSION,
                command: "report",
                seed: cfg.seed,
                with_oracle: *with_oracle,
                suites,
            };
            let code = if rep.ok() { EXIT_OK } else { EXIT_SUITE_FAILED };
            Ok(Outcome::report(rep.render(cli.out), code))
        }
    }
}

/// Parses `args` (program name first) and runs them. Usage errors come back
/// with exit code 2 and clap's message as the text.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return Outcome::diagnostic(e.render().to_string(), code);
        }
    };
    let out = match execute(&cli) {
        Ok(out) => out,
        Err(e) => return Outcome::diagnostic(format!("error: {e}\n"), e.exit_code()),
    };
    match &cli.output {
        Some(path) => match std::fs::write(path, &out.text) {
            Ok(()) => Outcome::diagnostic(String::new(), out.code),
            Err(e) => Outcome::diagnostic(format!("error: {}: {e}\n", path.display()), EXIT_INPUT),
        },
        None => out,
    }
}
