mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use dirichlet_parity::genfun::RhoChoice;
use dirichlet_parity::oracles::selftest;
use dirichlet_parity::{
    convergence_check, subset_context, verify_parity, zeta_direct, EvalError, EvalOptions,
    SeriesSpec, SpecFile, SubsetTerm,
};
use num_complex::Complex64;

use report::{
    verdict_exit_code, DSample, EvalOut, Parameters, ReduceOut, ReduceTerm, Render, SelfTestOut,
    TermOut, ValidateOut, VerifyOut,
};

/// Directory where a copy of every report is written, if set.
const OUTPUT_DIR_VAR: &str = "DPARITY_OUTPUT_DIR";

const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "dparity", version, about = "Evaluate multiple Dirichlet series and verify their parity identity")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON spec file: {"A": [[...]], "h": [...], "k": [...], "y": ["p/q", ...]}
    #[arg(long, global = true)]
    spec: Option<PathBuf>,

    /// Truncation bound for the direct sums
    #[arg(long = "M", global = true, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,

    /// Truncation bound for the outer sums of the right-hand side
    #[arg(long = "M-outer", global = true, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    m_outer: u64,

    /// Tolerance on the identity residual
    #[arg(long, global = true, default_value_t = 1e-6, value_parser = positive_float)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    output: Format,

    /// Worker threads: a positive integer or "auto"
    #[arg(long, global = true, default_value = "auto", value_parser = parse_threads)]
    threads: Threads,

    /// Treat the convergence hypothesis as given when the built-in check is inconclusive
    #[arg(long, global = true)]
    assert_convergence: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Check the spec and report the convergence verdict
    Validate,
    /// Evaluate the series by direct summation
    Eval,
    /// Evaluate both sides of the parity identity and compare them
    Verify,
    /// List the right-hand side terms with sample coefficients
    Reduce {
        /// Coefficient samples per subset
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Run the built-in oracle checks
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Eval => "eval",
            Command::Verify => "verify",
            Command::Reduce { .. } => "reduce",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Threads {
    Auto,
    Count(usize),
}

fn parse_threads(s: &str) -> Result<Threads, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Threads::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Threads::Count(n)),
        _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
    }
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// A failure that maps to an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: format!("{e:#}"),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::Spec(_) | EvalError::ConvergenceUnknown(_) | EvalError::ZeroBound => {
                EXIT_INVALID
            }
            _ => EXIT_FAIL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Cli {
    fn parameters(&self) -> Parameters {
        Parameters {
            m: self.m,
            m_outer: self.m_outer,
            tol: format!("{:e}", self.tol),
            threads: match self.threads {
                Threads::Auto => "auto".into(),
                Threads::Count(n) => n.to_string(),
            },
            assert_convergence: self.assert_convergence,
        }
    }

    fn options(&self) -> EvalOptions {
        EvalOptions {
            m: self.m,
            m_outer: self.m_outer,
            tol: self.tol,
            rho: RhoChoice::Ladder,
            assert_convergence: self.assert_convergence,
            ..EvalOptions::default()
        }
    }

    fn load_spec(&self) -> Result<SeriesSpec, Failure> {
        let path = self
            .spec
            .as_ref()
            .context("--spec is required for this command")?;
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read spec file {}", path.display()))?;
        let file = SpecFile::from_json(&text).map_err(EvalError::from)?;
        Ok(file.validate().map_err(EvalError::from)?)
    }

    fn render<R: Render>(&self, r: &R) -> Result<String, Failure> {
        Ok(match self.output {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(r).context("serializing report")?;
                s.push('\n');
                s
            }
            Format::Csv => r.csv(),
            Format::Text => r.text(),
        })
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), Failure> {
    print!("{body}");
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_VAR) {
        let dir = Path::new(&dir);
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let stem = cli
            .spec
            .as_ref()
            .and_then(|p| p.file_stem())
            .map_or_else(|| "dparity".to_string(), |s| s.to_string_lossy().into_owned());
        let path = dir.join(format!("{stem}-{}.{}", cli.command.name(), cli.output.extension()));
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate => {
            let spec = cli.load_spec()?;
            let mut verdict = convergence_check(&spec);
            if cli.assert_convergence {
                verdict = verdict.asserted();
            }
            emit(cli, &cli.render(&ValidateOut::new(&spec, verdict))?)?;
            Ok(0)
        }
        Command::Eval => {
            let spec = cli.load_spec()?;
            let zeta = zeta_direct(&spec, cli.m)?;
            let out = EvalOut {
                spec: SpecFile::from_spec(&spec),
                parameters: cli.parameters(),
                zeta: (&zeta).into(),
            };
            emit(cli, &cli.render(&out)?)?;
            Ok(0)
        }
        Command::Verify => {
            let spec = cli.load_spec()?;
            let report = verify_parity(&spec, &cli.options())?;
            emit(cli, &cli.render(&VerifyOut::new(&report, cli.parameters()))?)?;
            Ok(verdict_exit_code(report.verdict))
        }
        Command::Reduce { samples } => {
            let spec = cli.load_spec()?;
            let opts = cli.options();
            let mut verdict = convergence_check(&spec);
            if opts.assert_convergence {
                verdict = verdict.asserted();
            }
            if !verdict.licensed() {
                return Err(EvalError::ConvergenceUnknown(verdict.detail).into());
            }
            let mut per_j = Vec::new();
            let mut total = Complex64::new(0.0, 0.0);
            for j in spec.nonempty_subsets() {
                let ctx = subset_context(&spec, &j).map_err(EvalError::from)?;
                let term = SubsetTerm::new(&spec, &ctx, &opts)?;
                let value = term.evaluate(opts.m_outer)?;
                total += value.sum.estimate();
                let d_samples = term
                    .d_samples(samples)
                    .map_err(EvalError::from)?
                    .into_iter()
                    .map(|(outer, d)| DSample {
                        outer,
                        d: d.into(),
                    })
                    .collect();
                per_j.push(ReduceTerm {
                    term: TermOut::from(&value),
                    bases: value.bases,
                    d_samples,
                });
            }
            let out = ReduceOut {
                spec: SpecFile::from_spec(&spec),
                parameters: cli.parameters(),
                parity: if (spec.weight() as usize + spec.r()) % 2 == 1 {
                    "different"
                } else {
                    "same"
                },
                per_j,
                half_total: (total / 2.0).into(),
            };
            emit(cli, &cli.render(&out)?)?;
            Ok(0)
        }
        Command::Selftest => {
            let cases = selftest();
            let out = SelfTestOut {
                passed: cases.iter().all(|c| c.passed),
                cases: cases.iter().map(Into::into).collect(),
            };
            emit(cli, &cli.render(&out)?)?;
            Ok(if out.passed { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Threads::Count(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
