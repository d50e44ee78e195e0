//! Command-line front end. [`run`] returns the process exit code.
//!
//! Exit codes: 0 success, 2 usage/parse/file error, 3 step bound reached,
//! 4 body-subterm hypothesis fails, 5 a check did not pass.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cauchy::{equivalent, map_continuous, ContinuousMap, StreamDescriptor};
use crate::distance::distance;
use crate::horn::least_model;
use crate::limits::{
    check_model_cauchy, limit_model, model_distance, model_sequence, program_limit,
    verify_limit_model, LimitVerdict, ProgramFamily, ReportStatus,
};
use crate::ring::{eval, exp_real, parse_rational, render_decimal, render_rational, CauchySeq};
use crate::syntax::{parse_family, parse_program, parse_term};
use crate::horn::Interpretation;
use crate::term::Symbol;
use crate::verdict::Verdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STEP_BOUND: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;
pub const EXIT_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "hlim", version, about = "Metric Herbrand terms, least models, and limits of program sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two finite terms.
    Dist { left: String, right: String },
    /// Depth-bounded least model of a program file.
    Model {
        path: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 64)]
        steps: usize,
    },
    /// Limits of a program family (`@k` templates).
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
    /// Checks `t ≡ f(t)` for a stream `t` at precisions 1, 2, 4, ..., 32.
    FixCheck {
        /// `fix(f,a)`, `file:<path>` or `family-atom:<path>[#n]`.
        #[arg(long, default_value = "fix(f,a)")]
        stream: String,
        /// Unary symbol wrapped around the stream; defaults to the fix symbol, else `f`.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Approximates `e^x` by diagonal partial sums.
    Exp {
        /// Rational `p/q` or decimal literal.
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        precision: u64,
        #[arg(long, default_value_t = 30)]
        horizon: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum FamilyAction {
    /// Lower and upper limits of the program sequence.
    Limit(FamilyArgs),
    /// Least models `M_1..M_H` and their distances.
    Models(FamilyArgs),
    /// Checks that the limit of the least models is a model of the limit program.
    Verify(FamilyArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, default_value_t = 6)]
    pub horizon: usize,
    #[arg(long, default_value_t = 4)]
    pub precision: u64,
    /// Writes rows `k, rho(M_k, M_k+1), rho(M_k, limit)`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(err, "{}", e.render());
            if !e.use_stderr() {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

type Outcome = Result<i32, Failure>;

fn io(e: std::io::Error) -> Failure {
    usage(format!("write failed: {e}"))
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Dist { left, right } => {
            let s = parse_term(&left).map_err(|e| usage(format!("`{left}`: {e}")))?;
            let t = parse_term(&right).map_err(|e| usage(format!("`{right}`: {e}")))?;
            writeln!(out, "{}", distance(&s, &t)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Model { path, depth, steps } => {
            let program = parse_program(&read(&path)?).map_err(|e| usage(located(&path, e)))?;
            let lm = least_model(&program, depth, steps);
            for line in lm.interpretation.sorted_lines() {
                writeln!(out, "{line}").map_err(io)?;
            }
            if lm.fixpoint {
                writeln!(err, "fixpoint after {} step(s), {} atom(s)", lm.steps, lm.interpretation.len())
                    .map_err(io)?;
                Ok(EXIT_OK)
            } else {
                writeln!(err, "step bound {steps} reached without a fixpoint").map_err(io)?;
                Ok(EXIT_STEP_BOUND)
            }
        }
        Command::Family { action } => family(action, out, err),
        Command::FixCheck { stream, symbol } => fix_check(&stream, symbol.as_deref(), out),
        Command::Exp {
            x,
            precision,
            horizon,
        } => {
            if precision == 0 {
                return Err(usage("precision must be at least 1"));
            }
            let x = parse_rational(&x).map_err(usage)?;
            let (y, verdict) = eval(&exp_real(&CauchySeq::constant(x)), precision, horizon);
            writeln!(out, "{}", render_rational(&y)).map_err(io)?;
            let digits = (precision.max(1) as f64).log10().ceil() as usize + 2;
            writeln!(out, "% {verdict}; approx {}", render_decimal(&y, digits)).map_err(io)?;
            Ok(if verdict.is_converged() { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: crate::syntax::SyntaxError) -> String {
    format!("{}:{}: {e}", path.display(), e.line())
}

fn load_family(args: &FamilyArgs) -> Result<ProgramFamily, Failure> {
    if args.precision == 0 || args.precision + 2 > args.depth as u64 {
        return Err(usage(format!(
            "precision {} needs depth >= precision + 2 (got depth {})",
            args.precision, args.depth
        )));
    }
    parse_family(&read(&args.path)?).map_err(|e| usage(located(&args.path, e)))
}

fn family(action: FamilyAction, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match action {
        FamilyAction::Limit(args) => {
            let fam = load_family(&args)?;
            let lim = program_limit(&fam, args.horizon).map_err(usage)?;
            writeln!(out, "% verdict: {}", lim.verdict).map_err(io)?;
            for d in &lim.diagnostics {
                writeln!(out, "% {d}").map_err(io)?;
            }
            match lim.verdict {
                LimitVerdict::ConvergedUpTo { .. } => {
                    write!(out, "{}", lim.liminf).map_err(io)?;
                    Ok(EXIT_OK)
                }
                _ => {
                    writeln!(out, "% liminf").map_err(io)?;
                    write!(out, "{}", lim.liminf).map_err(io)?;
                    writeln!(out, "% limsup").map_err(io)?;
                    write!(out, "{}", lim.limsup).map_err(io)?;
                    Ok(EXIT_FAILED)
                }
            }
        }
        FamilyAction::Models(args) => {
            let fam = load_family(&args)?;
            let seq = model_sequence(&fam, args.horizon, args.depth, args.steps).map_err(usage)?;
            for (k, w) in seq.warnings() {
                writeln!(err, "warning: k={k}: {w}").map_err(io)?;
            }
            for e in &seq.entries {
                let status = if e.fixpoint { "fixpoint" } else { "step bound" };
                writeln!(out, "M_{} ({status}, {} atom(s))", e.k, e.model.len()).map_err(io)?;
                for line in e.model.sorted_lines() {
                    writeln!(out, "  {line}").map_err(io)?;
                }
            }
            let h = seq.horizon();
            writeln!(out, "distances").map_err(io)?;
            for k in 1..=h {
                let row: Vec<String> = (1..=h)
                    .map(|j| model_distance(seq.model(k), seq.model(j)).to_string())
                    .collect();
                writeln!(out, "  {}", row.join(" ")).map_err(io)?;
            }
            let verdict = check_model_cauchy(&seq, args.precision);
            writeln!(out, "cauchy: {verdict}").map_err(io)?;
            if let Some(path) = &args.csv {
                let lim = limit_model(&seq, args.precision);
                let reps = Interpretation::from_atoms(lim.representatives(), args.depth);
                let rows = (1..=h).map(|k| {
                    let next = if k < h {
                        model_distance(seq.model(k), seq.model(k + 1)).to_string()
                    } else {
                        String::new()
                    };
                    let limit = if lim.is_empty() {
                        String::new()
                    } else {
                        model_distance(seq.model(k), &reps).to_string()
                    };
                    [k.to_string(), next, limit]
                });
                write_csv(path, rows)?;
            }
            Ok(if verdict.is_converged() { EXIT_OK } else { EXIT_FAILED })
        }
        FamilyAction::Verify(args) => {
            let fam = load_family(&args)?;
            let report = verify_limit_model(&fam, args.horizon, args.depth, args.steps, args.precision)
                .map_err(usage)?;
            write!(out, "{report}").map_err(io)?;
            if let Some(path) = &args.csv {
                write_csv(path, report.csv_rows())?;
            }
            Ok(match report.status() {
                ReportStatus::Pass => EXIT_OK,
                ReportStatus::HypothesisFailure => EXIT_HYPOTHESIS,
                ReportStatus::Failed { .. } => EXIT_FAILED,
            })
        }
    }
}

fn write_csv(path: &Path, rows: impl IntoIterator<Item = [String; 3]>) -> Result<(), Failure> {
    let fail = |e: csv::Error| usage(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(["k", "rho_next", "rho_limit"]).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| usage(format!("{}: {e}", path.display())))
}

const FIX_PRECISIONS: [u64; 6] = [1, 2, 4, 8, 16, 32];

fn fix_check(stream: &str, symbol: Option<&str>, out: &mut dyn Write) -> Outcome {
    let desc = StreamDescriptor::parse(stream).map_err(usage)?;
    let f = match (symbol, &desc) {
        (Some(s), _) => {
            if !s.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
                return Err(usage(format!("`{s}` is not a function symbol")));
            }
            Symbol::new(s)
        }
        (None, StreamDescriptor::Fix { f, .. }) => f.clone(),
        (None, _) => Symbol::new("f"),
    };
    let t = desc.resolve().map_err(usage)?;
    let ft = map_continuous(&ContinuousMap::Wrap(f.clone()), &t);
    let mut all = true;
    for m in FIX_PRECISIONS {
        let horizon = 4 * m as usize;
        let v = equivalent(&t, &ft, m, horizon);
        let detail = match &v {
            Verdict::ConvergedUpTo { witness, .. } => format!(
                "distance {}",
                distance(&t.approximant(*witness), &ft.approximant(*witness))
            ),
            _ => String::new(),
        };
        all &= v.is_converged();
        writeln!(out, "m={m} H={horizon} t ≡ {f}(t): {v} {detail}")
            .map_err(io)?;
    }
    Ok(if all { EXIT_OK } else { EXIT_FAILED })
}
