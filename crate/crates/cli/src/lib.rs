//! Command dispatch for the `rankforge` binary.
//!
//! Exit codes: 0 when the command's checks pass, 1 on a verification
//! failure, 2 for usage errors, 3 for unreadable or malformed input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rankforge::elimination::{cr_decompose, rref};
use rankforge::io::{parse_matrix, parse_str, write_matrix_market, AnyMatrix, Format, Mode};
use rankforge::orthogonalization::{lq, qr, QrMode};
use rankforge::skeleton::cur_decompose;
use rankforge::subspaces::{four_subspaces, split_vector};
use rankforge::utv::{rank_decompose_from, ulv, urv, RankSplit};
use rankforge::verify::{verify_all, VerificationReport};
use rankforge::{Matrix, Rational, Scalar, ToleranceContext};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

/// Tolerance fallback when `--tol` is absent.
pub const TOL_ENV: &str = "RANKFORGE_TOL";

#[derive(Parser, Debug)]
#[command(name = "rankforge", version, about = "Rank-revealing factorizations with row-rank = column-rank verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Rank by every route
    Rank(Common),
    /// Row reduced echelon form and pivot columns
    Rref(Common),
    /// A = C R
    Cr(Common),
    /// A = Q R (rows >= cols)
    Qr(Factor),
    /// A = L Q (cols >= rows)
    Lq(Factor),
    /// A = U [L 0; 0 0] V
    Ulv(Common),
    /// A = U [R 0; 0 0] V
    Urv(Common),
    /// A = D F with D, F of full rank
    Rankdec(RankDec),
    /// A = C U^-1 R from actual columns and rows
    Cur(Common),
    /// Bases of the four fundamental subspaces
    Subspaces(Common),
    /// x = x_r + x_n over the row space and null space
    Split(Split),
    /// Run every route and factorization check
    Verify(Common),
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Input matrix (Matrix Market or CSV)
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Zero tolerance, float mode only (falls back to RANKFORGE_TOL, then 1e-10)
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output prefix; factors go to <prefix>_<NAME>.mtx
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the verification report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args, Debug, Clone)]
struct Factor {
    #[command(flatten)]
    common: Common,
    /// Full factorization (square orthogonal factor) instead of reduced
    #[arg(long)]
    full: bool,
}

#[derive(clap::Args, Debug, Clone)]
struct RankDec {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "dl-f")]
    split: SplitArg,
}

#[derive(clap::Args, Debug, Clone)]
struct Split {
    #[command(flatten)]
    common: Common,
    /// Comma-separated vector with one entry per column
    #[arg(long)]
    x: String,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Mm,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SplitArg {
    /// D = U0 L, F = V0
    DlF,
    /// D = U0, F = L V0
    DLf,
}

struct UsageError(String);

enum Failure {
    Usage(String),
    Parse(String),
    Io(String),
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run_command(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_PASS {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(Failure::Parse(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_PARSE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_VERIFY_FAILED
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Rank(c)
            | Command::Rref(c)
            | Command::Cr(c)
            | Command::Ulv(c)
            | Command::Urv(c)
            | Command::Cur(c)
            | Command::Subspaces(c)
            | Command::Verify(c) => c,
            Command::Qr(f) | Command::Lq(f) => &f.common,
            Command::Rankdec(r) => &r.common,
            Command::Split(s) => &s.common,
        }
    }
}

fn tolerance(c: &Common, mode: Option<Mode>) -> Result<ToleranceContext, UsageError> {
    if c.tol.is_some() && mode == Some(Mode::Exact) {
        return Err(UsageError("--tol applies to float mode only".into()));
    }
    let value = match c.tol {
        Some(t) => Some(t),
        None => match std::env::var(TOL_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| UsageError(format!("{TOL_ENV}={s:?} is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    match value {
        Some(t) => ToleranceContext::new(t, true).map_err(|e| UsageError(e.to_string())),
        None => Ok(ToleranceContext::default()),
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let c = cmd.common();
    let mode = c.mode.map(|m| match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    });
    let tol = tolerance(c, mode).map_err(|UsageError(m)| Failure::Usage(m))?;
    let format = match c.format {
        Some(FormatArg::Mm) => Format::MatrixMarket,
        Some(FormatArg::Csv) => Format::Csv,
        None => Format::from_path(&c.input),
    };
    let parsed = parse_matrix(&c.input, format, mode)
        .map_err(|e| Failure::Parse(format!("{}: {e}", c.input.display())))?;
    let digest = parsed.digest();
    match parsed {
        AnyMatrix::Exact(a) => run_typed(cmd, &a, &tol, digest, out),
        AnyMatrix::Float(a) => run_typed(cmd, &a, &tol, digest, out),
    }
}

/// Collects named factors and either writes them under the output prefix
/// or prints them.
struct Emitter<'a> {
    prefix: Option<&'a Path>,
    quiet: bool,
    out: &'a mut dyn Write,
}

impl Emitter<'_> {
    fn line(&mut self, text: &str) -> Result<(), Failure> {
        if !self.quiet {
            writeln!(self.out, "{text}").map_err(|e| Failure::Io(e.to_string()))?;
        }
        Ok(())
    }

    fn factor<T: Scalar>(&mut self, name: &str, m: &Matrix<T>) -> Result<(), Failure> {
        let text = write_matrix_market(m);
        match self.prefix {
            Some(prefix) => {
                let path = factor_path(prefix, name);
                std::fs::write(&path, text)
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                self.line(&format!("wrote {}", path.display()))
            }
            None => {
                self.line(&format!("{name} ="))?;
                self.line(text.trim_end())
            }
        }
    }
}

/// `<prefix>_<name>.mtx`
pub fn factor_path(prefix: &Path, name: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(format!("_{name}.mtx"));
    PathBuf::from(s)
}

fn norms_column<T: Scalar>(v: &[T]) -> Matrix<T> {
    Matrix::column_vector(v.to_vec())
}

fn run_typed<T: Regime>(
    cmd: &Command,
    a: &Matrix<T>,
    tol: &ToleranceContext,
    digest: String,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let c = cmd.common();
    let report = verify_all(a, tol, digest);
    let check = |name: &str| report.factor_checks.get(name).is_none_or(|f| f.pass);
    let mut em = Emitter {
        prefix: c.out.as_deref(),
        quiet: c.json,
        out,
    };
    let (rows, cols) = a.shape();
    em.line(&format!(
        "matrix {rows}x{cols}, mode {}",
        if T::EXACT { "exact" } else { "float" }
    ))?;

    let pass = match cmd {
        Command::Rank(_) => {
            for e in &report.entries {
                em.line(&format!(
                    "{:<10} row_rank {} col_rank {} {}",
                    e.route.name(),
                    e.row_rank,
                    e.col_rank,
                    if e.pass { "pass" } else { "FAIL" }
                ))?;
            }
            report.routes_agree && report.entries.iter().all(|e| e.pass)
        }
        Command::Rref(_) => {
            let rr = rref(a, tol);
            em.line(&format!("rank {}", rr.rank()))?;
            em.line(&format!("pivots {:?}", rr.pivot_cols))?;
            em.factor("R0", &rr.r0)?;
            em.factor("E", &rr.row_ops)?;
            check("cr")
        }
        Command::Cr(_) => {
            let f = cr_decompose(a, tol);
            em.line(&format!("rank {}", f.rank()))?;
            em.line(&format!("pivots {:?}", f.pivot_cols))?;
            em.line(&format!("storage {} (dense {})", f.storage(), rows * cols))?;
            em.factor("C", &f.c)?;
            em.factor("R", &f.r)?;
            check("cr")
        }
        Command::Qr(fa) => {
            let mode = if fa.full { QrMode::Full } else { QrMode::Reduced };
            let f = qr(a, mode, tol).map_err(|e| Failure::Usage(e.to_string()))?;
            if f.is_rank_deficient() {
                em.line(&format!("dependent columns {:?} (zero diagonal in R)", f.dependent_cols))?;
            }
            em.factor("Q", &f.q)?;
            em.factor("R", &f.r)?;
            em.factor("Qnorm2", &norms_column(&f.col_norms_sq))?;
            check("qr")
        }
        Command::Lq(fa) => {
            let mode = if fa.full { QrMode::Full } else { QrMode::Reduced };
            let f = lq(a, mode, tol).map_err(|e| Failure::Usage(e.to_string()))?;
            if !f.dependent_rows.is_empty() {
                em.line(&format!("dependent rows {:?} (zero diagonal in L)", f.dependent_rows))?;
            }
            em.factor("L", &f.l)?;
            em.factor("Q", &f.q)?;
            em.factor("Qnorm2", &norms_column(&f.row_norms_sq))?;
            check("lq")
        }
        Command::Ulv(_) | Command::Urv(_) => {
            let (f, name) = match cmd {
                Command::Ulv(_) => (ulv(a, tol), "ulv"),
                _ => (urv(a, tol), "urv"),
            };
            em.line(&format!("rank {}", f.rank))?;
            em.factor("U", &f.u)?;
            em.factor("T", &f.t)?;
            em.factor("V", &f.v)?;
            em.factor("Unorm2", &norms_column(&f.u_norms_sq))?;
            em.factor("Vnorm2", &norms_column(&f.v_norms_sq))?;
            check(name)
        }
        Command::Rankdec(rd) => {
            let split = match rd.split {
                SplitArg::DlF => RankSplit::DLF,
                SplitArg::DLf => RankSplit::DFL,
            };
            let f = rank_decompose_from(&ulv(a, tol), split);
            em.line(&format!("rank {}", f.rank()))?;
            em.line(&format!("storage {} (dense {})", f.storage(), rows * cols))?;
            em.factor("D", &f.d)?;
            em.factor("F", &f.f)?;
            check("rankdec")
        }
        Command::Cur(_) => match cur_decompose(a, tol) {
            Ok(f) => {
                em.line(&format!("rank {}", f.rank()))?;
                em.line(&format!("rows {:?}", f.row_idx))?;
                em.line(&format!("cols {:?}", f.col_idx))?;
                em.factor("C", &f.c)?;
                em.factor("Uc", &f.u)?;
                em.factor("Rr", &f.r)?;
                check("cur")
            }
            Err(e) => {
                em.line(&format!("cur failed: {e}"))?;
                false
            }
        },
        Command::Subspaces(_) => {
            let s = four_subspaces(a, tol);
            em.line(&format!("rank {}", s.rank))?;
            em.line(&format!("dim N(A) {}, dim N(A^T) {}", s.null_basis.cols(), s.left_null_basis.cols()))?;
            em.factor("col", &s.col_basis)?;
            em.factor("row", &s.row_basis)?;
            em.factor("null", &s.null_basis)?;
            em.factor("leftnull", &s.left_null_basis)?;
            check("subspaces")
        }
        Command::Split(sp) => {
            let x = parse_vector::<T>(&sp.x)?;
            let (xr, xn) = split_vector(a, &x, tol).map_err(|e| Failure::Usage(e.to_string()))?;
            em.factor("xr", &Matrix::column_vector(xr))?;
            em.factor("xn", &Matrix::column_vector(xn))?;
            check("subspaces")
        }
        Command::Verify(_) => {
            for e in &report.entries {
                em.line(&format!(
                    "route {:<10} ({}, {}) {}",
                    e.route.name(),
                    e.row_rank,
                    e.col_rank,
                    if e.pass { "pass" } else { "FAIL" }
                ))?;
            }
            for (name, f) in &report.factor_checks {
                let status = match (f.applicable, f.pass) {
                    (false, _) => "n/a",
                    (true, true) => "pass",
                    (true, false) => "FAIL",
                };
                em.line(&format!("check {name:<10} {status}"))?;
            }
            em.line(&format!("overall {}", if report.overall { "pass" } else { "FAIL" }))?;
            report.overall
        }
    };

    if c.json {
        write_report(em.out, &report)?;
    }
    Ok(if pass { EXIT_PASS } else { EXIT_VERIFY_FAILED })
}

fn write_report(out: &mut dyn Write, report: &VerificationReport) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))
}

/// Recovers a typed matrix from a parsed one of the same regime.
trait Regime: Scalar {
    fn take(m: AnyMatrix) -> Option<Matrix<Self>>;
}

impl Regime for f64 {
    fn take(m: AnyMatrix) -> Option<Matrix<f64>> {
        match m {
            AnyMatrix::Float(a) => Some(a),
            AnyMatrix::Exact(_) => None,
        }
    }
}

impl Regime for Rational {
    fn take(m: AnyMatrix) -> Option<Matrix<Rational>> {
        match m {
            AnyMatrix::Exact(a) => Some(a),
            AnyMatrix::Float(_) => None,
        }
    }
}

fn parse_vector<T: Regime>(text: &str) -> Result<Vec<T>, Failure> {
    let mode = if T::EXACT { Mode::Exact } else { Mode::Float };
    let parsed = parse_str(text, Format::Csv, Some(mode)).map_err(|e| Failure::Usage(format!("--x: {e}")))?;
    let m = T::take(parsed).ok_or_else(|| Failure::Usage("--x: regime mismatch".into()))?;
    if m.rows() != 1 {
        return Err(Failure::Usage("--x: expected a single comma-separated row".into()));
    }
    Ok(m.row(0).to_vec())
}
