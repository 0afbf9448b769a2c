//! Matrix Market (array and coordinate, real general) and CSV readers and
//! writers.
//!
//! Entries may be integers, decimals (`-1.25`, `3e-2`) or rationals (`p/q`).
//! Exact mode is chosen automatically when every entry is an integer or any
//! entry is a rational literal; decimals otherwise select float mode.
//! Decimal literals convert to rationals without loss when exact mode is
//! forced.

use std::fmt;
use std::path::Path;

use num::{BigInt, Zero};
use sha2::{Digest, Sha256};

use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    Csv,
}

impl Format {
    /// `.mtx`/`.mm` are Matrix Market, anything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") | Some("mm") => Format::MatrixMarket,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Io(String),
    MalformedHeader(String),
    BadSizeLine(String),
    RaggedRow { expected: usize, found: usize },
    EntryCount { expected: usize, found: usize },
    NonNumeric(String),
    ZeroDenominator,
    IndexOutOfRange { index: usize, bound: usize },
    DuplicateEntry,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Io(e) => write!(f, "i/o error: {e}"),
            ParseErrorKind::MalformedHeader(h) => write!(f, "malformed header: {h}"),
            ParseErrorKind::BadSizeLine(s) => write!(f, "bad size line: {s}"),
            ParseErrorKind::RaggedRow { expected, found } => {
                write!(f, "ragged row: expected {expected} entries, found {found}")
            }
            ParseErrorKind::EntryCount { expected, found } => {
                write!(f, "declared {expected} entries, found {found}")
            }
            ParseErrorKind::NonNumeric(t) => write!(f, "non-numeric token {t:?}"),
            ParseErrorKind::ZeroDenominator => write!(f, "rational literal with zero denominator"),
            ParseErrorKind::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} outside 1..={bound}")
            }
            ParseErrorKind::DuplicateEntry => write!(f, "duplicate coordinate entry"),
        }
    }
}

/// Parse failure with a 1-based source location (0 when not applicable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            return write!(f, "{}", self.kind);
        }
        write!(f, "line {}, column {}: {}", self.line, self.column, self.kind)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

/// A parsed numeric literal.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Integer(BigInt),
    Rational(Rational),
    Decimal { exact: Rational, approx: f64 },
}

impl Literal {
    pub fn parse(token: &str) -> Result<Literal, ParseErrorKind> {
        let t = token.trim();
        if let Some((p, q)) = t.split_once('/') {
            let (Some(p), Some(q)) = (parse_int(p), parse_int(q)) else {
                return Err(ParseErrorKind::NonNumeric(t.to_string()));
            };
            if q.is_zero() {
                return Err(ParseErrorKind::ZeroDenominator);
            }
            return Ok(Literal::Rational(Rational::new(p, q)));
        }
        if let Some(i) = parse_int(t) {
            return Ok(Literal::Integer(i));
        }
        match parse_decimal(t) {
            Some(exact) => Ok(Literal::Decimal {
                exact,
                approx: t.parse::<f64>().map_err(|_| ParseErrorKind::NonNumeric(t.to_string()))?,
            }),
            None => Err(ParseErrorKind::NonNumeric(t.to_string())),
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Literal::Integer(i) => Rational::from_integer(i.clone()),
            Literal::Rational(r) => r.clone(),
            Literal::Decimal { exact, .. } => exact.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Literal::Decimal { approx, .. } => *approx,
            other => Scalar::to_f64(&other.to_rational()),
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

/// `[+-] digits [. digits] [e [+-] digits]`, converted exactly.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if shift >= 0 {
        Rational::from_integer(digits * num::pow(ten, shift as usize))
    } else {
        Rational::new(digits, num::pow(ten, (-shift) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

/// A matrix in whichever regime the input (or the caller) selected.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(Matrix<Rational>),
    Float(Matrix<f64>),
}

impl AnyMatrix {
    pub fn mode(&self) -> Mode {
        match self {
            AnyMatrix::Exact(_) => Mode::Exact,
            AnyMatrix::Float(_) => Mode::Float,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            AnyMatrix::Exact(m) => m.shape(),
            AnyMatrix::Float(m) => m.shape(),
        }
    }

    /// SHA-256 of the canonical Matrix Market rendering, prefixed by the mode.
    pub fn digest(&self) -> String {
        let text = match self {
            AnyMatrix::Exact(m) => write_matrix_market(m),
            AnyMatrix::Float(m) => write_matrix_market(m),
        };
        let mut h = Sha256::new();
        h.update(self.mode().name().as_bytes());
        h.update(b"\n");
        h.update(text.as_bytes());
        hex::encode(h.finalize())
    }
}

/// Entries in row-major order plus the shape, before a regime is chosen.
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Literal>,
}

impl RawMatrix {
    fn into_matrix(self, mode: Option<Mode>) -> AnyMatrix {
        let auto = if self
            .entries
            .iter()
            .any(|l| matches!(l, Literal::Rational(_)))
            || self.entries.iter().all(|l| matches!(l, Literal::Integer(_)))
        {
            Mode::Exact
        } else {
            Mode::Float
        };
        match mode.unwrap_or(auto) {
            Mode::Exact => AnyMatrix::Exact(
                Matrix::new(
                    self.rows,
                    self.cols,
                    self.entries.iter().map(Literal::to_rational).collect(),
                )
                .expect("entry count checked"),
            ),
            Mode::Float => AnyMatrix::Float(
                Matrix::new(
                    self.rows,
                    self.cols,
                    self.entries.iter().map(Literal::to_f64).collect(),
                )
                .expect("entry count checked"),
            ),
        }
    }
}

pub fn parse_matrix(path: &Path, format: Format, mode: Option<Mode>) -> Result<AnyMatrix, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(0, 0, ParseErrorKind::Io(e.to_string())))?;
    parse_str(&text, format, mode)
}

pub fn parse_str(text: &str, format: Format, mode: Option<Mode>) -> Result<AnyMatrix, ParseError> {
    let raw = match format {
        Format::MatrixMarket => parse_mm(text)?,
        Format::Csv => parse_csv(text)?,
    };
    Ok(raw.into_matrix(mode))
}

fn parse_csv(text: &str) -> Result<RawMatrix, ParseError> {
    let mut entries = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0;
        let mut col_pos = 1;
        for field in line.split(',') {
            let lead = field.len() - field.trim_start().len();
            let lit = Literal::parse(field).map_err(|k| err(line_no, col_pos + lead, k))?;
            entries.push(lit);
            count += 1;
            col_pos += field.len() + 1;
        }
        match cols {
            None => cols = Some(count),
            Some(expected) if expected != count => {
                return Err(err(line_no, 1, ParseErrorKind::RaggedRow { expected, found: count }));
            }
            _ => {}
        }
        rows += 1;
    }
    Ok(RawMatrix {
        rows,
        cols: cols.unwrap_or(0),
        entries,
    })
}

#[derive(PartialEq)]
enum MmLayout {
    Array,
    Coordinate,
}

fn parse_mm(text: &str) -> Result<RawMatrix, ParseError> {
    // Truncation errors point just past the last line.
    let eof = text.lines().count() + 1;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, 1, ParseErrorKind::MalformedHeader("empty file".into())))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    let bad_header = |why: &str| err(1, 1, ParseErrorKind::MalformedHeader(format!("{why}: {header:?}")));
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(bad_header("expected '%%MatrixMarket matrix <layout> <field> <symmetry>'"));
    }
    let layout = match words[2].as_str() {
        "array" => MmLayout::Array,
        "coordinate" => MmLayout::Coordinate,
        _ => return Err(bad_header("layout must be array or coordinate")),
    };
    if words[3] != "real" && words[3] != "integer" {
        return Err(bad_header("field must be real or integer"));
    }
    if words[4] != "general" {
        return Err(bad_header("only general symmetry is supported"));
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_ln, size_line) = body
        .next()
        .ok_or_else(|| err(eof, 1, ParseErrorKind::BadSizeLine("missing".into())))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| err(size_ln, 1, ParseErrorKind::BadSizeLine(size_line.trim().into())))?;
    let want = if layout == MmLayout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(err(size_ln, 1, ParseErrorKind::BadSizeLine(size_line.trim().into())));
    }
    let (m, n) = (dims[0], dims[1]);

    match layout {
        MmLayout::Array => {
            // column-major
            let mut col_major = Vec::with_capacity(m * n);
            for (ln, line) in body {
                for (col, tok) in tokens_with_columns(line) {
                    if col_major.len() == m * n {
                        return Err(err(
                            ln,
                            col,
                            ParseErrorKind::EntryCount {
                                expected: m * n,
                                found: col_major.len() + 1,
                            },
                        ));
                    }
                    col_major.push(Literal::parse(tok).map_err(|k| err(ln, col, k))?);
                }
            }
            if col_major.len() != m * n {
                return Err(err(
                    eof,
                    1,
                    ParseErrorKind::EntryCount {
                        expected: m * n,
                        found: col_major.len(),
                    },
                ));
            }
            let mut entries = Vec::with_capacity(m * n);
            for i in 0..m {
                for j in 0..n {
                    entries.push(col_major[j * m + i].clone());
                }
            }
            Ok(RawMatrix { rows: m, cols: n, entries })
        }
        MmLayout::Coordinate => {
            let nnz = dims[2];
            let mut slots: Vec<Option<Literal>> = vec![None; m * n];
            let mut seen = 0;
            for (ln, line) in body {
                let toks: Vec<(usize, &str)> = tokens_with_columns(line).collect();
                if seen == nnz {
                    return Err(err(ln, 1, ParseErrorKind::EntryCount { expected: nnz, found: seen + 1 }));
                }
                if toks.len() != 3 {
                    return Err(err(ln, 1, ParseErrorKind::NonNumeric(line.trim().into())));
                }
                let mut idx = [0usize; 2];
                for (k, bound) in [(0, m), (1, n)] {
                    let (col, tok) = toks[k];
                    let v: usize = tok
                        .parse()
                        .map_err(|_| err(ln, col, ParseErrorKind::NonNumeric(tok.into())))?;
                    if v == 0 || v > bound {
                        return Err(err(ln, col, ParseErrorKind::IndexOutOfRange { index: v, bound }));
                    }
                    idx[k] = v - 1;
                }
                let (col, tok) = toks[2];
                let lit = Literal::parse(tok).map_err(|k| err(ln, col, k))?;
                let slot = &mut slots[idx[0] * n + idx[1]];
                if slot.is_some() {
                    return Err(err(ln, 1, ParseErrorKind::DuplicateEntry));
                }
                *slot = Some(lit);
                seen += 1;
            }
            if seen != nnz {
                return Err(err(eof, 1, ParseErrorKind::EntryCount { expected: nnz, found: seen }));
            }
            let entries = slots
                .into_iter()
                .map(|s| s.unwrap_or(Literal::Integer(BigInt::zero())))
                .collect();
            Ok(RawMatrix { rows: m, cols: n, entries })
        }
    }
}

fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = line.as_ptr() as usize;
    line.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - base + 1, t))
}

/// Renders one entry: rationals as `p` or `p/q`, floats with 17
/// significant digits so the value survives a round trip.
pub fn format_entry<T: Scalar>(x: &T) -> String {
    if T::EXACT {
        x.to_string()
    } else {
        let v = x.to_f64();
        if v == 0.0 {
            // keep the sign of negative zero out of the files
            "0".to_string()
        } else {
            format!("{v:.16e}")
        }
    }
}

/// Dense Matrix Market array file, entries in column-major order.
pub fn write_matrix_market<T: Scalar>(a: &Matrix<T>) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", a.rows(), a.cols()));
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            out.push_str(&format_entry(&a[(i, j)]));
            out.push('\n');
        }
    }
    out
}

pub fn write_csv<T: Scalar>(a: &Matrix<T>) -> String {
    let mut out = String::new();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(format_entry).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
