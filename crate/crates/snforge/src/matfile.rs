//! Plain-text matrix files.
//!
//! ```text
//! SNFORGE v1
//! dims: 2 2 8 8
//! labels: A1 B1 A2 B2
//! <re> <im>        one line per entry, row-major, n² lines
//! ```
//!
//! Entries are written with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use snforge_core::tensor::{DenseHermitian, Matrix, TensorSpace};
use snforge_core::Complex64;

pub const MAGIC: &str = "SNFORGE v1";

#[derive(Debug, thiserror::Error)]
pub enum MatfileError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] snforge_core::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> MatfileError {
    MatfileError::Syntax {
        line,
        message: message.into(),
    }
}

fn write_body(w: &mut impl Write, m: &Matrix, space: &TensorSpace) -> io::Result<()> {
    writeln!(w, "{MAGIC}")?;
    let dims: Vec<String> = space.dims().iter().map(usize::to_string).collect();
    writeln!(w, "dims: {}", dims.join(" "))?;
    writeln!(w, "labels: {}", space.labels().join(" "))?;
    for z in m.as_slice() {
        writeln!(w, "{:.16e} {:.16e}", z.re, z.im)?;
    }
    Ok(())
}

/// Renders a square matrix whose dimension matches `space`.
pub fn format_matrix(m: &Matrix, space: &TensorSpace) -> String {
    assert!(m.is_square() && m.rows() == space.dim(), "matrix does not match its space");
    let mut buf = Vec::new();
    write_body(&mut buf, m, space).expect("writing to memory");
    String::from_utf8(buf).expect("ASCII output")
}

pub fn write_matrix(path: &Path, m: &Matrix, space: &TensorSpace) -> Result<(), MatfileError> {
    assert!(m.is_square() && m.rows() == space.dim(), "matrix does not match its space");
    let io_err = |source| MatfileError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_body(&mut w, m, space).and_then(|_| w.flush()).map_err(io_err)
}

/// Writes `m` with its own space, or a single factor when it has none.
pub fn write_hermitian(path: &Path, m: &DenseHermitian) -> Result<(), MatfileError> {
    let space = match m.space() {
        Some(s) => s.clone(),
        None => TensorSpace::from_dims(&[m.dim()])?,
    };
    write_matrix(path, m.matrix(), &space)
}

fn header<'a>(line: Option<(usize, &'a str)>, key: &str) -> Result<(usize, &'a str), MatfileError> {
    let (no, text) = line.ok_or_else(|| syntax(0, format!("missing `{key}` line")))?;
    let rest = text
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| syntax(no, format!("expected `{key}:`")))?;
    Ok((no, rest))
}

pub fn parse_matrix(text: &str) -> Result<(Matrix, TensorSpace), MatfileError> {
    let mut lines = text.lines().map(str::trim_end).enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, MAGIC)) => {}
        Some((no, other)) => return Err(syntax(no, format!("expected `{MAGIC}`, found `{other}`"))),
        None => return Err(syntax(1, "empty file")),
    }
    let (no, dims) = header(lines.next(), "dims")?;
    let dims = dims
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| syntax(no, format!("bad dimension `{t}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let (_, labels) = header(lines.next(), "labels")?;
    let labels: Vec<&str> = labels.split_whitespace().collect();
    let space = TensorSpace::new(&dims, &labels)?;
    let n = space.dim();
    let total = n.checked_mul(n).ok_or_else(|| syntax(no, "dimension overflows"))?;
    let mut data = Vec::with_capacity(total);
    for (no, line) in lines {
        if data.len() == total {
            if line.trim().is_empty() {
                continue;
            }
            return Err(syntax(no, format!("more than {total} entries")));
        }
        let mut parts = line.split_whitespace();
        let mut number = || -> Result<f64, MatfileError> {
            let t = parts.next().ok_or_else(|| syntax(no, "expected `re im`"))?;
            t.parse::<f64>().map_err(|_| syntax(no, format!("bad number `{t}`")))
        };
        let (re, im) = (number()?, number()?);
        if parts.next().is_some() {
            return Err(syntax(no, "expected exactly two numbers"));
        }
        data.push(Complex64::new(re, im));
    }
    if data.len() != total {
        return Err(syntax(0, format!("expected {total} entries, found {}", data.len())));
    }
    Ok((Matrix::from_row_major(n, n, data)?, space))
}

pub fn read_matrix(path: &Path) -> Result<(Matrix, TensorSpace), MatfileError> {
    let text = fs::read_to_string(path).map_err(|source| MatfileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix(&text)
}

/// Reads a Hermitian operator and attaches the file's space. Entries are
/// kept exactly as stored.
pub fn read_hermitian(path: &Path) -> Result<DenseHermitian, MatfileError> {
    let (m, space) = read_matrix(path)?;
    Ok(DenseHermitian::new(m)?.with_space(space)?)
}

/// Space line summary used in reports, e.g. `A1:2 B1:2 A2:8 B2:8`.
pub fn describe_space(space: &TensorSpace) -> String {
    let mut s = String::new();
    for (i, (l, d)) in space.labels().iter().zip(space.dims()).enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{l}:{d}");
    }
    s
}
