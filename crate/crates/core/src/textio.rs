//! The shared matrix text format.
//!
//! A record is a header line `p ROWS COLS` (space-separated decimals)
//! followed by `ROWS` lines of `COLS` residues. Multiple records are
//! separated by one or more blank lines. Entries outside `[0, p)` and
//! non-prime moduli are rejected with the offending line number.

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::FMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses a single matrix record; trailing blank lines are permitted.
pub fn parse_matrix(text: &str) -> Result<FMatrix> {
    let mut records = parse_matrices(text)?;
    match records.len() {
        1 => Ok(records.pop().unwrap()),
        0 => Err(parse_err(1, "empty input")),
        n => Err(parse_err(1, format!("expected one matrix, found {n}"))),
    }
}

/// Parses blank-line separated matrix records.
pub fn parse_matrices(text: &str) -> Result<Vec<FMatrix>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    loop {
        // skip blank separators
        while lines
            .peek()
            .is_some_and(|(_, l)| l.trim().is_empty())
        {
            lines.next();
        }
        let Some((lineno, header)) = lines.next() else {
            break;
        };
        let lineno = lineno + 1;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("header must be `p ROWS COLS`, got {} fields", fields.len()),
            ));
        }
        let parse_u64 = |s: &str, what: &str| {
            s.parse::<u64>()
                .map_err(|_| parse_err(lineno, format!("invalid {what}: `{s}`")))
        };
        let p = parse_u64(fields[0], "modulus")?;
        let rows = parse_u64(fields[1], "row count")? as usize;
        let cols = parse_u64(fields[2], "column count")? as usize;
        let field =
            FieldSpec::new(p).map_err(|_| parse_err(lineno, format!("modulus {p} is not prime")))?;
        if rows == 0 || cols == 0 {
            return Err(parse_err(lineno, "matrix dimensions must be positive"));
        }

        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let Some((rl, row_line)) = lines.next() else {
                return Err(parse_err(
                    lineno,
                    format!("expected {rows} rows, input ended after {r}"),
                ));
            };
            let rl = rl + 1;
            if row_line.trim().is_empty() {
                return Err(parse_err(rl, format!("expected row {} of {rows}, got blank line", r + 1)));
            }
            let toks: Vec<&str> = row_line.split_whitespace().collect();
            if toks.len() != cols {
                return Err(parse_err(
                    rl,
                    format!("expected {cols} entries, got {}", toks.len()),
                ));
            }
            for tok in toks {
                let v = tok
                    .parse::<u64>()
                    .map_err(|_| parse_err(rl, format!("invalid entry: `{tok}`")))?;
                if v >= p {
                    return Err(parse_err(
                        rl,
                        format!("entry {v} out of range for GF({p})"),
                    ));
                }
                entries.push(v);
            }
        }
        out.push(FMatrix::new(rows, cols, entries, field)?);
    }
    Ok(out)
}

/// Writes a matrix in the shared text format (same as its `Display`).
pub fn matrix_to_text(m: &FMatrix) -> String {
    m.to_string()
}

/// Concatenates records separated by single blank lines.
pub fn matrices_to_text(ms: &[FMatrix]) -> String {
    ms.iter()
        .map(matrix_to_text)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Reads a parsed record as a vector: accepts an n x 1 column or a 1 x n row.
pub fn matrix_as_vector(m: &FMatrix) -> Result<Vec<u64>> {
    if m.cols() == 1 || m.rows() == 1 {
        Ok(m.entries().to_vec())
    } else {
        Err(Error::Shape(format!(
            "expected a vector, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}
