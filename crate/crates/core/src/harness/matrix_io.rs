//! Plain-text matrix files: the dimension, then `dim²` entries in
//! row-major order, each written as a real and an imaginary part.
//! Tokens are whitespace separated; `#` starts a comment.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, MAX_DIM};

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut tokens = text.lines().enumerate().flat_map(|(line, content)| {
        let content = content.split('#').next().unwrap_or("");
        content.split_whitespace().map(move |tok| (line + 1, tok))
    });
    let (line, head) = tokens.next().ok_or(Error::Parse {
        line: 1,
        message: "empty matrix file".into(),
    })?;
    let dim: usize = head.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a dimension, found `{head}`"),
    })?;
    if dim == 0 {
        return Err(Error::Parse {
            line,
            message: "dimension must be at least 1".into(),
        });
    }
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge(dim));
    }
    let mut data = Vec::with_capacity(dim * dim);
    let mut last_line = line;
    for k in 0..dim * dim {
        let mut part = || -> Result<f64> {
            let (line, tok) = tokens.next().ok_or(Error::Parse {
                line: last_line,
                message: format!(
                    "expected {} values, file ends after entry {k}",
                    2 * dim * dim
                ),
            })?;
            last_line = line;
            let value: f64 = tok.parse().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse `{tok}` as a number"),
            })?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFinite {
                    row: k / dim,
                    col: k % dim,
                })
            }
        };
        let re = part()?;
        let im = part()?;
        data.push(Complex64::new(re, im));
    }
    if let Some((line, tok)) = tokens.next() {
        return Err(Error::Parse {
            line,
            message: format!("unexpected trailing token `{tok}`"),
        });
    }
    Matrix::from_vec(dim, data)
}

/// One row per line, every value with 17 significant digits so that
/// [`parse_matrix`] recovers the matrix exactly.
pub fn write_matrix(m: &Matrix) -> String {
    let dim = m.dim();
    let mut out = format!("{dim}\n");
    for i in 0..dim {
        for j in 0..dim {
            let z = m[(i, j)];
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e} {:.16e}", z.re, z.im);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    #[test]
    fn parses_identity() {
        let m = parse_matrix("2\n1 0 0 0\n0 0 1 0\n").unwrap();
        assert_eq!(m, Matrix::identity(2));
    }

    #[test]
    fn comments_and_layout_are_free() {
        let m = parse_matrix("# a comment\n 2 # dim\n1 0\n0 0 0 0 1\n0").unwrap();
        assert_eq!(m, Matrix::identity(2));
    }

    #[test]
    fn round_trip_is_exact() {
        let m = sampling::random_gaussian(&mut sampling::rng(3), 5);
        assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "",
            "0",
            "x",
            "2\n1 0 0 0",
            "1\n1 0 7",
            "1\nnan 0",
            "1\n1 zz",
            "600\n",
        ] {
            assert!(parse_matrix(text).is_err(), "{text:?}");
        }
        match parse_matrix("1\n\n1 oops") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
