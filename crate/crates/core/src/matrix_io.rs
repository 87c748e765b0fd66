//! Plain-text matrix format.
//!
//! ```text
//! # optional comment lines
//! dim 2
//! 0.5,0 0,-0.25
//! 0,0.25 0.5,0
//! ```
//!
//! The header gives the (square) dimension `d`; it is followed by `d` rows in
//! row-major order, each holding `d` whitespace-separated `re,im` pairs.
//! Numbers are written with Rust's shortest round-trip `f64` formatting, so
//! writing and reading back is lossless.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

pub fn write_matrix(m: &CMatrix) -> String {
    assert_eq!(m.nrows(), m.ncols(), "only square matrices are serialized");
    let d = m.nrows();
    let mut out = String::new();
    writeln!(out, "dim {d}").unwrap();
    for i in 0..d {
        let row: Vec<String> = (0..d)
            .map(|j| format!("{},{}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn read_matrix(text: &str) -> Result<CMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `dim d` header".into(),
    })?;
    let d: usize = header
        .strip_prefix("dim")
        .map(str::trim)
        .and_then(|s| s.parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Parse {
            line: hline,
            message: format!("expected `dim d` with d >= 1, got `{header}`"),
        })?;

    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        let (ln, row) = lines.next().ok_or_else(|| Error::Parse {
            line: hline + i + 1,
            message: format!("expected {d} rows, found {i}"),
        })?;
        let entries: Vec<&str> = row.split_whitespace().collect();
        if entries.len() != d {
            return Err(Error::Parse {
                line: ln,
                message: format!("expected {d} entries, found {}", entries.len()),
            });
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = parse_entry(e).ok_or_else(|| Error::Parse {
                line: ln,
                message: format!("bad entry `{e}` (expected re,im)"),
            })?;
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse {
            line: ln,
            message: "trailing content after matrix".into(),
        });
    }
    Ok(m)
}

fn parse_entry(s: &str) -> Option<C64> {
    let (re, im) = s.split_once(',')?;
    Some(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?))
}
