//! Matrix Market reader and writer for real symmetric matrices.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SymmetricMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<SymmetricMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(perr(hline, "missing '%%MatrixMarket matrix' banner"));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        f => return Err(perr(hline, format!("unknown format '{f}'"))),
    };
    if !matches!(fields[3].as_str(), "real" | "integer" | "double") {
        return Err(perr(hline, format!("unsupported field '{}'", fields[3])));
    }
    let symmetric = match fields[4].as_str() {
        "symmetric" => true,
        "general" => false,
        s => return Err(perr(hline, format!("unsupported symmetry '{s}'"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = body.next().ok_or_else(|| perr(hline + 1, "missing size line"))?;
    let dims = parse_ints(size, sline)?;
    let (rows, cols) = match dims.as_slice() {
        [r, c, _] if coordinate => (*r, *c),
        [r, c] if !coordinate => (*r, *c),
        _ => return Err(perr(sline, "malformed size line")),
    };
    if rows != cols {
        return Err(Error::NotSquare(rows, cols));
    }
    let n = rows;
    let mut m = DMatrix::<f64>::zeros(n, n);

    if coordinate {
        let nnz = dims[2];
        let mut count = 0;
        for (ln, l) in body {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(perr(ln, "expected 'row col value'"));
            }
            let i: usize = t[0].parse().map_err(|_| perr(ln, "bad row index"))?;
            let j: usize = t[1].parse().map_err(|_| perr(ln, "bad column index"))?;
            let v: f64 = t[2].parse().map_err(|_| perr(ln, "bad value"))?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(perr(ln, format!("index ({i}, {j}) out of range")));
            }
            m[(i - 1, j - 1)] += v;
            if symmetric && i != j {
                m[(j - 1, i - 1)] += v;
            }
            count += 1;
        }
        if count != nnz {
            return Err(perr(sline, format!("declared {nnz} entries, found {count}")));
        }
    } else {
        let mut values = Vec::new();
        let mut last = sline;
        for (ln, l) in body {
            last = ln;
            for tok in l.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|_| perr(ln, "bad value"))?);
            }
        }
        let expected = if symmetric { n * (n + 1) / 2 } else { n * n };
        if values.len() != expected {
            return Err(perr(last, format!("expected {expected} values, found {}", values.len())));
        }
        let mut it = values.into_iter();
        for j in 0..n {
            let start = if symmetric { j } else { 0 };
            for i in start..n {
                let v = it.next().expect("length checked");
                m[(i, j)] = v;
                if symmetric {
                    m[(j, i)] = v;
                }
            }
        }
    }
    SymmetricMatrix::new(m)
}

fn parse_ints(line: &str, ln: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(ln, format!("bad integer '{t}'"))))
        .collect()
}

/// Coordinate format, lower triangle, 17 significant digits.
pub fn format_matrix_market(a: &SymmetricMatrix) -> String {
    let n = a.dim();
    let e = a.entries();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            if e[(i, j)] != 0.0 {
                entries.push((i, j, e[(i, j)]));
            }
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{n} {n} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v);
    }
    out
}

pub fn write_matrix_market(path: impl AsRef<Path>, a: &SymmetricMatrix) -> Result<()> {
    std::fs::write(path, format_matrix_market(a))?;
    Ok(())
}
