//! Text formats: permutation lists and TSP instances.
//!
//! Both formats are line based, 1-based, and treat everything after `#` as a
//! comment.

use std::fs;
use std::path::Path;

use edgex_core::fitness::TspInstance;
use edgex_core::{Error as CoreError, Permutation};

use crate::error::{Error, Result};

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((k + 1, line))
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// One permutation per non-comment line, whitespace separated.
pub fn parse_permutations(text: &str) -> Result<Vec<Permutation>> {
    let mut out: Vec<Permutation> = Vec::new();
    for (line, content) in significant_lines(text) {
        let symbols = content
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(line, format!("not a positive integer: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = out.first() {
            if first.len() != symbols.len() {
                return Err(parse_err(
                    line,
                    format!("expected {} symbols, found {}", first.len(), symbols.len()),
                ));
            }
        }
        let p = Permutation::from_one_based(&symbols).map_err(|e| match e {
            CoreError::DuplicateSymbol { symbol } => {
                parse_err(line, format!("duplicate symbol {symbol}"))
            }
            CoreError::SymbolOutOfRange { symbol, n } => {
                parse_err(line, format!("symbol {symbol} out of range 1..={n}"))
            }
            other => parse_err(line, other.to_string()),
        })?;
        out.push(p);
    }
    Ok(out)
}

pub fn read_permutation_file(path: &Path) -> Result<Vec<Permutation>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_permutations(&text)
}

pub fn format_permutations(perms: &[Permutation]) -> String {
    perms.iter().map(|p| format!("{p}\n")).collect()
}

fn parse_reals(line: usize, content: &str, expect: usize) -> Result<Vec<f64>> {
    let vals = content
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(line, format!("not a number: {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if vals.len() != expect {
        return Err(parse_err(
            line,
            format!("expected {expect} values, found {}", vals.len()),
        ));
    }
    Ok(vals)
}

/// Instance file: a line with `n`, then `COORDS` followed by `n` lines of
/// `x y`, or `MATRIX` followed by `n` rows of `n` costs.
pub fn parse_instance(text: &str) -> Result<TspInstance> {
    let mut lines = significant_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty instance file"))?;
    let n: usize = header
        .parse()
        .map_err(|_| parse_err(line, format!("expected city count, found {header:?}")))?;
    let (line, kind) = lines
        .next()
        .ok_or_else(|| parse_err(line + 1, "expected COORDS or MATRIX"))?;
    let mut last = line;
    let inst = match kind {
        "COORDS" => {
            let mut coords = Vec::with_capacity(n);
            for _ in 0..n {
                let (line, content) = lines
                    .next()
                    .ok_or_else(|| parse_err(last + 1, "missing coordinate line"))?;
                let v = parse_reals(line, content, 2)?;
                coords.push((v[0], v[1]));
                last = line;
            }
            TspInstance::from_coords(coords)
        }
        "MATRIX" => {
            let mut matrix = Vec::with_capacity(n * n);
            for _ in 0..n {
                let (line, content) = lines
                    .next()
                    .ok_or_else(|| parse_err(last + 1, "missing matrix row"))?;
                matrix.extend(parse_reals(line, content, n)?);
                last = line;
            }
            TspInstance::from_matrix(n, matrix)
        }
        other => return Err(parse_err(line, format!("expected COORDS or MATRIX, found {other:?}"))),
    };
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "unexpected trailing content"));
    }
    inst.map_err(|e| parse_err(last, e.to_string()))
}

pub fn read_instance_file(path: &Path) -> Result<TspInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text)
}

/// Writes an instance in the `COORDS` form when coordinates are known,
/// `MATRIX` otherwise.
pub fn format_instance(inst: &TspInstance) -> String {
    let mut s = format!("{}\n", inst.n());
    match inst.coords() {
        Some(coords) => {
            s.push_str("COORDS\n");
            for (x, y) in coords {
                s.push_str(&format!("{x} {y}\n"));
            }
        }
        None => {
            s.push_str("MATRIX\n");
            for i in 0..inst.n() {
                let row: Vec<String> = (0..inst.n()).map(|j| inst.cost(i, j).to_string()).collect();
                s.push_str(&row.join(" "));
                s.push('\n');
            }
        }
    }
    s
}
