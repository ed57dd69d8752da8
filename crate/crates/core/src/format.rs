//! Text format for point sets and weight files.
//!
//! Rational sets: header `d N D`, then N lines of d integer numerators.
//! Free sets: header `d N *`, then N lines of d decimal coordinates in
//! [0,1). Weight files are whitespace-separated reals, one per point.
//! Blank lines and lines starting with `#` are skipped everywhere.
//! Floats are written in shortest round-trip decimal, so a write/parse
//! cycle reproduces the value bit for bit.

use crate::error::{Error, Result};
use crate::pointset::{FreePointSet, PointSet, Points, WeightVector};

/// Caps on parsed inputs. The library targets desk-scale sets; these stop
/// a hostile header like `1 999999999999 7` from provoking a huge
/// allocation before any data row is read.
const MAX_DIM: usize = 4096;
const MAX_POINTS: usize = 10_000_000;
const MAX_CELLS: usize = 10_000_000;

/// A parsed point set in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPointSet {
    Rational(PointSet),
    Free(FreePointSet),
}

impl Points for AnyPointSet {
    fn dim(&self) -> usize {
        match self {
            AnyPointSet::Rational(p) => p.dim(),
            AnyPointSet::Free(p) => p.dim(),
        }
    }

    fn n_points(&self) -> usize {
        match self {
            AnyPointSet::Rational(p) => p.n_points(),
            AnyPointSet::Free(p) => p.n_points(),
        }
    }

    fn coord(&self, point: usize, axis: usize) -> f64 {
        match self {
            AnyPointSet::Rational(p) => p.coord(point, axis),
            AnyPointSet::Free(p) => p.coord(point, axis),
        }
    }

    fn coord_diff_abs(&self, n: usize, m: usize, axis: usize) -> f64 {
        match self {
            AnyPointSet::Rational(p) => p.coord_diff_abs(n, m, axis),
            AnyPointSet::Free(p) => p.coord_diff_abs(n, m, axis),
        }
    }
}

fn err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

/// Yields (1-based line number, trimmed content) for data-bearing lines.
fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses the point-set text format, accepting both header kinds.
pub fn parse_point_set(input: &str) -> Result<AnyPointSet> {
    let mut lines = content_lines(input);
    let (header_no, header) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(err(header_no, "header must be `d N D` or `d N *`"));
    }
    let dim: usize = fields[0]
        .parse()
        .map_err(|_| err(header_no, format!("bad dimension `{}`", fields[0])))?;
    let n_points: usize = fields[1]
        .parse()
        .map_err(|_| err(header_no, format!("bad point count `{}`", fields[1])))?;
    if dim == 0 {
        return Err(err(header_no, "dimension must be at least 1"));
    }
    if dim > MAX_DIM || n_points > MAX_POINTS || n_points.saturating_mul(dim) > MAX_CELLS {
        return Err(err(header_no, "point set exceeds supported size"));
    }

    let set = if fields[2] == "*" {
        let coords = parse_rows(&mut lines, n_points, dim, parse_coord)?;
        AnyPointSet::Free(FreePointSet::new(dim, coords).map_err(|e| lift(header_no, e))?)
    } else {
        let denom: u64 = fields[2]
            .parse()
            .map_err(|_| err(header_no, format!("bad denominator `{}`", fields[2])))?;
        if denom == 0 {
            return Err(err(header_no, "denominator must be at least 1"));
        }
        let numerators = parse_rows(&mut lines, n_points, dim, parse_numerator)?;
        AnyPointSet::Rational(
            PointSet::from_numerators(dim, denom, &numerators).map_err(|e| lift(header_no, e))?,
        )
    };
    Ok(set)
}

/// Re-tags a constructor error with the header line it came from.
fn lift(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => err(line, other.to_string()),
    }
}

fn parse_coord(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("bad coordinate `{tok}`")))?;
    if !v.is_finite() || !(0.0..1.0).contains(&v) {
        return Err(err(line, format!("coordinate {v} outside [0,1)")));
    }
    Ok(v)
}

fn parse_numerator(tok: &str, line: usize) -> Result<i64> {
    tok.parse()
        .map_err(|_| err(line, format!("bad numerator `{tok}`")))
}

fn parse_rows<'a, T>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    n_points: usize,
    dim: usize,
    field: impl Fn(&str, usize) -> Result<T>,
) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(n_points * dim);
    for row in 0..n_points {
        let (no, line) = lines
            .next()
            .ok_or_else(|| err(usize::MAX, format!("expected {n_points} rows, got {row}")))?;
        let mut count = 0;
        for tok in line.split_whitespace() {
            out.push(field(tok, no)?);
            count += 1;
        }
        if count != dim {
            return Err(err(no, format!("expected {dim} fields, got {count}")));
        }
    }
    if let Some((no, _)) = lines.next() {
        return Err(err(no, "trailing data after last point"));
    }
    Ok(out)
}

/// Serializes a rational point set.
pub fn write_point_set(set: &PointSet) -> String {
    let mut out = format!("{} {} {}\n", set.dim(), set.n_points(), set.denom());
    for i in 0..set.n_points() {
        let row: Vec<String> = (0..set.dim())
            .map(|j| set.numerator(i, j).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Serializes a free point set with round-trip float formatting.
pub fn write_free_point_set(set: &FreePointSet) -> String {
    let mut out = format!("{} {} *\n", set.dim(), set.n_points());
    for i in 0..set.n_points() {
        let row: Vec<String> = (0..set.dim())
            .map(|j| set.coord(i, j).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_any_point_set(set: &AnyPointSet) -> String {
    match set {
        AnyPointSet::Rational(p) => write_point_set(p),
        AnyPointSet::Free(p) => write_free_point_set(p),
    }
}

/// Parses a weight file: whitespace-separated finite reals.
pub fn parse_weights(input: &str) -> Result<WeightVector> {
    let mut weights = Vec::new();
    for (no, line) in content_lines(input) {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| err(no, format!("bad weight `{tok}`")))?;
            if !v.is_finite() {
                return Err(err(no, format!("weight `{tok}` is not finite")));
            }
            weights.push(v);
            if weights.len() > MAX_POINTS {
                return Err(err(no, "weight file exceeds supported size"));
            }
        }
    }
    Ok(WeightVector::new(weights))
}

/// Serializes weights, one per line.
pub fn write_weights(weights: &WeightVector) -> String {
    let mut out = String::new();
    for w in weights.as_slice() {
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}
