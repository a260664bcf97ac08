//! Plain-text formats for clouds, values and operator matrices.
//!
//! A cloud file is CSV with a header `x1,...,xd` or `x1,...,xd,y`, one point
//! per row. Lines starting with `#` are comments. Floats are written with
//! the shortest representation that round-trips.

use std::fmt::Write as _;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::surface_ops::OperatorMatrix;

/// Parsed contents of a cloud file.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudTable {
    pub points: PointCloud,
    pub values: Option<Vec<f64>>,
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::InvalidParameter(format!("line {line}: {}", reason.into()))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a cloud of centers: nonempty, pairwise distinct.
pub fn parse_cloud(text: &str) -> Result<CloudTable> {
    let table = parse_table(text)?;
    PointCloud::new(table.points.dim(), table.points.coords().to_vec())?;
    Ok(table)
}

/// Parses evaluation points, which may repeat or be empty.
pub fn parse_points(text: &str) -> Result<PointCloud> {
    Ok(parse_table(text)?.points)
}

fn parse_table(text: &str) -> Result<CloudTable> {
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::InvalidParameter("missing header".into()))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let has_values = names.last() == Some(&"y");
    let dim = names.len() - usize::from(has_values);
    if dim == 0 {
        return Err(malformed(hline, "header has no coordinate columns"));
    }
    for (i, name) in names[..dim].iter().enumerate() {
        if *name != format!("x{}", i + 1) {
            return Err(malformed(hline, format!("expected column `x{}`, found `{name}`", i + 1)));
        }
    }
    let mut coords = Vec::new();
    let mut values = has_values.then(Vec::new);
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(malformed(ln, format!("expected {} fields, found {}", names.len(), fields.len())));
        }
        for (j, f) in fields.iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| malformed(ln, format!("`{f}` is not a number")))?;
            if j < dim {
                coords.push(v);
            } else if let Some(vals) = values.as_mut() {
                vals.push(v);
            }
        }
    }
    let points = PointCloud::new_unchecked_distinct(dim, coords)?;
    Ok(CloudTable { points, values })
}

/// Writes `points`, and `values` as the `y` column when given.
pub fn format_cloud(points: &PointCloud, values: Option<&[f64]>) -> Result<String> {
    if let Some(v) = values {
        if v.len() != points.len() {
            return Err(Error::LengthMismatch { expected: points.len(), got: v.len() });
        }
    }
    let mut out = String::new();
    let header: Vec<String> = (1..=points.dim()).map(|i| format!("x{i}")).collect();
    out.push_str(&header.join(","));
    if values.is_some() {
        out.push_str(",y");
    }
    out.push('\n');
    for (i, p) in points.iter().enumerate() {
        push_row(&mut out, p.iter().copied().chain(values.map(|v| v[i])));
    }
    Ok(out)
}

/// Reads a values file: either a cloud file with a `y` column, or a single
/// column with header `y`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::InvalidParameter("missing header".into()))?;
    if header == "y" {
        return lines.map(|(ln, l)| l.parse().map_err(|_| malformed(ln, format!("`{l}` is not a number")))).collect();
    }
    parse_table(text)?.values.ok_or_else(|| malformed(hline, "no `y` column"))
}

/// Single-column `y` file.
pub fn format_values(values: &[f64]) -> String {
    let mut out = String::from("y\n");
    for v in values {
        let _ = writeln!(out, "{v:?}");
    }
    out
}

/// Matrix as CSV with a comment header describing what it discretizes.
pub fn format_operator(op: &OperatorMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# kind={}", op.kind);
    let _ = writeln!(out, "# rows={} cols={}", op.matrix.nrows(), op.matrix.ncols());
    let _ = writeln!(out, "# kernel={} alpha={:?}", op.spec, op.alpha);
    let header: Vec<String> = (1..=op.matrix.ncols()).map(|j| format!("c{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in 0..op.matrix.nrows() {
        push_row(&mut out, op.matrix.row(r).iter().copied());
    }
    out
}

/// Reads the numeric body written by [`format_operator`] as rows.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = data_lines(text);
    let (_, header) = lines.next().ok_or_else(|| Error::InvalidParameter("missing header".into()))?;
    let cols = header.split(',').count();
    lines
        .map(|(ln, l)| {
            let row: Vec<f64> = l
                .split(',')
                .map(|f| f.trim().parse().map_err(|_| malformed(ln, format!("`{f}` is not a number"))))
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(malformed(ln, format!("expected {cols} fields, found {}", row.len())));
            }
            Ok(row)
        })
        .collect()
}

fn push_row(out: &mut String, fields: impl Iterator<Item = f64>) {
    let mut first = true;
    for v in fields {
        if !first {
            out.push(',');
        }
        first = false;
        let _ = write!(out, "{v:?}");
    }
    out.push('\n');
}
