//! File formats.
//!
//! * Model: JSON `{"d", "k", "weights", "means", "form"}` with `form` one of
//!   `{"kind": "euclidean"}`, `{"kind": "diagonal", "signs": [±1]}`,
//!   `{"kind": "matrix", "entries": [[..]]}`.
//! * Delta samples: headerless CSV, one value per line.
//! * Moments and power sums: CSV `order,value[,stderr]` with a header line.
//! * Points: CSV, one point per row. Nodes: CSV `weight,node`.
//! * Histogram: CSV `bin_left,bin_right,count`.
//!
//! CSV reals are written with 17 significant digits; JSON reals use the
//! shortest representation that parses back to the same `f64`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{DistanceForm, MixtureModel};
use crate::moments::PowerSums;
use crate::pipeline::RecoveryReport;
use crate::prony::NodeSet;
use crate::scalar::Real;

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    d: usize,
    k: usize,
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    form: FormFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FormFile {
    Euclidean,
    Diagonal { signs: Vec<i8> },
    Matrix { entries: Vec<Vec<f64>> },
}

pub fn model_to_json<T: Real>(m: &MixtureModel<T>) -> Value {
    let form = match m.form().cast::<f64>() {
        DistanceForm::Euclidean => FormFile::Euclidean,
        DistanceForm::Diagonal(signs) => FormFile::Diagonal { signs },
        DistanceForm::Matrix(mat) => FormFile::Matrix {
            entries: (0..mat.rows()).map(|i| mat.row(i).to_vec()).collect(),
        },
    };
    let file = ModelFile {
        d: m.d(),
        k: m.k(),
        weights: m.weights().iter().map(|w| w.as_f64()).collect(),
        means: m
            .means()
            .iter()
            .map(|p| p.iter().map(|x| x.as_f64()).collect())
            .collect(),
        form,
    };
    serde_json::to_value(file).expect("model serializes")
}

pub fn model_from_json(text: &str) -> Result<MixtureModel<f64>> {
    let file: ModelFile = serde_json::from_str(text)?;
    if file.weights.len() != file.k || file.means.len() != file.k {
        return Err(Error::InvalidModel(format!(
            "k = {} but {} weights and {} means",
            file.k,
            file.weights.len(),
            file.means.len()
        )));
    }
    if let Some(row) = file.means.iter().find(|r| r.len() != file.d) {
        return Err(Error::Dimension {
            expected: file.d,
            got: row.len(),
        });
    }
    let form = match file.form {
        FormFile::Euclidean => DistanceForm::Euclidean,
        FormFile::Diagonal { signs } => DistanceForm::diagonal(signs)?,
        FormFile::Matrix { entries } => DistanceForm::matrix(Matrix::from_rows(&entries))?,
    };
    MixtureModel::new(file.weights, file.means, form)
}

pub fn write_model<T: Real>(out: &mut impl Write, m: &MixtureModel<T>) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, &model_to_json(m))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_deltas(out: &mut impl Write, values: &[f64]) -> Result<()> {
    for &v in values {
        writeln!(out, "{}", fmt17(v))?;
    }
    Ok(())
}

fn parse_real(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: {field:?} is not a number")))
}

pub fn read_deltas(input: impl BufRead) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_real(&line, n + 1)?);
    }
    Ok(out)
}

pub fn write_points<T: Real>(out: &mut impl Write, points: &[Vec<T>]) -> Result<()> {
    for p in points {
        let row: Vec<String> = p.iter().map(|x| fmt17(x.as_f64())).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes `order,value[,stderr]` rows for `values[0..]`.
pub fn write_series<T: Real>(out: &mut impl Write, values: &[T], stderr: Option<&[T]>) -> Result<()> {
    match stderr {
        Some(_) => writeln!(out, "order,value,stderr")?,
        None => writeln!(out, "order,value")?,
    }
    for (n, v) in values.iter().enumerate() {
        write!(out, "{n},{}", fmt17(v.as_f64()))?;
        if let Some(se) = stderr {
            write!(out, ",{}", fmt17(se[n].as_f64()))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a series written by [`write_series`]. Orders must run `0, 1, …`;
/// the header line is optional; standard errors must be given on every row
/// or none.
pub fn read_series(input: impl BufRead) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let mut values = Vec::new();
    let mut errs = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("order")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse(format!("line {}: expected 2 or 3 fields", n + 1)));
        }
        let order: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad order {:?}", n + 1, fields[0])))?;
        if order != values.len() {
            return Err(Error::Parse(format!(
                "line {}: order {order} where {} was expected",
                n + 1,
                values.len()
            )));
        }
        values.push(parse_real(fields[1], n + 1)?);
        if let Some(f) = fields.get(2) {
            errs.push(parse_real(f, n + 1)?);
        }
    }
    if values.is_empty() {
        return Err(Error::Parse("no rows".into()));
    }
    match errs.len() {
        0 => Ok((values, None)),
        m if m == values.len() => Ok((values, Some(errs))),
        _ => Err(Error::Parse("standard errors missing on some rows".into())),
    }
}

pub fn write_power_sums<T: Real>(out: &mut impl Write, p: &PowerSums<T>) -> Result<()> {
    write_series(out, &p.values, p.stderr.as_deref())
}

pub fn read_power_sums<T: Real>(input: impl BufRead) -> Result<PowerSums<T>> {
    let (values, stderr) = read_series(input)?;
    let lift = |v: Vec<f64>| v.into_iter().map(T::lit).collect();
    Ok(PowerSums {
        values: lift(values),
        stderr: stderr.map(lift),
    })
}

pub fn write_nodes<T: Real>(out: &mut impl Write, nodes: &NodeSet<T>) -> Result<()> {
    writeln!(out, "weight,node")?;
    for &(a, x) in &nodes.nodes {
        writeln!(out, "{},{}", fmt17(a.as_f64()), fmt17(x.as_f64()))?;
    }
    Ok(())
}

pub fn nodes_diagnostics<T: Real>(nodes: &NodeSet<T>) -> Value {
    json!({
        "singular_values": nodes.singular_values,
        "residual": nodes.residual.as_f64(),
        "scale": nodes.scale.as_f64(),
        "merged": nodes.merged,
    })
}

/// Equal-width bins over `[min, max]`; the last bin is closed.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<(f64, f64, u64)>> {
    if bins == 0 {
        return Err(Error::Domain("bin count must be positive".into()));
    }
    if values.is_empty() {
        return Err(Error::Empty { needed: 1, got: 0 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite sample".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| {
            let left = lo + width * b as f64;
            let right = if b + 1 == bins && hi > lo {
                hi
            } else {
                lo + width * (b + 1) as f64
            };
            (left, right, c)
        })
        .collect())
}

pub fn write_histogram(out: &mut impl Write, hist: &[(f64, f64, u64)]) -> Result<()> {
    writeln!(out, "bin_left,bin_right,count")?;
    for &(l, r, c) in hist {
        writeln!(out, "{},{},{c}", fmt17(l), fmt17(r))?;
    }
    Ok(())
}

pub fn report_to_json<T: Real>(r: &RecoveryReport<T>) -> Value {
    json!({
        "recovered": model_to_json(&r.recovered),
        "residuals": r.residuals,
        "diagnostics": r.diagnostics,
        "provenance": r.provenance,
    })
}
