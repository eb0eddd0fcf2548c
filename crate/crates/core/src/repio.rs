//! JSON and plain-text exchange formats for triples of matrices.
//!
//! JSON: `{"n": .., "params": {"alpha": .., "beta": .., "gamma": ..}, "J1": [[..]], "J2": .., "J3": ..}`
//! with row-major nested arrays. Plain text: one matrix row per line, whitespace-separated,
//! matrices separated by blank lines, `#` starts a comment line.

use std::path::Path;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hcore::AlgebraParams;
use crate::reps::MatRep;
use crate::scalar::parse_real;

pub fn matrix_to_json(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| Value::from(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<DMatrix<f64>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("a matrix must be an array of rows".into()))?;
    let parsed: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("a matrix row must be an array".into()))?
                .iter()
                .map(|x| match x {
                    Value::Number(n) => n
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("{n} is not a real number"))),
                    Value::String(s) => parse_real(s),
                    other => Err(Error::Parse(format!("{other} is not a number"))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    from_rows(parsed)
}

fn from_rows(rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn rep_to_json(rep: &MatRep) -> Value {
    let p = rep.params();
    let [j1, j2, j3] = rep.gens();
    json!({
        "n": rep.n(),
        "params": {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma},
        "J1": matrix_to_json(j1),
        "J2": matrix_to_json(j2),
        "J3": matrix_to_json(j3),
    })
}

/// Reads a representation; `params` may be omitted, in which case it is read off traces.
pub fn rep_from_json(v: &Value) -> Result<MatRep> {
    let get = |key: &str| {
        v.get(key)
            .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
            .and_then(matrix_from_json)
    };
    let gens = [get("J1")?, get("J2")?, get("J3")?];
    let rep = match v.get("params") {
        None | Some(Value::Null) => MatRep::from_generators(gens)?,
        Some(p) => {
            let num = |key: &str| -> Result<f64> {
                match p.get(key) {
                    Some(Value::Number(n)) => n
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("params.{key} is not a real number"))),
                    Some(Value::String(s)) => parse_real(s),
                    _ => Err(Error::Parse(format!("missing params.{key}"))),
                }
            };
            MatRep::new(AlgebraParams::new(num("alpha")?, num("beta")?, num("gamma")?), gens)?
        }
    };
    if let Some(n) = v.get("n") {
        let n = n
            .as_u64()
            .ok_or_else(|| Error::Parse("`n` must be a positive integer".into()))?;
        if n as usize != rep.n() {
            return Err(Error::Invalid(format!(
                "`n` = {n} does not match {}x{} matrices",
                rep.dim(),
                rep.dim()
            )));
        }
    }
    Ok(rep)
}

/// Plain-text form; floats use 17 significant digits.
pub fn matrices_to_text(mats: &[&DMatrix<f64>], header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for (idx, m) in mats.iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn matrices_from_text(text: &str) -> Result<Vec<DMatrix<f64>>> {
    let mut mats = Vec::new();
    let mut current: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            if !current.is_empty() {
                mats.push(from_rows(std::mem::take(&mut current))?);
            }
            continue;
        }
        let row = trimmed
            .split_whitespace()
            .map(parse_real)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        current.push(row);
    }
    if !current.is_empty() {
        mats.push(from_rows(current)?);
    }
    Ok(mats)
}

pub fn rep_to_text(rep: &MatRep) -> String {
    let p = rep.params();
    let [j1, j2, j3] = rep.gens();
    matrices_to_text(
        &[j1, j2, j3],
        &format!("n = {}\nalpha = {:?}, beta = {:?}, gamma = {:?}", rep.n(), p.alpha, p.beta, p.gamma),
    )
}

pub fn rep_from_text(text: &str) -> Result<MatRep> {
    let mats = matrices_from_text(text)?;
    let gens: [DMatrix<f64>; 3] = mats
        .try_into()
        .map_err(|v: Vec<_>| Error::Parse(format!("expected 3 matrices, found {}", v.len())))?;
    MatRep::from_generators(gens)
}

/// Reads either format, choosing JSON when the content starts with `{`.
pub fn read_rep(path: &Path) -> Result<MatRep> {
    let text = std::fs::read_to_string(path)?;
    parse_rep(&text)
}

pub fn parse_rep(text: &str) -> Result<MatRep> {
    if text.trim_start().starts_with('{') {
        rep_from_json(&serde_json::from_str(text)?)
    } else {
        rep_from_text(text)
    }
}
