//! JSON model files.
//!
//! ```json
//! {
//!   "L": 2, "K": 2,
//!   "G": { "1,2": { "num": ["0", "3/10"], "den": ["1"] } },
//!   "R": { "1,1": { "num": ["1"] }, "2,2": { "num": ["1"] } },
//!   "labels": { "nodes": ["a", "b"], "signals": ["ra", "rb"] }
//! }
//! ```
//!
//! Keys are one-based `"row,col"`; coefficients ascend in `q⁻¹` and may be
//! written as `"p"`, `"p/q"` or a decimal. `H` and `Lambda` default to the
//! identity. `Lambda` is a dense array of rows; its size fixes the number of
//! noise channels.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::model::{CovarianceMatrix, Labels, NetworkModel, NoiseRep};
use crate::error::{Error, Result};
use crate::ratfun::{Polynomial, RationalFunction, TransferMatrix};

#[derive(Serialize, Deserialize)]
struct EntryJson {
    num: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    den: Option<Vec<Value>>,
}

#[derive(Serialize, Deserialize)]
struct LabelsJson {
    nodes: Vec<String>,
    #[serde(default)]
    signals: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "G", default)]
    g: BTreeMap<String, EntryJson>,
    #[serde(rename = "R", default)]
    r: BTreeMap<String, EntryJson>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    h: Option<BTreeMap<String, EntryJson>>,
    #[serde(rename = "H_generalized", default, skip_serializing_if = "std::ops::Not::not")]
    h_generalized: bool,
    #[serde(rename = "Lambda", default, skip_serializing_if = "Option::is_none")]
    lambda: Option<Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<LabelsJson>,
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"-0.25"` or `"1e-3"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().unwrap_or_else(|_| BigInt::zero());
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut v = BigRational::from_integer(all);
    if scale >= 0 {
        v *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

pub fn format_rational(v: &BigRational) -> String {
    v.to_string()
}

fn value_to_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("expected a rational, found {other}"))),
    }
}

fn parse_polynomial(cs: &[Value]) -> Result<Polynomial> {
    Ok(Polynomial::new(cs.iter().map(value_to_rational).collect::<Result<_>>()?))
}

fn parse_entry(e: &EntryJson) -> Result<RationalFunction> {
    let num = parse_polynomial(&e.num)?;
    let den = match &e.den {
        Some(d) => parse_polynomial(d)?,
        None => Polynomial::one(),
    };
    RationalFunction::new(num, den).map_err(|_| Error::Parse("zero denominator polynomial".into()))
}

fn parse_key(key: &str, rows: usize, cols: usize, what: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad {what} key {key:?}: expected \"row,col\" with one-based indices"));
    let (r, c) = key.split_once(',').ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let c: usize = c.trim().parse().map_err(|_| bad())?;
    if r == 0 || c == 0 || r > rows || c > cols {
        return Err(Error::InvalidModel(format!("{what} entry {key} outside {rows}x{cols}")));
    }
    Ok((r - 1, c - 1))
}

fn parse_matrix(map: &BTreeMap<String, EntryJson>, rows: usize, cols: usize, what: &str) -> Result<TransferMatrix> {
    let mut m = TransferMatrix::zeros(rows, cols);
    for (key, entry) in map {
        let (i, j) = parse_key(key, rows, cols, what)?;
        m.set(i, j, parse_entry(entry)?);
    }
    Ok(m)
}

fn polynomial_json(p: &Polynomial) -> Vec<Value> {
    if p.is_zero() {
        return vec![Value::String("0".into())];
    }
    p.coeffs().iter().map(|c| Value::String(format_rational(c))).collect()
}

fn entry_json(f: &RationalFunction) -> EntryJson {
    EntryJson { num: polynomial_json(f.num()), den: Some(polynomial_json(f.den())) }
}

fn matrix_map(m: &TransferMatrix) -> BTreeMap<String, EntryJson> {
    m.support().into_iter().map(|(i, j)| (format!("{},{}", i + 1, j + 1), entry_json(m.get(i, j)))).collect()
}

/// Sparse one-based JSON map of a transfer matrix.
pub fn matrix_to_json(m: &TransferMatrix) -> Value {
    serde_json::to_value(matrix_map(m)).expect("serializable")
}

/// Inverse of [`matrix_to_json`] for a matrix of known shape.
pub fn matrix_from_json(v: &Value, rows: usize, cols: usize) -> Result<TransferMatrix> {
    let map: BTreeMap<String, EntryJson> =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    parse_matrix(&map, rows, cols, "matrix")
}

pub fn rational_function_to_json(f: &RationalFunction) -> Value {
    serde_json::to_value(entry_json(f)).expect("serializable")
}

pub fn model_from_json(text: &str) -> Result<NetworkModel> {
    let raw: ModelJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    model_from_raw(raw)
}

pub fn model_from_value(v: Value) -> Result<NetworkModel> {
    let raw: ModelJson = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    model_from_raw(raw)
}

fn model_from_raw(raw: ModelJson) -> Result<NetworkModel> {
    let (l, k) = (raw.l, raw.k);
    let g = parse_matrix(&raw.g, l, l, "G")?;
    let r = parse_matrix(&raw.r, l, k, "R")?;
    let lambda = match &raw.lambda {
        Some(rows) => {
            let p = rows.len();
            if rows.iter().any(|row| row.len() != p) {
                return Err(Error::InvalidModel("Lambda must be square".into()));
            }
            let entries = rows.iter().flatten().map(value_to_rational).collect::<Result<Vec<_>>>()?;
            CovarianceMatrix::new(p, entries)?
        }
        None => CovarianceMatrix::identity(l),
    };
    let p = lambda.size();
    let f = match &raw.h {
        Some(map) => parse_matrix(map, l, p, "H")?,
        None if p == l => TransferMatrix::identity(l),
        None => return Err(Error::InvalidModel("H omitted but Lambda is not L x L".into())),
    };
    let noise = NoiseRep::new(f, lambda, !raw.h_generalized).map_err(|e| Error::InvalidModel(e.to_string()))?;
    let labels = match raw.labels {
        Some(lj) => Some(Labels {
            signals: lj.signals.unwrap_or_else(|| Labels::default_for(l, k).signals),
            nodes: lj.nodes,
        }),
        None => None,
    };
    NetworkModel::new(g, r, noise, labels).map_err(|e| Error::InvalidModel(e.to_string()))
}

pub fn model_to_json(m: &NetworkModel) -> Value {
    let noise = m.noise();
    let l = m.node_count();
    let h = (!(noise.f().is_identity() && noise.f().cols() == l)).then(|| matrix_map(noise.f()));
    let lam = noise.lambda();
    let lambda = (*lam != CovarianceMatrix::identity(l)).then(|| {
        (0..lam.size())
            .map(|i| (0..lam.size()).map(|j| Value::String(format_rational(lam.get(i, j)))).collect())
            .collect()
    });
    let raw = ModelJson {
        l,
        k: m.input_count(),
        g: matrix_map(m.g()),
        r: matrix_map(m.r()),
        h,
        h_generalized: !noise.is_monic(),
        lambda,
        labels: Some(LabelsJson { nodes: m.labels().nodes.clone(), signals: Some(m.labels().signals.clone()) }),
    };
    serde_json::to_value(raw).expect("serializable")
}

pub fn read_model(path: &Path) -> Result<NetworkModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    model_from_json(&text)
}
