use std::path::Path;
use std::sync::Arc;

use coarse_decomp::metric::io::space_from_json;
use coarse_decomp::metric::{parse_q, FiniteMetricSpace, PointSet, Q};
use coarse_decomp::norms::{AnyMatrix, BaseField};
use coarse_decomp::rips::corpus::builtin_space;
use coarse_decomp::{Error, Result};
use serde_json::Value;

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// A builtin name such as `grid5`, or a space file.
pub fn load_space(name: &str) -> Result<Arc<FiniteMetricSpace>> {
    if let Some(s) = builtin_space(name) {
        return Ok(Arc::new(s));
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::BadParams(format!("{name:?} is neither a builtin space nor a file")));
    }
    Ok(Arc::new(space_from_json(&read_json(path)?)?))
}

pub fn rational(s: &str) -> Result<Q> {
    parse_q(s.trim())
}

pub fn rational_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(rational).collect()
}

/// Point ids as a JSON list, or whitespace/semicolon separated tokens where
/// `a..b` expands to the integer ids `a..=b`.
pub fn point_set(space: &FiniteMetricSpace, s: &str) -> Result<PointSet> {
    let names: Vec<String> = if s.trim_start().starts_with('[') {
        let v: Vec<Value> = serde_json::from_str(s)?;
        v.into_iter()
            .map(|x| match x {
                Value::String(t) => t,
                other => other.to_string(),
            })
            .collect()
    } else {
        let mut out = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ';').filter(|t| !t.is_empty()) {
            let range = tok.split_once("..").and_then(|(a, b)| Some((a.parse::<i64>().ok()?, b.parse::<i64>().ok()?)));
            match range {
                Some((a, b)) => out.extend((a..=b).map(|i| i.to_string())),
                None => out.push(tok.to_string()),
            }
        }
        out
    };
    names
        .iter()
        .map(|n| space.index_of(n).ok_or_else(|| Error::BadParams(format!("unknown point {n:?}"))))
        .collect()
}

/// `wreath:n=1,p=X^2`, or rows separated by `;` with entries separated by `,`.
pub fn matrix(field: BaseField, s: &str) -> Result<AnyMatrix> {
    if let Some(rest) = s.strip_prefix("wreath:") {
        let mut n = None;
        let mut p = None;
        for kv in rest.split(',') {
            match kv.split_once('=') {
                Some(("n", v)) => n = Some(v.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad n in {s:?}")))?),
                Some(("p", v)) => p = Some(v.trim().to_string()),
                _ => return Err(Error::Parse(format!("bad wreath parameter {kv:?}"))),
            }
        }
        let (Some(n), Some(p)) = (n, p) else {
            return Err(Error::Parse("wreath needs n and p".into()));
        };
        return AnyMatrix::wreath(field, n, &p);
    }
    let rows: Vec<Vec<String>> = s.split(';').map(|r| r.split(',').map(|e| e.trim().to_string()).collect()).collect();
    AnyMatrix::parse(field, &rows)
}
