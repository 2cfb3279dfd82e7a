//! JSON form of spaces: either an explicit distance table
//! `{"points": [ids], "dist": {"i,j": "p/q" | "inf"}}` keyed by point
//! positions `i < j`, or a generated ball `{"generator": spec, "radius": r}`.

use serde_json::{json, Map, Value};

use super::{fmt_q, parse_q, Dist, FiniteMetricSpace, SpaceOrigin, Q};
use crate::error::{Error, Result};
use crate::groups::{ball, GroupSpec};

pub fn space_to_json(space: &FiniteMetricSpace) -> Value {
    match space.origin() {
        SpaceOrigin::Group { spec, radius } => json!({
            "generator": serde_json::to_value(spec).expect("spec serializes"),
            "radius": fmt_q(radius),
        }),
        SpaceOrigin::Explicit => space_to_explicit_json(space),
    }
}

pub fn space_to_explicit_json(space: &FiniteMetricSpace) -> Value {
    let n = space.len();
    let mut dist = Map::new();
    for i in 0..n {
        for j in i + 1..n {
            dist.insert(format!("{i},{j}"), Value::String(space.dist(i, j).to_json_string()));
        }
    }
    json!({ "points": space.ids(), "dist": dist })
}

fn rational_field(v: &Value, what: &str) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Q::from_integer(i)),
            None => parse_q(&n.to_string()),
        },
        _ => Err(Error::Parse(format!("{what} must be a rational"))),
    }
}

pub fn space_from_json(v: &Value) -> Result<FiniteMetricSpace> {
    if let Some(spec) = v.get("generator") {
        let spec: GroupSpec =
            serde_json::from_value(spec.clone()).map_err(|e| Error::Parse(format!("bad group spec: {e}")))?;
        let radius = rational_field(v.get("radius").ok_or_else(|| Error::Parse("missing radius".into()))?, "radius")?;
        return ball(&spec, &radius);
    }
    let points = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("space needs \"points\" or \"generator\"".into()))?;
    let ids: Vec<String> = points
        .iter()
        .map(|p| match p {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(Error::Parse("point ids must be strings or numbers".into())),
        })
        .collect::<Result<_>>()?;
    let n = ids.len();
    let table = v.get("dist").and_then(Value::as_object).ok_or_else(|| Error::Parse("missing \"dist\"".into()))?;
    let mut d = vec![vec![Dist::ZERO; n]; n];
    let mut seen = vec![vec![false; n]; n];
    for (key, val) in table {
        let (i, j) = key
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| Error::Parse(format!("bad distance key {key:?}")))?;
        if i >= n || j >= n || i == j {
            return Err(Error::Parse(format!("distance key {key:?} out of range")));
        }
        let x = match val {
            Value::String(s) => Dist::parse(s)?,
            other => Dist::Finite(rational_field(other, "distance")?),
        };
        let (a, b) = (i.min(j), i.max(j));
        if seen[a][b] && d[a][b] != x {
            return Err(Error::InvalidMetric(format!("conflicting entries for {a},{b}")));
        }
        seen[a][b] = true;
        d[a][b] = x;
        d[b][a] = x;
    }
    for (i, row) in seen.iter().enumerate() {
        if let Some(j) = (i + 1..n).find(|&j| !row[j]) {
            return Err(Error::Parse(format!("missing distance for pair {i},{j}")));
        }
    }
    FiniteMetricSpace::from_matrix(ids, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_round_trip() {
        let s = FiniteMetricSpace::integer_interval(0, 4);
        let v = space_to_json(&s);
        let back = space_from_json(&v).unwrap();
        assert_eq!(space_to_json(&back), v);
        assert_eq!(back.dist(0, 4), Dist::int(4));
    }

    #[test]
    fn generated_round_trip() {
        let v: Value = serde_json::from_str(r#"{"generator":{"type":"free_abelian","n":2},"radius":2}"#).unwrap();
        let s = space_from_json(&v).unwrap();
        assert_eq!(s.len(), 13);
        let w = space_to_json(&s);
        assert_eq!(space_to_json(&space_from_json(&w).unwrap()), w);
    }

    #[test]
    fn malformed_tables() {
        let v: Value = serde_json::from_str(r#"{"points":["a","b","c"],"dist":{"0,1":"1/1"}}"#).unwrap();
        assert!(space_from_json(&v).is_err());
        let v: Value = serde_json::from_str(r#"{"points":["a","b"],"dist":{"0,1":"-1"}}"#).unwrap();
        assert!(space_from_json(&v).is_err());
    }
}
