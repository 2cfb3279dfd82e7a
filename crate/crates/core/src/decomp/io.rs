//! Certificate JSON:
//! `{"ambient": space, "initial"?: [[ids]], "steps": [{"r": "p/q", "members":
//! [{"part0": [[ids]], "part1": [[ids]]}]}], "bound": "p/q"}`.
//! Without `initial` the game starts from the whole ambient space.

use std::sync::Arc;

use serde_json::{json, Value};

use super::certificate::{DecompositionCertificate, MemberStep, Step};
use crate::error::{Error, Result};
use crate::metric::io::{space_from_json, space_to_json};
use crate::metric::{fmt_q, parse_q, FiniteMetricSpace, PointSet};

fn sets_to_json(space: &FiniteMetricSpace, sets: &[PointSet]) -> Value {
    Value::Array(sets.iter().map(|s| json!(s.iter().map(|&p| space.id(p)).collect::<Vec<_>>())).collect())
}

pub fn certificate_to_json(cert: &DecompositionCertificate) -> Value {
    let amb = &cert.ambient;
    let steps: Vec<Value> = cert
        .steps
        .iter()
        .map(|s| {
            let members: Vec<Value> = s
                .members
                .iter()
                .map(|m| json!({"part0": sets_to_json(amb, &m.part0), "part1": sets_to_json(amb, &m.part1)}))
                .collect();
            json!({"r": fmt_q(&s.r), "members": members})
        })
        .collect();
    let mut out = json!({"ambient": space_to_json(amb), "steps": steps, "bound": fmt_q(&cert.bound)});
    if cert.initial != vec![amb.all_points()] {
        out["initial"] = sets_to_json(amb, &cert.initial);
    }
    out
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCertificate(msg.into())
}

fn id_of(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn sets_from_json(space: &FiniteMetricSpace, v: &Value, what: &str) -> Result<Vec<PointSet>> {
    let arr = v.as_array().ok_or_else(|| malformed(format!("{what} must be a list of point lists")))?;
    arr.iter()
        .map(|s| {
            let pts = s.as_array().ok_or_else(|| malformed(format!("{what} pieces must be lists")))?;
            pts.iter()
                .map(|p| {
                    let id = id_of(p).ok_or_else(|| malformed(format!("bad point id in {what}")))?;
                    space.index_of(&id).ok_or_else(|| malformed(format!("{what} references unknown point {id:?}")))
                })
                .collect::<Result<PointSet>>()
        })
        .collect()
}

pub fn certificate_from_json(v: &Value) -> Result<DecompositionCertificate> {
    let amb = v.get("ambient").ok_or_else(|| malformed("missing \"ambient\""))?;
    let ambient = Arc::new(space_from_json(amb).map_err(|e| malformed(format!("ambient: {e}")))?);
    let initial = match v.get("initial") {
        Some(i) => sets_from_json(&ambient, i, "initial")?,
        None => vec![ambient.all_points()],
    };
    let rat = |x: &Value, what: &str| -> Result<_> {
        let s = match x {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(malformed(format!("{what} must be a rational"))),
        };
        parse_q(&s).map_err(|e| malformed(format!("{what}: {e}")))
    };
    let steps = v
        .get("steps")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"steps\" list"))?
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = rat(s.get("r").ok_or_else(|| malformed(format!("step {i} has no \"r\"")))?, "r")?;
            let members = s
                .get("members")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed(format!("step {i} has no \"members\"")))?
                .iter()
                .map(|m| {
                    let part = |k: &str| match m.get(k) {
                        Some(p) => sets_from_json(&ambient, p, k),
                        None => Ok(vec![]),
                    };
                    Ok(MemberStep { part0: part("part0")?, part1: part("part1")? })
                })
                .collect::<Result<_>>()?;
            Ok(Step { r, members })
        })
        .collect::<Result<_>>()?;
    let bound = rat(v.get("bound").ok_or_else(|| malformed("missing \"bound\""))?, "bound")?;
    Ok(DecompositionCertificate { ambient, initial, steps, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{play_game, verify_certificate, Strategy};
    use crate::groups::{ball, GroupSpec};
    use crate::metric::{q, MetricFamily};

    #[test]
    fn round_trip_generated_certificate() {
        let spec = GroupSpec::zn(2);
        let b = Arc::new(ball(&spec, &q(4)).unwrap());
        let c = play_game(&MetricFamily::single(b), &Strategy::default_for(&spec), &[q(2), q(3)]).unwrap();
        let v = certificate_to_json(&c);
        let back = certificate_from_json(&v).unwrap();
        assert_eq!(certificate_to_json(&back), v);
        assert!(verify_certificate(&back).unwrap().valid);
    }

    #[test]
    fn unknown_points_are_malformed() {
        let v: Value = serde_json::from_str(
            r#"{"ambient":{"points":["0","1"],"dist":{"0,1":"1"}},
                "steps":[{"r":"1","members":[{"part0":[["0","7"]],"part1":[]}]}],"bound":"0"}"#,
        )
        .unwrap();
        assert!(matches!(certificate_from_json(&v), Err(Error::MalformedCertificate(_))));
    }
}
