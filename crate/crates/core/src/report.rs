//! Machine-readable reports. Every rational is written as a `"p/q"` (or
//! integer) string so that reports round-trip exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::dga::{CohomologyResult, Dga, LowerGrading};
use crate::derivation::{ChainDerivation, Derivation, RigidityReport};
use crate::fd::FdAlgebra;
use crate::linalg::SparseVec;
use crate::taylor::{Peel, TorusBasis};
use crate::{Error, Result, Q};

pub const SCHEMA: u32 = 1;

/// Envelope shared by every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub results: Value,
}

impl Report {
    pub fn new(command: Vec<String>, inputs: &str, results: Value) -> Self {
        Self {
            schema: SCHEMA,
            command,
            inputs_digest: digest(inputs),
            results,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("malformed report: {e}")))?;
        if r.schema != SCHEMA {
            return Err(Error::InvalidArgument(format!("unsupported schema {}", r.schema)));
        }
        Ok(r)
    }
}

/// `sha256:` followed by the hex digest of `text`.
pub fn digest(text: &str) -> String {
    let h = Sha256::digest(text.as_bytes());
    let hex: String = h.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn q_str(q: &Q) -> String {
    q.to_string()
}

pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::InvalidArgument(format!("`{s}` is not a rational"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Q::new(p, q))
}

/// `{basis name: "p/q"}` for the nonzero coordinates.
pub fn vector_json(h: &FdAlgebra, v: &SparseVec) -> Value {
    let mut m = Map::new();
    for (i, c) in v.iter() {
        m.insert(h.name(i).to_string(), Value::String(q_str(c)));
    }
    Value::Object(m)
}

pub fn vector_from_json(h: &FdAlgebra, v: &Value) -> Result<SparseVec> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidArgument("vector must be an object".into()))?;
    let mut entries = Vec::new();
    for (name, c) in obj {
        let i = h.index_of(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
        let c = c
            .as_str()
            .ok_or_else(|| Error::InvalidArgument("coefficients must be strings".into()))?;
        entries.push((i, parse_q(c)?));
    }
    Ok(SparseVec::from_entries(entries))
}

pub fn derivation_json(d: &Derivation) -> Value {
    let h = d.ambient();
    let mut images = Map::new();
    for (i, v) in d.images().iter().enumerate() {
        if !v.is_zero() {
            images.insert(h.name(i).to_string(), vector_json(h, v));
        }
    }
    json!({ "degree": d.degree(), "images": images })
}

/// Reads a derivation back and validates it against `h`.
pub fn derivation_from_json(h: &FdAlgebra, v: &Value) -> Result<Derivation> {
    let degree = v
        .get("degree")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::InvalidArgument("derivation needs an integer degree".into()))?;
    let mut images = vec![SparseVec::new(); h.dim()];
    if let Some(obj) = v.get("images").and_then(Value::as_object) {
        for (name, img) in obj {
            let i = h.index_of(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            images[i] = vector_from_json(h, img)?;
        }
    }
    Derivation::new(h.clone(), degree, images)
}

pub fn generators_json(m: &Dga) -> Value {
    Value::Array(
        m.generators()
            .iter()
            .zip(m.d_values())
            .map(|(g, d)| json!({ "name": g.name, "degree": g.degree, "d": d.to_string() }))
            .collect(),
    )
}

pub fn cohomology_json(res: &CohomologyResult) -> Value {
    let mut reps = Map::new();
    for n in res.nonzero_degrees() {
        reps.insert(
            n.to_string(),
            Value::Array(
                res.representatives(n)
                    .iter()
                    .map(|z| Value::String(z.to_string()))
                    .collect(),
            ),
        );
    }
    json!({
        "max_degree": res.max_degree(),
        "betti": res.betti_vector(),
        "nonzero": res.nonzero_degrees(),
        "representatives": reps,
        "generators": generators_json(res.dga()),
    })
}

pub fn ring_json(h: &FdAlgebra) -> Value {
    let basis: Vec<Value> = (0..h.dim())
        .map(|i| json!({ "name": h.name(i), "degree": h.degree(i) }))
        .collect();
    let products: Vec<Value> = h
        .nonzero_products()
        .into_iter()
        .map(|(i, j, v)| json!({ "left": h.name(i), "right": h.name(j), "value": vector_json(h, &v) }))
        .collect();
    json!({ "basis": basis, "products": products, "betti": h.betti(), "top": h.top_degree() })
}

pub fn derivation_space_json(spaces: &BTreeMap<i64, Vec<Derivation>>) -> Value {
    let dims: Map<String, Value> = spaces
        .iter()
        .map(|(n, s)| (n.to_string(), json!(s.len())))
        .collect();
    let bases: Map<String, Value> = spaces
        .iter()
        .map(|(n, s)| (n.to_string(), Value::Array(s.iter().map(derivation_json).collect())))
        .collect();
    json!({ "dims": dims, "derivations": bases })
}

pub fn chain_derivation_json(d: &ChainDerivation) -> Value {
    let mut images = Map::new();
    for (g, v) in d.dga().generators().iter().zip(d.images()) {
        if !v.is_zero() {
            images.insert(g.name.clone(), Value::String(v.to_string()));
        }
    }
    json!({ "degree": d.degree(), "images": images })
}

pub fn rigidity_json(h: &FdAlgebra, r: &RigidityReport) -> Value {
    let dims: Map<String, Value> = r.dims.iter().map(|(n, d)| (n.to_string(), json!(d))).collect();
    let witnesses: Vec<Value> = r
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "derivation": derivation_json(&w.derivation),
                "element": vector_json(h, &w.element),
                "image": vector_json(h, &w.image),
            })
        })
        .collect();
    json!({
        "verdict": r.verdict.as_str(),
        "mode": r.mode.as_str(),
        "degrees": [r.degrees.0, r.degrees.1],
        "dims": dims,
        "target_dim": r.target.dim(),
        "target": r.target.basis().iter().map(|v| vector_json(h, v)).collect::<Vec<_>>(),
        "witnesses": witnesses,
        "note": r.note,
    })
}

pub fn lower_grading_json(g: &LowerGrading) -> Value {
    let dims: Vec<Value> = g
        .dims
        .iter()
        .map(|((n, k), d)| json!({ "degree": n, "wordlength": k, "dim": d }))
        .collect();
    json!({ "max_degree": g.max_degree, "dims": dims, "max_wordlength": g.max_wordlength() })
}

pub fn peel_json(base: &FdAlgebra, torus: &TorusBasis, p: &Peel) -> Value {
    let steps: Vec<Value> = p
        .steps
        .iter()
        .map(|(i, d)| json!({ "index": i, "monomial": torus.name(*i), "derivation": derivation_json(d) }))
        .collect();
    let normalization = p.normalization.as_ref().map(|cols| {
        let m: Map<String, Value> = cols
            .iter()
            .enumerate()
            .map(|(i, v)| (base.name(i).to_string(), vector_json(base, v)))
            .collect();
        Value::Object(m)
    });
    json!({ "steps": steps, "normalization": normalization })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::derivation_space;
    use crate::fd::exterior;

    #[test]
    fn rationals_round_trip() {
        for s in ["0", "-3", "7/2", "-1/3"] {
            assert_eq!(q_str(&parse_q(s).unwrap()), s);
        }
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn derivation_round_trip() {
        let h = exterior(&[3, 5]);
        let d = derivation_space(&h, -2).remove(0).scaled(&parse_q("-5/7").unwrap());
        let v = derivation_json(&d);
        let text = serde_json::to_string(&v).unwrap();
        let back = derivation_from_json(&h, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn envelope() {
        let r = Report::new(vec!["ring".into()], "x", json!({ "betti": [1] }));
        assert_eq!(r.schema, 1);
        assert!(r.inputs_digest.starts_with("sha256:"));
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}
