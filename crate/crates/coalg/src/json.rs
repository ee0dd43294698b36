//! The JSON instance schema:
//! `{"ring": …, "bialgebra": {"family": …, "truncation": D},
//!   "elements": {"name": [{"basis": "x^2", "coeff": "3/4"}, …]}}`.
//! Scalars use the textual scalar grammar; basis indices use the
//! per-family basis grammar.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::bialgebra::{BialgebraDescriptor, Element, FiniteAlgebra, FiniteMonoid, MonoidKind, TensorK};
use crate::monoid::TraceMonoid;
use crate::scalar::{RingSpec, Scalar};
use crate::{CoalgError, Result};

fn parse_err(msg: impl Into<String>) -> CoalgError {
    CoalgError::Parse(msg.into())
}

fn get<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field '{key}'")))
}

fn get_str<'v>(v: &'v Value, key: &str) -> Result<&'v str> {
    get(v, key)?.as_str().ok_or_else(|| parse_err(format!("field '{key}' must be a string")))
}

fn get_u64(v: &Value, key: &str) -> Result<u64> {
    get(v, key)?.as_u64().ok_or_else(|| parse_err(format!("field '{key}' must be a positive integer")))
}

pub fn parse_ring(v: &Value) -> Result<RingSpec> {
    let kind = get_str(v, "kind")?;
    match kind {
        "Integers" => Ok(RingSpec::Integers),
        "Rationals" => Ok(RingSpec::Rationals),
        "Modular" => RingSpec::modular(get_u64(v, "n")?),
        "Poly" => {
            let base = parse_ring(get(v, "base")?)?;
            let vars: Vec<String> = get(v, "vars")?
                .as_array()
                .ok_or_else(|| parse_err("'vars' must be a list"))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| parse_err("variable names must be strings")))
                .collect::<Result<_>>()?;
            let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
            RingSpec::poly(base, &refs)
        }
        "MonomialQuotient" => {
            let base = parse_ring(get(v, "base")?)?;
            let var = get_str(v, "var")?;
            let power = get_u64(v, "power")? as u32;
            RingSpec::monomial_quotient(base, var, power)
        }
        other => Err(parse_err(format!("unknown ring kind '{other}'"))),
    }
}

pub fn ring_to_json(r: &RingSpec) -> Value {
    match r {
        RingSpec::Integers => json!({"kind": "Integers"}),
        RingSpec::Rationals => json!({"kind": "Rationals"}),
        RingSpec::Modular(n) => json!({"kind": "Modular", "n": n}),
        RingSpec::Poly { base, vars } => json!({"kind": "Poly", "base": ring_to_json(base), "vars": vars}),
        RingSpec::MonomialQuotient { base, var, power } => {
            json!({"kind": "MonomialQuotient", "base": ring_to_json(base), "var": var, "power": power})
        }
    }
}

fn parse_monoid(v: &Value) -> Result<MonoidKind> {
    let kind = get_str(v, "kind")?;
    let alphabet = |v: &Value| -> Result<Vec<String>> {
        get(v, "alphabet")?
            .as_array()
            .ok_or_else(|| parse_err("'alphabet' must be a list"))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| parse_err("letters must be strings")))
            .collect()
    };
    match kind {
        "Free" => {
            let letters = alphabet(v)?;
            let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
            Ok(MonoidKind::Trace(Arc::new(TraceMonoid::free(&refs)?)))
        }
        "FreeAbelian" => {
            let letters = alphabet(v)?;
            let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
            Ok(MonoidKind::Trace(Arc::new(TraceMonoid::free_abelian(&refs)?)))
        }
        "Trace" => {
            let letters = alphabet(v)?;
            let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
            let mut edges: Vec<(String, String)> = Vec::new();
            if let Some(arr) = v.get("edges").and_then(Value::as_array) {
                for e in arr {
                    let pair = e.as_array().filter(|p| p.len() == 2).ok_or_else(|| parse_err("edges are pairs"))?;
                    edges.push((
                        pair[0].as_str().ok_or_else(|| parse_err("edge letters must be strings"))?.to_string(),
                        pair[1].as_str().ok_or_else(|| parse_err("edge letters must be strings"))?.to_string(),
                    ));
                }
            }
            let edge_refs: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            Ok(MonoidKind::Trace(Arc::new(TraceMonoid::new(&refs, &edge_refs)?)))
        }
        "Cyclic" => Ok(MonoidKind::Finite(Arc::new(FiniteMonoid::cyclic(get_u64(v, "n")? as usize)))),
        "TruncatedChain" => Ok(MonoidKind::Finite(Arc::new(FiniteMonoid::truncated_chain(
            get_u64(v, "n")? as usize,
        )))),
        "GroupZ" => {
            let symbol = v.get("symbol").and_then(Value::as_str).unwrap_or("g").to_string();
            Ok(MonoidKind::GroupZ { symbol })
        }
        other => Err(parse_err(format!("unknown monoid kind '{other}'"))),
    }
}

fn parse_family(ring: &Arc<RingSpec>, v: &Value) -> Result<Arc<BialgebraDescriptor>> {
    let family = get_str(v, "family")?;
    let truncation = v.get("truncation").and_then(Value::as_i64);
    let need_trunc = || {
        truncation.ok_or_else(|| parse_err(format!("family '{family}' needs a 'truncation' degree")))
    };
    match family {
        "PolynomialPrimitive" => BialgebraDescriptor::polynomial_primitive(ring, need_trunc()?),
        "InfiltrationQ" => {
            let q = Scalar::parse(ring, get_str(v, "q")?)?;
            BialgebraDescriptor::infiltration(ring, q, need_trunc()?)
        }
        "FrobeniusQuotient" => {
            let p = get_u64(v, "p")? as u32;
            let q = Scalar::parse(ring, get_str(v, "q")?)?;
            BialgebraDescriptor::frobenius_quotient(ring, p, q)
        }
        "GxQuotient" => BialgebraDescriptor::gx_quotient(ring, need_trunc()?),
        "MonoidDiag" => {
            let kind = parse_monoid(get(v, "monoid")?)?;
            BialgebraDescriptor::monoid_diag(ring, kind, truncation)
        }
        "TensorConc" => {
            let letters: Vec<String> = get(v, "alphabet")?
                .as_array()
                .ok_or_else(|| parse_err("'alphabet' must be a list"))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| parse_err("letters must be strings")))
                .collect::<Result<_>>()?;
            let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
            BialgebraDescriptor::tensor_conc(ring, &refs, need_trunc()?)
        }
        "TensorProduct" => {
            let left = parse_family(ring, get(v, "left")?)?;
            let right = parse_family(ring, get(v, "right")?)?;
            BialgebraDescriptor::tensor_product(&left, &right)
        }
        "FiniteDual" => {
            let a = get(v, "algebra")?;
            let names: Vec<String> = get(a, "names")?
                .as_array()
                .ok_or_else(|| parse_err("'names' must be a list"))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| parse_err("names must be strings")))
                .collect::<Result<_>>()?;
            let n = names.len();
            let table_json = get(a, "table")?.as_array().ok_or_else(|| parse_err("'table' must be a list"))?;
            let mut table = Vec::with_capacity(n);
            for row in table_json {
                let row = row.as_array().ok_or_else(|| parse_err("table rows must be lists"))?;
                let mut out_row = Vec::with_capacity(n);
                for cell in row {
                    let cell = cell.as_array().ok_or_else(|| parse_err("table cells must be lists"))?;
                    let coords: Vec<Scalar> = cell
                        .iter()
                        .map(|s| {
                            s.as_str()
                                .ok_or_else(|| parse_err("table entries must be scalar strings"))
                                .and_then(|t| Scalar::parse(ring, t))
                        })
                        .collect::<Result<_>>()?;
                    out_row.push(coords);
                }
                table.push(out_row);
            }
            let unit: Vec<Scalar> = get(a, "unit")?
                .as_array()
                .ok_or_else(|| parse_err("'unit' must be a list"))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .ok_or_else(|| parse_err("unit entries must be scalar strings"))
                        .and_then(|t| Scalar::parse(ring, t))
                })
                .collect::<Result<_>>()?;
            let algebra = FiniteAlgebra::new(ring.clone(), names, table, unit)?;
            Ok(BialgebraDescriptor::finite_dual(algebra))
        }
        other => Err(parse_err(format!("unknown family '{other}'"))),
    }
}

/// A parsed instance file: a bialgebra plus named elements.
#[derive(Debug, Clone)]
pub struct Instance {
    pub descriptor: Arc<BialgebraDescriptor>,
    pub elements: BTreeMap<String, Element>,
}

pub fn parse_instance(v: &Value) -> Result<Instance> {
    let ring = Arc::new(parse_ring(get(v, "ring")?)?);
    let descriptor = parse_family(&ring, get(v, "bialgebra")?)?;
    let mut elements = BTreeMap::new();
    if let Some(map) = v.get("elements").and_then(Value::as_object) {
        for (name, terms) in map {
            elements.insert(name.clone(), parse_element(&descriptor, terms)?);
        }
    }
    Ok(Instance { descriptor, elements })
}

pub fn parse_element(descriptor: &Arc<BialgebraDescriptor>, v: &Value) -> Result<Element> {
    let terms = v.as_array().ok_or_else(|| parse_err("element must be a list of terms"))?;
    let mut out = Element::zero(descriptor);
    for term in terms {
        let basis = descriptor.parse_basis(get_str(term, "basis")?)?;
        let coeff = Scalar::parse(descriptor.ring(), get_str(term, "coeff")?)?;
        out.add_term(basis, coeff)?;
    }
    Ok(out)
}

pub fn element_to_json(e: &Element) -> Value {
    let terms: Vec<Value> = e
        .terms()
        .iter()
        .map(|(idx, c)| {
            json!({
                "basis": e.descriptor().basis_string(idx),
                "coeff": c.to_string(),
            })
        })
        .collect();
    Value::Array(terms)
}

pub fn tensor_to_json(t: &TensorK) -> Value {
    let terms: Vec<Value> = t
        .terms()
        .iter()
        .map(|(key, c)| {
            let legs: Vec<Value> = key
                .iter()
                .map(|idx| Value::String(t.descriptor().basis_string(idx)))
                .collect();
            json!({"basis": legs, "coeff": c.to_string()})
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("arity".into(), json!(t.arity()));
    obj.insert("terms".into(), Value::Array(terms));
    Value::Object(obj)
}

/// Serialize a linear map rule as `{"on": {"x^0": …, "x^1": …}}`,
/// element values as term lists and scalar values as grammar strings.
pub fn rule_to_json(rule: &crate::convolution::LinearMapRule) -> Value {
    let mut on = Map::new();
    for (idx, value) in rule.rule() {
        let key = rule.source().basis_string(idx);
        let v = match value {
            crate::convolution::MapValue::Element(e) => element_to_json(e),
            crate::convolution::MapValue::Scalar(s) => Value::String(s.to_string()),
        };
        on.insert(key, v);
    }
    json!({"on": Value::Object(on)})
}

/// Serialize a power-sum verifier report:
/// `{hypothesis: {holds, mode}, conclusion: {holds, witnesses}}`.
pub fn power_sum_report_to_json(r: &crate::independence::PowerSumReport) -> Value {
    json!({
        "hypothesis": {
            "holds": r.hypothesis_holds,
            "mode": match r.hypothesis_mode {
                crate::independence::HypothesisMode::Certified => "Certified",
                crate::independence::HypothesisMode::HorizonOnly => "HorizonOnly",
            },
            "failure_k": r.hypothesis_failure_k,
        },
        "conclusion": {
            "holds": r.conclusion_holds,
            "witnesses": r.conclusion_failures,
        },
    })
}

/// Serialize a symmetric-algebra independence report.
pub fn sym_report_to_json(r: &crate::independence::SymIndependenceReport) -> Value {
    json!({
        "conclusion": {
            "holds": r.conclusion_holds,
            "witnesses": r.nonzero_products,
        },
    })
}

fn regularity_to_json(r: &crate::independence::ElementRegularity) -> Value {
    match r {
        crate::independence::ElementRegularity::Regular => json!({"verdict": "Regular"}),
        crate::independence::ElementRegularity::ZeroDivisor(w) => {
            json!({"verdict": "ZeroDivisor", "witness": element_to_json(w)})
        }
        crate::independence::ElementRegularity::Unknown => json!({"verdict": "Unknown"}),
    }
}

/// Serialize an id-unipotent independence report with the assumption
/// oracle results.
pub fn independence_report_to_json(r: &crate::independence::IndependenceReport) -> Value {
    let assumptions: Vec<Value> = r
        .grouplike_regularity
        .iter()
        .enumerate()
        .map(|(i, reg)| json!({"element": format!("g{}", i + 1), "regularity": regularity_to_json(reg)}))
        .chain(r.difference_regularity.iter().map(|((i, j), reg)| {
            json!({
                "element": format!("g{} - g{}", i + 1, j + 1),
                "regularity": regularity_to_json(reg),
            })
        }))
        .collect();
    let bounds: Vec<Value> = r
        .bounds
        .iter()
        .map(|b| match b {
            crate::convolution::UnipotenceBound::Bound { m, mode } => json!({
                "bound": m,
                "mode": match mode {
                    crate::convolution::BoundMode::Certified => "Certified",
                    crate::convolution::BoundMode::HorizonOnly => "HorizonOnly",
                },
            }),
            crate::convolution::UnipotenceBound::NotIdUnipotentWithinHorizon => {
                json!({"bound": Value::Null, "mode": "NotIdUnipotentWithinHorizon"})
            }
        })
        .collect();
    json!({
        "assumptions": assumptions,
        "bounds": bounds,
        "hypothesis": {"holds": r.sum_is_zero, "mode": "Exact"},
        "conclusion": {
            "holds": r.coefficients_zero.iter().all(|z| *z),
            "witnesses": r
                .coefficients_zero
                .iter()
                .enumerate()
                .filter(|(_, z)| !**z)
                .map(|(i, _)| i)
                .collect::<Vec<_>>(),
        },
        "verdict": format!("{:?}", r.verdict),
    })
}
