//! JSON encodings of polytopes, networks, trees, subdivisions and
//! certificates.
//!
//! Integers within `±(2^53 − 1)` are written as numbers and larger ones as
//! decimal strings; non-integral rationals are written as `"p/q"`. Key order
//! is fixed, so equal values always serialize to identical bytes.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::certifier::{
    CellJustification, CheckMode, FaceEntry, Justification, LemmaAudit, NonRepresentabilityCertificate,
    ObstructionReport, ParityCertificate, ThmEvenReport, WitnessCheck,
};
use crate::error::{Error, Result};
use crate::linalg::{Int, Mat, Rat};
use crate::polytope::{Face, LatticePolytope};
use crate::subdivision::{Cell, CellKind, Lift, Operation, Subdivision, SubdivisionAudit};
use crate::tropical::{CompiledOutput, ConstructionTree, IntegralNetwork, PolytopePair};

pub const SCHEMA_VERSION: &str = "newton-depth/1";

const SAFE: i64 = (1 << 53) - 1;

pub fn int_to_json(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) if v.abs() <= SAFE => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn rat_to_json(x: &Rat) -> Value {
    if x.denom().is_one() {
        int_to_json(x.numer())
    } else {
        Value::String(format!("{}/{}", x.numer(), x.denom()))
    }
}

fn schema(what: &str) -> Error {
    Error::Schema(what.to_string())
}

pub fn int_from_json(v: &Value) -> Result<Int> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Int::from)
            .ok_or_else(|| schema(&format!("expected an integer, got {n}"))),
        Value::String(s) => s
            .trim()
            .parse::<Int>()
            .map_err(|_| schema(&format!("expected an integer, got {s:?}"))),
        other => Err(schema(&format!("expected an integer, got {other}"))),
    }
}

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) if s.contains('/') => {
            let (p, q) = s.split_once('/').expect("contains slash");
            let p: Int = p.trim().parse().map_err(|_| schema(&format!("bad rational {s:?}")))?;
            let q: Int = q.trim().parse().map_err(|_| schema(&format!("bad rational {s:?}")))?;
            if q.is_zero() {
                return Err(schema(&format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(p, q))
        }
        _ => Ok(Rat::from_integer(int_from_json(v)?)),
    }
}

fn ints(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_to_json).collect())
}

fn points(v: &[Vec<Int>]) -> Value {
    Value::Array(v.iter().map(|p| ints(p)).collect())
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(&format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| schema(&format!("missing field {key:?}")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| schema(&format!("{key:?} must be a non-negative integer")))
}

fn int_vec_from(v: &Value, what: &str) -> Result<Vec<Int>> {
    array(v, what)?.iter().map(int_from_json).collect()
}

fn rat_vec_from(v: &Value, what: &str) -> Result<Vec<Rat>> {
    array(v, what)?.iter().map(rat_from_json).collect()
}

fn points_from(v: &Value, what: &str) -> Result<Vec<Vec<Int>>> {
    array(v, what)?.iter().map(|p| int_vec_from(p, what)).collect()
}

pub fn polytope_to_json(p: &LatticePolytope) -> Value {
    json!({ "ambient": p.ambient(), "vertices": points(p.vertices()) })
}

pub fn polytope_from_json(v: &Value) -> Result<LatticePolytope> {
    let n = usize_field(v, "ambient")?;
    let pts = points_from(field(v, "vertices")?, "vertices")?;
    if let Some(bad) = pts.iter().find(|p| p.len() != n) {
        return Err(schema(&format!("vertex of length {} in ambient {n}", bad.len())));
    }
    LatticePolytope::from_points(&pts)
}

pub fn network_to_json(net: &IntegralNetwork) -> Value {
    let layers: Vec<Value> = net.layers().iter().map(|m| points(&m.to_rows())).collect();
    json!({ "input_dim": net.input_dim(), "layers": layers })
}

pub fn network_from_json(v: &Value) -> Result<IntegralNetwork> {
    let obj = v.as_object().ok_or_else(|| schema("network must be an object"))?;
    if obj.contains_key("biases") || obj.contains_key("bias") {
        return Err(Error::BiasPresent(
            "networks must be bias-free; remove the \"biases\" key (positively homogeneous inputs only)".into(),
        ));
    }
    let n = usize_field(v, "input_dim")?;
    let mut width = n;
    let mut layers = Vec::new();
    for (i, m) in array(field(v, "layers")?, "layers")?.iter().enumerate() {
        let rows = points_from(m, "layer")?;
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::MalformedNetwork(format!(
                "layer {} has a row of length {}, expected {width}",
                i + 1,
                r.len()
            )));
        }
        layers.push(Mat::from_rows(&rows, width)?);
        width = rows.len();
    }
    IntegralNetwork::new(n, layers)
}

pub fn pair_to_json(p: &PolytopePair) -> Value {
    json!({ "pos": polytope_to_json(&p.pos), "neg": polytope_to_json(&p.neg) })
}

pub fn pair_from_json(v: &Value) -> Result<PolytopePair> {
    PolytopePair::new(polytope_from_json(field(v, "pos")?)?, polytope_from_json(field(v, "neg")?)?)
}

/// Node table in post-order; shared subtrees appear once.
pub fn tree_to_json(t: &Arc<ConstructionTree>) -> Value {
    let nodes = t.nodes();
    let ids: HashMap<*const ConstructionTree, usize> =
        nodes.iter().enumerate().map(|(i, n)| (Arc::as_ptr(n), i)).collect();
    let id = |c: &Arc<ConstructionTree>| ids[&Arc::as_ptr(c)];
    let encoded: Vec<Value> = nodes
        .iter()
        .map(|n| match &**n {
            ConstructionTree::Leaf(p) => json!({ "leaf": ints(p) }),
            ConstructionTree::Conv(a, b) => json!({ "conv": [id(a), id(b)] }),
            ConstructionTree::Sum(cs) => json!({ "sum": cs.iter().map(id).collect::<Vec<_>>() }),
        })
        .collect();
    json!({
        "ambient": t.ambient(),
        "depth": t.depth(),
        "root": nodes.len() - 1,
        "nodes": encoded,
    })
}

pub fn tree_from_json(v: &Value) -> Result<Arc<ConstructionTree>> {
    let n = usize_field(v, "ambient")?;
    let raw = array(field(v, "nodes")?, "nodes")?;
    let mut built: Vec<Arc<ConstructionTree>> = Vec::with_capacity(raw.len());
    let child = |built: &Vec<Arc<ConstructionTree>>, x: &Value| -> Result<Arc<ConstructionTree>> {
        let i = x
            .as_u64()
            .and_then(|i| usize::try_from(i).ok())
            .ok_or_else(|| schema("node reference must be an index"))?;
        built
            .get(i)
            .cloned()
            .ok_or_else(|| schema(&format!("node {i} referenced before definition")))
    };
    for node in raw {
        let t = if let Some(p) = node.get("leaf") {
            let p = int_vec_from(p, "leaf")?;
            if p.len() != n {
                return Err(schema(&format!("leaf of length {} in ambient {n}", p.len())));
            }
            ConstructionTree::Leaf(p)
        } else if let Some(c) = node.get("conv") {
            let c = array(c, "conv")?;
            if c.len() != 2 {
                return Err(schema("conv nodes take exactly two children"));
            }
            ConstructionTree::Conv(child(&built, &c[0])?, child(&built, &c[1])?)
        } else if let Some(c) = node.get("sum") {
            let cs = array(c, "sum")?
                .iter()
                .map(|x| child(&built, x))
                .collect::<Result<Vec<_>>>()?;
            if cs.is_empty() {
                return Err(schema("sum nodes need at least one child"));
            }
            ConstructionTree::Sum(cs)
        } else {
            return Err(schema("node must have one of \"leaf\", \"conv\", \"sum\""));
        };
        built.push(Arc::new(t));
    }
    let root = usize_field(v, "root")?;
    built
        .get(root)
        .cloned()
        .ok_or_else(|| schema(&format!("root {root} out of range")))
}

pub fn compiled_to_json(net: &IntegralNetwork, outputs: &[CompiledOutput]) -> Value {
    let outs: Vec<Value> = outputs
        .iter()
        .map(|o| {
            json!({
                "pos": polytope_to_json(&o.pair.pos),
                "neg": polytope_to_json(&o.pair.neg),
                "pos_tree": tree_to_json(&o.pos_tree),
                "neg_tree": tree_to_json(&o.neg_tree),
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "input_dim": net.input_dim(),
        "hidden_layers": net.hidden_layers(),
        "outputs": outs,
    })
}

fn face_to_json(f: &Face) -> Value {
    json!({
        "dim": f.dim,
        "direction": rats(&f.direction),
        "vertices": points(f.polytope.vertices()),
    })
}

fn face_from_json(v: &Value, ambient: usize) -> Result<Face> {
    let pts = points_from(field(v, "vertices")?, "vertices")?;
    let polytope = LatticePolytope::from_points(&pts)?;
    if polytope.ambient() != ambient {
        return Err(schema("face ambient dimension mismatch"));
    }
    let dim = usize_field(v, "dim")?;
    if dim != polytope.dim() {
        return Err(schema(&format!("face records dim {dim} but has {}", polytope.dim())));
    }
    Ok(Face {
        polytope,
        direction: rat_vec_from(field(v, "direction")?, "direction")?,
        dim,
    })
}

fn opt_face(f: &Option<Face>) -> Value {
    f.as_ref().map_or(Value::Null, face_to_json)
}

pub fn subdivision_to_json(s: &Subdivision) -> Value {
    let cells: Vec<Value> = s
        .cells
        .iter()
        .map(|c| {
            json!({
                "kind": c.kind.as_str(),
                "vertices": points(c.polytope.vertices()),
                "F": opt_face(&c.f),
                "G": opt_face(&c.g),
                "witness": rats(&c.witness),
                "volume": int_to_json(&c.volume),
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "operation": s.operation.as_str(),
        "P": polytope_to_json(&s.p),
        "Q": polytope_to_json(&s.q),
        "target": polytope_to_json(&s.target),
        "alpha": ints(&s.lift.alpha),
        "beta": int_to_json(&s.lift.beta),
        "seed": s.lift.seed,
        "retries": s.lift.retries,
        "cells": cells,
    })
}

pub fn subdivision_from_json(v: &Value) -> Result<Subdivision> {
    let operation = match field(v, "operation")?.as_str() {
        Some("sum") => Operation::Sum,
        Some("conv") => Operation::Conv,
        _ => return Err(schema("operation must be \"sum\" or \"conv\"")),
    };
    let p = polytope_from_json(field(v, "P")?)?;
    let q = polytope_from_json(field(v, "Q")?)?;
    let target = polytope_from_json(field(v, "target")?)?;
    let n = target.ambient();
    let lift = Lift {
        alpha: int_vec_from(field(v, "alpha")?, "alpha")?,
        beta: int_from_json(field(v, "beta")?)?,
        seed: field(v, "seed")?.as_u64().ok_or_else(|| schema("seed must be a u64"))?,
        retries: u32::try_from(usize_field(v, "retries")?).map_err(|_| schema("retries out of range"))?,
    };
    let opt = |x: &Value| -> Result<Option<Face>> {
        if x.is_null() {
            Ok(None)
        } else {
            face_from_json(x, n).map(Some)
        }
    };
    let cells = array(field(v, "cells")?, "cells")?
        .iter()
        .map(|c| {
            let kind = field(c, "kind")?
                .as_str()
                .and_then(CellKind::parse)
                .ok_or_else(|| schema("unknown cell kind"))?;
            Ok(Cell {
                polytope: LatticePolytope::from_points(&points_from(field(c, "vertices")?, "vertices")?)?,
                kind,
                f: opt(field(c, "F")?)?,
                g: opt(field(c, "G")?)?,
                witness: rat_vec_from(field(c, "witness")?, "witness")?,
                volume: int_from_json(field(c, "volume")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Subdivision {
        operation,
        p,
        q,
        target,
        cells,
        lift,
    })
}

pub fn audit_to_json(a: &SubdivisionAudit) -> Value {
    let checks: Vec<Value> = a
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    json!({ "passed": a.passed(), "checks": checks })
}

fn entry_to_json(e: &FaceEntry) -> Value {
    json!({
        "dim": e.dim,
        "volume": int_to_json(&e.volume),
        "parity": e.parity.as_str(),
        "direction": rats(&e.direction),
        "vertices": points(&e.vertices),
    })
}

pub fn parity_certificate_to_json(c: &ParityCertificate) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "polytope": polytope_to_json(&c.polytope),
        "k": c.k,
        "min_face_dim": crate::certifier::threshold(c.k),
        "mode": match c.mode { CheckMode::Full => "full", CheckMode::ShortCircuit => "short-circuit" },
        "verdict": if c.member { "member" } else { "non-member" },
        "first_violation": c.first_violation.map_or(Value::Null, Value::from),
        "entries": c.entries.iter().map(entry_to_json).collect::<Vec<_>>(),
    })
}

fn lift_to_json(l: &Lift) -> Value {
    json!({
        "alpha": ints(&l.alpha),
        "beta": int_to_json(&l.beta),
        "seed": l.seed,
        "retries": l.retries,
    })
}

fn justification_to_json(c: &CellJustification) -> Value {
    let why = match &c.justification {
        Justification::EvenBinomial { i, j } => json!({ "reason": "even-binomial", "i": i, "j": j }),
        Justification::EvenFace { which, dim, volume } => {
            json!({ "reason": "even-face", "face": which, "dim": dim, "volume": int_to_json(volume) })
        }
        Justification::Unjustified => json!({ "reason": "unjustified" }),
    };
    json!({ "kind": c.kind.as_str(), "volume": int_to_json(&c.volume), "justification": why })
}

pub fn lemma_audit_to_json(a: &LemmaAudit) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "lemma": a.lemma.as_str(),
        "k": a.k,
        "dim": a.dim,
        "required_dim": a.required_dim,
        "applies": a.applies,
        "note": if a.applies { "lemma applies" } else { "lemma precondition not met, no claim" },
        "volume": int_to_json(&a.volume),
        "parity": a.parity.as_str(),
        "subdivision_ok": a.subdivision_ok,
        "lift": a.lift.as_ref().map_or(Value::Null, lift_to_json),
        "cells": a.cells.iter().map(justification_to_json).collect::<Vec<_>>(),
        "passed": a.passed,
    })
}

pub fn thm_even_to_json(r: &ThmEvenReport) -> Value {
    let trials: Vec<Value> = r
        .trials
        .iter()
        .map(|t| {
            json!({
                "index": t.index,
                "seed": t.seed,
                "tree_depth": t.tree_depth,
                "polytope": polytope_to_json(&t.polytope),
                "faces_checked": t.certificate.entries.len(),
                "member": t.certificate.member,
            })
        })
        .collect();
    json!({
        "k": r.k,
        "n": r.n,
        "seed": r.seed,
        "coord_range": r.params.coord_range,
        "max_fanout": r.params.max_fanout,
        "members": r.members,
        "trials": trials,
        "counterexample": r.counterexample.map_or(Value::Null, Value::from),
    })
}

pub fn obstruction_to_json(o: &ObstructionReport) -> Value {
    let odd: Vec<Value> = o
        .odd_cells
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "volume": int_to_json(&c.volume),
                "F_dim": c.f_dim,
                "G_dim": c.g_dim,
                "simplex_translate": c.simplex_translate,
                "vertices": points(&c.vertices),
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "k": o.k,
        "polytope": polytope_to_json(&o.polytope),
        "sum": polytope_to_json(&o.sum),
        "volume": int_to_json(&o.volume),
        "parity": o.parity.as_str(),
        "lift": lift_to_json(&o.lift),
        "cell_count": o.cell_count,
        "audit_passed": o.audit_passed,
        "odd_cells": odd,
        "passed": o.passed,
    })
}

fn witness_to_json(w: &WitnessCheck) -> Value {
    json!({
        "inputs": w.m,
        "hidden_layers": w.hidden_layers,
        "network": network_to_json(&w.network),
        "points_checked": w.points_checked,
        "eval_ok": w.eval_ok,
        "newton_polytope": w.newton_polytope.as_ref().map_or(Value::Null, polytope_to_json),
        "newton_is_simplex": w.newton_is_simplex,
    })
}

pub fn certificate_to_json(c: &NonRepresentabilityCertificate) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), SCHEMA_VERSION.into());
    m.insert("k".into(), c.k.into());
    m.insert("n".into(), c.n.into());
    m.insert("seed".into(), c.options.seed.into());
    m.insert("trials".into(), c.options.trials.into());
    m.insert("eval_points".into(), c.options.eval_points.into());
    m.insert("statement".into(), c.statement().into());
    m.insert("witness".into(), witness_to_json(&c.witness));
    m.insert("thm_even".into(), thm_even_to_json(&c.thm_even));
    m.insert(
        "obstructions".into(),
        Value::Array(c.obstructions.iter().map(obstruction_to_json).collect()),
    );
    m.insert("verdict".into(), if c.passed() { "certified" } else { "failed" }.into());
    m.insert("failure".into(), c.failure.clone().map_or(Value::Null, Value::from));
    Value::Object(m)
}

/// Pretty-printed with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("invalid JSON: {e}")))
}
