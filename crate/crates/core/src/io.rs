//! JSON encoding of every input type and report.
//!
//! Output is canonical: object keys sorted, integers only, rationals as
//! `"num/den"` strings, infinities as `"+inf"` / `"-inf"` (or `null` where
//! the input format uses `null` for an infinite bound).

use serde_json::{json, Map, Value};

use crate::conjugate::{SeparableConvex, UnivariateConvex};
use crate::error::{Error, Result};
use crate::extint::{ExtInt, Fin, MinusInf, PlusInf};
use crate::mconvex::SupermodularFn;
use crate::netflow::{Digraph, FlowInstance};
use crate::polyhedron::{DualWitness, LinearSystem, MinMaxReport, Row, RowKind, SearchStatus, Window};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn int_json(v: i128) -> Value {
    match i64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

pub fn ints_json(v: &[i128]) -> Value {
    Value::Array(v.iter().map(|&x| int_json(x)).collect())
}

/// Finite values as integers, infinities as `"+inf"` / `"-inf"`.
pub fn ext_json(v: ExtInt) -> Value {
    match v {
        Fin(x) => int_json(x),
        other => json!(other.to_string()),
    }
}

/// Finite values as integers, infinities as `null`.
fn bound_json(v: ExtInt) -> Value {
    match v {
        Fin(x) => int_json(x),
        _ => Value::Null,
    }
}

pub fn parse_int(v: &Value) -> Result<i128> {
    if let Some(x) = v.as_i64() {
        return Ok(x as i128);
    }
    if let Some(s) = v.as_str() {
        return s.trim().parse::<i128>().map_err(|_| bad(format!("not an integer: {s}")));
    }
    Err(bad(format!("expected an integer, got {v}")))
}

pub fn parse_ints(v: &Value) -> Result<Vec<i128>> {
    v.as_array().ok_or_else(|| bad("expected an integer array"))?.iter().map(parse_int).collect()
}

/// Integer, `"+inf"`, `"-inf"`, or `null` read as `null_as`.
pub fn parse_ext(v: &Value, null_as: ExtInt) -> Result<ExtInt> {
    match v {
        Value::Null => Ok(null_as),
        Value::String(s) if s == "+inf" || s == "inf" => Ok(PlusInf),
        Value::String(s) if s == "-inf" => Ok(MinusInf),
        _ => Ok(Fin(parse_int(v)?)),
    }
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn opt_bound(obj: &Value, key: &str, null_as: ExtInt) -> Result<ExtInt> {
    obj.get(key).map_or(Ok(null_as), |v| parse_ext(v, null_as))
}

pub fn univariate_to_json(f: &UnivariateConvex) -> Value {
    use UnivariateConvex as U;
    match f {
        U::Table { k0, values } => json!({
            "form": "table",
            "k0": int_json(*k0),
            "values": values.iter().map(|&v| bound_json(v)).collect::<Vec<_>>(),
        }),
        U::Quadratic { a } => json!({"form": "quadratic", "a": int_json(*a)}),
        U::VShape { k0, c_minus, c_plus, lo, hi } => json!({
            "form": "vshape",
            "k0": int_json(*k0),
            "c_minus": int_json(*c_minus),
            "c_plus": int_json(*c_plus),
            "A": bound_json(*lo),
            "B": bound_json(*hi),
        }),
        U::FlatBottom { a, b, c_minus, c_plus, lo, hi } => json!({
            "form": "flat_bottom",
            "a": int_json(*a),
            "b": int_json(*b),
            "c_minus": int_json(*c_minus),
            "c_plus": int_json(*c_plus),
            "A": bound_json(*lo),
            "B": bound_json(*hi),
        }),
        U::LinearPlus { c, inner } => json!({"form": "linear_plus", "c": int_json(*c), "inner": univariate_to_json(inner)}),
        U::Shifted { k0, inner } => json!({"form": "shifted", "k0": int_json(*k0), "inner": univariate_to_json(inner)}),
        U::Restricted { lo, hi, inner } => json!({
            "form": "restricted",
            "A": bound_json(*lo),
            "B": bound_json(*hi),
            "inner": univariate_to_json(inner),
        }),
        U::SumOf { parts, window } => json!({
            "form": "sum",
            "parts": parts.iter().map(univariate_to_json).collect::<Vec<_>>(),
            "window": int_json(*window),
        }),
    }
}

pub fn univariate_from_json(v: &Value) -> Result<UnivariateConvex> {
    use UnivariateConvex as U;
    let form = field(v, "form")?.as_str().ok_or_else(|| bad("\"form\" must be a string"))?;
    let int = |k: &str| parse_int(field(v, k)?);
    let inner = || univariate_from_json(field(v, "inner")?);
    match form {
        "table" => {
            let values = field(v, "values")?
                .as_array()
                .ok_or_else(|| bad("\"values\" must be an array"))?
                .iter()
                .map(|x| parse_ext(x, PlusInf))
                .collect::<Result<Vec<_>>>()?;
            U::table(int("k0")?, values)
        }
        "quadratic" => U::quadratic(int("a")?),
        "linear" => Ok(U::linear(int("c")?)),
        "vshape" => U::vshape(
            int("k0")?,
            int("c_minus")?,
            int("c_plus")?,
            opt_bound(v, "A", MinusInf)?,
            opt_bound(v, "B", PlusInf)?,
        ),
        "flat_bottom" => U::flat_bottom(
            int("a")?,
            int("b")?,
            int("c_minus")?,
            int("c_plus")?,
            opt_bound(v, "A", MinusInf)?,
            opt_bound(v, "B", PlusInf)?,
        ),
        "linear_plus" => U::linear_plus(int("c")?, inner()?),
        "shifted" => U::shifted(int("k0")?, inner()?),
        "restricted" => U::restricted(opt_bound(v, "A", MinusInf)?, opt_bound(v, "B", PlusInf)?, inner()?),
        "sum" => {
            let parts = field(v, "parts")?
                .as_array()
                .ok_or_else(|| bad("\"parts\" must be an array"))?
                .iter()
                .map(univariate_from_json)
                .collect::<Result<Vec<_>>>()?;
            let f = match v.get("window") {
                Some(w) => U::SumOf { parts, window: parse_int(w)? },
                None => U::sum_of(parts)?,
            };
            f.validate()?;
            Ok(f)
        }
        other => Err(bad(format!("unknown form \"{other}\""))),
    }
}

/// Element names to parts, as a JSON object.
pub fn separable_to_json(f: &SeparableConvex) -> Value {
    let mut m = Map::new();
    for (name, part) in f.names.iter().zip(&f.parts) {
        m.insert(name.clone(), univariate_to_json(part));
    }
    Value::Object(m)
}

/// Parses a separable function from an array of parts, an object keyed by
/// element name, `{"square_sum": n}`, or `{"l1": w0}` for `Σ |w(s) − w0(s)|`.
///
/// With `names` given, object keys are looked up in that order; otherwise
/// keys are ordered numerically when they are all integers.
pub fn separable_from_json(v: &Value, names: Option<&[String]>) -> Result<SeparableConvex> {
    if let Some(n) = v.get("square_sum") {
        let n = usize::try_from(parse_int(n)?).map_err(|_| bad("square_sum needs n >= 0"))?;
        let mut f = SeparableConvex::square_sum(n);
        if let Some(names) = names {
            f.names = names.to_vec();
        }
        return Ok(f);
    }
    if let Some(w0) = v.get("l1") {
        let mut f = crate::inverse::l1_deviation(&parse_ints(w0)?);
        if let Some(names) = names {
            f.names = names.to_vec();
        }
        return Ok(f);
    }
    if let Some(arr) = v.as_array() {
        let parts = arr.iter().map(univariate_from_json).collect::<Result<Vec<_>>>()?;
        let names = names.map_or_else(|| (1..=parts.len()).map(|i| i.to_string()).collect(), |n| n.to_vec());
        return SeparableConvex::new(names, parts);
    }
    let obj = v.as_object().ok_or_else(|| bad("separable function must be an array or object"))?;
    let keys: Vec<String> = match names {
        Some(names) => {
            if obj.len() != names.len() {
                return Err(bad("separable function does not match the element list"));
            }
            names.to_vec()
        }
        None => {
            let mut keys: Vec<String> = obj.keys().cloned().collect();
            if keys.iter().all(|k| k.parse::<i64>().is_ok()) {
                keys.sort_by_key(|k| k.parse::<i64>().unwrap_or(0));
            }
            keys
        }
    };
    let parts = keys
        .iter()
        .map(|k| univariate_from_json(obj.get(k).ok_or_else(|| bad(format!("no function for element \"{k}\"")))?))
        .collect::<Result<Vec<_>>>()?;
    SeparableConvex::new(keys, parts)
}

pub fn system_to_json(sys: &LinearSystem) -> Value {
    json!({
        "elements": sys.elements,
        "rows": sys.rows.iter().map(|r| json!({
            "coeffs": ints_json(&r.coeffs),
            "rhs": int_json(r.rhs),
            "kind": match r.kind { RowKind::Geq => "geq", RowKind::Eq => "eq" },
        })).collect::<Vec<_>>(),
    })
}

pub fn system_from_json(v: &Value) -> Result<LinearSystem> {
    let elements: Vec<String> = field(v, "elements")?
        .as_array()
        .ok_or_else(|| bad("\"elements\" must be an array"))?
        .iter()
        .map(|e| e.as_str().map(String::from).ok_or_else(|| bad("element names must be strings")))
        .collect::<Result<_>>()?;
    let rows = field(v, "rows")?
        .as_array()
        .ok_or_else(|| bad("\"rows\" must be an array"))?
        .iter()
        .map(|r| {
            let coeffs = parse_ints(field(r, "coeffs")?)?;
            let rhs = parse_int(field(r, "rhs")?)?;
            match r.get("kind").and_then(Value::as_str).unwrap_or("geq") {
                "geq" | ">=" => Ok(Row::geq(coeffs, rhs)),
                "eq" | "=" => Ok(Row::eq(coeffs, rhs)),
                k => Err(bad(format!("unknown row kind \"{k}\""))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LinearSystem::new(elements, rows)
}

pub fn window_to_json(w: &Window) -> Value {
    json!({"lo": ints_json(&w.lo), "hi": ints_json(&w.hi)})
}

pub fn window_from_json(v: &Value) -> Result<Window> {
    Window::new(parse_ints(field(v, "lo")?)?, parse_ints(field(v, "hi")?)?)
}

/// `"LO..HI"` for a uniform window, `"l1..h1,l2..h2,..."` per element,
/// or `"±K"` / `"K"` for `[−K, K]`.
pub fn parse_window_spec(s: &str, n: usize) -> Result<Window> {
    let s = s.trim();
    let pair = |p: &str| -> Result<(i128, i128)> {
        let (a, b) = p.split_once("..").ok_or_else(|| bad(format!("window part \"{p}\" needs LO..HI")))?;
        Ok((
            a.trim().parse().map_err(|_| bad(format!("bad bound \"{a}\"")))?,
            b.trim().parse().map_err(|_| bad(format!("bad bound \"{b}\"")))?,
        ))
    };
    if !s.contains("..") {
        let k: i128 = s
            .trim_start_matches('±')
            .trim_start_matches("+-")
            .parse()
            .map_err(|_| bad(format!("bad window \"{s}\"")))?;
        return Window::uniform(n, -k.abs(), k.abs());
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 1 {
        let (a, b) = pair(parts[0])?;
        return Window::uniform(n, a, b);
    }
    if parts.len() != n {
        return Err(bad(format!("window has {} parts for {n} elements", parts.len())));
    }
    let (lo, hi): (Vec<i128>, Vec<i128>) = parts.into_iter().map(pair).collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Window::new(lo, hi)
}

pub fn supermodular_to_json(p: &SupermodularFn) -> Value {
    let mut m = Map::new();
    for (mask, &v) in p.table().iter().enumerate() {
        m.insert(mask.to_string(), bound_json(v));
    }
    json!({"n": p.n(), "p": m})
}

/// `{"n": 2, "p": {"0": 0, "1": 0, "2": 0, "3": 2}}`; `null` is `-inf`.
pub fn supermodular_from_json(v: &Value) -> Result<SupermodularFn> {
    let n = usize::try_from(parse_int(field(v, "n")?)?).map_err(|_| bad("n must be positive"))?;
    if n == 0 || n > crate::mconvex::MAX_N {
        return Err(bad("n out of range"));
    }
    let p = field(v, "p")?;
    let table = match p {
        Value::Array(a) => a.iter().map(|x| parse_ext(x, MinusInf)).collect::<Result<Vec<_>>>()?,
        Value::Object(o) => (0..1usize << n)
            .map(|mask| parse_ext(o.get(&mask.to_string()).ok_or_else(|| bad(format!("p misses set {mask}")))?, MinusInf))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("\"p\" must be an object or array")),
    };
    SupermodularFn::new(n, table)
}

/// Arc names used for cost objects: `e1`, `e2`, ...
pub fn arc_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("e{i}")).collect()
}

pub fn flow_to_json(inst: &FlowInstance) -> Value {
    let d = &inst.digraph;
    let mut m = Map::new();
    for (name, &v) in d.nodes.iter().zip(&inst.m) {
        m.insert(name.clone(), int_json(v));
    }
    json!({
        "nodes": d.nodes,
        "arcs": d.arcs.iter().map(|&(u, v)| json!([d.nodes[u], d.nodes[v]])).collect::<Vec<_>>(),
        "m": m,
        "lower": inst.lower.iter().map(|&v| bound_json(v)).collect::<Vec<_>>(),
        "upper": inst.upper.iter().map(|&v| bound_json(v)).collect::<Vec<_>>(),
        "cost": inst.cost.parts.iter().map(univariate_to_json).collect::<Vec<_>>(),
    })
}

/// Flow instance; `lower` defaults to 0, `upper` to `+inf`, `cost` to the
/// square-sum. `null` bounds are infinite.
pub fn flow_from_json(v: &Value) -> Result<FlowInstance> {
    let nodes: Vec<String> = field(v, "nodes")?
        .as_array()
        .ok_or_else(|| bad("\"nodes\" must be an array"))?
        .iter()
        .map(|e| e.as_str().map(String::from).ok_or_else(|| bad("node names must be strings")))
        .collect::<Result<_>>()?;
    let idx = |x: &Value| -> Result<usize> {
        let name = x.as_str().ok_or_else(|| bad("arc endpoints must be node names"))?;
        nodes.iter().position(|n| n == name).ok_or_else(|| bad(format!("unknown node \"{name}\"")))
    };
    let arcs = field(v, "arcs")?
        .as_array()
        .ok_or_else(|| bad("\"arcs\" must be an array"))?
        .iter()
        .map(|a| match a.as_array().map(Vec::as_slice) {
            Some([u, w]) => Ok((idx(u)?, idx(w)?)),
            _ => Err(bad("each arc is a [tail, head] pair")),
        })
        .collect::<Result<Vec<_>>>()?;
    let na = arcs.len();
    let m_obj = field(v, "m")?;
    let m = match m_obj {
        Value::Object(o) => nodes.iter().map(|n| o.get(n).map_or(Ok(0), parse_int)).collect::<Result<Vec<_>>>()?,
        _ => parse_ints(m_obj)?,
    };
    let bounds = |key: &str, null_as: ExtInt, default: ExtInt| -> Result<Vec<ExtInt>> {
        match v.get(key) {
            None => Ok(vec![default; na]),
            Some(b) => b
                .as_array()
                .ok_or_else(|| bad(format!("\"{key}\" must be an array")))?
                .iter()
                .map(|x| parse_ext(x, null_as))
                .collect(),
        }
    };
    let lower = bounds("lower", MinusInf, Fin(0))?;
    let upper = bounds("upper", PlusInf, PlusInf)?;
    let names = arc_names(na);
    let cost = match v.get("cost") {
        None => SeparableConvex::new(names, vec![UnivariateConvex::Quadratic { a: 1 }; na])?,
        Some(Value::String(s)) if s == "square_sum" => {
            SeparableConvex::new(names, vec![UnivariateConvex::Quadratic { a: 1 }; na])?
        }
        Some(c) => separable_from_json(c, Some(&names))?,
    };
    FlowInstance::new(Digraph::new(nodes, arcs)?, m, lower, upper, cost)
}

pub fn witness_json(w: &DualWitness) -> Value {
    match w {
        DualWitness::None => Value::Null,
        DualWitness::Rows(y) => json!({"kind": "rows", "y": ints_json(y)}),
        DualWitness::Cost(w) => json!({"kind": "cost", "w": ints_json(w)}),
        DualWitness::Split(a, b) => json!({"kind": "split", "w1": ints_json(a), "w2": ints_json(b)}),
        DualWitness::Potential(p) => json!({"kind": "potential", "pi": ints_json(p)}),
        DualWitness::Point(z) => json!({"kind": "point", "z": ints_json(z)}),
    }
}

pub fn report_to_json(r: &MinMaxReport) -> Value {
    json!({
        "primal_value": ext_json(r.primal_value),
        "dual_value": ext_json(r.dual_value),
        "primal_witness": r.primal_witness.as_deref().map(ints_json),
        "dual_witness": witness_json(&r.dual_witness),
        "verified": r.equality,
        "support_size": r.support_size,
        "support_within_bound": r.support_within_bound,
        "status": match r.status { SearchStatus::Exact => "exact", SearchStatus::Inconclusive => "inconclusive" },
        "bounds": Value::Object(r.bounds.clone().into_iter().collect()),
        "notes": r.notes,
    })
}

/// Canonical single-line JSON.
pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

pub fn parse_json_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_round_trip() {
        let fs = vec![
            UnivariateConvex::quadratic(2).unwrap(),
            UnivariateConvex::vshape(3, -1, 1, MinusInf, Fin(7)).unwrap(),
            UnivariateConvex::flat_bottom(-1, 2, -2, 3, Fin(-5), PlusInf).unwrap(),
            UnivariateConvex::table_fin(-2, &[4, 1, 0, 1]).unwrap(),
            UnivariateConvex::restricted(Fin(0), Fin(2), UnivariateConvex::quadratic(1).unwrap()).unwrap(),
            UnivariateConvex::sum_of(vec![UnivariateConvex::linear(2), UnivariateConvex::quadratic(1).unwrap()]).unwrap(),
        ];
        for f in fs {
            let j = univariate_to_json(&f);
            assert_eq!(univariate_from_json(&j).unwrap(), f);
        }
        let q = univariate_from_json(&parse_json_text(r#"{"form":"quadratic","a":1}"#).unwrap()).unwrap();
        assert_eq!(q, UnivariateConvex::Quadratic { a: 1 });
    }

    #[test]
    fn supermodular_and_window_round_trip() {
        let p = supermodular_from_json(&parse_json_text(r#"{"n":2,"p":{"0":0,"1":0,"2":0,"3":2}}"#).unwrap()).unwrap();
        assert_eq!(p.table(), &[Fin(0), Fin(0), Fin(0), Fin(2)]);
        assert_eq!(supermodular_from_json(&supermodular_to_json(&p)).unwrap(), p);
        let w = parse_window_spec("-1..5", 2).unwrap();
        assert_eq!(window_from_json(&window_to_json(&w)).unwrap(), w);
        assert_eq!(parse_window_spec("±3", 2).unwrap(), Window::uniform(2, -3, 3).unwrap());
        assert_eq!(parse_window_spec("0..1,2..3", 2).unwrap(), Window::new(vec![0, 2], vec![1, 3]).unwrap());
    }

    #[test]
    fn flow_round_trip() {
        let text = r#"{"nodes":["s","t"],"arcs":[["s","t"],["s","t"]],"m":{"s":-2,"t":2},"lower":[0,0],"upper":[null,null]}"#;
        let inst = flow_from_json(&parse_json_text(text).unwrap()).unwrap();
        assert_eq!(inst.upper, vec![PlusInf, PlusInf]);
        assert_eq!(flow_from_json(&flow_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn output_keys_are_sorted() {
        let s = canonical(&json!({"b": 1, "a": {"d": 2, "c": 3}}));
        assert_eq!(s, r#"{"a":{"c":3,"d":2},"b":1}"#);
    }
}
