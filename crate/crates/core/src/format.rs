//! Canonical JSON documents for core data, gluing data and monodromic mixed
//! Hodge modules.
//!
//! Every document is an envelope `{kind, version, payload}`. Rationals are
//! strings `"p/q"` (or `"p"` when integral), matrices are
//! `{rows, cols, entries}` with row-major `entries`, filtrations are jump
//! lists `[{index, generators}]`. Keys are sorted and no floats appear, so
//! equal objects emit identical bytes.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::dmod::{CoreData, Cycles, WindowModule};
use crate::error::{Error, Result};
use crate::filtration::{FiltrationPair, IncreasingFiltration};
use crate::gluing::{GluingDatum, PsiComponent, PsiDatum};
use crate::linalg::{Matrix, Rational, Subspace};
use crate::mhm::{minus_one, MonodromicMhm};

pub const FORMAT_VERSION: &str = "1.0.0";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Core(CoreData),
    Gluing(GluingDatum),
    Mmhm(MonodromicMhm),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Core(_) => "core",
            Document::Gluing(_) => "gluing",
            Document::Mmhm(_) => "mmhm",
        }
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let entries: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(rational_to_json).collect()))
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

pub fn filtration_to_json(f: &IncreasingFiltration) -> Value {
    Value::Array(
        f.jumps()
            .iter()
            .map(|(i, s)| {
                let gens: Vec<Value> = s
                    .basis_vectors()
                    .iter()
                    .map(|v| Value::Array(v.iter().map(rational_to_json).collect()))
                    .collect();
                json!({ "index": i, "generators": gens })
            })
            .collect(),
    )
}

fn pair_fields(obj: &mut Map<String, Value>, p: &FiltrationPair) {
    obj.insert("F".into(), filtration_to_json(&p.f));
    obj.insert("W".into(), filtration_to_json(&p.w));
}

fn core_payload(c: &CoreData) -> Value {
    let comps: Vec<Value> = c
        .components()
        .iter()
        .map(|(a, n)| json!({ "alpha": rational_to_json(a), "N": matrix_to_json(n) }))
        .collect();
    json!({ "components": comps, "u": matrix_to_json(c.u()), "w": matrix_to_json(c.w()) })
}

/// Nearby-cycle components as `[{alpha, N, F, W}]`.
pub fn psi_to_json(psi: &PsiDatum) -> Value {
    Value::Array(
        psi.components
            .iter()
            .map(|(a, c)| {
                let mut obj = Map::new();
                obj.insert("alpha".into(), rational_to_json(a));
                obj.insert("N".into(), matrix_to_json(&c.n));
                pair_fields(&mut obj, &c.filt);
                Value::Object(obj)
            })
            .collect(),
    )
}

/// `{lo, hi, pieces: [{beta, dim}], t: [{beta, map}], d: [{beta, map}]}`;
/// `t` at `β` maps `M^β → M^{β+1}`, `d` at `β` maps `M^β → M^{β-1}`.
pub fn window_to_json(w: &WindowModule) -> Value {
    let maps = |m: &BTreeMap<Rational, Matrix>| -> Value {
        m.iter()
            .map(|(b, x)| json!({ "beta": rational_to_json(b), "map": matrix_to_json(x) }))
            .collect()
    };
    let pieces: Vec<Value> = w
        .graded()
        .iter()
        .map(|(b, d)| json!({ "beta": rational_to_json(b), "dim": d }))
        .collect();
    json!({
        "lo": rational_to_json(w.lo()),
        "hi": rational_to_json(w.hi()),
        "pieces": pieces,
        "t": maps(w.t_maps()),
        "d": maps(w.d_maps()),
    })
}

/// `{psi: [{alpha, N}], phi: {N}, can, var}`.
pub fn cycles_to_json(c: &Cycles) -> Value {
    let psi: Vec<Value> = c
        .psi
        .iter()
        .map(|(a, n)| json!({ "alpha": rational_to_json(a), "N": matrix_to_json(n) }))
        .collect();
    json!({
        "psi": psi,
        "phi": { "N": matrix_to_json(&c.phi) },
        "can": matrix_to_json(&c.can),
        "var": matrix_to_json(&c.var),
    })
}

fn gluing_payload(g: &GluingDatum) -> Value {
    let psi = psi_to_json(&g.psi);
    let mut phi = Map::new();
    phi.insert("dim".into(), json!(g.phi_dim()));
    pair_fields(&mut phi, &g.phi);
    json!({
        "psi": psi,
        "phi": phi,
        "c": matrix_to_json(&g.c),
        "v": matrix_to_json(&g.v),
        "polarizable": g.polarizable,
    })
}

fn mmhm_payload(m: &MonodromicMhm) -> Value {
    let comps: Vec<Value> = m
        .core
        .components()
        .iter()
        .map(|(a, n)| {
            let mut obj = Map::new();
            obj.insert("alpha".into(), rational_to_json(a));
            obj.insert("N".into(), matrix_to_json(n));
            pair_fields(&mut obj, &m.filtration(a));
            Value::Object(obj)
        })
        .collect();
    json!({
        "components": comps,
        "u": matrix_to_json(m.core.u()),
        "w": matrix_to_json(m.core.w()),
        "polarizable": m.polarizable,
    })
}

pub fn to_value(doc: &Document) -> Value {
    let payload = match doc {
        Document::Core(c) => core_payload(c),
        Document::Gluing(g) => gluing_payload(g),
        Document::Mmhm(m) => mmhm_payload(m),
    };
    json!({ "kind": doc.kind(), "version": FORMAT_VERSION, "payload": payload })
}

/// Canonical text: pretty-printed, sorted keys, trailing newline.
pub fn emit(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(doc)).expect("values always serialize");
    s.push('\n');
    s
}

/// Parses text into a JSON value, reporting syntax errors by position.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
        }
    })
}

pub fn parse(text: &str) -> Result<Document> {
    from_value(&parse_json(text)?)
}

/// Parses a stream of documents: either one document or a JSON array of them.
pub fn parse_many(text: &str) -> Result<Vec<Document>> {
    match parse_json(text)? {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, v)| from_value(v).map_err(|e| prefix(e, &format!("[{i}]"))))
            .collect(),
        v => Ok(vec![from_value(&v)?]),
    }
}

fn prefix(e: Error, path: &str) -> Error {
    match e {
        Error::Schema { field, message } => Error::Schema {
            field: format!("{path}.{field}"),
            message,
        },
        other => other,
    }
}

fn schema(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

fn get<'a>(obj: &'a Value, field: &str, path: &str) -> Result<&'a Value> {
    let map = obj
        .as_object()
        .ok_or_else(|| schema(path, "expected an object"))?;
    map.get(field)
        .ok_or_else(|| schema(&join(path, field), "missing field"))
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn as_bool(v: &Value, path: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| schema(path, "expected a boolean"))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational> {
    let s = v
        .as_str()
        .ok_or_else(|| schema(path, "expected a rational as a string \"p/q\""))?;
    let bad = || schema(path, format!("malformed rational {s:?}"));
    let parsed = match s.split_once('/') {
        Some((p, q)) => {
            let p = p.parse().map_err(|_| bad())?;
            let q: num_bigint::BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(schema(path, "zero denominator"));
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(s.parse().map_err(|_| bad())?),
    };
    Ok(parsed)
}

fn vector_from_json(v: &Value, len: usize, path: &str) -> Result<Vec<Rational>> {
    let items = as_array(v, path)?;
    if items.len() != len {
        return Err(schema(path, format!("expected {len} entries, found {}", items.len())));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| rational_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_from_json(v: &Value, path: &str) -> Result<Matrix> {
    let rows = as_usize(get(v, "rows", path)?, &join(path, "rows"))?;
    let cols = as_usize(get(v, "cols", path)?, &join(path, "cols"))?;
    let epath = join(path, "entries");
    let entries = as_array(get(v, "entries", path)?, &epath)?;
    if entries.len() != rows {
        return Err(schema(&epath, format!("expected {rows} rows, found {}", entries.len())));
    }
    let data = entries
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_json(r, cols, &format!("{epath}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(data, cols).map_err(|e| schema(path, e.to_string()))
}

pub fn filtration_from_json(v: &Value, ambient: usize, path: &str) -> Result<IncreasingFiltration> {
    let steps = as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, step)| {
            let p = format!("{path}[{i}]");
            let index = get(step, "index", &p)?
                .as_i64()
                .ok_or_else(|| schema(&join(&p, "index"), "expected an integer"))?;
            let gpath = join(&p, "generators");
            let gens = as_array(get(step, "generators", &p)?, &gpath)?
                .iter()
                .enumerate()
                .map(|(j, g)| vector_from_json(g, ambient, &format!("{gpath}[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok((index, Subspace::span(ambient, gens)))
        })
        .collect::<Result<Vec<_>>>()?;
    IncreasingFiltration::new(ambient, steps).map_err(|e| schema(path, e.to_string()))
}

fn pair_from_json(v: &Value, ambient: usize, path: &str) -> Result<FiltrationPair> {
    let f = filtration_from_json(get(v, "F", path)?, ambient, &join(path, "F"))?;
    let w = filtration_from_json(get(v, "W", path)?, ambient, &join(path, "W"))?;
    Ok(FiltrationPair { f, w })
}

/// `alpha` within `[-1, 0]`, or `(-1, 0]` when `include_minus_one` is false.
fn alpha_from_json(v: &Value, path: &str, include_minus_one: bool) -> Result<Rational> {
    let a = rational_from_json(v, path)?;
    let low_ok = if include_minus_one { a >= minus_one() } else { a > minus_one() };
    if !low_ok || a > Rational::zero() {
        return Err(schema(path, "alpha out of range"));
    }
    Ok(a)
}

fn square(n: Matrix, path: &str) -> Result<Matrix> {
    if n.is_square() {
        Ok(n)
    } else {
        Err(schema(path, "N must be square"))
    }
}

struct Component {
    alpha: Rational,
    n: Matrix,
    filt: Option<FiltrationPair>,
}

fn components_from_json(
    v: &Value,
    path: &str,
    include_minus_one: bool,
    with_filtrations: bool,
) -> Result<Vec<Component>> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (i, c) in as_array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let alpha = alpha_from_json(get(c, "alpha", &p)?, &join(&p, "alpha"), include_minus_one)?;
        if seen.insert(alpha.clone(), ()).is_some() {
            return Err(schema(&join(&p, "alpha"), format!("duplicate alpha {alpha}")));
        }
        let npath = join(&p, "N");
        let n = square(matrix_from_json(get(c, "N", &p)?, &npath)?, &npath)?;
        let filt = if with_filtrations {
            Some(pair_from_json(c, n.rows(), &p)?)
        } else {
            None
        };
        out.push(Component { alpha, n, filt });
    }
    Ok(out)
}

fn shaped(m: Matrix, rows: usize, cols: usize, path: &str) -> Result<Matrix> {
    if (m.rows(), m.cols()) == (rows, cols) {
        Ok(m)
    } else {
        Err(schema(
            path,
            format!("expected a {rows}x{cols} matrix, found {}x{}", m.rows(), m.cols()),
        ))
    }
}

fn core_from_parts(components: &[Component], payload: &Value, path: &str) -> Result<CoreData> {
    let comps: BTreeMap<Rational, Matrix> =
        components.iter().map(|c| (c.alpha.clone(), c.n.clone())).collect();
    let dim = |a: &Rational| comps.get(a).map_or(0, Matrix::rows);
    let (d0, d1) = (dim(&Rational::zero()), dim(&-Rational::one()));
    let u = shaped(matrix_from_json(get(payload, "u", path)?, &join(path, "u"))?, d1, d0, &join(path, "u"))?;
    let w = shaped(matrix_from_json(get(payload, "w", path)?, &join(path, "w"))?, d0, d1, &join(path, "w"))?;
    Ok(CoreData::new(comps, u, w))
}

pub fn from_value(v: &Value) -> Result<Document> {
    let kind = get(v, "kind", "")?
        .as_str()
        .ok_or_else(|| schema("kind", "expected a string"))?;
    let version = get(v, "version", "")?
        .as_str()
        .ok_or_else(|| schema("version", "expected a string"))?;
    if version != FORMAT_VERSION {
        return Err(schema(
            "version",
            format!("unsupported version {version:?}, expected {FORMAT_VERSION:?}"),
        ));
    }
    let payload = get(v, "payload", "")?;
    let path = "payload";
    match kind {
        "core" => {
            let comps = components_from_json(get(payload, "components", path)?, "payload.components", true, false)?;
            Ok(Document::Core(core_from_parts(&comps, payload, path)?))
        }
        "mmhm" => {
            let comps = components_from_json(get(payload, "components", path)?, "payload.components", true, true)?;
            let core = core_from_parts(&comps, payload, path)?;
            let filtrations = comps
                .into_iter()
                .map(|c| (c.alpha, c.filt.expect("parsed with filtrations")))
                .collect();
            let polarizable = as_bool(get(payload, "polarizable", path)?, "payload.polarizable")?;
            Ok(Document::Mmhm(MonodromicMhm::new(core, filtrations, polarizable)))
        }
        "gluing" => {
            let comps = components_from_json(get(payload, "psi", path)?, "payload.psi", false, true)?;
            let psi = PsiDatum::new(
                comps
                    .into_iter()
                    .map(|c| {
                        let filt = c.filt.expect("parsed with filtrations");
                        (c.alpha, PsiComponent { n: c.n, filt })
                    })
                    .collect(),
            );
            let phi_v = get(payload, "phi", path)?;
            let dim = as_usize(get(phi_v, "dim", "payload.phi")?, "payload.phi.dim")?;
            let phi = pair_from_json(phi_v, dim, "payload.phi")?;
            let d0 = psi.dim(&Rational::zero());
            let c = shaped(matrix_from_json(get(payload, "c", path)?, "payload.c")?, dim, d0, "payload.c")?;
            let v = shaped(matrix_from_json(get(payload, "v", path)?, "payload.v")?, d0, dim, "payload.v")?;
            let polarizable = as_bool(get(payload, "polarizable", path)?, "payload.polarizable")?;
            Ok(Document::Gluing(GluingDatum { psi, phi, c, v, polarizable }))
        }
        other => Err(schema("kind", format!("unknown kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::nilp_block;
    use crate::linalg::{int, rat};

    #[test]
    fn rationals() {
        assert_eq!(rational_to_json(&rat(-1, 2)), json!("-1/2"));
        assert_eq!(rational_to_json(&int(3)), json!("3"));
        assert_eq!(rational_from_json(&json!("2/4"), "x").unwrap(), rat(1, 2));
        assert!(matches!(rational_from_json(&json!(0.5), "x"), Err(Error::Schema { .. })));
        assert!(rational_from_json(&json!("1/0"), "x").is_err());
    }

    #[test]
    fn zero_gluing_is_stable() {
        let doc = Document::Gluing(GluingDatum::zero());
        let text = emit(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
        assert_eq!(emit(&parse(&text).unwrap()), text);
    }

    #[test]
    fn nilp_block_roundtrip() {
        let g = GluingDatum::from_psi(PsiDatum::new(BTreeMap::from([(int(0), nilp_block(2))])));
        let doc = Document::Gluing(g);
        assert_eq!(parse(&emit(&doc)).unwrap(), doc);
        let m = Document::Core(CoreData::delta_module());
        assert_eq!(parse(&emit(&m)).unwrap(), m);
    }

    #[test]
    fn alpha_out_of_range() {
        let text = r#"{"kind":"core","version":"1.0.0","payload":{"components":[{"alpha":"1/2","N":{"rows":1,"cols":1,"entries":[["0"]]}}],"u":{"rows":0,"cols":0,"entries":[]},"w":{"rows":0,"cols":0,"entries":[]}}}"#;
        match parse(text) {
            Err(Error::Schema { field, message }) => {
                assert_eq!(message, "alpha out of range");
                assert_eq!(field, "payload.components[0].alpha");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse("{\n  \"kind\": }") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 11)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_version_rejected() {
        let mut v = to_value(&Document::Core(CoreData::zero()));
        v["version"] = json!("2.0.0");
        assert!(matches!(from_value(&v), Err(Error::Schema { field, .. }) if field == "version"));
    }
}
