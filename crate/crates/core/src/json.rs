//! Canonical JSON forms for every value the CLI reads or writes.
//!
//! Rationals are decimal-free strings (`"3"`, `"-7/2"`). Scalars carry the
//! hex id of their context so chains produced under different context files
//! cannot be silently mixed. Serialization goes through `serde_json::Value`
//! with sorted object keys, so identical inputs produce byte-identical
//! output.

use std::sync::Arc;

use num_traits::One;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::generators::VerificationReport;
use crate::homology::{BarChain, BarTerm, Coeff, CoeffModule, WedgeClass};
use crate::iet::{Iet, Interval};
use crate::polytope::{PtElement, ZRElement};
use crate::rational::{format_q, parse_q, Q};
use crate::rect::{Ret, RetBox};
use crate::scalar::{Scalar, ScalarContext};
use crate::spans::{SubdivisionCertificate, Tuple, Viaduct};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidElement(msg.into())
}

fn obj(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| bad("expected a JSON object"))
}

fn field<'a>(m: &'a Map<String, Value>, k: &str) -> Result<&'a Value> {
    m.get(k).ok_or_else(|| bad(format!("missing field `{k}`")))
}

fn arr(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| bad("expected a JSON array"))
}

fn str_of(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| bad("expected a JSON string"))
}

fn q_of(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Q::from_integer(i.into()))
            } else {
                Err(bad("non-integer JSON numbers are not exact; use \"p/q\""))
            }
        }
        _ => Err(bad("expected a rational as string or integer")),
    }
}

pub fn context_id_string(ctx: &ScalarContext) -> String {
    format!("{:016x}", ctx.id())
}

pub fn context_to_json(ctx: &ScalarContext) -> Value {
    json!({
        "basis": ctx
            .basis()
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "guard": [format_q(&e.guard.0), format_q(&e.guard.1)],
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn context_from_json(v: &Value) -> Result<Arc<ScalarContext>> {
    let m = obj(v)?;
    let mut basis = Vec::new();
    for entry in arr(field(m, "basis")?)? {
        let e = obj(entry)?;
        let name = str_of(field(e, "name")?)?.to_string();
        let guard = arr(field(e, "guard")?)?;
        if guard.len() != 2 {
            return Err(bad("guard must be a two-element array"));
        }
        basis.push((name, (q_of(&guard[0])?, q_of(&guard[1])?)));
    }
    ScalarContext::new(basis)
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    json!({
        "ctx": context_id_string(s.context()),
        "coeffs": s.coeffs().iter().map(|c| Value::String(format_q(c))).collect::<Vec<_>>(),
    })
}

pub fn scalar_from_json(v: &Value, ctx: &Arc<ScalarContext>) -> Result<Scalar> {
    let m = obj(v)?;
    let id = str_of(field(m, "ctx")?)?;
    if id != context_id_string(ctx) {
        return Err(Error::ContextMismatch);
    }
    let coeffs = arr(field(m, "coeffs")?)?
        .iter()
        .map(q_of)
        .collect::<Result<Vec<_>>>()?;
    Scalar::from_coeffs(ctx, coeffs)
}

fn jump_to_json(j: &Q) -> Value {
    if j.denom().is_one() {
        if let Ok(i) = i64::try_from(j.numer().clone()) {
            return json!(i);
        }
    }
    Value::String(format_q(j))
}

pub fn pt_to_json(x: &PtElement) -> Value {
    json!({
        "steps": x
            .steps()
            .iter()
            .map(|(s, j)| json!({"x": scalar_to_json(s), "jump": jump_to_json(j)}))
            .collect::<Vec<_>>(),
    })
}

pub fn pt_from_json(v: &Value, ctx: &Arc<ScalarContext>) -> Result<PtElement> {
    let m = obj(v)?;
    let steps = arr(field(m, "steps")?)?
        .iter()
        .map(|e| {
            let e = obj(e)?;
            Ok((
                scalar_from_json(field(e, "x")?, ctx)?,
                q_of(field(e, "jump")?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    PtElement::from_steps(ctx, steps)
}

pub fn zr_to_json(z: &ZRElement) -> Value {
    json!({
        "terms": z
            .terms()
            .iter()
            .map(|(s, c)| json!({"r": scalar_to_json(s), "c": format_q(c)}))
            .collect::<Vec<_>>(),
    })
}

pub fn zr_from_json(v: &Value, ctx: &Arc<ScalarContext>) -> Result<ZRElement> {
    let m = obj(v)?;
    let terms = arr(field(m, "terms")?)?
        .iter()
        .map(|e| {
            let e = obj(e)?;
            Ok((
                scalar_from_json(field(e, "r")?, ctx)?,
                q_of(field(e, "c")?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    ZRElement::from_terms(ctx, terms)
}

pub fn iet_to_json(f: &Iet) -> Value {
    json!({
        "L": scalar_to_json(f.length()),
        "pieces": f
            .pieces()
            .iter()
            .map(|(x, off)| json!({"x": scalar_to_json(x), "offset": scalar_to_json(off)}))
            .collect::<Vec<_>>(),
    })
}

pub fn iet_from_json(v: &Value, ctx: &Arc<ScalarContext>) -> Result<Iet> {
    let m = obj(v)?;
    let length = scalar_from_json(field(m, "L")?, ctx)?;
    let pieces = arr(field(m, "pieces")?)?
        .iter()
        .map(|e| {
            let e = obj(e)?;
            Ok((
                scalar_from_json(field(e, "x")?, ctx)?,
                scalar_from_json(field(e, "offset")?, ctx)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Iet::from_pieces(&length, pieces)
}

fn coeff_to_json(c: &Coeff) -> Value {
    match c {
        Coeff::R(s) => scalar_to_json(s),
        Coeff::ZR(z) => zr_to_json(z),
        Coeff::Pt(x) => pt_to_json(x),
    }
}

pub fn bar_chain_to_json(c: &BarChain) -> Value {
    json!({
        "degree": c.degree(),
        "module": c.module().tag(),
        "terms": c
            .terms()
            .iter()
            .map(|t| {
                json!({
                    "word": t.word.iter().map(scalar_to_json).collect::<Vec<_>>(),
                    "coeff": coeff_to_json(&t.coeff),
                    "w": "1",
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn bar_chain_from_json(v: &Value, ctx: &Arc<ScalarContext>) -> Result<BarChain> {
    let m = obj(v)?;
    let degree = field(m, "degree")?
        .as_u64()
        .ok_or_else(|| bad("degree must be a nonneg integer"))? as usize;
    let module = match str_of(field(m, "module")?)? {
        "R" => CoeffModule::TrivialR,
        "ZR" => CoeffModule::ZR,
        "PT" => CoeffModule::Pt,
        other => return Err(bad(format!("unknown module tag `{other}`"))),
    };
    let terms = arr(field(m, "terms")?)?
        .iter()
        .map(|e| {
            let e = obj(e)?;
            let word = arr(field(e, "word")?)?
                .iter()
                .map(|w| scalar_from_json(w, ctx))
                .collect::<Result<Vec<_>>>()?;
            let weight = q_of(field(e, "w")?)?;
            let coeff = match module {
                CoeffModule::TrivialR => Coeff::R(scalar_from_json(field(e, "coeff")?, ctx)?),
                CoeffModule::ZR => Coeff::ZR(zr_from_json(field(e, "coeff")?, ctx)?),
                CoeffModule::Pt => Coeff::Pt(pt_from_json(field(e, "coeff")?, ctx)?),
            };
            Ok(BarTerm {
                word,
                coeff: match weight.is_one() {
                    true => coeff,
                    false => match &coeff {
                        Coeff::R(s) => Coeff::R(s.scale(&weight)),
                        Coeff::ZR(z) => Coeff::ZR(z.scale(&weight)),
                        Coeff::Pt(x) => Coeff::Pt(crate::polytope::pt_scale(&weight, x)),
                    },
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    BarChain::from_terms(ctx, degree, module, terms)
}

pub fn wedge_class_to_json(w: &WedgeClass) -> Value {
    let names: Vec<&str> = w
        .context()
        .basis()
        .iter()
        .map(|e| e.name.as_str())
        .collect();
    json!({
        "degree": w.degree(),
        "terms": w
            .terms()
            .iter()
            .map(|((word, ci), weight)| {
                json!({
                    "wedge": word.iter().map(|b| names[*b]).collect::<Vec<_>>(),
                    "coeff": names[*ci],
                    "w": format_q(weight),
                })
            })
            .collect::<Vec<_>>(),
    })
}

fn interval_to_json(iv: &Interval) -> Value {
    json!({"lo": scalar_to_json(&iv.lo), "hi": scalar_to_json(&iv.hi)})
}

pub fn tuple_to_json(t: &Tuple) -> Value {
    json!({
        "items": t
            .items()
            .iter()
            .map(|(i, iv)| json!({"index": i, "interval": interval_to_json(iv)}))
            .collect::<Vec<_>>(),
    })
}

fn span_morphism_to_json(m: &crate::spans::SpanMorphism) -> Value {
    json!({
        "source": tuple_to_json(m.source()),
        "target": tuple_to_json(m.target()),
        "index_map": m
            .index_map()
            .iter()
            .map(|(i, j)| json!([i, j]))
            .collect::<Vec<_>>(),
        "translations": m
            .translations()
            .iter()
            .map(|(i, t)| json!({"index": i, "t": scalar_to_json(t)}))
            .collect::<Vec<_>>(),
    })
}

pub fn viaduct_to_json(v: &Viaduct) -> Value {
    json!({
        "length": scalar_to_json(v.length()),
        "pieces": tuple_to_json(v.top()),
        "levels": (1..=v.m())
            .map(|k| {
                v.level(k)
                    .iter()
                    .map(|(j, t)| json!({"piece": j, "g": scalar_to_json(t)}))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
        "bottoms": v.bottoms().iter().map(tuple_to_json).collect::<Vec<_>>(),
        "subcovers": v
            .subcovers()
            .iter()
            .map(|c| span_morphism_to_json(c.as_morphism()))
            .collect::<Vec<_>>(),
    })
}

/// Serializes the full commuting diagram of a subdivision certificate for
/// external audit.
pub fn certificate_to_json(c: &SubdivisionCertificate) -> Value {
    json!({
        "subdivision": tuple_to_json(&c.sub),
        "moved_subdivision": tuple_to_json(&c.moved_sub),
        "move": span_morphism_to_json(c.mv.as_morphism()),
        "to_middle_right": [
            span_morphism_to_json(c.to_middle_right.0.as_morphism()),
            span_morphism_to_json(c.to_middle_right.1.as_morphism()),
        ],
        "to_middle_left": [
            span_morphism_to_json(c.to_middle_left.0.as_morphism()),
            span_morphism_to_json(c.to_middle_left.1.as_morphism()),
        ],
    })
}

fn ret_box_to_json(b: &RetBox) -> Value {
    json!({
        "lo": b.lo.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "hi": b.hi.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "v": b.shift.iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn ret_to_json(r: &Ret) -> Value {
    json!({
        "dims": r.dims(),
        "boxes": r.boxes().iter().map(ret_box_to_json).collect::<Vec<_>>(),
    })
}

pub fn report_to_json(r: &VerificationReport, emit_chain: bool) -> Value {
    let mut m = Map::new();
    m.insert(
        "lengths".to_string(),
        Value::Array(r.lengths.iter().map(scalar_to_json).collect()),
    );
    m.insert("cycle".to_string(), json!(r.cycle_ok));
    m.insert("verdict".to_string(), json!(r.verdict.to_string()));
    let sign = match r.verdict {
        crate::generators::Verdict::Equal(s) => json!(s),
        _ => Value::Null,
    };
    m.insert("sign".to_string(), sign);
    m.insert(
        "computed".to_string(),
        r.computed
            .as_ref()
            .map(wedge_class_to_json)
            .unwrap_or(Value::Null),
    );
    m.insert(
        "expected".to_string(),
        r.expected
            .as_ref()
            .map(wedge_class_to_json)
            .unwrap_or(Value::Null),
    );
    if emit_chain {
        m.insert(
            "chain".to_string(),
            r.chain
                .as_ref()
                .map(bar_chain_to_json)
                .unwrap_or(Value::Null),
        );
    }
    m.insert(
        "elapsed_us".to_string(),
        json!(r.elapsed.as_micros() as u64),
    );
    Value::Object(m)
}
