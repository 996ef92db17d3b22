//! JSON forms of every artifact. Words and rationals are strings
//! (`"a^-1 b^2"`, `"e"`, `"3/4"`).
//!
//! Clopen sets are literals, `{"cyl": [...]}` on the boundary or
//! `{"depth": d, "cones": [...], "points": [...]}` in the self action, or
//! expressions `{"op": "union" | "intersect" | "diff" | "complement" |
//! "translate" | "full" | "empty", "args": [...], "by": word}`.

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::clopen::{ActionKind, ActionModel, ClopenSet, Model};
use crate::cp::{CpElement, SimpleFunction};
use crate::error::{Error, Result, Verdict};
use crate::group::{GroupSpec, PartitionCert, Word};
use crate::measure::{FarkasCert, LpInstance, MeasureTable};
use crate::paradox::{DoublingReport, ParadoxCert, Piece};
use crate::tsg::{EquidecompCert, Move, TsgElement};

pub const SCHEMA: &str = "pdx/1";

fn malformed(what: impl Into<String>) -> Error {
    Error::Malformed(what.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| malformed(format!("missing field `{key}`")))
}

fn str_of<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| malformed(format!("{what} must be a string")))
}

fn array_of<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| malformed(format!("{what} must be an array")))
}

fn usize_of(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| malformed(format!("{what} must be a nonnegative integer")))
}

pub fn rational_to_json(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn rational_from_json(v: &Value) -> Result<BigRational> {
    let s = str_of(v, "rational")?;
    s.trim().parse::<BigRational>().map_err(|_| malformed(format!("bad rational `{s}`")))
}

pub fn word_to_json(spec: &GroupSpec, w: &Word) -> Value {
    Value::String(spec.format_word(w))
}

pub fn word_from_json(spec: &GroupSpec, v: &Value) -> Result<Word> {
    spec.parse_word(str_of(v, "word")?)
}

pub fn words_from_json(spec: &GroupSpec, v: &Value) -> Result<Vec<Word>> {
    let items = match v.get("words") {
        Some(inner) => inner,
        None => v,
    };
    array_of(items, "word list")?.iter().map(|w| word_from_json(spec, w)).collect()
}

pub fn words_to_json(spec: &GroupSpec, ws: &[Word]) -> Value {
    Value::Array(ws.iter().map(|w| word_to_json(spec, w)).collect())
}

pub fn group_to_json(spec: &GroupSpec) -> Value {
    serde_json::to_value(spec).expect("group spec serialises")
}

pub fn group_from_json(v: &Value) -> Result<GroupSpec> {
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidGroup(e.to_string()))
}

pub fn model_to_json(model: &Model) -> Value {
    let kind = match model.kind() {
        ActionKind::Boundary => "boundary",
        ActionKind::SelfAction => "self",
    };
    json!({"kind": kind, "group": group_to_json(model.spec())})
}

pub fn model_from_json(v: &Value) -> Result<Model> {
    let kind = match str_of(field(v, "kind")?, "kind")? {
        "boundary" => ActionKind::Boundary,
        "self" => ActionKind::SelfAction,
        other => return Err(malformed(format!("unknown action kind `{other}`"))),
    };
    ActionModel::new(group_from_json(field(v, "group")?)?, kind)
}

/// Canonical literal.
pub fn set_to_json(s: &ClopenSet) -> Value {
    let spec = s.model().spec();
    match s.cone_parts() {
        None => json!({"cyl": words_to_json(spec, &s.cylinder_words())}),
        Some((depth, cones, points)) => json!({
            "depth": depth,
            "cones": words_to_json(spec, &cones),
            "points": words_to_json(spec, &points),
        }),
    }
}

pub fn set_from_json(model: &Model, v: &Value) -> Result<ClopenSet> {
    let spec = model.spec();
    if let Some(op) = v.get("op") {
        let args = match v.get("args") {
            Some(a) => array_of(a, "args")?.iter().map(|x| set_from_json(model, x)).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let one = |name: &str| -> Result<&ClopenSet> {
            match args.as_slice() {
                [a] => Ok(a),
                _ => Err(malformed(format!("`{name}` takes one argument"))),
            }
        };
        return match str_of(op, "op")? {
            "full" => Ok(ClopenSet::full(model)),
            "empty" => Ok(ClopenSet::empty(model)),
            "union" => ClopenSet::union_all(model, &args),
            "intersect" => args.iter().try_fold(ClopenSet::full(model), |acc, s| acc.intersect(s)),
            "diff" => match args.as_slice() {
                [a, rest @ ..] => rest.iter().try_fold(a.clone(), |acc, s| acc.difference(s)),
                [] => Err(malformed("`diff` needs at least one argument")),
            },
            "complement" => Ok(one("complement")?.complement()),
            "translate" => Ok(one("translate")?.translate(&word_from_json(spec, field(v, "by")?)?)),
            other => Err(malformed(format!("unknown set operation `{other}`"))),
        };
    }
    if let Some(cyl) = v.get("cyl") {
        return ClopenSet::cylinders(model, &words_from_json(spec, cyl)?);
    }
    if v.get("cones").is_some() || v.get("points").is_some() {
        let list = |key: &str| -> Result<Vec<Word>> {
            match v.get(key) {
                Some(x) => words_from_json(spec, x),
                None => Ok(Vec::new()),
            }
        };
        return ClopenSet::cones_and_points(model, &list("cones")?, &list("points")?);
    }
    Err(malformed("not a clopen set literal or expression"))
}

/// A set file: either a bare set, or `{"action": ..., "set": ...}`.
pub fn set_file(v: &Value, model: Option<&Model>) -> Result<ClopenSet> {
    let model = embedded_model(v, model)?;
    set_from_json(&model, v.get("set").unwrap_or(v))
}

/// A family file: an array of sets, or `{"action": ..., "sets": [...]}`.
pub fn family_file(v: &Value, model: Option<&Model>) -> Result<Vec<ClopenSet>> {
    let model = embedded_model(v, model)?;
    let items = v.get("sets").unwrap_or(v);
    array_of(items, "family")?.iter().map(|s| set_from_json(&model, s)).collect()
}

fn embedded_model(v: &Value, given: Option<&Model>) -> Result<Model> {
    match (v.get("action"), given) {
        (Some(a), Some(m)) => {
            let inner = model_from_json(a)?;
            if inner != *m {
                return Err(Error::ModelMismatch);
            }
            Ok(inner)
        }
        (Some(a), None) => model_from_json(a),
        (None, Some(m)) => Ok(m.clone()),
        (None, None) => Err(malformed("no action model given")),
    }
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    match v {
        Verdict::Valid => json!({"valid": true}),
        Verdict::Invalid(why) => json!({"valid": false, "reason": why}),
    }
}

pub fn paradox_to_json(cert: &ParadoxCert) -> Result<Value> {
    let spec = cert.model().spec();
    let (verdict, transcript) = cert.check()?;
    let pieces: Vec<Value> = cert
        .pieces
        .iter()
        .map(|p| json!({"set": set_to_json(&p.set), "translator": word_to_json(spec, &p.translator)}))
        .collect();
    Ok(json!({
        "action": model_to_json(cert.model()),
        "domain": set_to_json(&cert.domain),
        "split": cert.split,
        "pieces": pieces,
        "verification": {"verdict": verdict_to_json(&verdict), "transcript": transcript},
    }))
}

pub fn paradox_from_json(v: &Value) -> Result<ParadoxCert> {
    let model = model_from_json(field(v, "action")?)?;
    let spec = model.spec();
    let domain = set_from_json(&model, field(v, "domain")?)?;
    let pieces = array_of(field(v, "pieces")?, "pieces")?
        .iter()
        .map(|p| {
            Ok(Piece {
                set: set_from_json(&model, field(p, "set")?)?,
                translator: word_from_json(spec, field(p, "translator")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let split = usize_of(field(v, "split")?, "split")?;
    Ok(ParadoxCert { domain, pieces, split })
}

pub fn tsg_to_json(x: &TsgElement) -> Value {
    json!({"levels": x.levels().iter().map(set_to_json).collect::<Vec<_>>()})
}

pub fn tsg_from_json(model: &Model, v: &Value) -> Result<TsgElement> {
    let items = v.get("levels").unwrap_or(v);
    let sets = array_of(items, "levels")?.iter().map(|s| set_from_json(model, s)).collect::<Result<Vec<_>>>()?;
    TsgElement::new(model, sets)
}

/// An element file: a bare list of sets, or `{"action": ..., "levels": [...]}`.
pub fn tsg_file(v: &Value, model: Option<&Model>) -> Result<TsgElement> {
    let model = embedded_model(v, model)?;
    tsg_from_json(&model, v)
}

pub fn equi_to_json(model: &Model, x: &TsgElement, y: &TsgElement, relation: &str, cert: &EquidecompCert) -> Value {
    let spec = model.spec();
    let moves: Vec<Value> = cert
        .moves
        .iter()
        .map(|m| {
            json!({
                "piece": set_to_json(&m.piece),
                "source": m.source,
                "translator": word_to_json(spec, &m.translator),
                "target": m.target,
            })
        })
        .collect();
    json!({
        "action": model_to_json(model),
        "relation": relation,
        "x": tsg_to_json(x),
        "y": tsg_to_json(y),
        "moves": moves,
    })
}

/// `(model, x, y, relation, cert)`.
pub fn equi_from_json(v: &Value) -> Result<(Model, TsgElement, TsgElement, String, EquidecompCert)> {
    let model = model_from_json(field(v, "action")?)?;
    let spec = model.spec();
    let x = tsg_from_json(&model, field(v, "x")?)?;
    let y = tsg_from_json(&model, field(v, "y")?)?;
    let relation = str_of(field(v, "relation")?, "relation")?.to_string();
    let moves = array_of(field(v, "moves")?, "moves")?
        .iter()
        .map(|m| {
            Ok(Move {
                piece: set_from_json(&model, field(m, "piece")?)?,
                source: usize_of(field(m, "source")?, "source")?,
                translator: word_from_json(spec, field(m, "translator")?)?,
                target: usize_of(field(m, "target")?, "target")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((model, x, y, relation, EquidecompCert { moves }))
}

pub fn simple_to_json(f: &SimpleFunction) -> Value {
    let pieces: Vec<Value> =
        f.pieces().map(|(s, v)| json!({"set": set_to_json(s), "val": rational_to_json(v)})).collect();
    json!({"pieces": pieces})
}

pub fn simple_from_json(model: &Model, v: &Value) -> Result<SimpleFunction> {
    let pieces = array_of(field(v, "pieces")?, "pieces")?
        .iter()
        .map(|p| Ok((set_from_json(model, field(p, "set")?)?, rational_from_json(field(p, "val")?)?)))
        .collect::<Result<Vec<_>>>()?;
    SimpleFunction::from_pieces(model, pieces)
}

pub fn cp_to_json(x: &CpElement) -> Value {
    let spec = x.model().spec();
    let terms: Vec<Value> =
        x.terms().map(|(t, a)| json!({"t": word_to_json(spec, t), "coef": simple_to_json(a)})).collect();
    json!({"terms": terms})
}

pub fn cp_from_json(model: &Model, v: &Value) -> Result<CpElement> {
    let spec = model.spec();
    let terms = array_of(field(v, "terms")?, "terms")?
        .iter()
        .map(|t| Ok((word_from_json(spec, field(t, "t")?)?, simple_from_json(model, field(t, "coef")?)?)))
        .collect::<Result<Vec<_>>>()?;
    CpElement::from_terms(model, terms)
}

pub fn witness_to_json(u: &ClopenSet, x: &CpElement, y: &CpElement) -> Value {
    json!({
        "action": model_to_json(u.model()),
        "domain": set_to_json(u),
        "x": cp_to_json(x),
        "y": cp_to_json(y),
    })
}

/// `(U, x, y)`; `U` may be absent and supplied separately.
pub fn witness_from_json(v: &Value) -> Result<(Model, Option<ClopenSet>, CpElement, CpElement)> {
    let model = model_from_json(field(v, "action")?)?;
    let u = match v.get("domain") {
        Some(d) => Some(set_from_json(&model, d)?),
        None => None,
    };
    let x = cp_from_json(&model, field(v, "x")?)?;
    let y = cp_from_json(&model, field(v, "y")?)?;
    Ok((model, u, x, y))
}

pub fn lp_instance_to_json(inst: &LpInstance) -> Value {
    json!({
        "action": model_to_json(inst.model()),
        "family": inst.family().iter().map(set_to_json).collect::<Vec<_>>(),
        "translators": words_to_json(inst.model().spec(), inst.translators()),
        "normalize": set_to_json(inst.normalize()),
        "target": rational_to_json(inst.target()),
    })
}

pub fn lp_instance_from_json(v: &Value) -> Result<LpInstance> {
    let model = model_from_json(field(v, "action")?)?;
    let family = array_of(field(v, "family")?, "family")?
        .iter()
        .map(|s| set_from_json(&model, s))
        .collect::<Result<Vec<_>>>()?;
    let translators = words_from_json(model.spec(), field(v, "translators")?)?;
    let normalize = set_from_json(&model, field(v, "normalize")?)?;
    let target = match v.get("target") {
        Some(t) => rational_from_json(t)?,
        None => BigRational::from_integer(1.into()),
    };
    LpInstance::build(family, translators, normalize, target, crate::measure::DEFAULT_ATOM_CAP)
}

pub fn measure_to_json(mt: &MeasureTable) -> Value {
    json!({
        "atoms": mt.atoms.iter().map(set_to_json).collect::<Vec<_>>(),
        "values": mt.values.iter().map(rational_to_json).collect::<Vec<_>>(),
    })
}

pub fn measure_from_json(model: &Model, v: &Value) -> Result<MeasureTable> {
    let atoms =
        array_of(field(v, "atoms")?, "atoms")?.iter().map(|s| set_from_json(model, s)).collect::<Result<Vec<_>>>()?;
    let values = array_of(field(v, "values")?, "values")?.iter().map(rational_from_json).collect::<Result<Vec<_>>>()?;
    Ok(MeasureTable { atoms, values })
}

pub fn farkas_to_json(inst: &LpInstance, fc: &FarkasCert) -> Value {
    let rows: Vec<Value> = inst
        .constraints()
        .iter()
        .zip(&fc.multipliers)
        .map(|(c, y)| json!({"constraint": c.label, "multiplier": rational_to_json(y)}))
        .collect();
    json!({"multipliers": rows})
}

pub fn farkas_from_json(v: &Value) -> Result<FarkasCert> {
    let multipliers = array_of(field(v, "multipliers")?, "multipliers")?
        .iter()
        .map(|m| rational_from_json(m.get("multiplier").unwrap_or(m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FarkasCert { multipliers })
}

pub fn partition_to_json(spec: &GroupSpec, p: &PartitionCert) -> Value {
    let classes: Vec<Value> =
        p.classes.iter().map(|(w, c)| json!({"word": word_to_json(spec, w), "color": c})).collect();
    json!({
        "group": group_to_json(spec),
        "t": word_to_json(spec, &p.t),
        "radius": p.radius,
        "colors": p.colors,
        "rule": p.rule,
        "classes": classes,
    })
}

pub fn partition_from_json(v: &Value) -> Result<(GroupSpec, PartitionCert)> {
    let spec = group_from_json(field(v, "group")?)?;
    let classes = array_of(field(v, "classes")?, "classes")?
        .iter()
        .map(|c| {
            let color = usize_of(field(c, "color")?, "color")?;
            Ok((
                word_from_json(&spec, field(c, "word")?)?,
                u8::try_from(color).map_err(|_| malformed("colour too large"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let cert = PartitionCert {
        t: word_from_json(&spec, field(v, "t")?)?,
        radius: field(v, "radius")?.as_u64().ok_or_else(|| malformed("radius must be an integer"))?,
        colors: u8::try_from(usize_of(field(v, "colors")?, "colors")?).map_err(|_| malformed("too many colours"))?,
        rule: str_of(field(v, "rule")?, "rule")?.to_string(),
        classes,
    };
    Ok((spec, cert))
}

pub fn doubling_to_json(spec: &GroupSpec, rep: &DoublingReport) -> Value {
    json!({
        "window": rep.window,
        "flow": rep.flow,
        "slack": rep.slack,
        "empty": rep.empty,
        "witness": words_to_json(spec, &rep.witness),
        "witness_neighbourhood": rep.witness_neighbourhood,
    })
}

/// Wraps a document body with the schema tag, a kind, and the hash of the inputs.
pub fn envelope(kind: &str, inputs_sha256: &str, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), Value::String(SCHEMA.into()));
    out.insert("kind".into(), Value::String(kind.into()));
    out.insert("inputs_sha256".into(), Value::String(inputs_sha256.into()));
    match body {
        Value::Object(m) => out.extend(m),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialise");
    s.push('\n');
    s
}
