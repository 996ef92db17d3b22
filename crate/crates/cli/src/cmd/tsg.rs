use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};
use paradox_core::{
    find_equi, json, leq, paradox_to_tsg, properly_infinite, tsg_to_paradox, unperforation_probe, verify_equi,
    verify_leq, EquidecompCert, Error, Model, SearchOutcome, TsgElement,
};
use serde_json::{json, Value};

use super::{not_found, read_set, require_valid};
use crate::io::Inputs;
use crate::{Ctx, Status};

#[derive(Args)]
pub struct Pair {
    #[arg(long)]
    action: String,
    /// Element file: a list of sets, or `{"levels": [...]}`.
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(short = 'r', default_value_t = 2)]
    r: u64,
    #[arg(short = 'p', default_value_t = 6)]
    p: usize,
}

#[derive(Subcommand)]
pub enum TsgCmd {
    /// Bounded search for x ∼ y.
    Equi(Pair),
    /// Bounded search for x ≤ y.
    Leq(Pair),
    /// Bounded search for 2[E] ≤ [E].
    Propinf {
        #[arg(long)]
        action: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(short = 'r', default_value_t = 2)]
        r: u64,
        #[arg(short = 'p', default_value_t = 6)]
        p: usize,
    },
    /// Paradox certificate to a 2[U] ≤ [U] certificate, or back.
    Convert { cert: PathBuf },
    /// Look for n·x ≤ m·y without x ≤ y at the given bounds.
    Probe {
        #[command(flatten)]
        pair: Pair,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'm')]
        m: usize,
    },
    /// Re-check an equidecomposition certificate.
    Verify { cert: PathBuf },
}

fn load_pair(inputs: &mut Inputs, pair: &Pair) -> Result<(Model, TsgElement, TsgElement)> {
    let model = inputs.action(&pair.action)?;
    let x = json::tsg_file(&inputs.file(&pair.x)?, Some(&model))?;
    let y = json::tsg_file(&inputs.file(&pair.y)?, Some(&model))?;
    inputs.param("r", pair.r);
    inputs.param("p", pair.p);
    Ok((model, x, y))
}

fn emit_search(
    ctx: &Ctx,
    inputs: &Inputs,
    model: &Model,
    (x, y, relation): (&TsgElement, &TsgElement, &str),
    out: SearchOutcome<EquidecompCert>,
    (r, p): (u64, usize),
) -> Result<Status> {
    match out {
        SearchOutcome::Found(cert) => {
            ctx.sink.emit("tsg-cert", inputs, json::equi_to_json(model, x, y, relation, &cert))?;
            Ok(Status::Decided)
        }
        SearchOutcome::NotFoundWithinBounds => {
            let mut body = not_found(r, p);
            body["relation"] = json!(relation);
            body["x"] = json::tsg_to_json(x);
            body["y"] = json::tsg_to_json(y);
            ctx.sink.emit("not-found", inputs, body)?;
            Ok(Status::NotFound)
        }
    }
}

fn cert_or_null(model: &Model, x: &TsgElement, y: &TsgElement, c: &Option<EquidecompCert>) -> Value {
    match c {
        Some(c) => json::equi_to_json(model, x, y, "leq", c),
        None => Value::Null,
    }
}

pub fn run(cmd: TsgCmd, ctx: &Ctx) -> Result<Status> {
    let mut inputs = Inputs::new("tsg");
    match cmd {
        TsgCmd::Equi(pair) => {
            let (model, x, y) = load_pair(&mut inputs, &pair)?;
            let out = find_equi(&x, &y, pair.r, pair.p)?;
            emit_search(ctx, &inputs, &model, (&x, &y, "equi"), out, (pair.r, pair.p))
        }
        TsgCmd::Leq(pair) => {
            let (model, x, y) = load_pair(&mut inputs, &pair)?;
            let out = leq(&x, &y, pair.r, pair.p)?;
            emit_search(ctx, &inputs, &model, (&x, &y, "leq"), out, (pair.r, pair.p))
        }
        TsgCmd::Propinf { action, set, r, p } => {
            let model = inputs.action(&action)?;
            let e = read_set(&mut inputs, &model, &set)?;
            inputs.param("r", r);
            inputs.param("p", p);
            let out = properly_infinite(&e, r, p)?;
            let y = TsgElement::single(&e);
            emit_search(ctx, &inputs, &model, (&y.times(2), &y, "leq"), out, (r, p))
        }
        TsgCmd::Convert { cert } => {
            let v = inputs.file(&cert)?;
            if v.get("moves").is_some() {
                let (_, x, y, _, c) = json::equi_from_json(&v)?;
                let pc = tsg_to_paradox(&x, &y, &c)?;
                ctx.sink.emit("paradox-cert", &inputs, json::paradox_to_json(&pc)?)?;
            } else {
                let pc = json::paradox_from_json(&v)?;
                let (x, y, c) = paradox_to_tsg(&pc)?;
                ctx.sink.emit("tsg-cert", &inputs, json::equi_to_json(pc.model(), &x, &y, "leq", &c))?;
            }
            Ok(Status::Decided)
        }
        TsgCmd::Probe { pair, n, m } => {
            let (model, x, y) = load_pair(&mut inputs, &pair)?;
            inputs.param("n", n);
            inputs.param("m", m);
            let rep = unperforation_probe(&x, &y, n, m, pair.r, pair.p)?;
            let body = json!({
                "n": n,
                "m": m,
                "premise": cert_or_null(&model, &x.times(n), &y.times(m), &rep.premise),
                "conclusion": cert_or_null(&model, &x, &y, &rep.conclusion),
                "violation": rep.violation,
                "note": "bounded evidence only: a failed search does not refute x <= y",
            });
            ctx.sink.emit("probe", &inputs, body)?;
            Ok(Status::Decided)
        }
        TsgCmd::Verify { cert } => {
            let (_, x, y, relation, c) = json::equi_from_json(&inputs.file(&cert)?)?;
            let verdict = match relation.as_str() {
                "equi" => verify_equi(&x, &y, &c)?,
                "leq" => verify_leq(&x, &y, &c)?,
                other => return Err(Error::Malformed(format!("unknown relation `{other}`")).into()),
            };
            ctx.sink.emit("verification", &inputs, json!({"verdict": json::verdict_to_json(&verdict)}))?;
            require_valid(&verdict)?;
            Ok(Status::Decided)
        }
    }
}
