use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::Subcommand;
use paradox_core::{
    build_witness, catalog, expectation_sides, extract_paradox, json, random, trace_check, verify_witness, CpElement,
    Error, Model,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{read_set, require_valid};
use crate::io::{Inputs, ParseError};
use crate::{Ctx, Status};

#[derive(Subcommand)]
pub enum CpCmd {
    /// Product of two elements.
    Mul {
        #[arg(long)]
        action: Option<String>,
        a: PathBuf,
        b: PathBuf,
    },
    /// Coefficient at the identity.
    Expect {
        #[arg(long)]
        action: Option<String>,
        x: PathBuf,
    },
    /// Isometries x, y from a paradoxical decomposition.
    WitnessBuild { cert: PathBuf },
    /// Check x*x = y*y = 1_U, y*x = 0 and xx* + yy* ≤ 1_U.
    WitnessVerify {
        witness: PathBuf,
        /// U, if the witness file does not carry it.
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Read a paradoxical decomposition off a witness.
    WitnessExtract {
        witness: PathBuf,
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Both expectation identities for one element or for random ones.
    #[command(name = "lemma52")]
    Identities {
        /// Number of random elements per action.
        #[arg(long)]
        random: Option<usize>,
        /// Actions to draw from; defaults to the free group on its boundary and on itself.
        #[arg(long)]
        action: Vec<String>,
        /// A single element file instead.
        #[arg(long)]
        element: Option<PathBuf>,
    },
    /// φ(x*x) = φ(xx*) under the measure of a feasible `measure lp` result.
    TraceCheck {
        measure: PathBuf,
        samples: Option<PathBuf>,
        /// Random samples instead of a samples file.
        #[arg(long)]
        random: Option<usize>,
    },
}

fn element(inputs: &mut Inputs, action: Option<&str>, path: &Path) -> Result<(Model, CpElement)> {
    let v = inputs.file(path)?;
    let model = inputs.model_for(action, &v)?;
    let x = json::cp_from_json(&model, &v)?;
    Ok((model, x))
}

fn load_witness(
    inputs: &mut Inputs,
    witness: &Path,
    set: &Option<PathBuf>,
) -> Result<(paradox_core::ClopenSet, CpElement, CpElement)> {
    let (model, u, x, y) = json::witness_from_json(&inputs.file(witness)?)?;
    let u = match (set, u) {
        (Some(p), _) => read_set(inputs, &model, p)?,
        (None, Some(u)) => u,
        (None, None) => return Err(anyhow!(ParseError("witness has no domain; pass --set".into()))),
    };
    Ok((u, x, y))
}

pub fn run(cmd: CpCmd, ctx: &Ctx) -> Result<Status> {
    let mut inputs = Inputs::new("cp");
    match cmd {
        CpCmd::Mul { action, a, b } => {
            let (model, x) = element(&mut inputs, action.as_deref(), &a)?;
            let (model_b, y) = element(&mut inputs, action.as_deref(), &b)?;
            if model != model_b {
                return Err(Error::ModelMismatch.into());
            }
            let mut body = json::cp_to_json(&x.mul(&y)?);
            body["action"] = json::model_to_json(&model);
            ctx.sink.emit("cp-element", &inputs, body)?;
        }
        CpCmd::Expect { action, x } => {
            let (model, x) = element(&mut inputs, action.as_deref(), &x)?;
            let mut body = json::simple_to_json(&x.cond_expectation());
            body["action"] = json::model_to_json(&model);
            ctx.sink.emit("simple-function", &inputs, body)?;
        }
        CpCmd::WitnessBuild { cert } => {
            let c = json::paradox_from_json(&inputs.file(&cert)?)?;
            let (x, y) = build_witness(&c)?;
            ctx.sink.emit("witness", &inputs, json::witness_to_json(&c.domain, &x, &y))?;
        }
        CpCmd::WitnessVerify { witness, set } => {
            let (u, x, y) = load_witness(&mut inputs, &witness, &set)?;
            let verdict = verify_witness(&x, &y, &u)?;
            ctx.sink.emit("verification", &inputs, json!({"verdict": json::verdict_to_json(&verdict)}))?;
            require_valid(&verdict)?;
        }
        CpCmd::WitnessExtract { witness, set } => {
            let (u, x, y) = load_witness(&mut inputs, &witness, &set)?;
            let cert = extract_paradox(&x, &y, &u)?;
            ctx.sink.emit("paradox-cert", &inputs, json::paradox_to_json(&cert)?)?;
        }
        CpCmd::Identities { random: count, action, element: file } => {
            if let Some(path) = file {
                let (_, x) = element(&mut inputs, action.first().map(String::as_str), &path)?;
                let sides = expectation_sides(&x)?;
                let body = json!({
                    "holds": sides.holds(),
                    "E(xx*)": json::simple_to_json(&sides.e_xxs),
                    "sum x_t x_t*": json::simple_to_json(&sides.sum_sq),
                    "E(x*x)": json::simple_to_json(&sides.e_xsx),
                    "sum t^-1.(x_t* x_t)": json::simple_to_json(&sides.sum_translated_sq),
                });
                ctx.sink.emit("expectation-identities", &inputs, body)?;
                if !sides.holds() {
                    return Err(Error::Unverified("expectation identity fails".into()).into());
                }
                return Ok(Status::Decided);
            }
            let n = count.ok_or_else(|| anyhow!(ParseError("give --random N or --element FILE".into())))?;
            let models = if action.is_empty() {
                vec![catalog::f2_boundary(), catalog::f2_self()]
            } else {
                action.iter().map(|a| inputs.action(a)).collect::<Result<Vec<_>>>()?
            };
            inputs.param("random", n);
            inputs.param("seed", ctx.seed);
            let mut reports = Vec::new();
            let mut failures = 0;
            for model in &models {
                let bad: Vec<u64> = (0..n as u64)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = random::rng(ctx.seed.wrapping_add(i));
                        let x = random::element(model, &mut rng, 4, 2);
                        expectation_sides(&x).map(|s| (i, s.holds()))
                    })
                    .collect::<paradox_core::Result<Vec<_>>>()?
                    .into_iter()
                    .filter(|(_, ok)| !ok)
                    .map(|(i, _)| i)
                    .collect();
                failures += bad.len();
                reports.push(json!({"action": json::model_to_json(model), "checked": n, "failing_indices": bad}));
            }
            ctx.sink.emit("expectation-identities", &inputs, json!({"seed": ctx.seed, "runs": reports}))?;
            if failures > 0 {
                return Err(Error::Unverified(format!("{failures} counterexamples")).into());
            }
        }
        CpCmd::TraceCheck { measure, samples, random: count } => {
            let v = inputs.file(&measure)?;
            let inst_json = v.get("instance").ok_or_else(|| Error::Malformed("not an lp result".into()))?;
            let model = json::model_from_json(
                inst_json.get("action").ok_or_else(|| Error::Malformed("instance has no action".into()))?,
            )?;
            if v.get("outcome").and_then(Value::as_str) != Some("feasible") {
                return Err(Error::Malformed("trace check needs a feasible measure".into()).into());
            }
            let cert = v.get("certificate").ok_or_else(|| Error::Malformed("missing certificate".into()))?;
            let mt = json::measure_from_json(&model, cert)?;
            let elems: Vec<CpElement> = match (samples, count) {
                (Some(path), _) => {
                    let s = inputs.file(&path)?;
                    let list = s.get("samples").unwrap_or(&s);
                    list.as_array()
                        .ok_or_else(|| Error::Malformed("samples must be a list".into()))?
                        .iter()
                        .map(|e| json::cp_from_json(&model, e))
                        .collect::<paradox_core::Result<_>>()?
                }
                (None, Some(n)) => {
                    inputs.param("random", n);
                    inputs.param("seed", ctx.seed);
                    let mut rng = random::rng(ctx.seed);
                    (0..n).map(|_| random::element(&model, &mut rng, 3, 1)).collect()
                }
                (None, None) => return Err(anyhow!(ParseError("give a samples file or --random N".into()))),
            };
            let verdict = trace_check(&mt, &elems)?;
            let body = json!({"samples": elems.len(), "verdict": json::verdict_to_json(&verdict)});
            ctx.sink.emit("trace-check", &inputs, body)?;
            require_valid(&verdict)?;
        }
    }
    Ok(Status::Decided)
}
