use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::Subcommand;
use paradox_core::{
    catalog, check_farkas, check_measure, json, lp_feasibility, Error, LpInstance, LpOutcome, Model, Verdict,
};
use serde_json::{json, Value};

use super::{read_set, require_valid};
use crate::io::{Inputs, ParseError};
use crate::{Ctx, Status};

#[derive(Subcommand)]
pub enum MeasureCmd {
    /// Decide whether an invariant measure exists on the window; prints a
    /// measure table or a Farkas certificate.
    Lp {
        #[arg(long)]
        action: Option<String>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        translators: Option<PathBuf>,
        #[arg(long)]
        normalize: Option<PathBuf>,
        /// Mass of the normalising set.
        #[arg(long, default_value = "1")]
        target: String,
        /// A whole instance file instead of the four parts.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Shortcut: depth-r cells of the whole space, translators ball(r).
        #[arg(long)]
        window: Option<u64>,
        #[arg(long, default_value_t = paradox_core::measure::DEFAULT_ATOM_CAP)]
        cap: usize,
    },
    /// Re-check the certificate inside an `lp` result.
    Check { result: PathBuf },
}

pub fn result_body(inst: &LpInstance, out: &LpOutcome) -> Value {
    let (outcome, cert) = match out {
        LpOutcome::Feasible(mt) => ("feasible", json::measure_to_json(mt)),
        LpOutcome::Infeasible(fc) => ("infeasible", json::farkas_to_json(inst, fc)),
    };
    json!({
        "instance": json::lp_instance_to_json(inst),
        "outcome": outcome,
        "atoms": inst.atoms().iter().map(|a| a.describe()).collect::<Vec<_>>(),
        "certificate": cert,
    })
}

fn model_of(inputs: &mut Inputs, action: &Option<String>) -> Result<Model> {
    let a = action.as_deref().ok_or_else(|| anyhow!(ParseError("--action is required here".into())))?;
    inputs.action(a)
}

pub fn run(cmd: MeasureCmd, ctx: &Ctx) -> Result<Status> {
    let mut inputs = Inputs::new("measure");
    match cmd {
        MeasureCmd::Lp { action, family, translators, normalize, target, instance, window, cap } => {
            let inst = match (instance, window) {
                (Some(path), _) => json::lp_instance_from_json(&inputs.file(&path)?)?,
                (None, Some(r)) => {
                    let model = model_of(&mut inputs, &action)?;
                    inputs.param("window", r);
                    catalog::window_lp(&model, r)?
                }
                (None, None) => {
                    let model = model_of(&mut inputs, &action)?;
                    let need = |p: Option<PathBuf>, name: &str| {
                        p.ok_or_else(|| anyhow!(ParseError(format!("--{name} is required"))))
                    };
                    let fam = json::family_file(&inputs.file(&need(family, "family")?)?, Some(&model))?;
                    let k = json::words_from_json(model.spec(), &inputs.file(&need(translators, "translators")?)?)?;
                    let e = read_set(&mut inputs, &model, &need(normalize, "normalize")?)?;
                    inputs.param("target", &target);
                    inputs.param("cap", cap);
                    let t = json::rational_from_json(&json!(target))?;
                    LpInstance::build(fam, k, e, t, cap)?
                }
            };
            let out = lp_feasibility(&inst)?;
            ctx.sink.emit("lp-result", &inputs, result_body(&inst, &out))?;
        }
        MeasureCmd::Check { result } => {
            let v = inputs.file(&result)?;
            let inst = json::lp_instance_from_json(field(&v, "instance")?)?;
            let cert = field(&v, "certificate")?;
            let verdict: Verdict = match field(&v, "outcome")?.as_str() {
                Some("feasible") => check_measure(&json::measure_from_json(inst.model(), cert)?, &inst)?,
                Some("infeasible") => check_farkas(&json::farkas_from_json(cert)?, &inst)?,
                _ => return Err(Error::Malformed("outcome must be feasible or infeasible".into()).into()),
            };
            ctx.sink.emit("verification", &inputs, json!({"verdict": json::verdict_to_json(&verdict)}))?;
            require_valid(&verdict)?;
        }
    }
    Ok(Status::Decided)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Malformed(format!("missing field `{key}`")).into())
}
