use std::path::PathBuf;

use anyhow::Result;
use clap::Subcommand;
use paradox_core::{
    doubling_check, find_paradox, find_paradox_with, json, ClopenSet, ParadoxCert, SearchOutcome, Word,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{not_found, read_set, require_valid};
use crate::io::Inputs;
use crate::{Ctx, Status};

#[derive(Subcommand)]
pub enum ParadoxCmd {
    /// Bounded search for a paradoxical decomposition of each given set.
    Find {
        /// Action file or a bundled name such as @f2-boundary, @f2-self, @z-self.
        #[arg(long)]
        action: String,
        /// Set file; repeat to search several sets (fanned out over --jobs).
        #[arg(long, required = true)]
        set: Vec<PathBuf>,
        /// Translators come from ball(r) and pieces from the depth-r cells.
        #[arg(short = 'r', default_value_t = 2)]
        r: u64,
        /// Maximum number of pieces.
        #[arg(short = 'p', default_value_t = 6)]
        p: usize,
        /// Use these translators instead of ball(r).
        #[arg(long)]
        translators: Option<PathBuf>,
    },
    /// Re-check a certificate and print the transcript.
    Verify { cert: PathBuf },
    /// Hall-type doubling check of E under the translators K on a finite window.
    Doubling {
        #[arg(long)]
        action: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        translators: PathBuf,
        #[arg(short = 'r', default_value_t = 3)]
        r: u64,
    },
}

fn outcome_body(u: &ClopenSet, out: &SearchOutcome<ParadoxCert>, r: u64, p: usize) -> Result<Value> {
    Ok(match out {
        SearchOutcome::Found(cert) => json::paradox_to_json(cert)?,
        SearchOutcome::NotFoundWithinBounds => {
            let mut body = not_found(r, p);
            body["action"] = json::model_to_json(u.model());
            body["domain"] = json::set_to_json(u);
            body
        }
    })
}

pub fn run(cmd: ParadoxCmd, ctx: &Ctx) -> Result<Status> {
    let mut inputs = Inputs::new("paradox");
    match cmd {
        ParadoxCmd::Find { action, set, r, p, translators } => {
            let model = inputs.action(&action)?;
            inputs.param("r", r);
            inputs.param("p", p);
            let sets = set.iter().map(|s| read_set(&mut inputs, &model, s)).collect::<Result<Vec<_>>>()?;
            let ks: Option<Vec<Word>> = match translators {
                Some(path) => Some(json::words_from_json(model.spec(), &inputs.file(&path)?)?),
                None => None,
            };
            let outcomes = sets
                .par_iter()
                .map(|u| match &ks {
                    Some(k) => find_paradox_with(u, k, r as usize, p),
                    None => find_paradox(u, r, p),
                })
                .collect::<paradox_core::Result<Vec<_>>>()?;
            let all_found = outcomes.iter().all(SearchOutcome::is_found);
            if let ([u], [out]) = (sets.as_slice(), outcomes.as_slice()) {
                let kind = if out.is_found() { "paradox-cert" } else { "not-found" };
                ctx.sink.emit(kind, &inputs, outcome_body(u, out, r, p)?)?;
            } else {
                let results =
                    sets.iter().zip(&outcomes).map(|(u, o)| outcome_body(u, o, r, p)).collect::<Result<Vec<_>>>()?;
                ctx.sink.emit("paradox-batch", &inputs, json!({"results": results}))?;
            }
            return Ok(if all_found { Status::Decided } else { Status::NotFound });
        }
        ParadoxCmd::Verify { cert } => {
            let c = json::paradox_from_json(&inputs.file(&cert)?)?;
            let (verdict, transcript) = c.check()?;
            let body = json!({"verdict": json::verdict_to_json(&verdict), "transcript": transcript});
            ctx.sink.emit("verification", &inputs, body)?;
            require_valid(&verdict)?;
        }
        ParadoxCmd::Doubling { action, set, translators, r } => {
            let model = inputs.action(&action)?;
            let e = read_set(&mut inputs, &model, &set)?;
            let k = json::words_from_json(model.spec(), &inputs.file(&translators)?)?;
            inputs.param("r", r);
            let rep = doubling_check(&e, &k, r)?;
            let mut body = json::doubling_to_json(model.spec(), &rep);
            body["reading"] = json!(if rep.slack > 0 {
                "positive slack: no paradoxical decomposition of E uses only these translators"
            } else {
                "zero slack: the window admits a doubling"
            });
            ctx.sink.emit("doubling", &inputs, body)?;
        }
    }
    Ok(Status::Decided)
}
