use std::path::PathBuf;

use anyhow::Result;
use clap::{Subcommand, ValueEnum};
use paradox_core::{atoms, json, refine_cover_to_partition, ClopenSet, Error};
use serde_json::{json, Value};

use super::read_set;
use crate::io::Inputs;
use crate::{Ctx, Status};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SetOp {
    /// Canonical form of one set (literal or expression).
    Eval,
    Union,
    Intersect,
    Diff,
    Complement,
    Subset,
    Disjoint,
    Equal,
}

#[derive(Subcommand)]
pub enum ClopenCmd {
    /// Boolean operations and comparisons.
    Op {
        #[arg(long)]
        action: String,
        #[arg(value_enum)]
        op: SetOp,
        sets: Vec<PathBuf>,
    },
    /// `g · S`.
    Translate {
        #[arg(long)]
        action: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        by: String,
    },
    /// Atoms of the Boolean algebra generated by a family, or with
    /// `--within U` a partition of U refining a cover.
    Atoms {
        #[arg(long)]
        action: String,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        within: Option<PathBuf>,
    },
}

fn set_body(s: &ClopenSet) -> Value {
    json!({"set": json::set_to_json(s), "text": s.describe()})
}

pub fn run(cmd: ClopenCmd, ctx: &Ctx) -> Result<Status> {
    let mut inputs = Inputs::new("clopen");
    match cmd {
        ClopenCmd::Op { action, op, sets } => {
            let model = inputs.action(&action)?;
            inputs.param("op", format!("{op:?}"));
            let sets = sets.iter().map(|p| read_set(&mut inputs, &model, p)).collect::<Result<Vec<_>>>()?;
            let arity = |n: usize| -> Result<()> {
                if sets.len() == n {
                    Ok(())
                } else {
                    Err(Error::Malformed(format!("{op:?} takes {n} set(s), got {}", sets.len())).into())
                }
            };
            let body = match op {
                SetOp::Eval => {
                    arity(1)?;
                    set_body(&sets[0])
                }
                SetOp::Union => set_body(&ClopenSet::union_all(&model, &sets)?),
                SetOp::Intersect => {
                    set_body(&sets.iter().try_fold(ClopenSet::full(&model), |acc, s| acc.intersect(s))?)
                }
                SetOp::Diff => {
                    arity(2)?;
                    set_body(&sets[0].difference(&sets[1])?)
                }
                SetOp::Complement => {
                    arity(1)?;
                    set_body(&sets[0].complement())
                }
                SetOp::Subset => {
                    arity(2)?;
                    json!({"result": sets[0].is_subset(&sets[1])?})
                }
                SetOp::Disjoint => {
                    arity(2)?;
                    json!({"result": sets[0].is_disjoint(&sets[1])?})
                }
                SetOp::Equal => {
                    arity(2)?;
                    json!({"result": sets[0] == sets[1]})
                }
            };
            ctx.sink.emit("clopen", &inputs, body)?;
        }
        ClopenCmd::Translate { action, set, by } => {
            let model = inputs.action(&action)?;
            let s = read_set(&mut inputs, &model, &set)?;
            inputs.param("by", &by);
            let g = model.spec().parse_word(&by)?;
            ctx.sink.emit("clopen", &inputs, set_body(&s.translate(&g)))?;
        }
        ClopenCmd::Atoms { action, family, within } => {
            let model = inputs.action(&action)?;
            let fam = json::family_file(&inputs.file(&family)?, Some(&model))?;
            let pieces = match within {
                Some(u) => {
                    let u = read_set(&mut inputs, &model, &u)?;
                    refine_cover_to_partition(&fam, &u)?
                }
                None => atoms(&fam)?,
            };
            let body = json!({
                "count": pieces.len(),
                "atoms": pieces.iter().map(json::set_to_json).collect::<Vec<_>>(),
                "text": pieces.iter().map(ClopenSet::describe).collect::<Vec<_>>(),
            });
            ctx.sink.emit("atoms", &inputs, body)?;
        }
    }
    Ok(Status::Decided)
}
