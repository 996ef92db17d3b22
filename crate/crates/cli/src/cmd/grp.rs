use anyhow::Result;
use clap::Subcommand;
use paradox_core::{freeness_projections, json, Order};
use serde_json::json;

use super::require_valid;
use crate::io::Inputs;
use crate::{Ctx, Status};

#[derive(Subcommand)]
pub enum GrpCmd {
    /// Normal form of a word.
    Reduce {
        /// Group file or a bundled name such as @f2, @z, @modular, @z3.
        #[arg(long)]
        group: String,
        word: String,
    },
    /// All elements of length at most r, in ball order.
    Ball {
        #[arg(long)]
        group: String,
        #[arg(short = 'r', long = "radius")]
        r: u64,
    },
    /// Order of an element.
    Order {
        #[arg(long)]
        group: String,
        word: String,
    },
    /// A colouring of ball(r) with `g` and `t g` in different classes.
    Partition {
        #[arg(long)]
        group: String,
        #[arg(long)]
        t: String,
        #[arg(short = 'r', long = "radius", default_value_t = 6)]
        r: u64,
        /// 3 for the general colouring, 2 for the two-colouring.
        #[arg(long, default_value_t = 3)]
        colors: u8,
        /// Also build and check the indicator projections of the classes.
        #[arg(long)]
        projections: bool,
    },
}

pub fn run(cmd: GrpCmd, ctx: &Ctx) -> Result<Status> {
    let mut inputs = Inputs::new("grp");
    match cmd {
        GrpCmd::Reduce { group, word } => {
            let spec = inputs.group(&group)?;
            inputs.param("word", &word);
            let w = spec.parse_word(&word)?;
            let body = json!({"word": json::word_to_json(&spec, &w), "length": spec.letters(&w).len()});
            ctx.sink.emit("word", &inputs, body)?;
        }
        GrpCmd::Ball { group, r } => {
            let spec = inputs.group(&group)?;
            inputs.param("r", r);
            let ball = spec.ball(r);
            let body = json!({"radius": r, "size": ball.len(), "words": json::words_to_json(&spec, &ball)});
            ctx.sink.emit("ball", &inputs, body)?;
        }
        GrpCmd::Order { group, word } => {
            let spec = inputs.group(&group)?;
            inputs.param("word", &word);
            let w = spec.parse_word(&word)?;
            let order = match spec.order(&w) {
                Order::Finite(n) => json!(n),
                Order::Infinite => json!("infinite"),
            };
            ctx.sink.emit("order", &inputs, json!({"word": json::word_to_json(&spec, &w), "order": order}))?;
        }
        GrpCmd::Partition { group, t, r, colors, projections } => {
            let spec = inputs.group(&group)?;
            inputs.param("t", &t);
            inputs.param("r", r);
            inputs.param("colors", colors);
            let tw = spec.parse_word(&t)?;
            let cert = match colors {
                2 => spec.two_partition(&tw, r)?,
                3 => spec.three_partition(&tw, r)?,
                n => return Err(paradox_core::Error::InvalidBounds(format!("{n} colours; use 2 or 3")).into()),
            };
            let verdict = cert.verify(&spec);
            let mut body = json::partition_to_json(&spec, &cert);
            body["verification"] = json::verdict_to_json(&verdict);
            let mut checks = vec![verdict];
            if projections {
                let rep = freeness_projections(&spec, &cert)?;
                body["projections"] = json!({
                    "restricted": rep.restricted,
                    "window_size": rep.window.cone_parts().map(|(_, _, pts)| pts.len()),
                    "nonzero": rep.projections.iter().filter(|f| !f.is_zero()).count(),
                    "elements": rep.projections.iter().map(json::cp_to_json).collect::<Vec<_>>(),
                    "verification": json::verdict_to_json(&rep.verdict),
                });
                checks.push(rep.verdict);
            }
            ctx.sink.emit("partition", &inputs, body)?;
            for v in &checks {
                require_valid(v)?;
            }
        }
    }
    Ok(Status::Decided)
}
