use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use paradox_core::{catalog, find_paradox, json, lp_feasibility, ClopenSet, LpInstance, Model, SearchOutcome, Word};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::measure::result_body;
use crate::io::{write_file, Inputs};
use crate::{Ctx, Status};

#[derive(Args)]
pub struct DemoArgs {
    /// Target directory.
    #[arg(long, default_value = "corpus")]
    out: PathBuf,
}

struct Doc {
    path: String,
    kind: &'static str,
    about: String,
    body: Value,
}

/// Cylinder file names spell the word letter by letter, `ai` for `a^-1`.
fn word_name(model: &Model, w: &Word) -> String {
    let spec = model.spec();
    spec.letters(w)
        .iter()
        .map(|l| {
            let name = &spec.factors()[l.factor].name;
            if l.exp < 0 {
                format!("{name}i")
            } else {
                name.clone()
            }
        })
        .collect::<Vec<_>>()
        .join("_")
}

fn cylinder_search(u: &ClopenSet) -> Result<Option<(u64, paradox_core::ParadoxCert)>> {
    for r in 1..=3 {
        if let SearchOutcome::Found(c) = find_paradox(u, r, 8)? {
            return Ok(Some((r, c)));
        }
    }
    Ok(None)
}

fn lp_doc(path: String, about: String, inst: &LpInstance) -> Result<Doc> {
    let out = lp_feasibility(inst)?;
    Ok(Doc { path, kind: "lp-result", about, body: result_body(inst, &out) })
}

pub fn run(args: DemoArgs, ctx: &Ctx) -> Result<Status> {
    let boundary = catalog::f2_boundary();
    let self_f2 = catalog::f2_self();
    let z = catalog::z_self();
    let mut docs = Vec::new();
    let mut configs: Vec<(String, Value)> = Vec::new();

    for (name, m) in [("f2-boundary", &boundary), ("f2-self", &self_f2), ("z-self", &z)] {
        configs.push((format!("actions/{name}.json"), json::model_to_json(m)));
    }
    configs.push(("sets/full.json".into(), json!({"op": "full"})));
    configs.push(("translators/ball1.json".into(), json!({"words": ["a", "a^-1"]})));

    let mut targets: Vec<(String, ClopenSet)> = vec![("full".into(), ClopenSet::full(&boundary))];
    for w in boundary.spec().ball(2).into_iter().filter(|w| !w.is_identity()) {
        let name = format!("cyl-{}", word_name(&boundary, &w));
        let set = ClopenSet::cylinder(&boundary, &w)?;
        configs.push((format!("sets/{name}.json"), json::set_to_json(&set)));
        targets.push((name, set));
    }
    let found = targets
        .par_iter()
        .map(|(name, u)| cylinder_search(u).map(|c| (name.clone(), u.describe(), c)))
        .collect::<Result<Vec<_>>>()?;
    for (name, text, cert) in found {
        let (r, cert) = cert.ok_or_else(|| paradox_core::Error::Unverified(format!("no certificate for {text}")))?;
        docs.push(Doc {
            path: format!("paradox/f2-boundary-{name}.json"),
            kind: "paradox-cert",
            about: format!("{text} on the boundary of F2, found with r = {r}, p <= 8"),
            body: json::paradox_to_json(&cert)?,
        });
    }
    docs.push(Doc {
        path: "paradox/f2-self-classical.json".into(),
        kind: "paradox-cert",
        about: "F2 acting on itself: C(a^-1), G - C(a^-1) | C(b^-1), G - C(b^-1)".into(),
        body: json::paradox_to_json(&catalog::f2_self_cert())?,
    });
    for r in 1..=5 {
        docs.push(lp_doc(
            format!("measure/z-window-r{r}.json"),
            format!("Z acting on itself, depth-{r} cells, translators ball({r})"),
            &catalog::window_lp(&z, r)?,
        )?);
    }
    for (name, m) in [("f2-boundary", &boundary), ("f2-self", &self_f2)] {
        docs.push(lp_doc(
            format!("measure/{name}-depth1.json"),
            format!("{name}: first-letter sets, invariance under the generators"),
            &catalog::f2_depth1_lp(m)?,
        )?);
    }

    let out: &Path = &args.out;
    for (path, v) in &configs {
        write_file(&out.join(path), &json::to_pretty(v))?;
    }
    let mut index = Vec::new();
    for doc in docs {
        let mut inputs = Inputs::new("demo");
        inputs.param("file", &doc.path);
        inputs.param("seed", ctx.seed);
        let text = json::to_pretty(&json::envelope(doc.kind, &inputs.digest(), doc.body));
        write_file(&out.join(&doc.path), &text)?;
        index.push(json!({"path": doc.path, "kind": doc.kind, "about": doc.about}));
    }
    let configs_index: Vec<Value> = configs.iter().map(|(p, _)| json!(p)).collect();
    let mut inputs = Inputs::new("demo");
    inputs.param("seed", ctx.seed);
    let body = json!({"documents": index, "configs": configs_index});
    write_file(&out.join("index.json"), &json::to_pretty(&json::envelope("corpus-index", &inputs.digest(), body)))?;
    Ok(Status::Decided)
}
