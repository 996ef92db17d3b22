pub mod clopen;
pub mod cp;
pub mod demo;
pub mod grp;
pub mod measure;
pub mod paradox;
pub mod tsg;

use std::path::Path;

use anyhow::Result;
use paradox_core::{json, ClopenSet, Model, Verdict};
use serde_json::Value;

use crate::io::Inputs;

pub fn read_set(inputs: &mut Inputs, model: &Model, path: &Path) -> Result<ClopenSet> {
    let v = inputs.file(path)?;
    Ok(json::set_file(&v, Some(model))?)
}

/// Turns an invalid verdict into an `E_VERIFY` error after the report is out.
pub fn require_valid(v: &Verdict) -> Result<()> {
    match v {
        Verdict::Valid => Ok(()),
        Verdict::Invalid(why) => Err(paradox_core::Error::Unverified(why.clone()).into()),
    }
}

pub fn not_found(r: u64, p: usize) -> Value {
    serde_json::json!({
        "found": false,
        "bounds": {"r": r, "p": p},
        "note": "not found within bounds; this is not a proof of non-existence",
    })
}
