//! Input loading, input hashing and output writing.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use paradox_core::{catalog, json, ActionModel, GroupSpec, Model};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Everything a command reads, hashed in the order it is read.
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(json::SCHEMA.as_bytes());
        hasher.update(b"\0command\0");
        hasher.update(command.as_bytes());
        Inputs { hasher }
    }

    pub fn param(&mut self, name: &str, value: impl Display) {
        self.hasher.update(format!("\0param\0{name}={value}").as_bytes());
    }

    pub fn file(&mut self, path: &Path) -> Result<Value> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.hasher.update(format!("\0file\0{}\0", bytes.len()).as_bytes());
        self.hasher.update(&bytes);
        serde_json::from_slice(&bytes).map_err(|e| anyhow!(ParseError(format!("{}: {e}", path.display()))))
    }

    /// `@name` for a bundled action, otherwise a JSON file holding a model
    /// or `{"action": model}`.
    pub fn action(&mut self, arg: &str) -> Result<Model> {
        if let Some(name) = arg.strip_prefix('@') {
            self.param("action", arg);
            return builtin_action(name);
        }
        let v = self.file(Path::new(arg))?;
        Ok(json::model_from_json(v.get("action").unwrap_or(&v))?)
    }

    pub fn group(&mut self, arg: &str) -> Result<GroupSpec> {
        if let Some(name) = arg.strip_prefix('@') {
            self.param("group", arg);
            return builtin_group(name);
        }
        let v = self.file(Path::new(arg))?;
        let g = match (v.get("group"), v.get("action")) {
            (Some(g), _) => g,
            (None, Some(a)) => a.get("group").unwrap_or(a),
            (None, None) => &v,
        };
        Ok(json::group_from_json(g)?)
    }

    /// The model named on the command line, else the one embedded in `v`.
    pub fn model_for(&mut self, action: Option<&str>, v: &Value) -> Result<Model> {
        match (action, v.get("action")) {
            (Some(a), Some(inner)) => {
                let m = self.action(a)?;
                if json::model_from_json(inner)? != m {
                    return Err(paradox_core::Error::ModelMismatch.into());
                }
                Ok(m)
            }
            (Some(a), None) => self.action(a),
            (None, Some(inner)) => Ok(json::model_from_json(inner)?),
            (None, None) => Err(anyhow!(ParseError("no action model given".into()))),
        }
    }

    pub fn digest(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }
}

#[derive(Debug)]
pub struct ParseError(pub String);

impl Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

pub fn builtin_group(name: &str) -> Result<GroupSpec> {
    Ok(match name {
        "f2" => catalog::free2(),
        "z" => catalog::integers(),
        "modular" => catalog::modular(),
        _ => match name.strip_prefix('z').and_then(|n| n.parse::<u64>().ok()) {
            Some(n) if n >= 2 => catalog::cyclic(n),
            _ => return Err(anyhow!(ParseError(format!("unknown group `@{name}` (try @f2, @z, @modular, @z3)")))),
        },
    })
}

pub fn builtin_action(name: &str) -> Result<Model> {
    let (group, kind) = name
        .rsplit_once('-')
        .ok_or_else(|| anyhow!(ParseError(format!("unknown action `@{name}` (try @f2-boundary, @z-self)"))))?;
    let spec = builtin_group(group)?;
    Ok(match kind {
        "boundary" => ActionModel::boundary(spec)?,
        "self" => ActionModel::self_action(spec),
        _ => return Err(anyhow!(ParseError(format!("unknown action kind in `@{name}`")))),
    })
}

/// Where a command's JSON document goes.
#[derive(Clone, Debug)]
pub struct Sink {
    pub path: Option<PathBuf>,
}

impl Sink {
    pub fn emit(&self, kind: &str, inputs: &Inputs, body: Value) -> Result<()> {
        let text = json::to_pretty(&json::envelope(kind, &inputs.digest(), body));
        match &self.path {
            Some(p) => write_file(p, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
