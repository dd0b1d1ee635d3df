//! JSON persistence for instances.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Instance;
use crate::error::{Error, Result};
use crate::linalg::{Exponent, SymMatrix};

pub const INSTANCE_EXTENSION: &str = ".mdi.json";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    m: usize,
    p: Exponent,
    q: Exponent,
    #[serde(default)]
    r: Option<usize>,
    #[serde(default)]
    h: Option<usize>,
    #[serde(default)]
    label: String,
    #[serde(default)]
    seed: Option<u64>,
    matrices: Vec<Vec<Vec<f64>>>,
}

pub fn to_json_string(inst: &Instance) -> Result<String> {
    let file = InstanceFile {
        n: inst.n,
        m: inst.m,
        p: inst.p,
        q: inst.q,
        r: inst.r,
        h: inst.h,
        label: inst.label.clone(),
        seed: inst.seed,
        matrices: inst.matrices.iter().map(SymMatrix::to_rows).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

/// Parses and re-validates an instance.
pub fn from_json_str(s: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(s)?;
    if file.matrices.len() != file.n {
        return Err(Error::Parse(format!("declared n = {} but found {} matrices", file.n, file.matrices.len())));
    }
    let matrices = file
        .matrices
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            if rows.len() != file.m || rows.iter().any(|r| r.len() != file.m) {
                return Err(Error::Parse(format!("matrix {} is not {}x{}", i + 1, file.m, file.m)));
            }
            SymMatrix::from_rows(rows).map_err(|e| Error::InvariantViolation { index: i + 1, detail: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    let inst = Instance {
        n: file.n,
        m: file.m,
        p: file.p,
        q: file.q,
        r: file.r,
        h: file.h,
        matrices,
        label: file.label,
        seed: file.seed,
    };
    inst.validate()?;
    Ok(inst)
}

pub fn save(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json_string(inst)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
    from_json_str(&fs::read_to_string(path)?)
}
