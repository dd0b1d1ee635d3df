//! JSON run configs and their merge with command-line flags.

use std::path::{Path, PathBuf};

use matdisc::coloring::PartialColoringParams;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{Cli, Command};
use crate::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Partial-coloring parameters; flags such as `--sigma` override fields.
    pub partial: Option<PartialColoringParams>,
    pub gen: Option<Value>,
    pub solve: Option<Value>,
    pub bounds: Option<Value>,
    pub mdcheck: Option<Value>,
    pub netcheck: Option<Value>,
    pub measure: Option<Value>,
    pub sweep: Option<Value>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn section(&self, name: &str) -> Option<&Value> {
        match name {
            "gen" => self.gen.as_ref(),
            "solve" => self.solve.as_ref(),
            "bounds" => self.bounds.as_ref(),
            "mdcheck" => self.mdcheck.as_ref(),
            "netcheck" => self.netcheck.as_ref(),
            "measure" => self.measure.as_ref(),
            "sweep" => self.sweep.as_ref(),
            _ => None,
        }
    }
}

/// Fully resolved run: flags layered over the config file.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub command: Command,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub partial: PartialColoringParams,
}

fn merge_into(base: &mut Map<String, Value>, top: Map<String, Value>) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (_, Value::Null) => {}
            (Some(Value::Object(b)), Value::Object(t)) => merge_into(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Overlays every non-null field of `flags` on `base`, recursing into nested
/// sections, then decodes.
fn overlay<T: Serialize + DeserializeOwned>(flags: &T, base: Option<&Value>, what: &str) -> Result<T, CliError> {
    let mut merged = match base {
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(CliError::Config(format!("config section `{what}` must be an object"))),
        None => Map::new(),
    };
    if let Value::Object(f) = serde_json::to_value(flags).expect("args serialize") {
        merge_into(&mut merged, f);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(format!("section `{what}`: {e}")))
}

fn from_section<T: DeserializeOwned + Default>(v: Option<&Value>, what: &str) -> Result<T, CliError> {
    match v {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| CliError::Config(format!("section `{what}`: {e}"))),
        None => Ok(T::default()),
    }
}

pub fn resolve(cli: &Cli) -> Result<Resolved, CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let command = match &cli.command {
        Some(cmd) => {
            if let Some(s) = &cfg.subcommand {
                if s != cmd.name() {
                    return Err(CliError::Config(format!("config is for `{s}` but `{}` was requested", cmd.name())));
                }
            }
            let section = cfg.section(cmd.name());
            match cmd {
                Command::Gen(a) => Command::Gen(overlay(a, section, "gen")?),
                Command::Solve(a) => Command::Solve(overlay(a, section, "solve")?),
                Command::Bounds(a) => Command::Bounds(overlay(a, section, "bounds")?),
                Command::Mdcheck(a) => Command::Mdcheck(overlay(a, section, "mdcheck")?),
                Command::Netcheck(a) => Command::Netcheck(overlay(a, section, "netcheck")?),
                Command::Measure(a) => Command::Measure(overlay(a, section, "measure")?),
                Command::Sweep(a) => Command::Sweep(overlay(a, section, "sweep")?),
            }
        }
        None => {
            let name = cfg
                .subcommand
                .clone()
                .ok_or_else(|| CliError::Config("no subcommand given on the command line or in the config".into()))?;
            let section = cfg.section(&name);
            match name.as_str() {
                "gen" => Command::Gen(from_section(section, "gen")?),
                "solve" => Command::Solve(from_section(section, "solve")?),
                "bounds" => Command::Bounds(from_section(section, "bounds")?),
                "mdcheck" => Command::Mdcheck(from_section(section, "mdcheck")?),
                "netcheck" => Command::Netcheck(from_section(section, "netcheck")?),
                "measure" => Command::Measure(from_section(section, "measure")?),
                "sweep" => Command::Sweep(from_section(section, "sweep")?),
                other => return Err(CliError::Config(format!("unknown subcommand `{other}` in config"))),
            }
        }
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let mut partial = cfg.partial.clone().unwrap_or_default();
    partial.seed = seed;
    if let Command::Solve(a) = &command {
        if let Some(s) = a.sigma {
            partial.sigma = s;
        }
        if let Some(r) = a.max_retries {
            partial.max_retries = r;
        }
    }
    partial.validate()?;
    Ok(Resolved {
        command,
        seed,
        out: cli.out.clone().or(cfg.out),
        workers: cli.workers.or(cfg.workers),
        partial,
    })
}
