//! Command implementations behind the `quadtoric` binary.

pub mod commands;
pub mod config;

use std::path::Path;

use quadtoric::reduction::{lookup, Instance};
use quadtoric::{Error, Result};

pub use commands::{run_command, Command, Settings};
pub use config::ConfigFile;

/// Exit status for a finished run or a failure.
pub fn exit_code(outcome: &Result<bool>) -> i32 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) if e.is_parse() => 2,
        Err(e) if e.is_numeric() => 4,
        Err(_) => 3,
    }
}

/// Config text for a catalog entry.
pub fn emit_catalog(name: &str) -> Result<String> {
    Ok(ConfigFile::new(lookup(name)?).print())
}

/// Loads an instance from a file or a catalog name.
pub fn load(path: Option<&Path>, catalog: Option<&str>) -> Result<ConfigFile> {
    match (path, catalog) {
        (Some(_), Some(_)) => Err(Error::Precondition("give either a config file or --catalog, not both".into())),
        (Some(p), None) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Precondition(format!("{}: {e}", p.display())))?;
            ConfigFile::parse(&text)
        }
        (None, Some(name)) => Ok(ConfigFile::new(lookup(name)?)),
        (None, None) => Err(Error::Precondition("no instance: pass a config file or --catalog".into())),
    }
}

/// Settings from the config file, overridden by `QUADTORIC_*` variables.
pub fn settings_from(cfg: &ConfigFile, env: impl Fn(&str) -> Option<String>) -> Result<Settings> {
    let mut s = Settings::default();
    if let Some(seed) = cfg.seed {
        s.seed = seed;
    }
    for (k, v) in &cfg.tolerances {
        s.set_tolerance(k, parse_f64(v, k)?)?;
    }
    if let Instance::Quadrics { l, .. } = &cfg.instance {
        s.l = *l;
    }
    let bad = |k: &str, v: &str| Error::Precondition(format!("{k}={v} is not valid"));
    if let Some(v) = env("QUADTORIC_SEED") {
        s.seed = v.parse().map_err(|_| bad("QUADTORIC_SEED", &v))?;
    }
    if let Some(v) = env("QUADTORIC_SAMPLES") {
        s.samples = v.parse().map_err(|_| bad("QUADTORIC_SAMPLES", &v))?;
    }
    if let Some(v) = env("QUADTORIC_STEP") {
        s.step = v.parse().map_err(|_| bad("QUADTORIC_STEP", &v))?;
    }
    for name in config::TOLERANCE_NAMES {
        let key = format!("QUADTORIC_TOL_{}", name.to_uppercase());
        if let Some(v) = env(&key) {
            s.set_tolerance(name, parse_f64(&v, &key)?)?;
        }
    }
    Ok(s)
}

fn parse_f64(v: &str, what: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::Precondition(format!("{what}: '{v}' is not a number")))
}
