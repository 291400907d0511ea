//! Flat `key = value` config files.
//!
//! Keys are flag names without the leading dashes. The file is spliced into
//! the argument list right after the subcommand, so any flag given on the
//! command line comes later and wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
/// Boolean switches are written as `key = true` (or `false`).
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "line {}: expected `key = value`, got `{}`",
                i + 1,
                raw.trim()
            );
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            bail!("line {}: missing key", i + 1);
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn to_args(entries: Vec<(String, String)>) -> Vec<OsString> {
    let mut args = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    args
}

fn load(path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let entries = parse(&text).with_context(|| format!("in config file {}", path.display()))?;
    Ok(to_args(entries))
}

/// Removes `--config FILE` from `args` and splices the file's flags in
/// after the subcommand (the first positional argument).
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            let Some(path) = iter.next() else {
                bail!("--config needs a file path");
            };
            config = Some(path);
        } else if let Some(path) = text.strip_prefix("--config=") {
            config = Some(OsString::from(path));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let injected = load(Path::new(&path))?;
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map_or(rest.len(), |i| i + 2);
    rest.splice(at..at, injected);
    Ok(rest)
}
