//! `--config` files: flat `key = value` lines mirroring the long flags.
//!
//! The file is turned into flags and spliced in right after the subcommand,
//! ahead of the user's own flags. Every option overrides itself, so anything
//! given on the command line wins.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Subcommands whose first positional selects a nested subcommand.
const NESTED: &[&str] = &["mc"];

pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::invalid(format!("config line {}: expected key = value", i + 1))
        })?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(CliError::invalid(format!("config line {}: empty key", i + 1)));
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_flags(pairs: &[(String, String)]) -> Vec<OsString> {
    let mut out = Vec::new();
    for (k, v) in pairs {
        match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" => out.push(format!("--{k}").into()),
            "false" | "no" | "off" => {}
            _ => {
                out.push(format!("--{k}").into());
                out.push(v.into());
            }
        }
    }
    out
}

/// Removes `--config` from `args` and splices the file's flags in after the
/// subcommand path.
pub fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path: Option<OsString> = None;
    let mut it = args.into_iter();
    if let Some(bin) = it.next() {
        rest.push(bin);
    }
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            rest.push(a);
            rest.extend(it.by_ref());
            break;
        }
        if s == "--config" {
            path = Some(
                it.next()
                    .ok_or_else(|| CliError::invalid("--config needs a file path"))?,
            );
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let flags = config_flags(&parse_config(&text)?);

    let mut at = None;
    for (i, a) in rest.iter().enumerate().skip(1) {
        let s = a.to_string_lossy();
        if !s.starts_with('-') {
            at = Some(if NESTED.contains(&s.as_ref()) { i + 2 } else { i + 1 });
            break;
        }
    }
    let at = at.unwrap_or(rest.len()).min(rest.len());
    let mut out: Vec<OsString> = rest[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&rest[at..]);
    Ok(out)
}
