//! `--config <file>` support.
//!
//! The file holds `key=value` lines, one per long flag of the chosen
//! subcommand. Blank lines and lines starting with `#` are skipped. Entries
//! are spliced in right after the subcommand name, so flags given on the
//! command line win.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parse `key=value` text into `--key=value` arguments.
pub fn parse_config(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key=value", i + 1);
        };
        let key = key.trim();
        if key.is_empty() || key.starts_with('-') || key.contains(char::is_whitespace) {
            bail!("config line {}: bad key {key:?}", i + 1);
        }
        out.push(format!("--{key}={}", value.trim()).into());
    }
    Ok(out)
}

/// Remove `--config <path>` / `--config=<path>` from `args` and splice the
/// file's entries in after the subcommand.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path: Option<OsString> = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => {
                path = Some(it.next().context("--config needs a file argument")?);
            }
            Some(s) if s.starts_with("--config=") => path = Some(s["--config=".len()..].into()),
            _ => rest.push(a),
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .with_context(|| format!("reading config {}", Path::new(&path).display()))?;
    let extra = parse_config(&text)?;
    // rest[0] is the program name; the subcommand is the first non-flag
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_str().is_some_and(|s| s.starts_with('-')))
        .map(|p| p + 2)
        .context("--config given without a subcommand")?;
    rest.splice(sub..sub, extra);
    Ok(rest)
}
