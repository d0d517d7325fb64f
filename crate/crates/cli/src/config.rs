//! `key=value` configuration files merged into argv.
//!
//! Keys are long flag names without the leading dashes. A key already given on
//! the command line is skipped, so flags always win. Lines starting with `#`
//! and blank lines are ignored.

use std::fs;

#[derive(Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(ConfigError(format!("line {}: invalid key", lineno + 1)));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Finds `--config PATH` or `--config=PATH`.
fn config_path(args: &[String]) -> Result<Option<String>, ConfigError> {
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            return args
                .get(i + 1)
                .cloned()
                .map(Some)
                .ok_or_else(|| ConfigError("--config needs a path".into()));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
    }
    Ok(None)
}

fn given_on_argv(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter()
        .any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

/// Returns `args` with the config file's entries inserted right after the
/// subcommand (index 1). The `--config` flag itself is left in place.
pub fn merge(args: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| ConfigError(format!("cannot read config {path}: {e}")))?;
    merge_text(args, &text)
}

fn merge_text(args: Vec<String>, text: &str) -> Result<Vec<String>, ConfigError> {
    let mut extra = Vec::new();
    for (key, value) in parse(text)? {
        if !given_on_argv(&args, &key) {
            extra.push(format!("--{key}={value}"));
        }
    }
    let split = args.len().min(2);
    let mut merged = args[..split].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[split..]);
    Ok(merged)
}
