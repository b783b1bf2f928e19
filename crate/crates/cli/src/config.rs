//! `key = value` config files whose keys mirror long flags. Flags given on
//! the command line win over the file.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`, got `{raw}`", i + 1);
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        pairs.push((key, value.trim().trim_matches('"').to_string()));
    }
    Ok(pairs)
}

fn flag_name(arg: &OsString) -> Option<String> {
    let s = arg.to_str()?;
    let name = s.strip_prefix("--")?;
    Some(name.split('=').next().unwrap_or(name).to_string())
}

/// Removes `--config PATH` from `args` and inserts the file's settings as
/// flags after the subcommand, skipping any flag already present.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        match arg.to_str() {
            Some("--config") => {
                path = Some(iter.next().context("--config needs a path")?);
            }
            Some(s) if s.starts_with("--config=") => path = Some(OsString::from(&s["--config=".len()..])),
            _ => out.push(arg),
        }
    }
    let Some(path) = path else { return Ok(out) };
    let text = fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let present: Vec<String> = out.iter().filter_map(flag_name).collect();
    let mut extra = Vec::new();
    for (key, value) in parse_config(&text)? {
        if present.contains(&key) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => extra.push(OsString::from(format!("--{key}={value}"))),
        }
    }
    // program name and subcommand come first
    let split = out.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map_or(out.len(), |i| i + 2);
    out.splice(split..split, extra);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_pairs_and_comments() {
        let pairs = parse_config("# run\nn = 4\ntrials=10 # inline\n\nauto_thresholds = true\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("n".into(), "4".into()),
                ("trials".into(), "10".into()),
                ("auto-thresholds".into(), "true".into())
            ]
        );
        assert!(parse_config("oops").is_err());
    }

    #[test]
    fn command_line_wins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "n = 4\nseed = 9\nauto-thresholds = true\n").unwrap();
        let args = os(&["randsing", "bound", "--config", path.to_str().unwrap(), "--n=7"]);
        let got = expand_config(args).unwrap();
        assert_eq!(got, os(&["randsing", "bound", "--seed=9", "--auto-thresholds", "--n=7"]));
    }
}
