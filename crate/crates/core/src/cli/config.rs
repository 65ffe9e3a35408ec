//! Flat `key = value` files: user configs and run manifests.

use clap::CommandFactory;
use serde::Serialize;
use serde_json::Value;

use super::args::Cli;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub section: Option<String>,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parse INI-style text. `#` and `;` start comment lines; `[name]` opens a
/// section.
pub fn parse(text: &str, origin: &str) -> Result<Vec<Entry>> {
    let mut section = None;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(name.trim().to_string());
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{origin}:{}: expected `key = value`, got {line:?}",
                i + 1
            ))
        })?;
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("{origin}:{}: empty key", i + 1)));
        }
        out.push(Entry {
            section: section.clone(),
            key: key.to_string(),
            value: v.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

/// Long flag names accepted by a subcommand (including global ones).
fn known_flags(subcommand: &str) -> Option<Vec<String>> {
    let cli = Cli::command();
    let sub = cli.find_subcommand(subcommand)?;
    let mut names: Vec<String> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();
    names.extend(
        cli.get_arguments()
            .filter_map(|a| a.get_long().map(str::to_string)),
    );
    Some(names)
}

/// Turn config entries into `--key=value` tokens for `subcommand`, rejecting
/// keys that are not flags of that subcommand.
pub fn to_flags(entries: &[Entry], subcommand: &str, origin: &str) -> Result<Vec<String>> {
    let known = known_flags(subcommand)
        .ok_or_else(|| Error::Config(format!("unknown subcommand {subcommand:?}")))?;
    let mut flags = Vec::new();
    for e in entries {
        if let Some(s) = &e.section {
            return Err(Error::Config(format!(
                "{origin}:{}: sections are not allowed here ([{s}])",
                e.line
            )));
        }
        if e.key == "config" || !known.iter().any(|k| k == &e.key) {
            return Err(Error::Config(format!(
                "{origin}:{}: key `{}` is not an option of `{subcommand}`",
                e.line, e.key
            )));
        }
        match e.value.as_str() {
            "true" => flags.push(format!("--{}", e.key)),
            "false" => {}
            v => flags.push(format!("--{}={v}", e.key)),
        }
    }
    Ok(flags)
}

/// Flatten serialized arguments into manifest `key = value` pairs.
pub fn resolved<T: Serialize>(args: &T) -> Vec<(String, String)> {
    let value = serde_json::to_value(args).expect("serializable arguments");
    let mut out = Vec::new();
    if let Value::Object(map) = value {
        for (k, v) in map {
            if let Some(text) = scalar_text(&v) {
                out.push((k, text));
            }
        }
    }
    out
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f}"),
            _ => n.to_string(),
        }),
        Value::Bool(b) => Some(b.to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                None
            } else {
                Some(
                    items
                        .iter()
                        .filter_map(scalar_text)
                        .collect::<Vec<_>>()
                        .join(","),
                )
            }
        }
        Value::Object(_) => None,
    }
}

/// Reorder argv so config-derived flags sit between the subcommand and the
/// user's own flags; with `args_override_self` the later user flags win.
pub fn merge_argv(raw: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(raw.len());
    let mut config_path = None;
    let mut iter = raw.into_iter();
    let prog = iter.next().unwrap_or_else(|| "memoryflow".into());
    while let Some(tok) = iter.next() {
        if tok == "--config" {
            config_path = Some(
                iter.next()
                    .ok_or_else(|| Error::Config("--config needs a file".into()))?,
            );
        } else if let Some(p) = tok.strip_prefix("--config=") {
            config_path = Some(p.to_string());
        } else {
            rest.push(tok);
        }
    }
    let Some(path) = config_path else {
        let mut argv = vec![prog];
        argv.extend(rest);
        return Ok(argv);
    };
    let sub_pos = subcommand_position(&rest)
        .ok_or_else(|| Error::Config("--config given without a subcommand".into()))?;
    let sub = rest.remove(sub_pos);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read config {path}: {e}")))?;
    let flags = to_flags(&parse(&text, &path)?, &sub, &path)?;
    let mut argv = vec![prog, sub];
    argv.extend(flags);
    argv.extend(rest);
    Ok(argv)
}

fn subcommand_position(args: &[String]) -> Option<usize> {
    const VALUED: [&str; 2] = ["--out", "--format"];
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if VALUED.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_sections_and_comments() {
        let e = parse("# c\nalpha = 0.2\n\n[artifacts]\nmsd.csv = ab\n", "x").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].key, "alpha");
        assert_eq!(e[1].section.as_deref(), Some("artifacts"));
        assert!(parse("alpha 0.2", "x").is_err());
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse("alhpa = 0.2", "cfg.ini").unwrap();
        let err = to_flags(&e, "msd", "cfg.ini").unwrap_err().to_string();
        assert!(err.contains("alhpa") && err.contains("cfg.ini:1"), "{err}");
    }

    #[test]
    fn config_flags_precede_user_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.ini");
        std::fs::write(&path, "alpha = 0.3\nrhs = 1\n").unwrap();
        let argv = merge_argv(s(&[
            "mf",
            "--out",
            "o",
            "msd",
            "--config",
            path.to_str().unwrap(),
            "--alpha",
            "0.4",
        ]))
        .unwrap();
        assert_eq!(
            argv,
            s(&[
                "mf",
                "msd",
                "--alpha=0.3",
                "--rhs=1",
                "--out",
                "o",
                "--alpha",
                "0.4"
            ])
        );
    }
}
