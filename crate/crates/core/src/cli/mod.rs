//! Command-line front end: argument parsing, config files, manifests.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod reproduce;

use std::path::{Path, PathBuf};

use clap::Parser;

use crate::error::{Error, Result};
use args::{Cli, Command};
use output::Sink;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 1;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numerical(_) => EXIT_NUMERICAL,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Cap the global worker pool from `MEMORYFLOW_THREADS`.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MEMORYFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Config(format!(
            "MEMORYFLOW_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    // a second call in the same process (tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parse `argv` (config merged in) and run; returns the process exit code.
pub fn main_with_args(argv: Vec<String>) -> i32 {
    let argv = match config::merge_argv(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match init_threads().and_then(|_| run(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn format_entry(cli: &Cli) -> (String, String) {
    let f = match cli.format {
        args::Format::Csv => "csv",
        args::Format::Json => "json",
    };
    ("format".into(), f.into())
}

pub fn run(cli: &Cli) -> Result<()> {
    let out = PathBuf::from(&cli.out);
    let mut entries = vec![(
        "command".to_string(),
        command_name(&cli.command).to_string(),
    )];
    let mut sink;
    match &cli.command {
        Command::Msd(a) => {
            let a = commands::resolve_msd(a)?;
            sink = Sink::new(&out, cli.format)?;
            commands::msd(&a, &mut sink)?;
            entries.extend(config::resolved(&a));
        }
        Command::Weights(a) => {
            sink = Sink::new(&out, cli.format)?;
            commands::weights(a, &mut sink)?;
            entries.extend(config::resolved(a));
        }
        Command::Solve(a) => {
            sink = Sink::new(&out, cli.format)?;
            commands::solve(a, &mut sink)?;
            entries.extend(config::resolved(a));
        }
        Command::Compare(a) => {
            sink = Sink::new(&out, cli.format)?;
            commands::compare(a, &mut sink)?;
            entries.extend(
                config::resolved(a)
                    .into_iter()
                    .filter(|(k, _)| k != "model"),
            );
        }
        Command::Fundamental(a) => {
            sink = Sink::new(&out, cli.format)?;
            commands::fundamental(a, &mut sink)?;
            entries.extend(config::resolved(a));
        }
        Command::Peak(a) => {
            sink = Sink::new(&out, cli.format)?;
            commands::peak(a, &mut sink)?;
            entries.extend(config::resolved(a));
        }
        Command::Walk(a) => {
            sink = Sink::new(&out, cli.format)?;
            commands::walk(a, &mut sink)?;
            entries.extend(config::resolved(a));
        }
        Command::Reproduce(a) => {
            sink = Sink::new(out.join(&a.figure), cli.format)?;
            reproduce::run(&a.figure, &mut sink)?;
            entries.push(("figure".into(), a.figure.clone()));
        }
        Command::Rerun(r) => return rerun(&r.manifest, &cli.out, r.verify),
    }
    entries.push(format_entry(cli));
    sink.manifest(&entries)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Msd(_) => "msd",
        Command::Weights(_) => "weights",
        Command::Solve(_) => "solve",
        Command::Compare(_) => "compare",
        Command::Fundamental(_) => "fundamental",
        Command::Peak(_) => "peak",
        Command::Walk(_) => "walk",
        Command::Reproduce(_) => "reproduce",
        Command::Rerun(_) => "rerun",
    }
}

/// Rebuild the argument vector recorded in a manifest.
#[allow(clippy::type_complexity)]
pub fn manifest_argv(path: &Path) -> Result<(Vec<String>, Vec<(String, String)>)> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let entries = config::parse(&text, &origin)?;
    let command = entries
        .iter()
        .find(|e| e.section.is_none() && e.key == "command")
        .ok_or_else(|| Error::Config(format!("{origin}: no `command` entry")))?
        .value
        .clone();
    let mut argv = vec!["memoryflow".to_string(), command.clone()];
    if command == "reproduce" {
        let fig = entries
            .iter()
            .find(|e| e.section.is_none() && e.key == "figure")
            .ok_or_else(|| {
                Error::Config(format!("{origin}: reproduce manifest without `figure`"))
            })?;
        argv.push(fig.value.clone());
    }
    let flags: Vec<config::Entry> = entries
        .iter()
        .filter(|e| e.section.is_none() && e.key != "command" && e.key != "figure")
        .cloned()
        .collect();
    argv.extend(config::to_flags(&flags, &command, &origin)?);
    let artifacts = entries
        .into_iter()
        .filter(|e| e.section.as_deref() == Some("artifacts"))
        .map(|e| (e.key, e.value))
        .collect();
    Ok((argv, artifacts))
}

fn rerun(manifest: &str, out: &str, verify: bool) -> Result<()> {
    let (mut argv, recorded) = manifest_argv(Path::new(manifest))?;
    argv.push(format!("--out={out}"));
    let cli = Cli::try_parse_from(&argv).map_err(|e| Error::Config(format!("{manifest}: {e}")))?;
    run(&cli)?;
    if verify {
        let dir = match &cli.command {
            Command::Reproduce(a) => PathBuf::from(out).join(&a.figure),
            _ => PathBuf::from(out),
        };
        let (_, fresh) = manifest_argv(&dir.join("manifest.ini"))?;
        for (name, sum) in &recorded {
            match fresh.iter().find(|(n, _)| n == name) {
                Some((_, s)) if s == sum => {}
                Some(_) => {
                    return Err(Error::Numerical(format!(
                        "{name}: checksum differs from {manifest}"
                    )))
                }
                None => {
                    return Err(Error::Numerical(format!(
                        "{name}: not produced by the rerun"
                    )))
                }
            }
        }
    }
    Ok(())
}
