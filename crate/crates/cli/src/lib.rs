//! Driver behind the `thermal-qkd` binary.
//!
//! Each subcommand produces a plot-ready table. With `--out`, the table is
//! written to that path together with `<out>.manifest.json`, which records
//! the resolved command and can be passed to `replay`. `simulate` also
//! writes the raw per-trial records to `<out>.trials.csv`.

pub mod args;
pub mod commands;
pub mod manifest;
pub mod table;

use std::fs;
use std::io::Write;

use anyhow::Context;

pub use args::{Cli, Command};
pub use commands::Artifacts;
pub use manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or flag combinations.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn check(command: &Command) -> Result<(), CliError> {
    if let Command::Offset(a) = command {
        if a.sampling.trials <= 2 * a.max_offset {
            return Err(CliError::Usage(format!(
                "--trials ({}) must exceed twice --max-offset ({})",
                a.sampling.trials, a.max_offset
            )));
        }
    }
    Ok(())
}

/// Computes the artifacts of a resolved command without touching the
/// file system.
pub fn render(command: &Command) -> Result<Artifacts, CliError> {
    check(command)?;
    Ok(match command {
        Command::Simulate(a) => commands::simulate(a)?,
        Command::SweepEve(a) => commands::sweep_eve(a)?,
        Command::SweepVariance(a) => commands::sweep_variance(a)?,
        Command::Offset(a) => commands::offset(a)?,
        Command::Replay(_) => {
            return Err(CliError::Usage("replay cannot be rendered directly".into()))
        }
    })
}

/// Runs a command, writing its outputs and manifest.
pub fn execute(command: &Command) -> Result<(), CliError> {
    if let Command::Replay(r) = command {
        let mut recorded = RunManifest::read(&r.manifest)?.command;
        if matches!(recorded, Command::Replay(_)) {
            return Err(CliError::Usage("a manifest cannot record a replay".into()));
        }
        if let (Some(out), Some(o)) = (&r.out, recorded.output_mut()) {
            o.out = Some(out.clone());
        }
        return execute(&recorded);
    }

    let artifacts = render(command)?;
    let out = command.output().and_then(|o| o.out.as_ref());
    match out {
        None => {
            std::io::stdout()
                .write_all(artifacts.primary.as_bytes())
                .context("writing to stdout")?;
        }
        Some(path) => {
            fs::write(path, &artifacts.primary)
                .with_context(|| format!("writing {}", path.display()))?;
            if let Some(trials) = &artifacts.trials {
                let p = manifest::sibling(path, "trials.csv");
                fs::write(&p, trials).with_context(|| format!("writing {}", p.display()))?;
            }
            RunManifest::new(command).write(&manifest::sibling(path, "manifest.json"))?;
        }
    }
    Ok(())
}
