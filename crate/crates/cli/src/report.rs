//! Report envelopes and writers.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use superquant::reps::Conventions;

use crate::config::{config_error, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn parse(text: &str) -> anyhow::Result<Format> {
        match text {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            other => Err(config_error(format!("output.format: unknown format `{other}`"))),
        }
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config_hash: &'a str,
    pub config: &'a RunConfig,
    pub seed: u64,
    pub conventions: Conventions,
    pub passed: bool,
    pub exit_code: i32,
    pub result: T,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()?)
    }
}

/// What a command produced.
pub struct Outcome {
    pub code: i32,
    pub json: String,
    pub table: Option<Table>,
    pub summary: String,
}

pub fn envelope_json<T: Serialize>(
    command: &str,
    config_hash: &str,
    config: &RunConfig,
    seed: u64,
    code: i32,
    result: T,
) -> anyhow::Result<String> {
    let env = Envelope {
        tool: "superquant",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config_hash,
        config,
        seed,
        conventions: Conventions::default(),
        passed: code == 0,
        exit_code: code,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

/// Writes `<command>.json` and `<command>.csv` into `dir`, or prints to
/// stdout when no directory is given.
pub fn emit(command: &str, outcome: &Outcome, format: Format, dir: Option<&Path>) -> anyhow::Result<()> {
    let csv = match (&outcome.table, format.csv()) {
        (Some(t), true) => Some(t.to_csv()?),
        _ => None,
    };
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            if format.json() || outcome.table.is_none() {
                let path = dir.join(format!("{command}.json"));
                std::fs::write(&path, &outcome.json).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(bytes) = csv {
                let path = dir.join(format!("{command}.csv"));
                std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        None => {
            if format == Format::Both && outcome.table.is_some() {
                return Err(config_error("--format both needs an output directory"));
            }
            let mut out = std::io::stdout().lock();
            match csv {
                Some(bytes) => out.write_all(&bytes)?,
                None => out.write_all(outcome.json.as_bytes())?,
            }
        }
    }
    Ok(())
}
