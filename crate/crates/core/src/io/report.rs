use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Envelope written around every JSON report.
#[derive(Debug, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub schema_version: u32,
    pub tool: String,
    pub config: &'a RunConfig,
    pub report: &'a T,
}

impl<'a, T: Serialize> Document<'a, T> {
    pub fn new(config: &'a RunConfig, report: &'a T) -> Self {
        Document {
            schema_version: SCHEMA_VERSION,
            tool: format!("monostatic {}", env!("CARGO_PKG_VERSION")),
            config,
            report,
        }
    }
}

pub fn to_json<T: Serialize>(config: &RunConfig, report: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Document::new(config, report))?)
}

/// Writes `report` wrapped in a [`Document`].
pub fn write_report<T: Serialize>(report: &T, config: &RunConfig, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &Document::new(config, report))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes a bare JSON array; an empty slice yields `[]`.
pub fn write_json_list<T: Serialize>(items: &[T], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, items)?;
    w.flush()?;
    Ok(())
}

/// One CSV row per record, with a header row.
pub fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
