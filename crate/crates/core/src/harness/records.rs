use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const SCHEMA: &str = "experiment,problem,set,N,theta,rep,seed,metric,value";
pub const SCHEMA_VERSION: u32 = 1;

/// One CSV row. Aggregates leave `rep` empty; per-run errors use
/// `metric = "error"` and a NaN value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub problem: String,
    pub set: String,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub rep: Option<usize>,
    pub seed: Option<u64>,
    pub metric: String,
    pub value: f64,
}

pub fn write_records<W: Write>(w: W, records: &[Record]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    if records.is_empty() {
        wr.write_record(SCHEMA.split(','))?;
    }
    for r in records {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let mut rd = csv::Reader::from_path(path)?;
    rd.deserialize().map(|r| r.map_err(Into::into)).collect()
}

/// Plain `key = value` run manifest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = String::new();
        for (k, v) in &self.entries {
            // keep one entry per line
            s.push_str(&format!("{k} = {}\n", v.replace('\n', "\\n")));
        }
        std::fs::write(path, s)?;
        Ok(())
    }
}
