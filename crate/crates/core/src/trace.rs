//! Run traces and their JSON-lines persistence.
//!
//! A trace file starts with one header line echoing the method, seed and
//! configuration, followed by one record per screened variant:
//!
//! ```text
//! {"method":"boes","seed":0,"config":{...}}
//! {"step":1,"variant":"VDGV","fitness":1.0,"best":1.0,"theta":null}
//! ```

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub method: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl TraceHeader {
    pub fn new(method: impl Into<String>, seed: u64, config: serde_json::Value) -> Self {
        TraceHeader {
            method: method.into(),
            seed,
            config,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub variant: String,
    pub fitness: f64,
    pub best: f64,
    /// Fitted surrogate hyperparameter, absent for screens not chosen by a model.
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn new(header: TraceHeader) -> Self {
        RunTrace {
            header,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_best(&self) -> Option<f64> {
        self.records.last().map(|r| r.best)
    }

    /// Best fitness after `count` screens; shorter traces keep their final best.
    pub fn best_at(&self, count: usize) -> Option<f64> {
        if count == 0 || self.records.is_empty() {
            return None;
        }
        let i = count.min(self.records.len()) - 1;
        Some(self.records[i].best)
    }

    /// Number of screens needed to first reach `target`, if ever.
    pub fn screens_to_reach(&self, target: f64) -> Option<usize> {
        self.records.iter().find(|r| r.best >= target).map(|r| r.step)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_jsonl().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(f).lines().enumerate();
        let header = loop {
            match lines.next() {
                None => return Err(Error::parse(path, 1, "missing trace header")),
                Some((_, Err(e))) => return Err(Error::io(path, e)),
                Some((i, Ok(line))) if !line.trim().is_empty() => {
                    break serde_json::from_str::<TraceHeader>(&line)
                        .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
                }
                Some(_) => {}
            }
        };
        let mut records = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let r: TraceRecord = serde_json::from_str(&line)
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
            records.push(r);
        }
        Ok(RunTrace { header, records })
    }
}
