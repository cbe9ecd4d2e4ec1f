//! Per-stage bookkeeping for the recognition pipelines.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub samples_used: u64,
    /// Wall-clock time; the only field of a report that is not a function of
    /// the seed.
    pub elapsed_ms: u64,
    pub ok: bool,
}

/// Ordered list of stage reports, filled in as a pipeline runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub stages: Vec<StageReport>,
}

impl StageLog {
    /// Runs one stage. The closure reports the number of random samples it
    /// drew through its argument.
    pub fn run<T>(&mut self, name: &str, f: impl FnOnce(&mut u64) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let mut samples = 0;
        let out = f(&mut samples);
        self.stages.push(StageReport {
            name: name.to_string(),
            samples_used: samples,
            elapsed_ms: start.elapsed().as_millis() as u64,
            ok: out.is_ok(),
        });
        out
    }

    pub fn total_samples(&self) -> u64 {
        self.stages.iter().map(|s| s.samples_used).sum()
    }

    /// Copy with timings zeroed, for comparing runs.
    pub fn without_timings(&self) -> StageLog {
        let mut out = self.clone();
        for s in &mut out.stages {
            s.elapsed_ms = 0;
        }
        out
    }
}
