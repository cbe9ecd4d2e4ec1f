use bbgroup::field::StructureConstants;
use bbgroup::report::StageReport;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub p: u64,
    pub k: usize,
    pub q: u64,
    pub psl: bool,
    pub opaque: bool,
    pub trials: u64,
    pub pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub mode: String,
    pub seed: u64,
    pub params: Params,
    pub stages: Vec<StageReport>,
    pub verification: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<StructureConstants>,
}

/// One finished run of a mode.
pub struct RunResult {
    pub stages: Vec<StageReport>,
    pub verification: Value,
    pub structure_constants: Option<StructureConstants>,
    pub success: bool,
    pub line: String,
}

pub struct Outcome {
    pub report: Report,
    pub summary: String,
    pub exit_code: u8,
}
