use serde::{Deserialize, Serialize};

/// The validated invocation, echoed into every artifact.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool: String,
    pub subcommand: String,
    pub params: Params,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub format: Option<String>,
    pub verbosity: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: Option<u64>,
    pub k: Option<usize>,
    pub t: Option<u32>,
    pub d: Option<usize>,
    pub s: Option<Vec<usize>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(subcommand: &str) -> Self {
        RunConfig {
            tool: concat!("ges ", env!("CARGO_PKG_VERSION")).to_string(),
            subcommand: subcommand.to_string(),
            ..Default::default()
        }
    }
}
