//! JSON-line run reports. Field order is fixed by the struct layout so that
//! identical inputs and seed give byte-identical output.

use serde::Serialize;
use sha2::{Digest, Sha256};

use subiso::count::CountStats;

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct Inputs {
    pub pattern_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub host_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition_sha256: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Stats {
    pub anchors: u64,
    pub hom_evaluations: u64,
    pub gate_visits: u64,
    pub peak_depth: usize,
    pub peak_table_entries: usize,
    pub peak_set_entries: usize,
}

impl From<CountStats> for Stats {
    fn from(s: CountStats) -> Self {
        Stats {
            anchors: s.anchors,
            hom_evaluations: s.hom_evaluations,
            gate_visits: s.gate_visits,
            peak_depth: s.peak_depth,
            peak_table_entries: s.peak_table_entries,
            peak_set_entries: s.peak_set_entries,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FindReport {
    pub command: &'static str,
    pub inputs: Inputs,
    pub algorithm: &'static str,
    pub result: &'static str,
    pub seed: u64,
    pub trials: u32,
    pub successes: u32,
    pub field_exp: u32,
    pub group_dims: u32,
    pub circuit_gates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

#[derive(Debug, Serialize)]
pub struct CountReport {
    pub command: &'static str,
    pub inputs: Inputs,
    pub quantity: String,
    pub algorithm: String,
    /// Decimal, as a string: counts routinely exceed `u64`.
    pub value: String,
    pub seed: u64,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

pub fn print_line<T: Serialize>(report: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string(report)?);
    Ok(())
}
