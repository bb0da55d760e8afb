use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// Revision of the output schema; bumped when a field changes meaning.
pub const SCHEMA_REVISION: &str = "1";

#[derive(Debug, Serialize)]
pub struct Versions {
    pub artifact: &'static str,
    pub spec: &'static str,
}

#[derive(Debug, Serialize)]
pub struct OutputEnvelope {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub versions: Versions,
    pub elapsed_ms: u64,
}

impl OutputEnvelope {
    pub fn new(command: &str, parameters: Value, results: Value, start: Instant) -> OutputEnvelope {
        OutputEnvelope {
            command: command.to_string(),
            parameters,
            results,
            versions: Versions { artifact: env!("CARGO_PKG_VERSION"), spec: SCHEMA_REVISION },
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}
