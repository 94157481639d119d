//! Report envelopes and artifact writers shared by the command-line tools.
//!
//! Every report embeds the parameters needed to reproduce the run (depth,
//! error bound, tolerance, resolution, seed). The timestamp is optional so
//! that fixed-seed runs can be compared byte for byte.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::attractor::AttractorApprox;
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct ReportEnvelope<T: Serialize> {
    pub command: String,
    pub configs: Vec<String>,
    pub depth: Option<usize>,
    pub error_bound: Option<f64>,
    pub tolerance: Option<f64>,
    pub resolution: Option<f64>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub result: T,
}

impl<T: Serialize> ReportEnvelope<T> {
    pub fn new(command: &str, configs: Vec<String>, result: T) -> Self {
        ReportEnvelope {
            command: command.to_string(),
            configs,
            depth: None,
            error_bound: None,
            tolerance: None,
            resolution: None,
            seed: None,
            timestamp: None,
            result,
        }
    }

    pub fn with_timestamp(mut self, enabled: bool) -> Self {
        if enabled {
            self.timestamp = Some(
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            );
        }
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Write via a temporary sibling and rename, so readers never observe a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}tmp",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Point clouds as CSV: `vertex,x1,...,xd`, in cloud order.
pub fn points_csv(approx: &AttractorApprox, dim: usize) -> String {
    let mut out = String::from("vertex");
    for a in 1..=dim {
        out.push_str(&format!(",x{a}"));
    }
    out.push('\n');
    for (vi, cloud) in approx.clouds().iter().enumerate() {
        for p in cloud {
            out.push_str(&format!("{}", vi + 1));
            for a in 0..dim {
                out.push_str(&format!(",{}", fmt_f64(p.0[a])));
            }
            out.push('\n');
        }
    }
    out
}

fn fmt_f64(x: f64) -> String {
    // shortest representation that round-trips
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}
