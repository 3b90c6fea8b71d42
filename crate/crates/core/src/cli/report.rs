use std::fmt::Write as _;

use serde::Serialize;

use crate::verification::{Verdict, VerificationResult};

pub const TOOL: &str = concat!("genjacobi ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

/// Everything one command run produced. Serializes with a fixed key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub seed: u64,
    pub scenario_digest: String,
    pub results: Vec<VerificationResult>,
}

impl Report {
    pub fn new(seed: u64, scenario_digest: String, results: Vec<VerificationResult>) -> Self {
        Report {
            tool: TOOL.to_string(),
            seed,
            scenario_digest,
            results,
        }
    }

    pub fn all_verified(&self) -> bool {
        self.results.iter().all(VerificationResult::is_verified)
    }

    /// 0 when every result is verified, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_verified() {
            0
        } else {
            1
        }
    }

    /// Zeroes the timings so the output depends only on the inputs.
    pub fn strip_timings(&mut self) {
        for r in &mut self.results {
            r.millis = 0;
        }
    }

    pub fn emit(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            OutputFormat::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let short = &self.scenario_digest[..self.scenario_digest.len().min(12)];
        let _ = writeln!(out, "{}  seed={}  scenario={}", self.tool, self.seed, short);
        let width = self.results.iter().map(|r| r.identity.len()).max().unwrap_or(0);
        for r in &self.results {
            let verdict = match r.verdict {
                Verdict::Verified => "verified",
                Verdict::Violated => "VIOLATED",
            };
            let _ = writeln!(
                out,
                "  {verdict}  {:width$}  trials={}  {} ms",
                r.identity, r.trials, r.millis
            );
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "    witness: {w}");
            }
        }
        let violated = self.results.iter().filter(|r| !r.is_verified()).count();
        let _ = writeln!(
            out,
            "{} verified, {} violated",
            self.results.len() - violated,
            violated
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_schema_and_exit_code() {
        let mut r = Report::new(
            7,
            "ab".repeat(32),
            vec![
                VerificationResult::verified("1.3", 4),
                VerificationResult::violated("1.2", 1, json!({"residual": "2*A1*A2"})),
            ],
        );
        r.results[0].millis = 5;
        assert_eq!(r.exit_code(), 1);
        r.strip_timings();
        let v: serde_json::Value = serde_json::from_str(&r.emit(OutputFormat::Json)).unwrap();
        assert_eq!(v["tool"], TOOL);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["results"][0]["verdict"], "verified");
        assert_eq!(v["results"][0]["millis"], 0);
        assert_eq!(v["results"][1]["witness"]["residual"], "2*A1*A2");
        assert!(v["results"][0]["witness"].is_null());
        let text = r.emit(OutputFormat::Text);
        assert!(text.contains("VIOLATED  1.2"), "{text}");
        assert!(text.ends_with("1 verified, 1 violated\n"));
    }
}
