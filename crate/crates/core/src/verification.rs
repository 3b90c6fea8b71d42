use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Violated,
}

/// Outcome of checking one identity. A violated result always carries a
/// witness describing the failing instance and its nonzero residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub identity: String,
    pub verdict: Verdict,
    pub trials: u64,
    pub witness: Option<Value>,
    pub millis: u64,
    pub stats: Map<String, Value>,
}

impl VerificationResult {
    pub fn verified(identity: impl Into<String>, trials: u64) -> Self {
        VerificationResult {
            identity: identity.into(),
            verdict: Verdict::Verified,
            trials,
            witness: None,
            millis: 0,
            stats: Map::new(),
        }
    }

    pub fn violated(identity: impl Into<String>, trials: u64, witness: Value) -> Self {
        VerificationResult {
            identity: identity.into(),
            verdict: Verdict::Violated,
            trials,
            witness: Some(witness),
            millis: 0,
            stats: Map::new(),
        }
    }

    /// Verified when `witness` is `None`, violated otherwise.
    pub fn from_witness(identity: impl Into<String>, trials: u64, witness: Option<Value>) -> Self {
        match witness {
            None => VerificationResult::verified(identity, trials),
            Some(w) => VerificationResult::violated(identity, trials, w),
        }
    }

    pub fn with_stat(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.stats.insert(key.to_string(), value.into());
        self
    }

    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

/// Runs `f` and stores its wall-clock duration on the result.
pub fn timed<E>(
    f: impl FnOnce() -> Result<VerificationResult, E>,
) -> Result<VerificationResult, E> {
    let start = std::time::Instant::now();
    let mut result = f()?;
    result.millis = start.elapsed().as_millis() as u64;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_with_lowercase_verdict() {
        let r = VerificationResult::violated("1.2", 3, serde_json::json!({"residual": "x1"}))
            .with_stat("terms", 1);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "violated");
        assert_eq!(v["witness"]["residual"], "x1");
        assert_eq!(v["stats"]["terms"], 1);
    }
}
