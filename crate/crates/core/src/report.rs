use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::graded::WeightVector;

/// At most this many failure messages are kept verbatim; the rest are only counted.
const MAX_FAILURE_MESSAGES: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrandRow {
    pub e: i64,
    /// Homology dimension per cohomological degree (zeros omitted).
    pub dims: BTreeMap<i64, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCheck {
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

/// Pass/fail outcome of one verification, with the evidence that decided it.
///
/// Wall-clock time is kept in memory only, so serialized reports are byte-stable.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub weights: Vec<u32>,
    pub params: BTreeMap<String, Value>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "is_zero")]
    pub failure_count: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub strands: Vec<StrandRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<VerificationReport>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, w: &WeightVector) -> Self {
        VerificationReport {
            check: check.into(),
            weights: w.weights().to_vec(),
            params: BTreeMap::new(),
            pass: true,
            failures: Vec::new(),
            failure_count: 0,
            strands: Vec::new(),
            series: None,
            qualifier: None,
            details: BTreeMap::new(),
            parts: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.pass = false;
        self.failure_count += 1;
        if self.failures.len() < MAX_FAILURE_MESSAGES {
            self.failures.push(msg.into());
        }
    }

    /// Adds a sub-report; a failing part fails the whole report.
    pub fn push_part(&mut self, part: VerificationReport) {
        if !part.pass {
            self.fail(format!("{} failed", part.label()));
        }
        self.elapsed += part.elapsed;
        self.parts.push(part);
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    /// `check[k=..,m=..]` for messages.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            return self.check.clone();
        }
        let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}[{}]", self.check, ps.join(","))
    }

    pub fn with_elapsed(mut self, d: Duration) -> Self {
        self.elapsed = d;
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_report(r: &VerificationReport, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
            let pad = " ".repeat(indent);
            let weights: Vec<String> = r.weights.iter().map(u32::to_string).collect();
            writeln!(
                f,
                "{pad}{} {} w=({})",
                if r.pass { "PASS" } else { "FAIL" },
                r.label(),
                weights.join(",")
            )?;
            if let Some(q) = &r.qualifier {
                writeln!(f, "{pad}  note: {q}")?;
            }
            if let Some(s) = &r.series {
                writeln!(f, "{pad}  series: {} == {} -> {}", s.lhs, s.rhs, s.equal)?;
            }
            for msg in &r.failures {
                writeln!(f, "{pad}  - {msg}")?;
            }
            if r.failure_count > r.failures.len() {
                writeln!(f, "{pad}  ... {} more failures", r.failure_count - r.failures.len())?;
            }
            for part in &r.parts {
                write_report(part, f, indent + 2)?;
            }
            Ok(())
        }
        write_report(self, f, 0)
    }
}
