//! JSON reports.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "logdrw-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Details {
    pub instances: u64,
    pub failures: u64,
    /// Serialized inputs of the smallest failing instance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub details: Details,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Counts instances of one identity and keeps the shortest failing input.
#[derive(Debug, Clone)]
pub struct Tally {
    name: String,
    instances: u64,
    failures: u64,
    witness: Option<Vec<String>>,
    note: Option<String>,
}

impl Tally {
    pub fn new(name: impl Into<String>) -> Self {
        Tally {
            name: name.into(),
            instances: 0,
            failures: 0,
            witness: None,
            note: None,
        }
    }

    /// Records one instance; `witness` is only evaluated on failure.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<String>) {
        self.instances += 1;
        if ok {
            return;
        }
        self.failures += 1;
        let w = witness();
        let size = |v: &Vec<String>| v.iter().map(String::len).sum::<usize>();
        if self.witness.as_ref().is_none_or(|old| size(&w) < size(old)) {
            self.witness = Some(w);
        }
    }

    /// Records an instance whose evaluation returned an error as a failure.
    pub fn record_result(&mut self, r: logdrw::Result<bool>, witness: impl FnOnce() -> Vec<String>) {
        match r {
            Ok(ok) => self.record(ok, witness),
            Err(e) => self.record(false, || {
                let mut w = witness();
                w.push(format!("error: {e}"));
                w
            }),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn finish(self) -> Check {
        let status = if self.failures == 0 && self.instances > 0 {
            Status::Pass
        } else {
            Status::Fail
        };
        let note = match (self.note, self.instances) {
            (n, 0) => Some(n.unwrap_or_else(|| "no instances were generated".into())),
            (n, _) => n,
        };
        Check {
            name: self.name,
            status,
            details: Details {
                instances: self.instances,
                failures: self.failures,
                counterexample: self.witness,
                note,
            },
        }
    }
}

/// A named table of JSON rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub rows: Vec<Value>,
}

/// Checks and tables produced by one suite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn extend(&mut self, other: Outcome) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub suite: String,
    pub config: BTreeMap<String, String>,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    /// Wall-clock time, present only when requested so that reports stay reproducible.
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(suite: &str, config: BTreeMap<String, String>, outcome: Outcome, timing_ms: Option<u64>) -> Self {
        let passed = outcome.checks.iter().filter(|c| c.passed()).count();
        Report {
            schema: SCHEMA,
            suite: suite.to_string(),
            config,
            summary: Summary {
                checks: outcome.checks.len(),
                passed,
                failed: outcome.checks.len() - passed,
            },
            checks: outcome.checks,
            tables: outcome.tables,
            timing_ms,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_keeps_shortest_witness() {
        let mut t = Tally::new("x");
        t.record(true, || unreachable!());
        t.record(false, || vec!["long input".into()]);
        t.record(false, || vec!["short".into()]);
        t.record(false, || vec!["longer again".into()]);
        let c = t.finish();
        assert_eq!(c.status, Status::Fail);
        assert_eq!(c.details.failures, 3);
        assert_eq!(c.details.counterexample, Some(vec!["short".to_string()]));
    }

    #[test]
    fn empty_tally_fails() {
        assert_eq!(Tally::new("x").finish().status, Status::Fail);
    }

    #[test]
    fn json_shape() {
        let mut t = Tally::new("ok");
        t.record(true, Vec::new);
        let outcome = Outcome {
            checks: vec![t.finish()],
            tables: vec![],
        };
        let r = Report::new("demo", BTreeMap::from([("seed".into(), "1".into())]), outcome, None);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["checks"][0]["status"], "pass");
        assert!(v["timing_ms"].is_null());
        assert!(r.passed());
    }
}
