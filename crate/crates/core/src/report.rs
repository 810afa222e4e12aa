//! Check reports shared by every verifier.
//!
//! Checks with the same id are merged: one entry per id, failed if any
//! instance failed, with the first few witnesses kept.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

const MAX_WITNESSES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub instances: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    fn entry(&mut self, id: &str) -> &mut Check {
        if let Some(k) = self.checks.iter().position(|c| c.id == id) {
            return &mut self.checks[k];
        }
        self.checks.push(Check {
            id: id.to_string(),
            status: Status::Pass,
            instances: 0,
            failures: 0,
            witnesses: Vec::new(),
            elapsed_ms: None,
        });
        self.checks.last_mut().unwrap()
    }

    pub fn pass(&mut self, id: &str) {
        self.entry(id).instances += 1;
    }

    pub fn fail(&mut self, id: &str, witness: impl Into<String>) {
        let c = self.entry(id);
        c.instances += 1;
        c.failures += 1;
        c.status = Status::Fail;
        if c.witnesses.len() < MAX_WITNESSES {
            c.witnesses.push(witness.into());
        }
    }

    /// Record one instance; the witness is only built on failure.
    pub fn check<W: Into<String>>(&mut self, id: &str, ok: bool, witness: impl FnOnce() -> W) {
        if ok {
            self.pass(id);
        } else {
            self.fail(id, witness());
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn set_elapsed(&mut self, id: &str, ms: u64) {
        self.entry(id).elapsed_ms = Some(ms);
    }

    pub fn strip_timing(&mut self) {
        for c in &mut self.checks {
            c.elapsed_ms = None;
        }
    }

    /// Fold another report in, prefixing its check ids.
    pub fn merge(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            let id = if prefix.is_empty() { c.id.clone() } else { format!("{prefix}.{}", c.id) };
            let e = self.entry(&id);
            e.instances += c.instances;
            e.failures += c.failures;
            if c.status == Status::Fail {
                e.status = Status::Fail;
            }
            for w in c.witnesses {
                if e.witnesses.len() < MAX_WITNESSES {
                    e.witnesses.push(w);
                }
            }
            if c.elapsed_ms.is_some() {
                e.elapsed_ms = c.elapsed_ms;
            }
        }
        self.notes.extend(other.notes);
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn status(&self, id: &str) -> Option<Status> {
        self.checks.iter().find(|c| c.id == id).map(|c| c.status)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let overall = if self.is_ok() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} [{overall}]", self.title);
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
            };
            let _ = write!(out, "  {:<width$}  {tag}  {}/{}", c.id, c.instances - c.failures, c.instances);
            if let Some(ms) = c.elapsed_ms {
                let _ = write!(out, "  {ms} ms");
            }
            out.push('\n');
            for w in &c.witnesses {
                let _ = writeln!(out, "      {w}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_keeps_failures() {
        let mut a = Report::new("a");
        a.pass("x");
        let mut b = Report::new("b");
        b.fail("y", "w");
        a.merge("b", b);
        assert!(!a.is_ok());
        assert_eq!(a.status("b.y"), Some(Status::Fail));
        let back: Report = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }
}
