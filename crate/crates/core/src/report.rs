//! Verdicts with witnesses, shared by every check in the engine.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: String,
    /// User-facing ids naming the failing instance of the law.
    pub witness: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Component chains of the two sides at the witness object.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lhs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rhs: Vec<String>,
}

impl Violation {
    pub fn new(law: &str, witness: Vec<String>) -> Violation {
        Violation { law: law.to_string(), witness, detail: None, lhs: Vec::new(), rhs: Vec::new() }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Violation {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One named condition, the number of instances enumerated and its violations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub condition: String,
    pub subject: String,
    pub checked: usize,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub violations: Vec<Violation>,
}

/// Sections keep at most this many witnesses; `failures` still counts all.
pub const MAX_WITNESSES: usize = 8;

impl Section {
    pub fn new(condition: &str, subject: &str) -> Section {
        Section {
            condition: condition.to_string(),
            subject: subject.to_string(),
            checked: 0,
            status: Status::Pass,
            note: None,
            violations: Vec::new(),
        }
    }

    pub fn skipped(condition: &str, subject: &str, reason: impl Into<String>) -> Section {
        let mut s = Section::new(condition, subject);
        s.status = Status::Skipped;
        s.note = Some(reason.into());
        s
    }

    pub fn count(&mut self) {
        self.checked += 1;
    }

    pub fn fail(&mut self, v: Violation) {
        self.status = Status::Fail;
        if self.violations.len() < MAX_WITNESSES {
            self.violations.push(v);
        }
    }

    pub fn note(mut self, n: impl Into<String>) -> Section {
        self.note = Some(n.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn absorb(&mut self, other: Section) {
        self.checked += other.checked;
        if other.status == Status::Fail {
            self.status = Status::Fail;
            for v in other.violations {
                if self.violations.len() < MAX_WITNESSES {
                    self.violations.push(v);
                }
            }
        }
    }
}

/// A named group of sections; the verdict is the conjunction of the sections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(suite: &str) -> Report {
        Report { suite: suite.to_string(), sections: Vec::new() }
    }

    pub fn push(&mut self, s: Section) {
        self.sections.push(s);
    }

    pub fn extend(&mut self, r: Report) {
        self.sections.extend(r.sections);
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    pub fn section(&self, condition: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.condition == condition)
    }

    /// Verdict restricted to sections whose condition starts with `prefix`.
    pub fn passed_on(&self, prefix: &str) -> bool {
        self.sections.iter().filter(|s| s.condition.starts_with(prefix)).all(Section::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Section> {
        self.sections.iter().filter(|s| !s.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}: {}", self.suite, if self.passed() { "pass" } else { "FAIL" })?;
        for s in &self.sections {
            let st = match s.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            write!(f, "  [{st}] {} ({}) checked={}", s.condition, s.subject, s.checked)?;
            if let Some(n) = &s.note {
                write!(f, " -- {n}")?;
            }
            writeln!(f)?;
            for v in &s.violations {
                writeln!(f, "      {} at [{}]", v.law, v.witness.join(", "))?;
                if let Some(d) = &v.detail {
                    writeln!(f, "        {d}")?;
                }
                for l in &v.lhs {
                    writeln!(f, "        lhs: {l}")?;
                }
                for r in &v.rhs {
                    writeln!(f, "        rhs: {r}")?;
                }
            }
        }
        Ok(())
    }
}
