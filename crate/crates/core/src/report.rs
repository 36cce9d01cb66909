//! Structured verification results.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::bounds::SearchBounds;
use crate::vdc::Frame;

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    /// Some quantifier hit its bound before exhausting its range.
    Truncated,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Truncated => "truncated",
            Status::Fail => "fail",
        }
    }

    /// The worse of two statuses: fail dominates truncated dominates pass.
    pub fn join(self, other: Status) -> Status {
        core::cmp::max(self, other)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A witnessed failure: a human readable description plus the frames involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub description: String,
    pub frames: Vec<Frame>,
}

impl Counterexample {
    pub fn new(description: impl Into<String>) -> Self {
        Counterexample {
            description: description.into(),
            frames: Vec::new(),
        }
    }

    pub fn with_frames(description: impl Into<String>, frames: Vec<Frame>) -> Self {
        Counterexample {
            description: description.into(),
            frames,
        }
    }
}

/// Counterexamples kept per report; failures beyond this are only counted.
pub const MAX_KEPT_COUNTEREXAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub name: String,
    pub status: Status,
    pub bounds: Option<SearchBounds>,
    pub counterexamples: Vec<Counterexample>,
    /// Total number of failures, including ones not kept as counterexamples.
    pub failures: u64,
    pub notes: Vec<String>,
    /// Number of instances (frames, arrangements, tuples) examined.
    pub checked: u64,
    pub children: Vec<VerificationReport>,
    pub elapsed: Option<Duration>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>) -> Self {
        VerificationReport {
            name: name.into(),
            status: Status::Pass,
            bounds: None,
            counterexamples: Vec::new(),
            failures: 0,
            notes: Vec::new(),
            checked: 0,
            children: Vec::new(),
            elapsed: None,
        }
    }

    pub fn with_bounds(mut self, bounds: SearchBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn fail(&mut self, cx: Counterexample) {
        self.status = Status::Fail;
        self.failures += 1;
        if self.counterexamples.len() < MAX_KEPT_COUNTEREXAMPLES {
            self.counterexamples.push(cx);
        }
    }

    pub fn fail_msg(&mut self, description: impl Into<String>) {
        self.fail(Counterexample::new(description));
    }

    pub fn truncate(&mut self, note: impl Into<String>) {
        self.status = self.status.join(Status::Truncated);
        self.notes.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn tick(&mut self) {
        self.checked += 1;
    }

    /// Attach a sub-report; its status propagates upwards.
    pub fn push(&mut self, child: VerificationReport) {
        self.status = self.status.join(child.status);
        self.checked += child.checked;
        self.children.push(child);
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// Depth-first list of every report in the tree, with slash-joined names.
    pub fn flatten(&self) -> Vec<(String, &VerificationReport)> {
        let mut out = Vec::new();
        self.flatten_into(String::new(), &mut out);
        out
    }

    fn flatten_into<'a>(&'a self, prefix: String, out: &mut Vec<(String, &'a VerificationReport)>) {
        let mut name = prefix;
        if !name.is_empty() {
            name.push('/');
        }
        name.push_str(&self.name);
        out.push((name.clone(), self));
        for child in &self.children {
            child.flatten_into(name.clone(), out);
        }
    }

    /// The first failing report in depth-first order, preferring leaves.
    pub fn first_failure(&self) -> Option<&VerificationReport> {
        if self.status != Status::Fail {
            return None;
        }
        for child in &self.children {
            if let Some(found) = child.first_failure() {
                return Some(found);
            }
        }
        Some(self)
    }

    pub fn child(&self, name: &str) -> Option<&VerificationReport> {
        self.children.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_propagate_and_flatten_in_order() {
        let mut root = VerificationReport::new("root");
        let mut a = VerificationReport::new("a");
        a.tick();
        let mut b = VerificationReport::new("b");
        b.truncate("budget");
        let mut c = VerificationReport::new("c");
        c.fail_msg("broken");
        b.push(c);
        root.push(a);
        assert_eq!(root.status, Status::Pass);
        root.push(b);
        assert_eq!(root.status, Status::Fail);
        assert_eq!(root.checked, 1);
        let names: Vec<String> = root.flatten().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, ["root", "root/a", "root/b", "root/b/c"]);
        assert_eq!(root.first_failure().unwrap().name, "c");
        assert_eq!(root.child("b").unwrap().status, Status::Fail);
    }

    #[test]
    fn join_is_the_maximum() {
        use Status::*;
        for (x, y, z) in [(Pass, Truncated, Truncated), (Truncated, Fail, Fail), (Pass, Pass, Pass)] {
            assert_eq!(x.join(y), z);
            assert_eq!(y.join(x), z);
        }
    }
}
