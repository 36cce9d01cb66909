//! Report rendering and exit codes.
//!
//! Two formats are supported. `text` is an indented tree meant for people.
//! `lines` is one ASCII record per report node, in depth-first order:
//!
//! ```text
//! CHECK <name> <pass|fail|truncated> <detail>
//! ```
//!
//! Names have whitespace replaced by `_`. Details never contain newlines.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;
use veq_core::{Status, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Lines,
}

/// Exit code for success.
pub const EXIT_PASS: i32 = 0;
/// Exit code when some check failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for unreadable, unparsable or inconsistent input.
pub const EXIT_ERROR: i32 = 2;
/// Exit code when nothing failed but some bound was hit.
pub const EXIT_TRUNCATED: i32 = 3;

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Truncated => EXIT_TRUNCATED,
    }
}

/// Worst status over a list of reports.
pub fn overall(reports: &[VerificationReport]) -> Status {
    reports.iter().fold(Status::Pass, |s, r| s.join(r.status))
}

fn ascii_line(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '\n' | '\r' | '\t' => ' ',
            c if c.is_ascii() && !c.is_ascii_control() => c,
            _ => '?',
        })
        .collect()
}

fn record_name(s: &str) -> String {
    ascii_line(s).split_whitespace().collect::<Vec<_>>().join("_")
}

/// The detail field of a `lines` record.
pub fn detail(r: &VerificationReport) -> String {
    let mut d = format!("checked={}", r.checked);
    match r.status {
        Status::Fail => {
            if let Some(cx) = r.counterexamples.first() {
                let _ = write!(d, " {}", cx.description);
            } else if let Some(child) = r.first_failure().filter(|c| !std::ptr::eq(*c, r)) {
                let _ = write!(d, " see {}", child.name);
            }
            if r.failures > 1 {
                let _ = write!(d, " (+{} more)", r.failures - 1);
            }
        }
        Status::Truncated | Status::Pass => {
            if !r.notes.is_empty() {
                let _ = write!(d, " {}", r.notes.join("; "));
            }
        }
    }
    ascii_line(&d)
}

pub fn lines(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        for (name, node) in r.flatten() {
            let _ = writeln!(out, "CHECK {} {} {}", record_name(&name), node.status, detail(node));
        }
    }
    out
}

pub fn text(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        tree(r, 0, &mut out);
    }
    let _ = writeln!(out, "overall: {}", overall(reports));
    out
}

fn tree(r: &VerificationReport, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let mut head = format!("{pad}[{}] {} (checked {}", r.status, r.name, r.checked);
    if let Some(t) = r.elapsed {
        let _ = write!(head, ", {:.2?}", t);
    }
    head.push(')');
    let _ = writeln!(out, "{head}");
    if let Some(b) = r.bounds {
        let _ = writeln!(out, "{pad}    bounds: {b}");
    }
    for n in &r.notes {
        let _ = writeln!(out, "{pad}    note: {n}");
    }
    for cx in &r.counterexamples {
        let _ = writeln!(out, "{pad}    counterexample: {}", cx.description);
    }
    if r.failures > r.counterexamples.len() as u64 {
        let _ = writeln!(
            out,
            "{pad}    ... {} more failures",
            r.failures - r.counterexamples.len() as u64
        );
    }
    for c in &r.children {
        tree(c, depth + 1, out);
    }
}

pub fn render(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Text => text(reports),
        Format::Lines => lines(reports),
    }
}

/// One parsed `lines` record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl FromStr for Record {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let mut parts = line.splitn(4, ' ');
        if parts.next() != Some("CHECK") {
            return Err(format!("not a CHECK record: {line}"));
        }
        let name = parts.next().filter(|n| !n.is_empty()).ok_or("missing name")?;
        let status = match parts.next() {
            Some("pass") => Status::Pass,
            Some("fail") => Status::Fail,
            Some("truncated") => Status::Truncated,
            other => return Err(format!("bad status {other:?} in: {line}")),
        };
        Ok(Record {
            name: name.to_string(),
            status,
            detail: parts.next().unwrap_or_default().to_string(),
        })
    }
}

impl std::fmt::Display for Record {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CHECK {} {} {}", self.name, self.status, self.detail)
    }
}

/// Parse a `lines` stream; blank lines are skipped.
pub fn parse_records(text: &str) -> Result<Vec<Record>, String> {
    text.lines().filter(|l| !l.trim().is_empty()).map(str::parse).collect()
}

/// Re-render parsed records.
pub fn render_records(records: &[Record], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Lines => {
            for r in records {
                let _ = writeln!(out, "{r}");
            }
        }
        Format::Text => {
            for r in records {
                let depth = r.name.matches('/').count();
                let leaf = r.name.rsplit('/').next().unwrap_or(&r.name);
                let _ = writeln!(out, "{}[{}] {} {}", "  ".repeat(depth), r.status, leaf, r.detail);
            }
            let worst = records.iter().fold(Status::Pass, |s, r| s.join(r.status));
            let _ = writeln!(out, "overall: {worst}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use veq_core::Counterexample;

    use super::*;

    fn sample() -> VerificationReport {
        let mut root = VerificationReport::new("verify B2");
        let mut a = VerificationReport::new("laws");
        a.tick();
        a.note("thin store");
        let mut b = VerificationReport::new("category |V|");
        b.fail(Counterexample::new("comp(0, 1, 1): frame\nwrong"));
        b.fail_msg("second");
        root.push(a);
        root.push(b);
        root
    }

    #[test]
    fn lines_have_one_record_per_node() {
        let out = lines(&[sample()]);
        let recs = parse_records(&out).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].name, "verify_B2");
        assert_eq!(recs[0].status, Status::Fail);
        assert_eq!(recs[1].detail, "checked=1 thin store");
        assert_eq!(recs[2].name, "verify_B2/category_|V|");
        assert_eq!(recs[2].detail, "checked=0 comp(0, 1, 1): frame wrong (+1 more)");
        assert!(out.is_ascii());
        assert_eq!(render_records(&recs, Format::Lines), out);
    }

    #[test]
    fn exit_codes_follow_the_worst_status() {
        let mut t = VerificationReport::new("t");
        t.truncate("budget");
        assert_eq!(exit_code(overall(&[t.clone()])), EXIT_TRUNCATED);
        assert_eq!(exit_code(overall(&[t, sample()])), EXIT_FAIL);
        assert_eq!(exit_code(overall(&[])), EXIT_PASS);
    }

    #[test]
    fn text_shows_counterexamples() {
        let out = text(&[sample()]);
        assert!(out.contains("  [fail] category |V| (checked 0)"));
        assert!(out.contains("counterexample: second"));
        assert!(out.ends_with("overall: fail\n"));
    }
}
