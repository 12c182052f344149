//! Line-oriented verification reports.
//!
//! Every check records one line per `(identity, subject)` pair, `PASS` or
//! `FAIL`; failures carry the rendered difference of the two sides. The
//! rendering ends with a summary block of per-identity counts that is easy
//! to grep from scripts.

use std::collections::BTreeMap;
use std::fmt;

use crate::lincomb::{BasisElement, LinComb};

#[derive(Clone, Debug, Default)]
pub struct Report {
    header: Vec<String>,
    lines: Vec<String>,
    counts: BTreeMap<String, (usize, usize)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// A report whose rendering starts with the given comment lines.
    pub fn with_header(lines: &[&str]) -> Self {
        Report { header: lines.iter().map(|s| s.to_string()).collect(), ..Report::default() }
    }

    pub fn header_line(&mut self, line: impl Into<String>) {
        self.header.push(line.into());
    }

    /// An informational line that does not count as a check.
    pub fn info(&mut self, line: impl Into<String>) {
        self.lines.push(format!("INFO {}", line.into()));
    }

    pub fn pass(&mut self, identity: &str, subject: &str) {
        self.lines.push(format!("PASS {identity} {subject}"));
        self.counts.entry(identity.to_string()).or_default().0 += 1;
    }

    pub fn fail(&mut self, identity: &str, subject: &str, detail: &str) {
        self.lines.push(format!("FAIL {identity} {subject} :: {detail}"));
        self.counts.entry(identity.to_string()).or_default().1 += 1;
    }

    /// Records `PASS` if `ok`, otherwise `FAIL` with the lazily built detail.
    pub fn check(&mut self, identity: &str, subject: &str, ok: bool, detail: impl FnOnce() -> String) -> bool {
        if ok {
            self.pass(identity, subject);
        } else {
            self.fail(identity, subject, &detail());
        }
        ok
    }

    /// Compares two linear combinations; a failure shows `lhs − rhs`.
    pub fn check_eq<K: BasisElement>(&mut self, identity: &str, subject: &str, lhs: &LinComb<K>, rhs: &LinComb<K>) -> bool {
        let diff = lhs.sub(rhs);
        self.check(identity, subject, diff.is_zero(), || format!("lhs - rhs = {}", diff.text()))
    }

    /// Appends the lines and counts of another report.
    pub fn merge(&mut self, other: Report) {
        for h in other.header {
            if !self.header.contains(&h) {
                self.header.push(h);
            }
        }
        self.lines.extend(other.lines);
        for (k, (p, f)) in other.counts {
            let e = self.counts.entry(k).or_default();
            e.0 += p;
            e.1 += f;
        }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    /// `(passed, failed)` for one identity.
    pub fn count(&self, identity: &str) -> (usize, usize) {
        self.counts.get(identity).copied().unwrap_or_default()
    }

    pub fn passed(&self) -> usize {
        self.counts.values().map(|c| c.0).sum()
    }

    pub fn failed(&self) -> usize {
        self.counts.values().map(|c| c.1).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// The `FAIL` lines, for quick inspection.
    pub fn failures(&self) -> impl Iterator<Item = &String> {
        self.lines.iter().filter(|l| l.starts_with("FAIL "))
    }

    /// Subjects that failed a given identity.
    pub fn failed_subjects(&self, identity: &str) -> Vec<String> {
        let prefix = format!("FAIL {identity} ");
        self.lines
            .iter()
            .filter_map(|l| l.strip_prefix(&prefix))
            .map(|rest| rest.split(" :: ").next().unwrap_or(rest).to_string())
            .collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.header {
            writeln!(f, "# {h}")?;
        }
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        writeln!(f, "== summary ==")?;
        for (k, (p, fl)) in &self.counts {
            writeln!(f, "summary {k} pass={p} fail={fl}")?;
        }
        writeln!(f, "summary total pass={} fail={}", self.passed(), self.failed())?;
        write!(f, "status {}", if self.all_passed() { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_rendering() {
        let mut r = Report::with_header(&["demo"]);
        r.pass("id", "t1");
        r.fail("id", "t2", "boom");
        r.info("note");
        assert_eq!(r.count("id"), (1, 1));
        assert!(!r.all_passed());
        assert_eq!(r.failed_subjects("id"), ["t2"]);
        let s = r.to_string();
        assert!(s.starts_with("# demo\nPASS id t1\nFAIL id t2 :: boom\nINFO note\n"));
        assert!(s.ends_with("summary id pass=1 fail=1\nsummary total pass=1 fail=1\nstatus FAIL"));
    }
}
