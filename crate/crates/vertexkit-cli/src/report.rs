//! Command reports with a stable machine-readable rendering.
//!
//! The machine form is line-oriented `key: value` text under a fixed
//! schema version; for identical inputs and tool version the bytes are
//! identical, so reports can be diffed or committed as fixtures.  The
//! human form adds formatting and elapsed time, which the machine form
//! deliberately omits.

use std::fmt::Display;
use std::time::Duration;

/// Schema tag emitted at the top of every machine report.
pub const SCHEMA: &str = "vertexkit.report.v1";

/// Outcome of a command, mapped directly to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every check passed.
    Pass,
    /// A check failed and the report carries a witness.
    Fail,
    /// A window or budget ran out before the question was settled.
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// An ordered key/value report for one command invocation.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub digest: String,
    pub verdict: Verdict,
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, input: &str, canonical: &str) -> Self {
        Report {
            command: command.to_string(),
            input: input.to_string(),
            digest: format!("{:016x}", digest64(canonical.as_bytes())),
            verdict: Verdict::Pass,
            entries: Vec::new(),
        }
    }

    /// Append one key/value line; insertion order is preserved.
    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn set_verdict(&mut self, v: Verdict) {
        self.verdict = v;
    }

    /// Deterministic rendering: no timings, no environment, fixed order.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("schema: {}\n", SCHEMA));
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("input: {}\n", self.input));
        out.push_str(&format!("digest: {}\n", self.digest));
        for (k, v) in &self.entries {
            for (i, line) in v.lines().enumerate() {
                if i == 0 {
                    out.push_str(&format!("{}: {}\n", k, line));
                } else {
                    out.push_str(&format!("{}.cont: {}\n", k, line));
                }
            }
            if v.is_empty() {
                out.push_str(&format!("{}:\n", k));
            }
        }
        out.push_str(&format!("verdict: {}\n", self.verdict.word()));
        out
    }

    /// Human rendering; `elapsed` is shown here and nowhere else.
    pub fn render_human(&self, elapsed: Duration) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} on {}\n", self.command, self.input));
        for (k, v) in &self.entries {
            if v.contains('\n') {
                out.push_str(&format!("  {}:\n", k));
                for line in v.lines() {
                    out.push_str(&format!("    {}\n", line));
                }
            } else {
                out.push_str(&format!("  {}: {}\n", k, v));
            }
        }
        out.push_str(&format!(
            "{} ({:.1} ms)\n",
            self.verdict.word().to_uppercase(),
            elapsed.as_secs_f64() * 1e3
        ));
        out
    }
}

/// FNV-1a over the canonical input text; stable across runs and platforms.
pub fn digest64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
