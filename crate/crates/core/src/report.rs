//! Key-value run reports. Timing lives in a single trailing field so that reports of
//! identical inputs differ only there.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub command: String,
    pub input_digest: String,
    pub fields: Vec<(String, String)>,
    pub timing_ms: Option<u128>,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl RunReport {
    pub fn new(command: &str, input: &[u8]) -> Self {
        RunReport { command: command.into(), input_digest: digest(input), fields: Vec::new(), timing_ms: None }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    /// Multi-line values become one `key[i]` field per line.
    pub fn push_lines(&mut self, key: &str, text: &str) {
        for (i, l) in text.lines().enumerate() {
            self.push(&format!("{key}[{i}]"), l);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "input.sha256 = {}", self.input_digest);
        for (k, v) in &self.fields {
            let _ = writeln!(s, "{k} = {v}");
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(s, "timing.ms = {t}");
        }
        s
    }

    /// Inverse of [`RunReport::to_text`].
    pub fn parse(text: &str) -> Option<Self> {
        let mut lines = text.lines().map(|l| l.split_once(" = ").map(|(k, v)| (k.to_string(), v.to_string())));
        let (k0, command) = lines.next()??;
        let (k1, input_digest) = lines.next()??;
        if k0 != "command" || k1 != "input.sha256" {
            return None;
        }
        let mut r = RunReport { command, input_digest, fields: Vec::new(), timing_ms: None };
        for kv in lines {
            let (k, v) = kv?;
            if k == "timing.ms" {
                r.timing_ms = Some(v.parse().ok()?);
            } else {
                r.fields.push((k, v));
            }
        }
        Some(r)
    }
}
