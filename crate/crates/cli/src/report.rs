use std::fmt::Write as _;

use gks_core::rays::write_rayset;
use gks_core::structures::{write_cover, CoverStructure, ParityCertificate};
use sha2::{Digest, Sha256};

/// Plain-text report with a fixed field order.
pub struct RunReport {
    text: String,
}

impl RunReport {
    pub fn new(echo: &str, digest: &str) -> Self {
        let mut text = String::new();
        writeln!(text, "command: {echo}").unwrap();
        writeln!(text, "inputs: sha256:{digest}").unwrap();
        RunReport { text }
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.text, "{key}: {value}").unwrap();
    }

    pub fn block(&mut self, key: &str, body: &str) {
        writeln!(self.text, "{key}:").unwrap();
        for line in body.lines() {
            writeln!(self.text, "  {line}").unwrap();
        }
    }

    pub fn finish(mut self, pass: bool) -> String {
        self.field("exit", if pass { "PASS" } else { "FAIL" });
        self.text
    }
}

pub fn digest_text(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

pub fn cover_digest(cs: &CoverStructure) -> String {
    digest_text(&[&write_rayset(cs.rays()), &write_cover(cs)])
}

pub fn incidence_table(cs: &CoverStructure) -> String {
    cs.incidence().iter().map(|(id, c)| format!("{id} {c}\n")).collect()
}

pub fn incidence_summary(cert: &ParityCertificate) -> String {
    match cert.uniform_incidence() {
        Some(c) => format!("incidence all {c}"),
        None => {
            let lo = cert.incidence_counts.values().min().copied().unwrap_or(0);
            let hi = cert.incidence_counts.values().max().copied().unwrap_or(0);
            format!("incidence {lo}..{hi}")
        }
    }
}

pub fn certificate_line(cert: &ParityCertificate) -> String {
    let parity = if cert.context_count % 2 == 1 { "odd" } else { "even" };
    let even = cert.incidence_counts.values().all(|&c| c > 0 && c % 2 == 0);
    format!(
        "{} (N={} {parity}, {})",
        if cert.valid { "VALID" } else { "INVALID" },
        cert.context_count,
        if even { "every incidence even" } else { "some incidence odd or zero" }
    )
}
