//! Inequality reports and their JSON / CSV / text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsWithinTol,
    Violated,
}

impl Verdict {
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        if margin >= 0.0 {
            Verdict::Holds
        } else if margin >= -tol {
            Verdict::HoldsWithinTol
        } else {
            Verdict::Violated
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithinTol => "holds_within_tol",
            Verdict::Violated => "violated",
        }
    }

    pub fn is_ok(self) -> bool {
        self != Verdict::Violated
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Truncation {
    pub n_max: u64,
    pub window_frac: f64,
    pub j_max: u64,
    pub window_start: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f_sides: Option<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g_sides: Option<Vec<Vec<u64>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub label: String,
    /// Window index attaining the left-hand side.
    pub lhs_argmax: u64,
    /// Window minimum of the left-hand quantity.
    pub lhs_liminf: f64,
    /// `(J, (1/J) Σ_{j ≤ J} term_j)` for every `J ≤ j_max`.
    pub rhs_trace: Vec<(u64, f64)>,
    /// Minimum of `rhs_trace` over its second half.
    pub rhs_tail_min: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_star: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub invariance_defect: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub variant: String,
    pub payload_digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub j_trace: Vec<(u64, f64)>,
    pub diagnostics: Diagnostics,
    pub truncation: Truncation,
}

pub const CSV_HEADER: [&str; 8] = [
    "variant", "sequence", "n_max", "j_max", "lhs", "rhs", "margin", "verdict",
];

impl InequalityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.variant.clone(),
            self.diagnostics.label.clone(),
            self.truncation.n_max.to_string(),
            self.truncation.j_max.to_string(),
            format!("{:e}", self.lhs),
            format!("{:e}", self.rhs),
            format!("{:e}", self.margin),
            self.verdict.as_str().to_string(),
        ]
    }

    /// Aligned summary with the tail of the J-trace.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let d = &self.diagnostics;
        let t = &self.truncation;
        let _ = writeln!(out, "variant   {}  [{}]", self.variant, self.payload_digest);
        let _ = writeln!(out, "input     {}", d.label);
        let _ = writeln!(
            out,
            "window    N in [{}, {}]  (window_frac {}), j_max {}",
            t.window_start, t.n_max, t.window_frac, t.j_max
        );
        let _ = writeln!(
            out,
            "  LHS  {:>+.12e}   (argmax index {})",
            self.lhs, d.lhs_argmax
        );
        let _ = writeln!(out, "  RHS  {:>+.12e}   (J = {})", self.rhs, t.j_max);
        let _ = writeln!(
            out,
            "  gap  {:>+.12e}   {}",
            self.margin,
            self.verdict.as_str()
        );
        let _ = writeln!(
            out,
            "  rhs tail min {:+.6e}, lhs liminf {:+.6e}",
            d.rhs_tail_min, d.lhs_liminf
        );
        if let Some((re, im)) = d.lambda_star {
            let _ = writeln!(out, "  lambda* = {re:+.9} {im:+.9}i");
        }
        if let Some(v) = d.invariance_defect {
            let _ = writeln!(out, "  invariance defect {v:.3e}");
        }
        for (k, v) in &d.extra {
            let _ = writeln!(out, "  {k} = {v:.6e}");
        }
        let tail = d.rhs_trace.len().saturating_sub(10);
        if !d.rhs_trace.is_empty() {
            let _ = writeln!(out, "  J-trace tail:");
            for (j, v) in &d.rhs_trace[tail..] {
                let _ = writeln!(out, "    J = {j:>6}  {v:+.9e}");
            }
        }
        out
    }
}

/// Writes reports as CSV (header plus one row per report).
pub fn reports_to_csv(reports: &[InequalityReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record(r.csv_record()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// 64-bit FNV-1a.
pub fn fnv1a64(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn digest(text: &str) -> String {
    format!("{:016x}", fnv1a64(text))
}
