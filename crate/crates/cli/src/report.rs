//! Verification reports and their text/JSON forms.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{CalSOrderConfig, ModelConfig};

/// Identifier of the JSON layout; bumped on any incompatible change.
pub const SCHEMA_VERSION: &str = "rtcheck-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    /// `None` when evaluation failed before completing the sample.
    pub max_residual: Option<f64>,
    /// Arguments of the worst sample point, or of the failing one.
    pub worst_momenta: Vec<f64>,
    pub samples: usize,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalSOrderSummary {
    pub ybe: f64,
    pub unitarity: f64,
    pub rr1: f64,
    pub tt1: f64,
    pub tr1: f64,
    pub pass: bool,
}

/// Residuals of both `calS` index orders on the embedding route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub cal_s_selected: CalSOrderConfig,
    pub cal_s_printed: CalSOrderSummary,
    pub cal_s_uncrossed: CalSOrderSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub toolkit_version: String,
    pub pass: bool,
    pub tolerance: f64,
    pub config: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn emit_report(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report is serializable");
            s.push('\n');
            s
        }
        Format::Text => text(report),
    }
}

fn text(r: &VerificationReport) -> String {
    let mut out = String::new();
    let c = &r.config;
    let _ = writeln!(out, "rtcheck {} ({})", r.toolkit_version, r.schema);
    let _ = writeln!(
        out,
        "model: bulk={} defect={} doubled={} samples={} seed={} tolerance={:e}",
        c.bulk, c.defect, c.doubled, c.samples, c.seed, r.tolerance
    );
    let width = r.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
    for check in &r.checks {
        let verdict = if check.pass { "PASS" } else { "FAIL" };
        let residual = match check.max_residual {
            Some(x) => format!("{x:.3e}"),
            None => "-".to_string(),
        };
        let _ = write!(
            out,
            "{verdict}  {:<width$}  max={residual:<10}  n={:<4}  at={:?}",
            check.id, check.samples, check.worst_momenta
        );
        if let Some(e) = &check.error {
            let _ = write!(out, "  error: {e}");
        }
        out.push('\n');
    }
    if let Some(d) = &r.diagnostics {
        for (name, s) in [("printed", &d.cal_s_printed), ("uncrossed", &d.cal_s_uncrossed)] {
            let _ = writeln!(
                out,
                "calS {name:<9} ybe={:.2e} unitarity={:.2e} rr1={:.2e} tt1={:.2e} tr1={:.2e} {}",
                s.ybe,
                s.unitarity,
                s.rr1,
                s.tt1,
                s.tr1,
                if s.pass { "ok" } else { "violated" }
            );
        }
        let _ = writeln!(out, "calS order in use: {:?}", d.cal_s_selected);
    }
    let passed = r.checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(out, "{}: {passed}/{} checks passed", if r.pass { "PASS" } else { "FAIL" }, r.checks.len());
    out
}
