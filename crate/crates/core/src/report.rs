//! JSON reports combining validation, the invariant, sum identities,
//! classification and an optional rewrite trace.

use serde::{Deserialize, Serialize};

use crate::classify::{classify, Classification};
use crate::error::Result;
use crate::gentle::{validate_gentle, GentleQuiver, GentlenessViolation};
use crate::invariant::{aag_invariant, sum_report, AagInvariant};
use crate::quiver::QuiverWithRelations;
use crate::transforms::RewriteStep;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsRecord {
    pub p: u64,
    pub q: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub gentle: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<GentlenessViolation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub invariant: Option<AagInvariant>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sums: Option<SumsRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<RewriteStep>>,
}

impl Report {
    /// Report on a validated quiver.
    pub fn of_gentle(g: &GentleQuiver) -> Result<Report> {
        let f = aag_invariant(g)?;
        let s = sum_report(g, &f);
        Ok(Report {
            gentle: true,
            violations: Vec::new(),
            sums: Some(SumsRecord {
                p: s.p_sum,
                q: s.q_sum,
                ok: s.ok,
            }),
            invariant: Some(f),
            classification: Some(classify(g)?),
            trace: None,
        })
    }

    /// Report on an arbitrary quiver; for a non-gentle quiver only the
    /// violations are filled in.
    pub fn of_quiver(q: &QuiverWithRelations) -> Result<Report> {
        match validate_gentle(q) {
            Ok(g) => Report::of_gentle(&g),
            Err(violations) => Ok(Report {
                gentle: false,
                violations,
                invariant: None,
                sums: None,
                classification: None,
                trace: None,
            }),
        }
    }

    pub fn with_trace(mut self, steps: Vec<RewriteStep>) -> Report {
        self.trace = Some(steps);
        self
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn emit_report(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}
