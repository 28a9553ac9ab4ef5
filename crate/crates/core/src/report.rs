//! Structured verification records: which identity was checked, on which
//! Čech subject, with a rendered witness on failure.
//!
//! The serialized kind labels (`Prop1`, `Lemma2i`, `Lemma2ii`, `ThmStep1`,
//! `ThmStep2`, `Prop4`, `input-validation`) and the text rendering are part
//! of the report file format and pinned by golden tests; the enum variant
//! names describe what each check does.

use std::fmt;

use serde::Serialize;

/// The seven check families the verifier replays.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub enum CheckKind {
    /// Structural validity of patches and bundle data.
    #[serde(rename = "input-validation")]
    InputValidation,
    /// Local connections are flat (curvature, wedge-square and closedness).
    #[serde(rename = "Prop1")]
    LocalFlatness,
    /// Difference-of-lifts derivative identity on pair overlaps.
    #[serde(rename = "Lemma2i")]
    DiDerivative,
    /// Additive cocycle of the difference-of-lifts maps on triples.
    #[serde(rename = "Lemma2ii")]
    DiCocycle,
    /// Gluing-matrix cocycle on triple overlaps.
    #[serde(rename = "ThmStep1")]
    GluingCocycle,
    /// Connection gluing identity on pair overlaps.
    #[serde(rename = "ThmStep2")]
    ConnectionGluing,
    /// Truncated exponential equals its multinomial expansion.
    #[serde(rename = "Prop4")]
    ExpTaylor,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::InputValidation,
        CheckKind::LocalFlatness,
        CheckKind::DiDerivative,
        CheckKind::DiCocycle,
        CheckKind::GluingCocycle,
        CheckKind::ConnectionGluing,
        CheckKind::ExpTaylor,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CheckKind::InputValidation => "input-validation",
            CheckKind::LocalFlatness => "Prop1",
            CheckKind::DiDerivative => "Lemma2i",
            CheckKind::DiCocycle => "Lemma2ii",
            CheckKind::GluingCocycle => "ThmStep1",
            CheckKind::ConnectionGluing => "ThmStep2",
            CheckKind::ExpTaylor => "Prop4",
        }
    }

    /// Parses a label (case-insensitive) or one of the short aliases used
    /// by the corruption hooks.
    pub fn parse(s: &str) -> Option<CheckKind> {
        let lower = s.to_ascii_lowercase();
        for kind in CheckKind::ALL {
            if kind.label().to_ascii_lowercase() == lower {
                return Some(kind);
            }
        }
        match lower.as_str() {
            "a" | "curvature" => Some(CheckKind::LocalFlatness),
            "dh" | "z" => Some(CheckKind::DiDerivative),
            "hcocycle" => Some(CheckKind::DiCocycle),
            "g" | "cocycle" => Some(CheckKind::GluingCocycle),
            "conn" | "glue" => Some(CheckKind::ConnectionGluing),
            "taylor" | "exp" => Some(CheckKind::ExpTaylor),
            _ => None,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum CheckStatus {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

/// One verified identity (or validation step) with its outcome.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CheckRecord {
    pub kind: CheckKind,
    /// Deterministic subject path, e.g. `patch:alpha/curvature` or
    /// `triple:a|b|c/cocycle`.
    pub subject: String,
    pub status: CheckStatus,
    /// Rendered localization of the failure; empty on PASS.
    #[serde(skip_serializing_if = "String::is_empty")]
    pub witness: String,
}

impl CheckRecord {
    pub fn pass(kind: CheckKind, subject: impl Into<String>) -> CheckRecord {
        CheckRecord {
            kind,
            subject: subject.into(),
            status: CheckStatus::Pass,
            witness: String::new(),
        }
    }

    pub fn fail(
        kind: CheckKind,
        subject: impl Into<String>,
        witness: impl Into<String>,
    ) -> CheckRecord {
        CheckRecord {
            kind,
            subject: subject.into(),
            status: CheckStatus::Fail,
            witness: witness.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    fn render_line(&self) -> String {
        let head = format!(
            "[{}] {} {}",
            match self.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
            },
            self.kind,
            self.subject
        );
        if self.witness.is_empty() {
            head
        } else {
            format!("{head} :: {}", self.witness)
        }
    }
}

/// The full record list for one verification run, in deterministic order.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(records);
    }

    pub fn total(&self) -> usize {
        self.records.len()
    }

    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| !r.passed()).count()
    }

    pub fn passed(&self) -> usize {
        self.total() - self.failed()
    }

    pub fn is_verified(&self) -> bool {
        self.failed() == 0
    }

    /// True when an input-validation record failed, which aborts
    /// construction before any identity is replayed.
    pub fn validation_failed(&self) -> bool {
        self.records
            .iter()
            .any(|r| r.kind == CheckKind::InputValidation && !r.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed())
    }

    pub fn overall_label(&self) -> &'static str {
        if self.is_verified() {
            "VERIFIED"
        } else {
            "FAILED"
        }
    }

    /// Canonical text rendering, byte-stable for a given record list.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.render_line());
            out.push('\n');
        }
        out.push_str(&format!(
            "overall: {} (checks: {}, passed: {}, failed: {})\n",
            self.overall_label(),
            self.total(),
            self.passed(),
            self.failed()
        ));
        out
    }
}
