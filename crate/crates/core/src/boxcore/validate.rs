use std::fmt;

use crate::freecat::{ArrowKind, GradedElement};

use super::model::FreeBox;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `d(arrow)` does not run parallel to `arrow`.
    Endpoint {
        arrow: String,
        expected: (String, String),
        found: (String, String),
    },
    /// A term of `d(arrow)` has the wrong number of dotted arrows.
    Degree {
        arrow: String,
        expected: usize,
        found: usize,
        term: String,
    },
    /// `d(d(arrow))` is not zero.
    NotClosed { arrow: String, residual: GradedElement },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Endpoint { arrow, expected, found } => write!(
                f,
                "d({arrow}) runs {}->{} but {arrow} runs {}->{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::Degree { arrow, expected, found, term } => write!(
                f,
                "term {term} of d({arrow}) has degree {found}, expected {expected}"
            ),
            Violation::NotClosed { arrow, residual } => {
                write!(f, "d(d({arrow})) = {residual}, expected 0")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks endpoints, degrees and `d^2 = 0` for every arrow.
pub fn validate_box(b: &FreeBox) -> ValidationReport {
    let mut report = ValidationReport::default();
    for a in b.arrows() {
        let d = b.differential(&a.id);
        if d.source() != a.source || d.target() != a.target {
            report.violations.push(Violation::Endpoint {
                arrow: a.id.clone(),
                expected: (a.source.clone(), a.target.clone()),
                found: (d.source().to_string(), d.target().to_string()),
            });
            continue;
        }
        let expected = match a.kind {
            ArrowKind::Solid => 1,
            ArrowKind::Dotted => 2,
        };
        let mut degree_ok = true;
        for (p, _) in d.terms() {
            if p.degree() != expected {
                degree_ok = false;
                report.violations.push(Violation::Degree {
                    arrow: a.id.clone(),
                    expected,
                    found: p.degree(),
                    term: p.to_string(),
                });
            }
        }
        if degree_ok {
            let dd = b.d(&d);
            if !dd.is_zero() {
                report.violations.push(Violation::NotClosed {
                    arrow: a.id.clone(),
                    residual: dd,
                });
            }
        }
    }
    report
}
