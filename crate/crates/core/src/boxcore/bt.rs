use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::freecat::{compose, ArrowKind, GradedElement};

use super::model::FreeBox;
use super::triangulate::{find_triangulation, TriangulationMode};
use super::validate::validate_box;

/// Distinguished loops plus the pairing `x -> x~` of the remaining solid arrows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BTStructure {
    pub distinguished: BTreeMap<String, String>,
    pub pairing: BTreeMap<String, String>,
}

impl BTStructure {
    pub fn is_distinguished(&self, id: &str) -> bool {
        self.distinguished.values().any(|a| a == id)
    }

    pub fn partner_of(&self, solid: &str) -> Option<&str> {
        self.pairing.get(solid).map(String::as_str)
    }

    /// The solid arrow paired with a dotted one.
    pub fn solid_for(&self, dotted: &str) -> Option<&str> {
        self.pairing.iter().find(|(_, d)| *d == dotted).map(|(s, _)| s.as_str())
    }

    /// The right-hand side `sum (-1)^|x| x x~` over pairs ending at `v`.
    pub fn expected_differential(&self, b: &FreeBox, v: &str) -> GradedElement {
        let mut out = GradedElement::zero(v, v);
        for (x, xt) in &self.pairing {
            let (x, xt) = (b.arrow(x).expect("paired arrow"), b.arrow(xt).expect("partner"));
            let (ex, ext) = (GradedElement::arrow(x), GradedElement::arrow(xt));
            if x.target == v {
                out = out.add(&compose(&ex, &ext).expect("x x~ composes")).expect("loop at v");
            }
            if xt.target == v {
                let t = compose(&ext, &ex).expect("x~ x composes").neg();
                out = out.add(&t).expect("loop at v");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BTFailure {
    Invalid(String),
    NotSolidTriangular(Vec<String>),
    /// No admissible distinguished loop at this vertex.
    NoDistinguishedLoop(String),
    /// The pairing cannot be completed; `residual` is expected minus actual.
    Mismatch { vertex: String, residual: GradedElement },
    /// A solid arrow has no partner term in the differential of its target loop.
    Unpaired { arrow: String },
}

impl fmt::Display for BTFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BTFailure::Invalid(r) => write!(f, "box is not valid: {r}"),
            BTFailure::NotSolidTriangular(c) => {
                write!(f, "not solid-triangular, cycle {}", c.join(" -> "))
            }
            BTFailure::NoDistinguishedLoop(v) => write!(f, "no distinguished loop at vertex {v}"),
            BTFailure::Mismatch { vertex, residual } => {
                write!(f, "condition fails at vertex {vertex}: expected - actual = {residual}")
            }
            BTFailure::Unpaired { arrow } => write!(f, "solid arrow {arrow} has no partner"),
        }
    }
}

fn is_candidate(b: &FreeBox, id: &str) -> bool {
    b.differential(id).terms().all(|(p, _)| p.len() == 2 && p.degree() == 1)
}

/// Searches for a BT structure; the first witness in id order is returned.
pub fn recognize_bt(b: &FreeBox) -> Result<BTStructure, BTFailure> {
    let report = validate_box(b);
    if !report.is_valid() {
        return Err(BTFailure::Invalid(report.to_string()));
    }
    if let Err(w) = find_triangulation(b, TriangulationMode::SolidOnly) {
        return Err(BTFailure::NotSolidTriangular(w.cycle));
    }
    let vertices = b.vertices();
    let mut options: Vec<Vec<String>> = Vec::new();
    for v in &vertices {
        let cands: Vec<String> = b
            .solid_loops_at(v)
            .into_iter()
            .filter(|a| is_candidate(b, &a.id))
            .map(|a| a.id.clone())
            .collect();
        if cands.is_empty() {
            return Err(BTFailure::NoDistinguishedLoop(v.clone()));
        }
        options.push(cands);
    }
    let mut choice = vec![0usize; vertices.len()];
    let mut first_failure = None;
    loop {
        let distinguished: BTreeMap<String, String> = vertices
            .iter()
            .zip(&choice)
            .enumerate()
            .map(|(k, (v, &c))| (v.clone(), options[k][c].clone()))
            .collect();
        match try_pairing(b, &distinguished) {
            Ok(s) => return Ok(s),
            Err(f) => {
                first_failure.get_or_insert(f);
            }
        }
        // advance the mixed-radix counter over loop choices
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Err(first_failure.expect("at least one attempt"));
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn try_pairing(
    b: &FreeBox,
    distinguished: &BTreeMap<String, String>,
) -> Result<BTStructure, BTFailure> {
    let chosen: BTreeSet<&String> = distinguished.values().collect();
    let mut pairing = BTreeMap::new();
    let mut used = BTreeSet::new();
    for y in b.solid_arrows().filter(|a| !chosen.contains(&a.id)) {
        // y: i -> j contributes +y y~ to d(a_j)
        let dj = b.differential(&distinguished[&y.target]);
        let partner = dj.terms().find_map(|(p, c)| {
            let arrows = p.arrows();
            (p.len() == 2
                && arrows[0].id == y.id
                && arrows[1].kind == ArrowKind::Dotted
                && c.is_one())
            .then(|| arrows[1].id.clone())
        });
        let Some(partner) = partner else {
            return Err(BTFailure::Unpaired { arrow: y.id.clone() });
        };
        if !used.insert(partner.clone()) {
            return Err(BTFailure::Unpaired { arrow: y.id.clone() });
        }
        pairing.insert(y.id.clone(), partner);
    }
    let s = BTStructure {
        distinguished: distinguished.clone(),
        pairing,
    };
    for (v, a) in distinguished {
        let expected = s.expected_differential(b, v);
        let residual = expected.sub(&b.differential(a)).expect("loops at v");
        if !residual.is_zero() {
            return Err(BTFailure::Mismatch {
                vertex: v.clone(),
                residual,
            });
        }
    }
    Ok(s)
}
