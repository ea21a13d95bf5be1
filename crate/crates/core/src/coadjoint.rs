//! The box of the coadjoint action of a basic split algebra, built from its
//! structure constants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boxcore::{BoxError, FreeBox};
use crate::freecat::{compose, FreeCatError, GradedElement};
use crate::scalar::{parse_rational, Coeff, ScalarError};

/// Coefficients may be written as JSON integers or as strings like `"-1/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffValue {
    Int(i64),
    Text(String),
}

impl CoeffValue {
    pub fn value(&self) -> Result<Coeff, ScalarError> {
        match self {
            CoeffValue::Int(n) => Ok(Coeff::from_integer((*n).into())),
            CoeffValue::Text(s) => parse_rational(s),
        }
    }
}

/// Basis, idempotents, placement `b in e_i A e_j` as `[i, j]`, and the
/// nonzero structure constants `x * y = sum gamma(x, y, b) b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraTable {
    pub basis: Vec<String>,
    pub idempotents: Vec<String>,
    pub placement: BTreeMap<String, (String, String)>,
    #[serde(default)]
    pub gamma: Vec<(String, String, String, CoeffValue)>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("invalid algebra table:\n{0}")]
    Invalid(AlgebraReport),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    FreeCat(#[from] FreeCatError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlgebraReport {
    pub violations: Vec<String>,
}

impl AlgebraReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AlgebraReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

type Vector = BTreeMap<String, Coeff>;

struct Product {
    table: BTreeMap<(String, String), Vector>,
}

impl Product {
    fn new(t: &AlgebraTable) -> Result<Self, String> {
        let mut table: BTreeMap<(String, String), Vector> = BTreeMap::new();
        for (x, y, b, c) in &t.gamma {
            let c = c.value().map_err(|e| format!("coefficient of {x}*{y} -> {b}: {e}"))?;
            let entry = table.entry((x.clone(), y.clone())).or_default();
            let sum = entry.remove(b).unwrap_or_else(Coeff::zero) + c;
            if !sum.is_zero() {
                entry.insert(b.clone(), sum);
            }
        }
        Ok(Product { table })
    }

    fn basis_mul(&self, x: &str, y: &str) -> Vector {
        self.table.get(&(x.to_string(), y.to_string())).cloned().unwrap_or_default()
    }

    fn mul(&self, u: &Vector, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (x, a) in u {
            for (y, b) in v {
                for (z, c) in self.basis_mul(x, y) {
                    let e = out.remove(&z).unwrap_or_else(Coeff::zero) + a * b * c;
                    if !e.is_zero() {
                        out.insert(z, e);
                    }
                }
            }
        }
        out
    }

    fn gamma(&self, x: &str, y: &str, b: &str) -> Coeff {
        self.basis_mul(x, y).get(b).cloned().unwrap_or_else(Coeff::zero)
    }
}

fn unit(x: &str) -> Vector {
    Vector::from([(x.to_string(), Coeff::from_integer(1.into()))])
}

/// Checks well-formedness, associativity, the idempotent relations, that the
/// non-idempotent basis spans a nilpotent ideal and that the algebra is basic.
pub fn validate_algebra(t: &AlgebraTable) -> AlgebraReport {
    let mut v = Vec::new();
    let basis: BTreeSet<&String> = t.basis.iter().collect();
    if basis.len() != t.basis.len() {
        v.push("basis labels are not distinct".to_string());
    }
    for b in &t.basis {
        if !t.placement.contains_key(b) {
            v.push(format!("{b} has no placement"));
        }
    }
    let mut vertices = BTreeSet::new();
    for e in &t.idempotents {
        match t.placement.get(e) {
            None => v.push(format!("idempotent {e} is not a placed basis element")),
            Some((i, j)) if i != j => v.push(format!("idempotent {e} is placed off the diagonal")),
            Some((i, _)) => {
                if !vertices.insert(i.clone()) {
                    v.push(format!("two idempotents at vertex {i}"));
                }
            }
        }
    }
    for (b, (i, j)) in &t.placement {
        if !basis.contains(b) {
            v.push(format!("placement of unknown element {b}"));
        }
        for k in [i, j] {
            if !vertices.contains(k) {
                v.push(format!("{b} is placed at vertex {k} without idempotent"));
            }
        }
    }
    for (x, y, b, _) in &t.gamma {
        for z in [x, y, b] {
            if !basis.contains(z) {
                v.push(format!("structure constant mentions unknown element {z}"));
            }
        }
    }
    if !v.is_empty() {
        return AlgebraReport { violations: v };
    }
    let prod = match Product::new(t) {
        Ok(p) => p,
        Err(e) => return AlgebraReport { violations: vec![e] },
    };
    for (x, y, b, c) in &t.gamma {
        let (px, py, pb) = (&t.placement[x], &t.placement[y], &t.placement[b]);
        let ok = px.1 == py.0 && pb.0 == px.0 && pb.1 == py.1;
        if !ok && c.value().map(|c| !c.is_zero()).unwrap_or(true) {
            v.push(format!("{x}*{y} has a {b}-component across the wrong vertices"));
        }
    }
    for x in &t.basis {
        for y in &t.basis {
            for z in &t.basis {
                let left = prod.mul(&prod.basis_mul(x, y), &unit(z));
                let right = prod.mul(&unit(x), &prod.basis_mul(y, z));
                if left != right {
                    v.push(format!("({x}*{y})*{z} != {x}*({y}*{z})"));
                }
            }
        }
    }
    let idem: BTreeSet<&String> = t.idempotents.iter().collect();
    for e in &t.idempotents {
        let i = &t.placement[e].0;
        for x in &t.basis {
            let (xi, xj) = &t.placement[x];
            let want_left = if xi == i { unit(x) } else { Vector::new() };
            let want_right = if xj == i { unit(x) } else { Vector::new() };
            if prod.basis_mul(e, x) != want_left {
                v.push(format!("{e}*{x} is wrong"));
            }
            if prod.basis_mul(x, e) != want_right {
                v.push(format!("{x}*{e} is wrong"));
            }
        }
    }
    // the radical basis spans a two-sided ideal, and a nilpotent one
    let radical: Vec<&String> = t.basis.iter().filter(|b| !idem.contains(b)).collect();
    for r in &radical {
        for x in &t.basis {
            for z in prod.basis_mul(r, x).keys().chain(prod.basis_mul(x, r).keys()) {
                if idem.contains(z) {
                    v.push(format!("product of {r} and {x} leaves the radical"));
                }
            }
        }
    }
    let mut power: Vec<Vector> = radical.iter().map(|r| unit(r)).collect();
    let mut steps = 0;
    while !power.is_empty() {
        if steps > radical.len() {
            v.push("the radical is not nilpotent".to_string());
            break;
        }
        let mut next = Vec::new();
        for p in &power {
            for r in &radical {
                let q = prod.mul(p, &unit(r));
                if !q.is_empty() {
                    next.push(q);
                }
            }
        }
        power = next;
        steps += 1;
    }
    v.sort();
    v.dedup();
    AlgebraReport { violations: v }
}

/// Name of the dotted arrow dual to a radical basis element.
pub fn dual_name(r: &str) -> String {
    format!("{r}_dual")
}

/// Solid arrows are the basis elements (`b in e_i A e_j` runs `j -> i`),
/// dotted arrows the duals of radical elements (`i ..> j`); the differential
/// is the one of the coadjoint action.
pub fn build_coadjoint_box(name: &str, t: &AlgebraTable) -> Result<FreeBox, AlgebraError> {
    let report = validate_algebra(t);
    if !report.is_valid() {
        return Err(AlgebraError::Invalid(report));
    }
    let prod = Product::new(t).map_err(|e| AlgebraError::Invalid(AlgebraReport { violations: vec![e] }))?;
    let idem: BTreeSet<&String> = t.idempotents.iter().collect();
    let radical: Vec<&String> = t.basis.iter().filter(|b| !idem.contains(b)).collect();
    let mut b = FreeBox::new(name);
    for e in &t.idempotents {
        b.add_vertex(&t.placement[e].0);
    }
    let mut solid = BTreeMap::new();
    for x in &t.basis {
        let (i, j) = &t.placement[x];
        solid.insert(x.clone(), GradedElement::arrow(&b.add_solid(x, j, i)?));
    }
    let mut dual = BTreeMap::new();
    for r in &radical {
        let (i, j) = &t.placement[*r];
        dual.insert((*r).clone(), GradedElement::arrow(&b.add_dotted(&dual_name(r), i, j)?));
    }
    for x in &t.basis {
        let (i, j) = &t.placement[x];
        let mut d = GradedElement::zero(j, i);
        for r in &radical {
            for y in &t.basis {
                let g = prod.gamma(x, r, y);
                if !g.is_zero() {
                    d = d.add(&compose(&solid[y], &dual[*r])?.scale(&g))?;
                }
                let g = prod.gamma(r, x, y);
                if !g.is_zero() {
                    d = d.add(&compose(&dual[*r], &solid[y])?.scale(&-g))?;
                }
            }
        }
        b.set_differential(x, d)?;
    }
    for r in &radical {
        let (i, j) = &t.placement[*r];
        let mut d = GradedElement::zero(i, j);
        for x in &radical {
            for z in &radical {
                let g = prod.gamma(x, z, r);
                if !g.is_zero() {
                    d = d.add(&compose(&dual[*z], &dual[*x])?.scale(&-g))?;
                }
            }
        }
        b.set_differential(&dual_name(r), d)?;
    }
    Ok(b)
}
