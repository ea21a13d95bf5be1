//! Brick families of BT-boxes: reduce until a single vertex with the loop
//! `k[t]` is left, then pull the one-parameter family `t -> [t]` back.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::boxcore::{
    find_triangulation, norm, recognize_bt, solid_components, DimensionVector, FreeBox, TriangulationMode,
};
use crate::matrix::Matrix;
use crate::reduction::{
    delete_vertex, eliminate_pair, self_reproduce, ReductionChain, ReductionError,
};
use crate::rep::{are_isomorphic, enumerate_bricks, is_brick, IsoOptions, RepError, Representation};
use crate::scalar::{Field, PolyRing, PrimeField, Ring};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("box is not a BT-box: {0}")]
    NotBT(String),
    #[error("dimension vector mentions unknown vertex {0}")]
    UnknownVertex(String),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("norm did not decrease ({before} -> {after})")]
    NoProgress { before: usize, after: usize },
}

/// Why no brick exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmptyReason {
    ZeroDimension,
    Disconnected,
    /// A dotted arrow between supported vertices that no solid differential uses.
    FreeDottedArrow(String),
    /// A non-distinguished solid loop with zero differential.
    LoopObstruction(String),
    /// A single vertex of dimension greater than one.
    JordanBlock(usize),
}

/// Matrices with polynomial entries in the family parameter.
pub type ParametricRepresentation<E> = Representation<Vec<E>>;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyStatus<E> {
    Empty(EmptyReason),
    Family(ParametricRepresentation<E>),
}

#[derive(Debug, Clone)]
pub struct FamilyResult<E> {
    pub status: FamilyStatus<E>,
    pub chain: ReductionChain,
    /// Dimension vector at each stage of the recursion.
    pub trace: Vec<DimensionVector>,
}

impl<E> FamilyResult<E> {
    pub fn family(&self) -> Option<&ParametricRepresentation<E>> {
        match &self.status {
            FamilyStatus::Family(f) => Some(f),
            FamilyStatus::Empty(_) => None,
        }
    }
}

fn support(b: &FreeBox, d: &DimensionVector) -> DimensionVector {
    b.vertices()
        .into_iter()
        .map(|v| {
            let n = d.get(&v).copied().unwrap_or(0);
            (v, n)
        })
        .collect()
}

/// Runs the recursion; the chain starts at `b`.
pub fn brick_family<F: Field>(
    field: &F,
    b: &FreeBox,
    d: &DimensionVector,
) -> Result<FamilyResult<F::Elem>, FamilyError> {
    recognize_bt(b).map_err(|f| FamilyError::NotBT(f.to_string()))?;
    if let Some(v) = d.keys().find(|v| !b.has_vertex(v)) {
        return Err(FamilyError::UnknownVertex(v.clone()));
    }
    let mut chain = ReductionChain::new();
    let mut trace = Vec::new();
    let mut cur = b.clone();
    let mut dims = support(b, d);
    let empty = |reason, chain, trace| FamilyResult {
        status: FamilyStatus::Empty(reason),
        chain,
        trace,
    };
    let base = loop {
        trace.push(dims.clone());
        for v in cur.vertices() {
            if dims[&v] == 0 {
                let (next, step) = delete_vertex(&cur, &v)?;
                chain.push(step);
                dims.remove(&v);
                cur = next;
            }
        }
        if cur.vertices().is_empty() {
            return Ok(empty(EmptyReason::ZeroDimension, chain, trace));
        }
        if solid_components(&cur).len() > 1 {
            return Ok(empty(EmptyReason::Disconnected, chain, trace));
        }
        if let Some(u) = cur.dotted_arrows().find(|u| !cur.occurs_in_solid_differential(&u.id)) {
            let reason = EmptyReason::FreeDottedArrow(u.id.clone());
            return Ok(empty(reason, chain, trace));
        }
        let s = recognize_bt(&cur).map_err(|f| FamilyError::NotBT(f.to_string()))?;
        let others: Vec<String> = cur
            .solid_arrows()
            .filter(|a| !s.is_distinguished(&a.id))
            .map(|a| a.id.clone())
            .collect();
        if let Some(l) = others
            .iter()
            .find(|a| cur.arrow(a).expect("present").is_loop() && cur.differential(a).is_zero())
        {
            return Ok(empty(EmptyReason::LoopObstruction(l.clone()), chain, trace));
        }
        if others.is_empty() {
            let v = cur.vertices().remove(0);
            let n = dims[&v];
            if n > 1 {
                return Ok(empty(EmptyReason::JordanBlock(n), chain, trace));
            }
            break (v.clone(), s.distinguished[&v].clone());
        }
        let heights = find_triangulation(&cur, TriangulationMode::SolidOnly)
            .map_err(|w| FamilyError::NotBT(format!("cycle {}", w.cycle.join(" -> "))))?;
        let pick = others
            .iter()
            .min_by_key(|a| (heights.height(a).unwrap_or(0), (*a).clone()))
            .expect("nonempty")
            .clone();
        let before = norm(&cur, &dims);
        if cur.differential(&pick).is_zero() {
            let r = self_reproduce(&cur, &pick)?;
            let (ds, dt) = (dims[&r.source], dims[&r.target]);
            if ds <= dt {
                dims.insert(r.target.clone(), dt - ds);
                dims.insert(r.new_vertex.clone(), ds);
                dims.insert(r.source.clone(), 0);
            } else {
                dims.insert(r.target.clone(), 0);
                dims.insert(r.new_vertex.clone(), dt);
                dims.insert(r.source.clone(), ds - dt);
            }
            chain.extend(r.chain);
            cur = r.result;
        } else {
            let (next, c) = eliminate_pair(&cur, &pick)?;
            chain.extend(c);
            cur = next;
        }
        let after = norm(&cur, &dims);
        if after >= before {
            return Err(FamilyError::NoProgress { before, after });
        }
    };

    let ring = PolyRing::new(field.clone());
    let (v, a) = base;
    let top = Representation {
        dims: BTreeMap::from([(v, 1)]),
        matrices: BTreeMap::from([(a, Matrix::from_rows(1, 1, vec![ring.variable()]))]),
    };
    let family = if chain.is_empty() { top } else { chain.pullback(&ring, &top)? };
    Ok(FamilyResult {
        status: FamilyStatus::Family(family),
        chain,
        trace,
    })
}

/// Whether a brick of dimension vector `d` exists.
pub fn brick_exists<F: Field>(field: &F, b: &FreeBox, d: &DimensionVector) -> Result<bool, FamilyError> {
    Ok(brick_family(field, b, d)?.family().is_some())
}

/// The member of the family at parameter `lambda`.
pub fn evaluate_family<F: Field>(
    field: &F,
    family: &ParametricRepresentation<F::Elem>,
    lambda: &F::Elem,
) -> Representation<F::Elem> {
    let ring = PolyRing::new(field.clone());
    family.map(|p| ring.evaluate(p, lambda))
}

/// Writes polynomial entries such as `2*t + 1`.
pub fn format_entry<F: Field>(field: &F, p: &[F::Elem]) -> String {
    PolyRing::new(field.clone()).format(&p.to_vec())
}

/// Comparison of the family against exhaustive enumeration over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crosscheck {
    /// Pairwise non-isomorphic bricks the family predicts: `p` or 0.
    pub family_classes: usize,
    pub oracle_classes: usize,
    /// Parameters whose member is not a brick.
    pub non_bricks: Vec<u64>,
    /// Pairs of parameters with isomorphic members.
    pub collisions: Vec<(u64, u64)>,
    /// Indices of oracle classes isomorphic to no member.
    pub unmatched: Vec<usize>,
}

impl Crosscheck {
    pub fn agrees(&self) -> bool {
        self.family_classes == self.oracle_classes
            && self.non_bricks.is_empty()
            && self.collisions.is_empty()
            && self.unmatched.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum CrosscheckError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

pub fn crosscheck(
    field: &PrimeField,
    b: &FreeBox,
    d: &DimensionVector,
    budget: u64,
) -> Result<Crosscheck, CrosscheckError> {
    let classes = enumerate_bricks(field, b, d, budget)?;
    let r = brick_family(field, b, d)?;
    let opts = IsoOptions::default();
    let members: Vec<Representation<u64>> = match r.family() {
        Some(fam) => (0..field.modulus()).map(|l| evaluate_family(field, fam, &l)).collect(),
        None => Vec::new(),
    };
    let mut out = Crosscheck {
        family_classes: members.len(),
        oracle_classes: classes.len(),
        non_bricks: Vec::new(),
        collisions: Vec::new(),
        unmatched: Vec::new(),
    };
    for (l, m) in members.iter().enumerate() {
        if !is_brick(field, b, m)? {
            out.non_bricks.push(l as u64);
        }
        for (k, n) in members.iter().enumerate().skip(l + 1) {
            if are_isomorphic(field, b, m, n, &opts)? {
                out.collisions.push((l as u64, k as u64));
            }
        }
    }
    for (i, c) in classes.iter().enumerate() {
        let mut hit = false;
        for m in &members {
            if are_isomorphic(field, b, c, m, &opts)? {
                hit = true;
                break;
            }
        }
        if !hit {
            out.unmatched.push(i);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxcore::dims;
    use crate::dsl::parse_box;

    fn corpus(name: &str) -> FreeBox {
        let path = format!("{}/corpus/{name}.box", env!("CARGO_MANIFEST_DIR"));
        parse_box(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn box11_has_a_family_in_dimension_one_one() {
        let f = PrimeField::new(5).unwrap();
        let b = corpus("box11");
        let r = brick_family(&f, &b, &dims(&[("1", 1), ("2", 1)])).unwrap();
        let fam = r.family().expect("family");
        let members: Vec<_> = (0..5).map(|l| evaluate_family(&f, fam, &l)).collect();
        for m in &members {
            assert!(is_brick(&f, &b, m).unwrap());
        }
        for i in 0..5 {
            for j in i + 1..5 {
                assert!(!are_isomorphic(&f, &b, &members[i], &members[j], &IsoOptions::default()).unwrap());
            }
        }
    }

    #[test]
    fn obstructions() {
        let f = PrimeField::new(3).unwrap();
        let b = corpus("box11");
        let r = brick_family(&f, &b, &dims(&[("1", 2), ("2", 0)])).unwrap();
        assert_eq!(r.status, FamilyStatus::Empty(EmptyReason::JordanBlock(2)));
        let r = brick_family(&f, &b, &dims(&[])).unwrap();
        assert_eq!(r.status, FamilyStatus::Empty(EmptyReason::ZeroDimension));
        let r = brick_family(&f, &corpus("loop43"), &dims(&[("1", 1)])).unwrap();
        assert!(matches!(r.status, FamilyStatus::Empty(EmptyReason::LoopObstruction(_))));
    }

    #[test]
    fn crosscheck_box11_small() {
        let f = PrimeField::new(2).unwrap();
        let c = crosscheck(&f, &corpus("box11"), &dims(&[("1", 1), ("2", 1)]), 1 << 12).unwrap();
        assert!(c.agrees(), "{c:?}");
        assert_eq!(c.oracle_classes, 2);
    }
}
