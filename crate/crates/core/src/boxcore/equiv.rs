//! Equivalence of boxes up to renaming generators and rescaling them by signs.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::freecat::ArrowRef;
use crate::matrix::{solve, Matrix};
use crate::scalar::{Coeff, PrimeField, Ring};

use super::model::FreeBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMode {
    /// All arrows and all differentials.
    Exact,
    /// Ignores dotted differentials and dotted arrows absent from every solid differential.
    SolidCore,
    /// Like `SolidCore`, but keeps only the length-two terms of solid differentials.
    QuadraticCore,
}

/// A witness: generator `x` of the left box equals `signs[x] * arrows[x]` of the right one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equivalence {
    pub vertices: BTreeMap<String, String>,
    pub arrows: BTreeMap<String, String>,
    pub signs: BTreeMap<String, i8>,
}

/// Drops dotted arrows that no solid differential uses, and all dotted differentials.
pub fn solid_core(b: &FreeBox) -> FreeBox {
    let unused: BTreeSet<String> = b
        .dotted_arrows()
        .filter(|u| !b.occurs_in_solid_differential(&u.id))
        .map(|u| u.id.clone())
        .collect();
    let mut out = b.clone();
    out.remove_arrows(&unused);
    let dotted: Vec<String> = out.dotted_arrows().map(|u| u.id.clone()).collect();
    for u in dotted {
        let a = out.arrow(&u).expect("present").clone();
        out.set_differential_unchecked(&u, crate::freecat::GradedElement::zero(&a.source, &a.target));
    }
    out
}

/// `solid_core` with every solid differential cut down to its terms of length two.
pub fn quadratic_core(b: &FreeBox) -> FreeBox {
    let mut out = b.clone();
    let solids: Vec<String> = out.solid_arrows().map(|a| a.id.clone()).collect();
    for id in solids {
        let d = out.differential(&id).filter_terms(|p| p.len() == 2);
        out.set_differential_unchecked(&id, d);
    }
    solid_core(&out)
}

type Terms = BTreeMap<Vec<String>, Coeff>;

struct Side {
    arrows: Vec<ArrowRef>,
    diffs: BTreeMap<String, Terms>,
    occurrences: BTreeMap<String, usize>,
}

impl Side {
    fn new(b: &FreeBox) -> Self {
        let arrows: Vec<ArrowRef> = b.arrows().cloned().collect();
        let mut diffs = BTreeMap::new();
        let mut occurrences: BTreeMap<String, usize> = BTreeMap::new();
        for a in &arrows {
            let d = b.differential(&a.id);
            let terms: Terms = d
                .terms()
                .map(|(p, c)| (p.ids().iter().map(|s| s.to_string()).collect(), c.clone()))
                .collect();
            for ids in terms.keys() {
                for id in ids {
                    *occurrences.entry(id.clone()).or_default() += 1;
                }
            }
            diffs.insert(a.id.clone(), terms);
        }
        Side { arrows, diffs, occurrences }
    }

    fn signature(&self, a: &ArrowRef) -> (bool, bool, usize, Vec<usize>, usize) {
        let terms = &self.diffs[&a.id];
        let mut lens: Vec<usize> = terms.keys().map(Vec::len).collect();
        lens.sort_unstable();
        (
            a.is_solid(),
            a.is_loop(),
            terms.len(),
            lens,
            self.occurrences.get(&a.id).copied().unwrap_or(0),
        )
    }
}

struct Search<'a> {
    left: &'a Side,
    right: &'a Side,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    vmap: BTreeMap<String, String>,
    vused: BTreeMap<String, usize>,
    amap: BTreeMap<String, String>,
    aused: BTreeSet<usize>,
}

impl Search<'_> {
    fn bind_vertex(&mut self, l: &str, r: &str) -> Option<bool> {
        match self.vmap.get(l) {
            Some(x) if x == r => Some(false),
            Some(_) => None,
            None => {
                if self.vused.contains_key(r) {
                    return None;
                }
                self.vmap.insert(l.to_string(), r.to_string());
                self.vused.insert(r.to_string(), 1);
                Some(true)
            }
        }
    }

    fn unbind_vertex(&mut self, l: &str) {
        if let Some(r) = self.vmap.remove(l) {
            self.vused.remove(&r);
        }
    }

    /// Support and magnitudes agree for every fully mapped differential.
    fn consistent(&self) -> bool {
        for (x, terms) in &self.left.diffs {
            let Some(y) = self.amap.get(x) else { continue };
            if terms.keys().flatten().any(|id| !self.amap.contains_key(id)) {
                continue;
            }
            let rterms = &self.right.diffs[y];
            if rterms.len() != terms.len() {
                return false;
            }
            for (ids, c) in terms {
                let mapped: Vec<String> = ids.iter().map(|i| self.amap[i].clone()).collect();
                match rterms.get(&mapped) {
                    Some(rc) if rc.abs() == c.abs() => {}
                    _ => return false,
                }
            }
        }
        true
    }

    fn signs(&self) -> Option<BTreeMap<String, i8>> {
        let f2 = PrimeField::new(2).expect("2 is prime");
        let ids: Vec<&String> = self.left.arrows.iter().map(|a| &a.id).collect();
        let col: BTreeMap<&String, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut rhs = Vec::new();
        for (x, terms) in &self.left.diffs {
            let y = &self.amap[x];
            for (path, c) in terms {
                let mapped: Vec<String> = path.iter().map(|i| self.amap[i].clone()).collect();
                let rc = &self.right.diffs[y][&mapped];
                let mut row = vec![0u64; ids.len()];
                row[col[x]] ^= 1;
                for id in path {
                    row[col[id]] ^= 1;
                }
                rows.push(row);
                rhs.push(u64::from(c.is_negative() != rc.is_negative()));
            }
        }
        let values = if rows.is_empty() {
            vec![0; ids.len()]
        } else {
            let m = Matrix::from_rows(rows.len(), ids.len(), rows.concat());
            solve(&f2, &m, &rhs)?
        };
        Some(
            ids.iter()
                .zip(values)
                .map(|(id, bit)| ((*id).clone(), if f2.is_zero(&bit) { 1 } else { -1 }))
                .collect(),
        )
    }

    fn run(&mut self, k: usize) -> Option<BTreeMap<String, i8>> {
        if k == self.order.len() {
            return self.signs();
        }
        let li = self.order[k];
        let la = self.left.arrows[li].clone();
        for ri in self.candidates[li].clone() {
            if self.aused.contains(&ri) {
                continue;
            }
            let ra = self.right.arrows[ri].clone();
            let Some(new_s) = self.bind_vertex(&la.source, &ra.source) else { continue };
            let Some(new_t) = self.bind_vertex(&la.target, &ra.target) else {
                if new_s {
                    self.unbind_vertex(&la.source);
                }
                continue;
            };
            self.amap.insert(la.id.clone(), ra.id.clone());
            self.aused.insert(ri);
            if self.consistent() {
                if let Some(s) = self.run(k + 1) {
                    return Some(s);
                }
            }
            self.amap.remove(&la.id);
            self.aused.remove(&ri);
            if new_t {
                self.unbind_vertex(&la.target);
            }
            if new_s {
                self.unbind_vertex(&la.source);
            }
        }
        None
    }
}

/// Searches for a kind- and endpoint-preserving renaming plus signs `±1`
/// that turns the differential of `left` into that of `right`.
pub fn signed_renaming(left: &FreeBox, right: &FreeBox, mode: CompareMode) -> Option<Equivalence> {
    let (l, r) = match mode {
        CompareMode::Exact => (left.clone(), right.clone()),
        CompareMode::SolidCore => (solid_core(left), solid_core(right)),
        CompareMode::QuadraticCore => (quadratic_core(left), quadratic_core(right)),
    };
    if l.vertices().len() != r.vertices().len() || l.num_arrows() != r.num_arrows() {
        return None;
    }
    let (ls, rs) = (Side::new(&l), Side::new(&r));
    let candidates: Vec<Vec<usize>> = ls
        .arrows
        .iter()
        .map(|a| {
            let sig = ls.signature(a);
            (0..rs.arrows.len()).filter(|&j| rs.signature(&rs.arrows[j]) == sig).collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    // most constrained first, then arrows sharing vertices with earlier ones
    let mut order: Vec<usize> = Vec::new();
    let mut remaining: BTreeSet<usize> = (0..ls.arrows.len()).collect();
    let mut seen_vertices: BTreeSet<String> = BTreeSet::new();
    while !remaining.is_empty() {
        let next = *remaining
            .iter()
            .min_by_key(|&&i| {
                let a = &ls.arrows[i];
                let touches = seen_vertices.contains(&a.source) || seen_vertices.contains(&a.target);
                (!touches, candidates[i].len(), i)
            })
            .expect("nonempty");
        remaining.remove(&next);
        seen_vertices.insert(ls.arrows[next].source.clone());
        seen_vertices.insert(ls.arrows[next].target.clone());
        order.push(next);
    }
    let mut search = Search {
        left: &ls,
        right: &rs,
        order,
        candidates,
        vmap: BTreeMap::new(),
        vused: BTreeMap::new(),
        amap: BTreeMap::new(),
        aused: BTreeSet::new(),
    };
    let signs = search.run(0)?;
    let mut vertices = search.vmap.clone();
    // isolated vertices pair up in order
    let lfree: Vec<String> = l.vertices().into_iter().filter(|v| !vertices.contains_key(v)).collect();
    let rfree: Vec<String> = r
        .vertices()
        .into_iter()
        .filter(|v| !search.vused.contains_key(v))
        .collect();
    for (a, b) in lfree.into_iter().zip(rfree) {
        vertices.insert(a, b);
    }
    Some(Equivalence {
        vertices,
        arrows: search.amap,
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecat::{compose, GradedElement};

    fn box11(sign_a2: i64, names: (&str, &str, &str, &str)) -> FreeBox {
        let mut b = FreeBox::new("t");
        b.add_vertex("1");
        b.add_vertex("2");
        let (a1, a2, bb, v) = names;
        b.add_solid(a1, "1", "1").unwrap();
        b.add_solid(a2, "2", "2").unwrap();
        let eb = GradedElement::arrow(&b.add_solid(bb, "2", "1").unwrap());
        let ev = GradedElement::arrow(&b.add_dotted(v, "1", "2").unwrap());
        b.set_differential(a1, compose(&eb, &ev).unwrap()).unwrap();
        let t = compose(&ev, &eb).unwrap().scale(&Coeff::from_integer(sign_a2.into()));
        b.set_differential(a2, t).unwrap();
        b
    }

    #[test]
    fn renamed_copy_is_equivalent() {
        let a = box11(-1, ("a1", "a2", "b", "v"));
        let b = box11(-1, ("x", "y", "z", "w"));
        let e = signed_renaming(&a, &b, CompareMode::Exact).unwrap();
        assert_eq!(e.arrows["b"], "z");
    }

    #[test]
    fn sign_flip_is_absorbed() {
        let a = box11(-1, ("a1", "a2", "b", "v"));
        let b = box11(1, ("a1", "a2", "b", "v"));
        assert!(signed_renaming(&a, &b, CompareMode::Exact).is_some());
    }

    #[test]
    fn different_magnitude_is_not() {
        let a = box11(-1, ("a1", "a2", "b", "v"));
        let b = box11(2, ("a1", "a2", "b", "v"));
        assert!(signed_renaming(&a, &b, CompareMode::Exact).is_none());
    }
}
