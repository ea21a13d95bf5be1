use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::freecat::{
    extend_differential, ArrowKind, ArrowRef, Differential, FreeCatError, GradedElement,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoxError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("arrow id {0} is already in use")]
    DuplicateArrow(String),
    #[error("differential of {arrow} must run {expected}, got {found}")]
    DifferentialEndpoints {
        arrow: String,
        expected: String,
        found: String,
    },
    #[error("generator change is not invertible at {0}")]
    NotInvertible(String),
    #[error(transparent)]
    FreeCat(#[from] FreeCatError),
}

/// Orders vertex ids numerically when both are numbers, lexicographically otherwise.
pub fn vertex_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}

/// A free normal box, stored as its differential biquiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeBox {
    name: String,
    vertices: BTreeSet<String>,
    arrows: BTreeMap<String, ArrowRef>,
    // only nonzero differentials are stored
    differential: BTreeMap<String, GradedElement>,
}

impl FreeBox {
    pub fn new(name: &str) -> Self {
        FreeBox {
            name: name.to_string(),
            vertices: BTreeSet::new(),
            arrows: BTreeMap::new(),
            differential: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn add_vertex(&mut self, v: &str) {
        self.vertices.insert(v.to_string());
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    /// Vertices in canonical (natural) order.
    pub fn vertices(&self) -> Vec<String> {
        let mut vs: Vec<String> = self.vertices.iter().cloned().collect();
        vs.sort_by(|a, b| vertex_order(a, b));
        vs
    }

    pub fn add_arrow(&mut self, arrow: ArrowRef) -> Result<(), BoxError> {
        for v in [&arrow.source, &arrow.target] {
            if !self.vertices.contains(v) {
                return Err(BoxError::UnknownVertex(v.clone()));
            }
        }
        if self.arrows.contains_key(&arrow.id) {
            return Err(BoxError::DuplicateArrow(arrow.id));
        }
        self.arrows.insert(arrow.id.clone(), arrow);
        Ok(())
    }

    pub fn add_solid(&mut self, id: &str, source: &str, target: &str) -> Result<ArrowRef, BoxError> {
        let a = ArrowRef::solid(id, source, target);
        self.add_arrow(a.clone())?;
        Ok(a)
    }

    pub fn add_dotted(&mut self, id: &str, source: &str, target: &str) -> Result<ArrowRef, BoxError> {
        let a = ArrowRef::dotted(id, source, target);
        self.add_arrow(a.clone())?;
        Ok(a)
    }

    pub fn arrow(&self, id: &str) -> Result<&ArrowRef, BoxError> {
        self.arrows.get(id).ok_or_else(|| BoxError::UnknownArrow(id.to_string()))
    }

    pub fn has_arrow(&self, id: &str) -> bool {
        self.arrows.contains_key(id)
    }

    pub fn arrows(&self) -> impl Iterator<Item = &ArrowRef> {
        self.arrows.values()
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = &String> {
        self.arrows.keys()
    }

    pub fn solid_arrows(&self) -> impl Iterator<Item = &ArrowRef> {
        self.arrows.values().filter(|a| a.kind == ArrowKind::Solid)
    }

    pub fn dotted_arrows(&self) -> impl Iterator<Item = &ArrowRef> {
        self.arrows.values().filter(|a| a.kind == ArrowKind::Dotted)
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    /// Sets `d(id)`; endpoints are checked, degree and closure are left to validation.
    pub fn set_differential(&mut self, id: &str, value: GradedElement) -> Result<(), BoxError> {
        let a = self.arrow(id)?;
        if value.source() != a.source || value.target() != a.target {
            return Err(BoxError::DifferentialEndpoints {
                arrow: id.to_string(),
                expected: format!("{}->{}", a.source, a.target),
                found: format!("{}->{}", value.source(), value.target()),
            });
        }
        for x in value.arrows() {
            match self.arrows.get(&x.id) {
                Some(known) if *known == x => {}
                _ => return Err(BoxError::UnknownArrow(x.id)),
            }
        }
        if value.is_zero() {
            self.differential.remove(id);
        } else {
            self.differential.insert(id.to_string(), value);
        }
        Ok(())
    }

    /// Stored differential, without endpoint checks. Used by transformations
    /// whose output is validated afterwards.
    pub fn set_differential_unchecked(&mut self, id: &str, value: GradedElement) {
        if value.is_zero() {
            self.differential.remove(id);
        } else {
            self.differential.insert(id.to_string(), value);
        }
    }

    /// `d(id)`, zero when unset. Panics on an unknown arrow.
    pub fn differential(&self, id: &str) -> GradedElement {
        match self.differential.get(id) {
            Some(e) => e.clone(),
            None => {
                let a = &self.arrows[id];
                GradedElement::zero(&a.source, &a.target)
            }
        }
    }

    /// Arrows with a nonzero differential, in id order.
    pub fn nonzero_differentials(&self) -> impl Iterator<Item = (&String, &GradedElement)> {
        self.differential.iter()
    }

    /// The Leibniz extension of the differential to arbitrary elements.
    pub fn d(&self, e: &GradedElement) -> GradedElement {
        extend_differential(self, e)
    }

    /// Removes arrows and purges every differential term mentioning them.
    pub fn remove_arrows(&mut self, ids: &BTreeSet<String>) {
        for id in ids {
            self.arrows.remove(id);
            self.differential.remove(id);
        }
        let purged: Vec<(String, GradedElement)> = self
            .differential
            .iter()
            .map(|(k, e)| (k.clone(), e.without_arrows(ids)))
            .collect();
        self.differential.clear();
        for (k, e) in purged {
            self.set_differential_unchecked(&k, e);
        }
    }

    /// Arrows starting or ending at `v`.
    pub fn incident_arrows(&self, v: &str) -> BTreeSet<String> {
        self.arrows
            .values()
            .filter(|a| a.source == v || a.target == v)
            .map(|a| a.id.clone())
            .collect()
    }

    /// Deletes `v`, its incident arrows and every term containing them.
    pub fn delete_vertex(&self, v: &str) -> Result<FreeBox, BoxError> {
        if !self.vertices.contains(v) {
            return Err(BoxError::UnknownVertex(v.to_string()));
        }
        let mut out = self.clone();
        out.remove_arrows(&self.incident_arrows(v));
        out.vertices.remove(v);
        Ok(out)
    }

    /// Solid arrows that are loops at `v`.
    pub fn solid_loops_at(&self, v: &str) -> Vec<&ArrowRef> {
        self.solid_arrows().filter(|a| a.is_loop() && a.source == v).collect()
    }

    /// Whether some solid arrow's differential mentions `id`.
    pub fn occurs_in_solid_differential(&self, id: &str) -> bool {
        self.differential
            .iter()
            .any(|(k, e)| self.arrows[k].is_solid() && e.contains_arrow(id))
    }
}

impl Differential for FreeBox {
    fn differential_of(&self, arrow: &ArrowRef) -> GradedElement {
        match self.differential.get(&arrow.id) {
            Some(e) => e.clone(),
            None => GradedElement::zero(&arrow.source, &arrow.target),
        }
    }
}

/// Dimension vector: vertex → dimension; missing vertices count as 0.
pub type DimensionVector = BTreeMap<String, usize>;

/// `sum over solid arrows i->j of d_i d_j`.
pub fn norm(b: &FreeBox, d: &DimensionVector) -> usize {
    let dim = |v: &str| d.get(v).copied().unwrap_or(0);
    b.solid_arrows().map(|a| dim(&a.source) * dim(&a.target)).sum()
}

/// Connected components of the undirected solid graph, each sorted, listed by
/// their least vertex.
pub fn solid_components(b: &FreeBox) -> Vec<Vec<String>> {
    let vs = b.vertices();
    let index: BTreeMap<&str, usize> = vs.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..vs.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for a in b.solid_arrows() {
        let (x, y) = (index[a.source.as_str()], index[a.target.as_str()]);
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx != ry {
            parent[rx.max(ry)] = rx.min(ry);
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, v) in vs.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(v.clone());
    }
    groups.into_values().collect()
}

pub fn dims(pairs: &[(&str, usize)]) -> DimensionVector {
    pairs.iter().map(|(v, n)| (v.to_string(), *n)).collect()
}
