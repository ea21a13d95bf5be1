//! The free graded path category of a biquiver.
//!
//! A written product `b*v` means "apply `v`, then `b`"; paths store their
//! arrows in written order, so the rightmost arrow is applied first. The
//! degree of a path is the number of dotted arrows in it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{format_rational, parse_rational, Coeff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrowKind {
    Solid,
    Dotted,
}

impl ArrowKind {
    pub fn degree(self) -> usize {
        match self {
            ArrowKind::Solid => 0,
            ArrowKind::Dotted => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArrowRef {
    pub id: String,
    pub source: String,
    pub target: String,
    pub kind: ArrowKind,
}

impl ArrowRef {
    pub fn new(id: &str, source: &str, target: &str, kind: ArrowKind) -> Self {
        ArrowRef {
            id: id.to_string(),
            source: source.to_string(),
            target: target.to_string(),
            kind,
        }
    }

    pub fn solid(id: &str, source: &str, target: &str) -> Self {
        Self::new(id, source, target, ArrowKind::Solid)
    }

    pub fn dotted(id: &str, source: &str, target: &str) -> Self {
        Self::new(id, source, target, ArrowKind::Dotted)
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }

    pub fn is_solid(&self) -> bool {
        self.kind == ArrowKind::Solid
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FreeCatError {
    #[error("cannot compose: {left} starts at {left_source} but {right} ends at {right_target}")]
    NotComposable {
        left: String,
        right: String,
        left_source: String,
        right_target: String,
    },
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("no image given for arrow {0}")]
    MissingImage(String),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

/// A path in written order; the empty path is an identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Path {
    arrows: Vec<ArrowRef>,
}

impl Path {
    pub fn identity() -> Self {
        Path { arrows: Vec::new() }
    }

    pub fn from_arrows(arrows: Vec<ArrowRef>) -> Result<Self, FreeCatError> {
        for w in arrows.windows(2) {
            if w[0].source != w[1].target {
                return Err(FreeCatError::NotComposable {
                    left: w[0].id.clone(),
                    right: w[1].id.clone(),
                    left_source: w[0].source.clone(),
                    right_target: w[1].target.clone(),
                });
            }
        }
        Ok(Path { arrows })
    }

    pub fn arrow(a: ArrowRef) -> Self {
        Path { arrows: vec![a] }
    }

    pub fn arrows(&self) -> &[ArrowRef] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.arrows.iter().map(|a| a.kind.degree()).sum()
    }

    /// Vertex where the path starts (source of its rightmost arrow).
    pub fn source(&self) -> Option<&str> {
        self.arrows.last().map(|a| a.source.as_str())
    }

    pub fn target(&self) -> Option<&str> {
        self.arrows.first().map(|a| a.target.as_str())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.arrows.iter().any(|a| a.id == id)
    }

    /// `self` after `right`, i.e. the written concatenation `self * right`.
    pub fn then_after(&self, right: &Path) -> Path {
        let mut arrows = self.arrows.clone();
        arrows.extend(right.arrows.iter().cloned());
        Path { arrows }
    }

    pub fn ids(&self) -> Vec<&str> {
        self.arrows.iter().map(|a| a.id.as_str()).collect()
    }

    /// Splits at the `k`-th arrow: (left part, arrow, right part).
    pub fn split_at_arrow(&self, k: usize) -> (Path, &ArrowRef, Path) {
        (
            Path { arrows: self.arrows[..k].to_vec() },
            &self.arrows[k],
            Path { arrows: self.arrows[k + 1..].to_vec() },
        )
    }

    /// Positions of the dotted arrows.
    pub fn dotted_positions(&self) -> Vec<usize> {
        self.arrows
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == ArrowKind::Dotted)
            .map(|(i, _)| i)
            .collect()
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arrows
            .len()
            .cmp(&other.arrows.len())
            .then_with(|| self.ids().cmp(&other.ids()))
            .then_with(|| self.arrows.cmp(&other.arrows))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An exact linear combination of parallel paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ElementRecord", try_from = "ElementRecord")]
pub struct GradedElement {
    source: String,
    target: String,
    terms: BTreeMap<Path, Coeff>,
}

impl GradedElement {
    pub fn zero(source: &str, target: &str) -> Self {
        GradedElement {
            source: source.to_string(),
            target: target.to_string(),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(vertex: &str) -> Self {
        let mut e = Self::zero(vertex, vertex);
        e.terms.insert(Path::identity(), Coeff::one());
        e
    }

    pub fn arrow(a: &ArrowRef) -> Self {
        Self::term(Coeff::one(), Path::arrow(a.clone())).expect("single arrow is a path")
    }

    /// `coeff * path`; the path must be non-empty (use [`identity`](Self::identity)).
    pub fn term(coeff: Coeff, path: Path) -> Result<Self, FreeCatError> {
        let (Some(s), Some(t)) = (path.source(), path.target()) else {
            return Err(FreeCatError::EndpointMismatch(
                "identity path needs an explicit vertex".into(),
            ));
        };
        let mut e = Self::zero(s, t);
        if !coeff.is_zero() {
            e.terms.insert(path, coeff);
        }
        Ok(e)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, path: &Path) -> Coeff {
        self.terms.get(path).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Coefficient of the single-arrow path `id`.
    pub fn linear_coefficient(&self, id: &str) -> Coeff {
        self.terms
            .iter()
            .find(|(p, _)| p.len() == 1 && p.arrows()[0].id == id)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Coeff::zero)
    }

    /// The common degree of all terms; `None` for mixed degrees, `Some(None)` for zero.
    pub fn homogeneous_degree(&self) -> Option<Option<usize>> {
        let mut degrees = self.terms.keys().map(Path::degree);
        match degrees.next() {
            None => Some(None),
            Some(d) => degrees.all(|e| e == d).then_some(Some(d)),
        }
    }

    pub fn contains_arrow(&self, id: &str) -> bool {
        self.terms.keys().any(|p| p.contains(id))
    }

    pub fn arrow_ids(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|p| p.arrows().iter().map(|a| a.id.clone()))
            .collect()
    }

    pub fn arrows(&self) -> BTreeSet<ArrowRef> {
        self.terms
            .keys()
            .flat_map(|p| p.arrows().iter().cloned())
            .collect()
    }

    fn check_parallel(&self, other: &Self) -> Result<(), FreeCatError> {
        if self.source != other.source || self.target != other.target {
            return Err(FreeCatError::EndpointMismatch(format!(
                "cannot add {}->{} and {}->{}",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(())
    }

    fn add_term(&mut self, path: Path, coeff: Coeff) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(path).or_insert_with(Coeff::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FreeCatError> {
        self.check_parallel(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FreeCatError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        let mut out = Self::zero(&self.source, &self.target);
        if s.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect();
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Coeff::one())
    }

    /// Keeps only the terms whose path satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Path) -> bool) -> Self {
        let mut out = Self::zero(&self.source, &self.target);
        out.terms = self
            .terms
            .iter()
            .filter(|(p, _)| keep(p))
            .map(|(p, c)| (p.clone(), c.clone()))
            .collect();
        out
    }

    /// Drops every term that mentions one of `ids`.
    pub fn without_arrows(&self, ids: &BTreeSet<String>) -> Self {
        self.filter_terms(|p| !p.arrows().iter().any(|a| ids.contains(&a.id)))
    }
}

/// Self-contained serialized form: coefficients as exact strings, paths as arrow lists.
#[derive(Serialize, Deserialize)]
struct ElementRecord {
    source: String,
    target: String,
    terms: Vec<(String, Vec<ArrowRef>)>,
}

impl From<GradedElement> for ElementRecord {
    fn from(e: GradedElement) -> Self {
        ElementRecord {
            terms: e
                .terms
                .iter()
                .map(|(p, c)| (format_rational(c), p.arrows.clone()))
                .collect(),
            source: e.source,
            target: e.target,
        }
    }
}

impl TryFrom<ElementRecord> for GradedElement {
    type Error = String;

    fn try_from(r: ElementRecord) -> Result<Self, String> {
        let mut out = GradedElement::zero(&r.source, &r.target);
        for (c, arrows) in r.terms {
            let coeff = parse_rational(&c).map_err(|e| e.to_string())?;
            let path = Path::from_arrows(arrows).map_err(|e| e.to_string())?;
            if !path.is_empty()
                && (path.source() != Some(r.source.as_str())
                    || path.target() != Some(r.target.as_str()))
            {
                return Err(format!("path {path} does not run {}->{}", r.source, r.target));
            }
            out.add_term(path, coeff);
        }
        Ok(out)
    }
}

/// Product `left * right` (apply `right` first).
pub fn compose(left: &GradedElement, right: &GradedElement) -> Result<GradedElement, FreeCatError> {
    if left.source != right.target {
        return Err(FreeCatError::NotComposable {
            left: left.to_string(),
            right: right.to_string(),
            left_source: left.source.clone(),
            right_target: right.target.clone(),
        });
    }
    let mut out = GradedElement::zero(&right.source, &left.target);
    for (pl, cl) in &left.terms {
        for (pr, cr) in &right.terms {
            out.add_term(pl.then_after(pr), cl * cr);
        }
    }
    Ok(out)
}

/// Product of a non-empty chain of elements in written order.
pub fn compose_all(factors: &[GradedElement]) -> Result<GradedElement, FreeCatError> {
    let (last, rest) = factors
        .split_last()
        .ok_or_else(|| FreeCatError::Shape("empty product".into()))?;
    rest.iter()
        .rev()
        .try_fold(last.clone(), |acc, f| compose(f, &acc))
}

/// Anything that assigns a differential to each arrow.
pub trait Differential {
    fn differential_of(&self, arrow: &ArrowRef) -> GradedElement;
}

impl<F: Fn(&ArrowRef) -> GradedElement> Differential for F {
    fn differential_of(&self, arrow: &ArrowRef) -> GradedElement {
        self(arrow)
    }
}

/// Extends the differential to all elements by linearity and the graded
/// Leibniz rule `d(xy) = d(x) y + (-1)^|x| x d(y)`.
pub fn extend_differential<D: Differential + ?Sized>(diff: &D, e: &GradedElement) -> GradedElement {
    let mut out = GradedElement::zero(&e.source, &e.target);
    for (path, coeff) in &e.terms {
        let arrows = path.arrows();
        let mut prefix_degree = 0;
        for k in 0..arrows.len() {
            let d = diff.differential_of(&arrows[k]);
            if !d.is_zero() {
                let sign = if prefix_degree % 2 == 0 { coeff.clone() } else { -coeff.clone() };
                let left = Path { arrows: arrows[..k].to_vec() };
                let right = Path { arrows: arrows[k + 1..].to_vec() };
                for (p, c) in &d.terms {
                    out.add_term(left.then_after(p).then_after(&right), &sign * c);
                }
            }
            prefix_degree += arrows[k].kind.degree();
        }
    }
    out
}

/// Substitutes single arrows by elements; arrows without an image stay put.
pub fn substitute(
    e: &GradedElement,
    images: &BTreeMap<String, GradedElement>,
) -> Result<GradedElement, FreeCatError> {
    let mut out = GradedElement::zero(&e.source, &e.target);
    for (path, coeff) in &e.terms {
        if path.is_empty() {
            out.add_term(Path::identity(), coeff.clone());
            continue;
        }
        let factors = path
            .arrows()
            .iter()
            .map(|a| {
                let img = images.get(&a.id).cloned().unwrap_or_else(|| GradedElement::arrow(a));
                if img.source != a.source || img.target != a.target {
                    return Err(FreeCatError::EndpointMismatch(format!(
                        "image of {} runs {}->{}, expected {}->{}",
                        a.id, img.source, img.target, a.source, a.target
                    )));
                }
                Ok(img)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let prod = compose_all(&factors)?;
        out = out.add(&prod.scale(coeff))?;
    }
    Ok(out)
}

/// A matrix of graded elements; row labels are target summands and column
/// labels source summands, so entry (k, l) runs from `cols[l]` to `rows[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<GradedElement>,
}

impl GradedMatrix {
    pub fn zero(rows: &[String], cols: &[String]) -> Self {
        let entries = rows
            .iter()
            .flat_map(|r| cols.iter().map(move |c| GradedElement::zero(c, r)))
            .collect();
        GradedMatrix {
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            entries,
        }
    }

    pub fn identity(labels: &[String]) -> Self {
        let mut m = Self::zero(labels, labels);
        for (k, v) in labels.iter().enumerate() {
            m.set(k, k, GradedElement::identity(v)).expect("diagonal endpoints");
        }
        m
    }

    pub fn scalar(e: GradedElement) -> Self {
        GradedMatrix {
            rows: vec![e.target.clone()],
            cols: vec![e.source.clone()],
            entries: vec![e],
        }
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GradedElement {
        &self.entries[r * self.cols.len() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: GradedElement) -> Result<(), FreeCatError> {
        if e.source != self.cols[c] || e.target != self.rows[r] {
            return Err(FreeCatError::EndpointMismatch(format!(
                "entry ({r},{c}) must run {}->{}, got {}->{}",
                self.cols[c], self.rows[r], e.source, e.target
            )));
        }
        let n = self.cols.len();
        self.entries[r * n + c] = e;
        Ok(())
    }

    pub fn mul(&self, other: &GradedMatrix) -> Result<GradedMatrix, FreeCatError> {
        if self.cols != other.rows {
            return Err(FreeCatError::Shape(format!(
                "columns {:?} do not match rows {:?}",
                self.cols, other.rows
            )));
        }
        let mut out = GradedMatrix::zero(&self.rows, &other.cols);
        for r in 0..self.rows.len() {
            for c in 0..other.cols.len() {
                let mut acc = GradedElement::zero(&other.cols[c], &self.rows[r]);
                for k in 0..self.cols.len() {
                    let (a, b) = (self.get(r, k), other.get(k, c));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&compose(a, b)?)?;
                }
                out.entries[r * other.cols.len() + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GradedMatrix) -> Result<GradedMatrix, FreeCatError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FreeCatError::Shape("sum of differently labelled matrices".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(GradedMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries,
        })
    }

    pub fn scale(&self, s: &Coeff) -> GradedMatrix {
        GradedMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    pub fn map_entries(&self, f: impl FnMut(&GradedElement) -> GradedElement) -> GradedMatrix {
        GradedMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

/// Matrix substitution: each arrow is replaced by a matrix whose labels are
/// the summands of its endpoints under `split` (unsplit vertices are their
/// own single summand). Identity paths become identity matrices.
pub fn substitute_matrix(
    e: &GradedElement,
    images: &BTreeMap<String, GradedMatrix>,
    split: &BTreeMap<String, Vec<String>>,
) -> Result<GradedMatrix, FreeCatError> {
    let summands = |v: &str| split.get(v).cloned().unwrap_or_else(|| vec![v.to_string()]);
    let mut out = GradedMatrix::zero(&summands(&e.target), &summands(&e.source));
    for (path, coeff) in &e.terms {
        let mut acc = GradedMatrix::identity(&summands(&e.source));
        for a in path.arrows().iter().rev() {
            let img = images
                .get(&a.id)
                .ok_or_else(|| FreeCatError::MissingImage(a.id.clone()))?;
            if img.cols != summands(&a.source) || img.rows != summands(&a.target) {
                return Err(FreeCatError::Shape(format!(
                    "image of {} has labels {:?}x{:?}",
                    a.id, img.rows, img.cols
                )));
            }
            acc = img.mul(&acc)?;
        }
        out = out.add(&acc.scale(coeff))?;
    }
    Ok(out)
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arrows.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", self.ids().join("*"))
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (path, coeff)) in self.terms.iter().enumerate() {
            let negative = coeff.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = coeff.abs();
            if path.is_empty() {
                write!(f, "{}*1_{}", format_rational(&mag), self.source)?;
            } else if mag.is_one() {
                write!(f, "{path}")?;
            } else {
                write!(f, "{}*{path}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}
