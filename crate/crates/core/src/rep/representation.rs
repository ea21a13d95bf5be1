use std::collections::BTreeMap;

use thiserror::Error;

use crate::boxcore::{BoxError, DimensionVector, FreeBox};
use crate::freecat::{GradedElement, Path};
use crate::matrix::{identity, mat_add, mat_mul, mat_scale, zeros, Matrix};
use crate::scalar::{Ring, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error("enumeration needs {needed} tuples, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
}

/// Spaces and matrices: `matrices[a]` is `d_target x d_source` for each solid arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<E> {
    pub dims: DimensionVector,
    pub matrices: BTreeMap<String, Matrix<E>>,
}

impl<E: Clone> Representation<E> {
    pub fn dim(&self, v: &str) -> usize {
        self.dims.get(v).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn matrix(&self, a: &str) -> &Matrix<E> {
        &self.matrices[a]
    }

    /// Applies `f` to every matrix entry.
    pub fn map<T: Clone>(&self, mut f: impl FnMut(&E) -> T) -> Representation<T> {
        Representation {
            dims: self.dims.clone(),
            matrices: self.matrices.iter().map(|(k, m)| (k.clone(), m.map(&mut f))).collect(),
        }
    }
}

/// The representation with all matrices zero.
pub fn zero_representation<R: Ring>(ring: &R, b: &FreeBox, d: &DimensionVector) -> Representation<R::Elem> {
    let dims: DimensionVector = b
        .vertices()
        .into_iter()
        .map(|v| {
            let n = d.get(&v).copied().unwrap_or(0);
            (v, n)
        })
        .collect();
    let matrices = b
        .solid_arrows()
        .map(|a| (a.id.clone(), zeros(ring, dims[&a.target], dims[&a.source])))
        .collect();
    Representation { dims, matrices }
}

/// Checks that every solid arrow has a matrix of the right shape.
pub fn check_representation<E: Clone>(b: &FreeBox, m: &Representation<E>) -> Result<(), RepError> {
    for v in b.vertices() {
        if !m.dims.contains_key(&v) {
            return Err(RepError::Shape(format!("no dimension for vertex {v}")));
        }
    }
    for a in b.solid_arrows() {
        let mat = m
            .matrices
            .get(&a.id)
            .ok_or_else(|| RepError::Shape(format!("no matrix for {}", a.id)))?;
        let want = (m.dim(&a.target), m.dim(&a.source));
        if mat.shape() != want {
            return Err(RepError::Shape(format!(
                "matrix of {} is {:?}, expected {:?}",
                a.id,
                mat.shape(),
                want
            )));
        }
    }
    if m.matrices.len() != b.solid_arrows().count() {
        return Err(RepError::Shape("matrices given for unknown arrows".into()));
    }
    Ok(())
}

/// Matrix of a solid path, rightmost arrow applied first; identity paths
/// need the vertex.
pub fn path_matrix<R: Ring>(
    ring: &R,
    m: &Representation<R::Elem>,
    p: &Path,
    at: &str,
) -> Matrix<R::Elem> {
    let mut acc = identity(ring, m.dim(at));
    for a in p.arrows().iter().rev() {
        acc = mat_mul(ring, m.matrix(&a.id), &acc);
    }
    acc
}

/// Evaluates a solid element on a representation.
pub fn evaluate_element<R: Ring>(
    ring: &R,
    m: &Representation<R::Elem>,
    e: &GradedElement,
) -> Result<Matrix<R::Elem>, RepError> {
    let mut acc = zeros(ring, m.dim(e.target()), m.dim(e.source()));
    for (p, c) in e.terms() {
        if p.degree() != 0 {
            return Err(RepError::Shape(format!("cannot evaluate dotted path {p}")));
        }
        let c = ring.from_rational(c)?;
        acc = mat_add(ring, &acc, &mat_scale(ring, &c, &path_matrix(ring, m, p, e.source())));
    }
    Ok(acc)
}

/// Morphism components: `vertex[i]` is `S_i`, `dotted[u]` is `S(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphismData<E> {
    pub vertex: BTreeMap<String, Matrix<E>>,
    pub dotted: BTreeMap<String, Matrix<E>>,
}

impl<E: Clone> MorphismData<E> {
    /// Linear combination `sum c_k S_k` of morphisms with equal shapes.
    pub fn combine<R: Ring<Elem = E>>(ring: &R, terms: &[(E, &MorphismData<E>)]) -> MorphismData<E> {
        let (_, first) = terms[0];
        let scale_all = |key: &String, pick: &dyn Fn(&MorphismData<E>) -> &BTreeMap<String, Matrix<E>>| {
            let mut acc = zeros(ring, pick(first)[key].rows(), pick(first)[key].cols());
            for (c, s) in terms {
                acc = mat_add(ring, &acc, &mat_scale(ring, c, &pick(s)[key]));
            }
            acc
        };
        MorphismData {
            vertex: first.vertex.keys().map(|k| (k.clone(), scale_all(k, &|s| &s.vertex))).collect(),
            dotted: first.dotted.keys().map(|k| (k.clone(), scale_all(k, &|s| &s.dotted))).collect(),
        }
    }
}

/// The identity morphism of `m`.
pub fn identity_morphism<R: Ring>(ring: &R, b: &FreeBox, m: &Representation<R::Elem>) -> MorphismData<R::Elem> {
    MorphismData {
        vertex: b.vertices().into_iter().map(|v| {
            let n = m.dim(&v);
            (v, identity(ring, n))
        }).collect(),
        dotted: b
            .dotted_arrows()
            .map(|u| (u.id.clone(), zeros(ring, m.dim(&u.target), m.dim(&u.source))))
            .collect(),
    }
}
