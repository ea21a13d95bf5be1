//! Reductions of boxes: regularization, minimal-edge reduction, vertex
//! deletion and changes of generators, recorded as replayable steps with
//! pullbacks of representations.

mod bt_ops;
mod minimal_edge;
mod regularize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boxcore::{change_generators, validate_box, BoxError, FreeBox, GeneratorChange};
use crate::freecat::FreeCatError;
use crate::matrix::{identity, zeros, Matrix};
use crate::rep::{evaluate_element, RepError, Representation};
use crate::scalar::Ring;

pub use bt_ops::{eliminate_pair, normalize_partner, self_reproduce, SelfReproduction};
pub use minimal_edge::reduce_minimal_edge;
pub use regularize::{regularize, regularize_all, superfluous_candidates};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    FreeCat(#[from] FreeCatError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("{arrow} is not superfluous: {reason}")]
    NotSuperfluous { arrow: String, reason: String },
    #[error("{arrow} is not a minimal edge: {reason}")]
    NotMinimalEdge { arrow: String, reason: String },
    #[error("box is not a BT-box: {0}")]
    NotBT(String),
    #[error("{0}")]
    Precondition(String),
    #[error("reduction produced an invalid box: {0}")]
    InvalidResult(String),
    #[error("replay of step {step} does not reproduce its target")]
    ReplayMismatch { step: usize },
}

/// Block structure of a split arrow: `arrows[k][l]` is the new arrow from
/// summand `cols[l]` to summand `rows[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBlock {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub arrows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Regularization {
        arrow: String,
        dotted: String,
        change: GeneratorChange,
    },
    MinimalEdge {
        edge: String,
        source: String,
        target: String,
        new_vertex: String,
        eta: String,
        xi: String,
        /// Only arrows touching a split vertex appear here.
        blocks: BTreeMap<String, SplitBlock>,
    },
    VertexDeletion {
        vertex: String,
    },
    GeneratorChange {
        change: GeneratorChange,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub source: FreeBox,
    pub target: FreeBox,
}

impl ReductionStep {
    /// Recomputes the target from the source.
    pub fn replay(&self) -> Result<FreeBox, ReductionError> {
        let out = match &self.kind {
            StepKind::Regularization { arrow, dotted, .. } => {
                regularize(&self.source, arrow, Some(dotted))?.0
            }
            StepKind::MinimalEdge { edge, .. } => reduce_minimal_edge(&self.source, edge)?.0,
            StepKind::VertexDeletion { vertex } => delete_vertex(&self.source, vertex)?.0,
            StepKind::GeneratorChange { change } => {
                generator_change(&self.source, &change.forward)?.0
            }
        };
        Ok(out)
    }

    /// Turns a representation of the target into one of the source.
    pub fn pullback<R: Ring>(
        &self,
        ring: &R,
        n: &Representation<R::Elem>,
    ) -> Result<Representation<R::Elem>, ReductionError> {
        let src = &self.source;
        let mut dims = n.dims.clone();
        if let StepKind::VertexDeletion { vertex } = &self.kind {
            dims.insert(vertex.clone(), 0);
        }
        if let StepKind::MinimalEdge { source, target, new_vertex, .. } = &self.kind {
            let dn = n.dim(new_vertex);
            dims.insert(target.clone(), n.dim(target) + dn);
            dims.insert(source.clone(), n.dim(source) + dn);
            dims.remove(new_vertex);
        }
        let dim = |v: &str| dims.get(v).copied().unwrap_or(0);
        let mut matrices = BTreeMap::new();
        for a in src.solid_arrows() {
            let shape = (dim(&a.target), dim(&a.source));
            let m = match &self.kind {
                StepKind::Regularization { arrow, .. } if *arrow == a.id => zeros(ring, shape.0, shape.1),
                StepKind::VertexDeletion { vertex } if a.source == *vertex || a.target == *vertex => {
                    zeros(ring, shape.0, shape.1)
                }
                StepKind::GeneratorChange { change } if change.inverse.contains_key(&a.id) => {
                    evaluate_element(ring, n, &change.inverse[&a.id])?
                }
                StepKind::MinimalEdge { edge, new_vertex, blocks, .. } => {
                    if *edge == a.id {
                        let mut m = zeros(ring, shape.0, shape.1);
                        let dn = n.dim(new_vertex);
                        m.set_block(shape.0 - dn, shape.1 - dn, &identity(ring, dn));
                        m
                    } else if let Some(blk) = blocks.get(&a.id) {
                        assemble(ring, n, blk)
                    } else {
                        n.matrix(&a.id).clone()
                    }
                }
                _ => n.matrix(&a.id).clone(),
            };
            if m.shape() != shape {
                return Err(RepError::Shape(format!("pullback of {} has shape {:?}", a.id, m.shape())).into());
            }
            matrices.insert(a.id.clone(), m);
        }
        let dims = src.vertices().into_iter().map(|v| {
            let d = dim(&v);
            (v, d)
        });
        Ok(Representation {
            dims: dims.collect(),
            matrices,
        })
    }
}

fn assemble<R: Ring>(ring: &R, n: &Representation<R::Elem>, blk: &SplitBlock) -> Matrix<R::Elem> {
    let rows: Vec<usize> = blk.rows.iter().map(|v| n.dim(v)).collect();
    let cols: Vec<usize> = blk.cols.iter().map(|v| n.dim(v)).collect();
    let mut m = zeros(ring, rows.iter().sum(), cols.iter().sum());
    let mut r0 = 0;
    for (k, r) in rows.iter().enumerate() {
        let mut c0 = 0;
        for (l, c) in cols.iter().enumerate() {
            let x = n.matrix(&blk.arrows[k][l]);
            debug_assert_eq!(x.shape(), (*r, *c));
            m.set_block(r0, c0, x);
            c0 += c;
        }
        r0 += r;
    }
    m
}

/// A sequence of steps, each starting where the previous one ended.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionChain {
    pub steps: Vec<ReductionStep>,
}

impl ReductionChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: ReductionStep) {
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: ReductionChain) {
        self.steps.extend(other.steps);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn target(&self) -> Option<&FreeBox> {
        self.steps.last().map(|s| &s.target)
    }

    /// Pulls a representation of the final box back to the first one.
    pub fn pullback<R: Ring>(
        &self,
        ring: &R,
        n: &Representation<R::Elem>,
    ) -> Result<Representation<R::Elem>, ReductionError> {
        let mut m = n.clone();
        for s in self.steps.iter().rev() {
            m = s.pullback(ring, &m)?;
        }
        Ok(m)
    }

    /// Replays every step and checks that consecutive steps connect.
    pub fn replay(&self) -> Result<(), ReductionError> {
        for (k, s) in self.steps.iter().enumerate() {
            if s.replay()? != s.target {
                return Err(ReductionError::ReplayMismatch { step: k });
            }
            if k > 0 && self.steps[k - 1].target != s.source {
                return Err(ReductionError::ReplayMismatch { step: k });
            }
        }
        Ok(())
    }
}

pub(crate) fn check_valid(b: &FreeBox) -> Result<(), ReductionError> {
    let report = validate_box(b);
    if report.is_valid() {
        Ok(())
    } else {
        Err(ReductionError::InvalidResult(report.to_string()))
    }
}

/// Deletes a vertex together with its arrows.
pub fn delete_vertex(b: &FreeBox, v: &str) -> Result<(FreeBox, ReductionStep), ReductionError> {
    let out = b.delete_vertex(v)?;
    let step = ReductionStep {
        kind: StepKind::VertexDeletion { vertex: v.to_string() },
        source: b.clone(),
        target: out.clone(),
    };
    Ok((out, step))
}

/// A change of generators as a reduction step.
pub fn generator_change(
    b: &FreeBox,
    phi: &BTreeMap<String, crate::freecat::GradedElement>,
) -> Result<(FreeBox, ReductionStep), ReductionError> {
    let (out, change) = change_generators(b, phi)?;
    let step = ReductionStep {
        kind: StepKind::GeneratorChange { change },
        source: b.clone(),
        target: out.clone(),
    };
    Ok((out, step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxcore::{signed_renaming, CompareMode};
    use crate::dsl::parse_box;
    use crate::rep::hom_space;
    use crate::scalar::PrimeField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corpus(name: &str) -> FreeBox {
        let path = format!("{}/corpus/{name}.box", env!("CARGO_MANIFEST_DIR"));
        parse_box(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn random_rep(b: &FreeBox, dim: usize, p: u64, rng: &mut ChaCha8Rng) -> Representation<u64> {
        let dims: crate::boxcore::DimensionVector =
            b.vertices().into_iter().map(|v| (v, rng.gen_range(0..=dim))).collect();
        let matrices = b
            .solid_arrows()
            .map(|a| {
                let (r, c) = (dims[&a.target], dims[&a.source]);
                (a.id.clone(), Matrix::from_fn(r, c, |_, _| rng.gen_range(0..p)))
            })
            .collect();
        Representation { dims, matrices }
    }

    fn assert_hom_preserved(chain: &ReductionChain, seed: u64) {
        let f = PrimeField::new(3).unwrap();
        let (first, last) = (&chain.steps[0].source, chain.target().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let (n1, n2) = (random_rep(last, 2, 3, &mut rng), random_rep(last, 2, 3, &mut rng));
            let (m1, m2) = (chain.pullback(&f, &n1).unwrap(), chain.pullback(&f, &n2).unwrap());
            let below = hom_space(&f, last, &n1, &n2).unwrap().len();
            let above = hom_space(&f, first, &m1, &m2).unwrap().len();
            assert_eq!(below, above);
        }
    }

    #[test]
    fn pullback_preserves_hom_dimensions() {
        let r = self_reproduce(&corpus("box11"), "b").unwrap();
        assert_hom_preserved(&r.chain, 1);
        let (_, chain) = eliminate_pair(&corpus("pair"), "b").unwrap();
        assert_hom_preserved(&chain, 2);
        let r = self_reproduce(&corpus("chain_stage1"), "b3").unwrap();
        assert_hom_preserved(&r.chain, 3);
    }

    #[test]
    fn greedy_regularization_after_reduction() {
        let (b1, step) = reduce_minimal_edge(&corpus("box11"), "b").unwrap();
        let (out, rest) = regularize_all(&b1).unwrap();
        assert_eq!(rest.len(), 3);
        assert!(signed_renaming(&out, &corpus("box12_full"), CompareMode::Exact).is_some());
        let mut chain = ReductionChain::new();
        chain.push(step);
        chain.extend(rest);
        chain.replay().unwrap();
    }

    #[test]
    fn chain_log_round_trips() {
        let r = self_reproduce(&corpus("box11"), "b").unwrap();
        let json = serde_json::to_string(&r.chain).unwrap();
        let back: ReductionChain = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r.chain);
        back.replay().unwrap();
    }

    #[test]
    fn tampered_log_fails_replay() {
        let r = self_reproduce(&corpus("box11"), "b").unwrap();
        let mut chain = r.chain.clone();
        chain.steps[1].target = chain.steps[2].target.clone();
        assert!(matches!(chain.replay(), Err(ReductionError::ReplayMismatch { .. })));
    }

    #[test]
    fn vertex_deletion_pulls_back_to_zero() {
        let b = corpus("box11");
        let (out, step) = delete_vertex(&b, "2").unwrap();
        let f = PrimeField::new(5).unwrap();
        let n = Representation {
            dims: crate::boxcore::dims(&[("1", 2)]),
            matrices: BTreeMap::from([("a1".to_string(), Matrix::from_rows(2, 2, vec![1, 2, 3, 4]))]),
        };
        crate::rep::check_representation(&out, &n).unwrap();
        let m = step.pullback(&f, &n).unwrap();
        assert_eq!(m.dim("2"), 0);
        assert_eq!(m.matrix("b").shape(), (2, 0));
    }
}
