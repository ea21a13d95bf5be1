//! Reductions that keep the BT shape: eliminating a pair of solid arrows
//! and reproducing the box after reducing a minimal edge.

use std::collections::BTreeMap;

use num_traits::One;

use crate::boxcore::{find_triangulation, recognize_bt, scaled_arrow, BTStructure, FreeBox, TriangulationMode};
use crate::freecat::GradedElement;
use crate::scalar::Coeff;

use super::{generator_change, reduce_minimal_edge, regularize, ReductionChain, ReductionError, ReductionStep, StepKind};

fn bt(b: &FreeBox) -> Result<BTStructure, ReductionError> {
    recognize_bt(b).map_err(|f| ReductionError::NotBT(f.to_string()))
}

/// For `d(b) = sum lambda_k x_k~`, changes generators so that `d(b) = c~`
/// for `c = x_1`, the lowest of the `x_k`. Returns the new box, the step and `c`.
pub fn normalize_partner(b: &FreeBox, arrow: &str) -> Result<(FreeBox, ReductionStep, String), ReductionError> {
    let s = bt(b)?;
    let d = b.differential(arrow);
    if d.is_zero() {
        return Err(ReductionError::Precondition(format!("d({arrow}) is zero")));
    }
    let heights = find_triangulation(b, TriangulationMode::SolidOnly)
        .map_err(|w| ReductionError::NotBT(format!("cycle {}", w.cycle.join(" -> "))))?;
    let mut summands: Vec<(usize, String, Coeff)> = Vec::new();
    for (p, c) in d.terms() {
        let solid = (p.len() == 1)
            .then(|| s.solid_for(&p.arrows()[0].id))
            .flatten()
            .ok_or_else(|| {
                ReductionError::Precondition(format!("d({arrow}) is not a combination of partners"))
            })?;
        let h = heights.height(solid).unwrap_or(0);
        summands.push((h, solid.to_string(), c.clone()));
    }
    summands.sort();
    let (_, c, lambda1) = summands[0].clone();
    let phi = if summands.len() == 1 && lambda1.is_one() {
        BTreeMap::new()
    } else {
        let mut phi = BTreeMap::new();
        phi.insert(c.clone(), scaled_arrow(b, &c, Coeff::one() / &lambda1)?);
        for (_, x, lambda) in &summands[1..] {
            let image = GradedElement::arrow(b.arrow(x)?).sub(&scaled_arrow(b, &c, lambda / &lambda1)?)?;
            phi.insert(x.clone(), image);
        }
        let partner = s.partner_of(&c).expect("paired");
        phi.insert(partner.to_string(), d.clone());
        phi
    };
    let (out, step) = generator_change(b, &phi)?;
    Ok((out, step, c))
}

/// Removes `b` (with `d(b) != 0`) together with the solid arrow its
/// differential points at, and both partners.
pub fn eliminate_pair(b: &FreeBox, arrow: &str) -> Result<(FreeBox, ReductionChain), ReductionError> {
    let s = bt(b)?;
    let b_partner = s
        .partner_of(arrow)
        .ok_or_else(|| ReductionError::Precondition(format!("{arrow} has no partner")))?
        .to_string();
    let mut chain = ReductionChain::new();
    let (b1, step, c) = normalize_partner(b, arrow)?;
    chain.push(step);
    let c_partner = s.partner_of(&c).expect("paired").to_string();
    let (b2, step) = regularize(&b1, arrow, Some(&c_partner))?;
    chain.push(step);
    let (b3, step) = regularize(&b2, &c, Some(&b_partner))?;
    chain.push(step);
    Ok((b3, chain))
}

/// Outcome of reproducing a BT-box after reducing a minimal edge `s -> t`.
#[derive(Debug, Clone)]
pub struct SelfReproduction {
    pub result: FreeBox,
    pub chain: ReductionChain,
    pub source: String,
    pub target: String,
    pub new_vertex: String,
}

/// Reduces the minimal edge and regularizes the three superfluous blocks of
/// the loops at its endpoints; the result is again a BT-box.
pub fn self_reproduce(b: &FreeBox, edge: &str) -> Result<SelfReproduction, ReductionError> {
    let s = bt(b)?;
    if s.is_distinguished(edge) {
        return Err(ReductionError::Precondition(format!("{edge} is a distinguished loop")));
    }
    let partner = s.partner_of(edge).expect("every other solid arrow is paired").to_string();
    let (b1, step) = reduce_minimal_edge(b, edge)?;
    let StepKind::MinimalEdge { source, target, new_vertex, blocks, .. } = &step.kind else {
        unreachable!("minimal edge step")
    };
    let (src, tgt, n) = (source.clone(), target.clone(), new_vertex.clone());
    let block = |x: &str, k: usize, l: usize| blocks[x].arrows[k][l].clone();
    let (at, as_) = (&s.distinguished[&tgt], &s.distinguished[&src]);
    // blocks are indexed by [t, n] x [t, n] for a_t, [s, n] x [s, n] for
    // a_s and [s, n] x [t, n] for the partner
    let plan = [
        (block(at, 1, 0), block(&partner, 1, 0)),
        (block(at, 1, 1), block(&partner, 1, 1)),
        (block(as_, 0, 1), block(&partner, 0, 1)),
    ];
    let mut chain = ReductionChain::new();
    chain.push(step.clone());
    let mut cur = b1;
    for (x, v) in &plan {
        let (next, st) = regularize(&cur, x, Some(v))?;
        chain.push(st);
        cur = next;
    }
    bt(&cur)?;
    Ok(SelfReproduction {
        result: cur,
        chain,
        source: src,
        target: tgt,
        new_vertex: n,
    })
}
