use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::boxcore::{change_generators, FreeBox};
use crate::freecat::ArrowKind;

use super::{check_valid, ReductionChain, ReductionError, ReductionStep, StepKind};

/// Dotted arrows `v` with `d(a) = lambda v + sigma`, `lambda != 0` and `v`
/// absent from `sigma`.
pub fn superfluous_candidates(b: &FreeBox, a: &str) -> Vec<String> {
    let d = b.differential(a);
    let mut out = Vec::new();
    for (p, c) in d.terms() {
        if p.len() != 1 || p.arrows()[0].kind != ArrowKind::Dotted || c.is_zero() {
            continue;
        }
        let v = &p.arrows()[0].id;
        let elsewhere = d.terms().any(|(q, _)| q.len() > 1 && q.contains(v));
        if !elsewhere {
            out.push(v.clone());
        }
    }
    out
}

/// Removes the superfluous pair `(a, v)`: after the change of generators
/// `v := d(a)` the differential of `a` is `v`, and both generators drop out.
pub fn regularize(
    b: &FreeBox,
    arrow: &str,
    dotted: Option<&str>,
) -> Result<(FreeBox, ReductionStep), ReductionError> {
    let not = |reason: &str| ReductionError::NotSuperfluous {
        arrow: arrow.to_string(),
        reason: reason.to_string(),
    };
    let a = b.arrow(arrow)?;
    if !a.is_solid() {
        return Err(not("only solid arrows are regularized"));
    }
    let d = b.differential(arrow);
    if d.is_zero() {
        return Err(not("its differential is zero"));
    }
    let candidates = superfluous_candidates(b, arrow);
    let v = match dotted {
        Some(v) if candidates.iter().any(|c| c == v) => v.to_string(),
        Some(v) => return Err(not(&format!("{v} is not a linear term of its differential"))),
        None => candidates
            .first()
            .cloned()
            .ok_or_else(|| not("its differential has no linear dotted term"))?,
    };
    let phi = BTreeMap::from([(v.clone(), d)]);
    let (changed, change) = change_generators(b, &phi)?;
    debug_assert_eq!(changed.differential(arrow).num_terms(), 1);
    let mut out = changed;
    out.remove_arrows(&BTreeSet::from([arrow.to_string(), v.clone()]));
    check_valid(&out)?;
    let step = ReductionStep {
        kind: StepKind::Regularization {
            arrow: arrow.to_string(),
            dotted: v,
            change,
        },
        source: b.clone(),
        target: out.clone(),
    };
    Ok((out, step))
}

/// Regularizes superfluous solid arrows, smallest id first, until none is left.
pub fn regularize_all(b: &FreeBox) -> Result<(FreeBox, ReductionChain), ReductionError> {
    let mut cur = b.clone();
    let mut chain = ReductionChain::new();
    loop {
        let next = cur
            .solid_arrows()
            .map(|a| a.id.clone())
            .find(|id| !superfluous_candidates(&cur, id).is_empty());
        let Some(a) = next else { break };
        let (out, step) = regularize(&cur, &a, None)?;
        chain.push(step);
        cur = out;
    }
    Ok((cur, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_box;

    #[test]
    fn pair_box_loses_both_arrows() {
        let b = parse_box(
            "box p { vertices 1, 2; solid a: 1 -> 2; dotted u: 1 ..> 2; solid c: 2 -> 2; \
             dotted w: 2 ..> 2; d(a) = u; d(c) = w; }",
        )
        .unwrap();
        let (out, chain) = regularize_all(&b).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(out.num_arrows(), 0);
    }

    #[test]
    fn zero_differential_is_rejected() {
        let b = parse_box("box p { vertices 1; solid a: 1 -> 1; }").unwrap();
        assert!(matches!(
            regularize(&b, "a", None),
            Err(ReductionError::NotSuperfluous { .. })
        ));
    }

    #[test]
    fn nonlinear_occurrence_is_rejected() {
        let b = parse_box(
            "box p { vertices 1; solid a: 1 -> 1; solid c: 1 -> 1; dotted u: 1 ..> 1; \
             d(a) = u + c*u; }",
        )
        .unwrap();
        // u also occurs inside c*u, so it cannot be solved for
        assert!(superfluous_candidates(&b, "a").is_empty());
    }
}
