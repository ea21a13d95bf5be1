use std::collections::{BTreeMap, BTreeSet};

use crate::boxcore::FreeBox;
use crate::freecat::{substitute_matrix, ArrowRef, GradedElement, GradedMatrix};
use crate::scalar::q;

use super::{check_valid, ReductionError, ReductionStep, SplitBlock, StepKind};

fn fresh(used: &mut BTreeSet<String>, base: String) -> String {
    let mut name = base;
    while used.contains(&name) {
        name.push('\'');
    }
    used.insert(name.clone());
    name
}

/// Reduces a solid non-loop `b: s -> t` with `d(b) = 0`, using the normal
/// form `[[0, 0], [0, 1]]` of a matrix. A new vertex `n` splits `t` into
/// `t + n` and `s` into `s + n`, every other arrow is cut into blocks, and
/// two dotted arrows `eta: t -> n`, `xi: n -> s` are added.
pub fn reduce_minimal_edge(b: &FreeBox, edge: &str) -> Result<(FreeBox, ReductionStep), ReductionError> {
    let not = |reason: &str| ReductionError::NotMinimalEdge {
        arrow: edge.to_string(),
        reason: reason.to_string(),
    };
    let e = b.arrow(edge)?.clone();
    if !e.is_solid() {
        return Err(not("it is dotted"));
    }
    if e.is_loop() {
        return Err(not("it is a loop"));
    }
    if !b.differential(edge).is_zero() {
        return Err(not("its differential is not zero"));
    }
    let (s, t) = (e.source.clone(), e.target.clone());
    let n = (0..)
        .map(|k: usize| k.to_string())
        .find(|v| !b.has_vertex(v))
        .expect("some name is free");
    let split: BTreeMap<String, Vec<String>> = BTreeMap::from([
        (t.clone(), vec![t.clone(), n.clone()]),
        (s.clone(), vec![s.clone(), n.clone()]),
    ]);
    let summands = |v: &str| split.get(v).cloned().unwrap_or_else(|| vec![v.to_string()]);

    let mut used: BTreeSet<String> = b.arrow_ids().cloned().collect();
    let mut out = FreeBox::new(b.name());
    for v in b.vertices() {
        out.add_vertex(&v);
    }
    out.add_vertex(&n);

    // images f(x) as block matrices, with the new arrows they introduce
    let mut images: BTreeMap<String, GradedMatrix> = BTreeMap::new();
    let mut blocks: BTreeMap<String, SplitBlock> = BTreeMap::new();
    let mut fe = GradedMatrix::zero(&summands(&t), &summands(&s));
    fe.set(1, 1, GradedElement::identity(&n))?;
    images.insert(edge.to_string(), fe);
    for x in b.arrows().filter(|x| x.id != edge) {
        let (rows, cols) = (summands(&x.target), summands(&x.source));
        if rows.len() == 1 && cols.len() == 1 {
            out.add_arrow(x.clone())?;
            images.insert(x.id.clone(), GradedMatrix::scalar(GradedElement::arrow(x)));
            continue;
        }
        let mut m = GradedMatrix::zero(&rows, &cols);
        let mut names = Vec::new();
        for (k, r) in rows.iter().enumerate() {
            let mut row = Vec::new();
            for (l, c) in cols.iter().enumerate() {
                let base = match (rows.len(), cols.len()) {
                    (2, 2) => format!("{}_{r}{c}", x.id),
                    (2, _) => format!("{}_{r}", x.id),
                    _ => format!("{}_{c}", x.id),
                };
                let id = fresh(&mut used, base);
                let a = ArrowRef::new(&id, c, r, x.kind);
                out.add_arrow(a.clone())?;
                m.set(k, l, GradedElement::arrow(&a))?;
                row.push(id);
            }
            names.push(row);
        }
        images.insert(x.id.clone(), m);
        blocks.insert(
            x.id.clone(),
            SplitBlock {
                rows,
                cols,
                arrows: names,
            },
        );
    }
    let eta = fresh(&mut used, format!("eta_{n}"));
    let xi = fresh(&mut used, format!("xi_{n}"));
    let eta_a = out.add_dotted(&eta, &t, &n)?;
    let xi_a = out.add_dotted(&xi, &n, &s)?;

    // the correction terms: d~ f(x) = f(dx) - W_j f(x) + (-1)^|x| f(x) W_i
    let omega = |v: &str| -> Result<GradedMatrix, ReductionError> {
        let labels = summands(v);
        let mut w = GradedMatrix::zero(&labels, &labels);
        if v == t {
            w.set(1, 0, GradedElement::arrow(&eta_a))?;
        } else if v == s {
            w.set(0, 1, GradedElement::arrow(&xi_a))?;
        }
        Ok(w)
    };
    for x in b.arrows().filter(|x| x.id != edge) {
        let fx = &images[&x.id];
        let mut dx = substitute_matrix(&b.differential(&x.id), &images, &split)?;
        dx = dx.add(&omega(&x.target)?.mul(fx)?.scale(&q(-1)))?;
        let sign = if x.kind.degree() == 0 { q(1) } else { q(-1) };
        dx = dx.add(&fx.mul(&omega(&x.source)?)?.scale(&sign))?;
        match blocks.get(&x.id) {
            None => out.set_differential(&x.id, dx.get(0, 0).clone())?,
            Some(blk) => {
                for (k, row) in blk.arrows.iter().enumerate() {
                    for (l, id) in row.iter().enumerate() {
                        out.set_differential(id, dx.get(k, l).clone())?;
                    }
                }
            }
        }
    }
    check_valid(&out)?;
    let step = ReductionStep {
        kind: StepKind::MinimalEdge {
            edge: edge.to_string(),
            source: s,
            target: t,
            new_vertex: n,
            eta,
            xi,
            blocks,
        },
        source: b.clone(),
        target: out.clone(),
    };
    Ok((out, step))
}
