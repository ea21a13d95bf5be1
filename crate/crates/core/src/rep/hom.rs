use std::collections::BTreeMap;

use crate::boxcore::FreeBox;
use crate::freecat::{ArrowRef, Path};
use crate::matrix::{identity, mat_add, mat_mul, mat_scale, mat_sub, nullspace, zeros, Matrix};
use crate::scalar::{Coeff, Field};

use super::representation::{check_representation, path_matrix, MorphismData, RepError, Representation};

/// The sign in front of the coproduct term when composing morphisms.
const COMPOSITION_SIGN: i64 = -1;

fn degree_one_terms(p: &Path) -> Option<(Path, &ArrowRef, Path)> {
    match p.dotted_positions().as_slice() {
        [k] => Some(p.split_at_arrow(*k)),
        _ => None,
    }
}

type DottedTerm = (Coeff, Path, ArrowRef, Path);

/// Unknown blocks: `S_i` is `d^N_i x d^M_i`, `S(u)` for `u: i -> j` is `d^N_j x d^M_i`.
struct Layout {
    vertex: BTreeMap<String, (usize, usize, usize)>,
    dotted: BTreeMap<String, (usize, usize, usize)>,
    total: usize,
}

impl Layout {
    fn new<E: Clone>(b: &FreeBox, m: &Representation<E>, n: &Representation<E>) -> Self {
        let mut off = 0;
        let mut vertex = BTreeMap::new();
        for v in b.vertices() {
            let (r, c) = (n.dim(&v), m.dim(&v));
            vertex.insert(v, (off, r, c));
            off += r * c;
        }
        let mut dotted = BTreeMap::new();
        for u in b.dotted_arrows() {
            let (r, c) = (n.dim(&u.target), m.dim(&u.source));
            dotted.insert(u.id.clone(), (off, r, c));
            off += r * c;
        }
        Layout { vertex, dotted, total: off }
    }

    fn read<E: Clone>(&self, x: &[E]) -> MorphismData<E> {
        let block = |&(off, r, c): &(usize, usize, usize)| {
            Matrix::from_fn(r, c, |i, j| x[off + i * c + j].clone())
        };
        MorphismData {
            vertex: self.vertex.iter().map(|(k, b)| (k.clone(), block(b))).collect(),
            dotted: self.dotted.iter().map(|(k, b)| (k.clone(), block(b))).collect(),
        }
    }
}

/// Adds `coeff * A X B` to the equation rows starting at `eq`, where `X` is
/// the unknown block at `(off, xr, xc)` and the equations fill a matrix with
/// `cols` columns.
#[allow(clippy::too_many_arguments)]
fn add_term<F: Field>(
    field: &F,
    system: &mut Matrix<F::Elem>,
    eq: usize,
    cols: usize,
    coeff: &F::Elem,
    a: &Matrix<F::Elem>,
    block: (usize, usize, usize),
    bm: &Matrix<F::Elem>,
) {
    let (off, xr, xc) = block;
    for r in 0..a.rows() {
        for x in 0..xr {
            let ax = field.mul(coeff, a.get(r, x));
            if field.is_zero(&ax) {
                continue;
            }
            for y in 0..xc {
                for c in 0..cols {
                    let v = field.mul(&ax, bm.get(y, c));
                    if field.is_zero(&v) {
                        continue;
                    }
                    let (row, col) = (eq + r * cols + c, off + x * xc + y);
                    let cur = field.add(system.get(row, col), &v);
                    system.set(row, col, cur);
                }
            }
        }
    }
}

fn dotted_terms(b: &FreeBox, a: &ArrowRef) -> Result<Vec<DottedTerm>, RepError> {
    let d = b.differential(&a.id);
    let mut out = Vec::new();
    for (p, c) in d.terms() {
        let (left, u, right) = degree_one_terms(p)
            .ok_or_else(|| RepError::Shape(format!("term {p} of d({}) is not of degree one", a.id)))?;
        out.push((c.clone(), left, u.clone(), right));
    }
    Ok(out)
}

/// A basis of `Hom(M, N)`: all `(S_i, S(u))` with
/// `S_j M(a) - N(a) S_i = sum lambda N(p') S(u) M(p)` for every solid `a`.
pub fn hom_space<F: Field>(
    field: &F,
    b: &FreeBox,
    m: &Representation<F::Elem>,
    n: &Representation<F::Elem>,
) -> Result<Vec<MorphismData<F::Elem>>, RepError> {
    check_representation(b, m)?;
    check_representation(b, n)?;
    let layout = Layout::new(b, m, n);
    let solids: Vec<ArrowRef> = b.solid_arrows().cloned().collect();
    let neq: usize = solids.iter().map(|a| n.dim(&a.target) * m.dim(&a.source)).sum();
    let mut system = zeros(field, neq, layout.total);
    let one = field.one();
    let minus_one = field.neg(&one);
    let mut eq = 0;
    for a in &solids {
        let (i, j) = (&a.source, &a.target);
        let cols = m.dim(i);
        let in_j = identity(field, n.dim(j));
        let in_i = identity(field, m.dim(i));
        add_term(field, &mut system, eq, cols, &one, &in_j, layout.vertex[j], m.matrix(&a.id));
        add_term(field, &mut system, eq, cols, &minus_one, n.matrix(&a.id), layout.vertex[i], &in_i);
        for (c, left, u, right) in dotted_terms(b, a)? {
            let c = field.neg(&field.from_rational(&c)?);
            let nl = path_matrix(field, n, &left, &u.target);
            let mr = path_matrix(field, m, &right, i);
            add_term(field, &mut system, eq, cols, &c, &nl, layout.dotted[&u.id], &mr);
        }
        eq += n.dim(j) * cols;
    }
    Ok(nullspace(field, &system).iter().map(|x| layout.read(x)).collect())
}

/// Checks the morphism equations directly.
pub fn is_morphism<F: Field>(
    field: &F,
    b: &FreeBox,
    m: &Representation<F::Elem>,
    n: &Representation<F::Elem>,
    s: &MorphismData<F::Elem>,
) -> Result<bool, RepError> {
    for a in b.solid_arrows() {
        let (i, j) = (&a.source, &a.target);
        let mut lhs = mat_sub(
            field,
            &mat_mul(field, &s.vertex[j], m.matrix(&a.id)),
            &mat_mul(field, n.matrix(&a.id), &s.vertex[i]),
        );
        for (c, left, u, right) in dotted_terms(b, a)? {
            let c = field.from_rational(&c)?;
            let t = mat_mul(
                field,
                &mat_mul(field, &path_matrix(field, n, &left, &u.target), &s.dotted[&u.id]),
                &path_matrix(field, m, &right, i),
            );
            lhs = mat_sub(field, &lhs, &mat_scale(field, &c, &t));
        }
        if lhs.data().iter().any(|x| !field.is_zero(x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `S' . S` for `S: M -> N` and `S': N -> L`.
pub fn compose_morphisms<F: Field>(
    field: &F,
    b: &FreeBox,
    reps: (&Representation<F::Elem>, &Representation<F::Elem>, &Representation<F::Elem>),
    s: &MorphismData<F::Elem>,
    s2: &MorphismData<F::Elem>,
) -> Result<MorphismData<F::Elem>, RepError> {
    let (m, n, l) = reps;
    let vertex = s
        .vertex
        .iter()
        .map(|(v, si)| (v.clone(), mat_mul(field, &s2.vertex[v], si)))
        .collect();
    let eps = field.from_i64(COMPOSITION_SIGN);
    let mut dotted = BTreeMap::new();
    for v in b.dotted_arrows() {
        let (i, j) = (&v.source, &v.target);
        let mut t = mat_add(
            field,
            &mat_mul(field, &s2.vertex[j], &s.dotted[&v.id]),
            &mat_mul(field, &s2.dotted[&v.id], &s.vertex[i]),
        );
        for (p, c) in b.differential(&v.id).terms() {
            let pos = p.dotted_positions();
            let [k1, k2] = pos.as_slice() else {
                return Err(RepError::Shape(format!("term {p} of d({}) is not of degree two", v.id)));
            };
            let arrows = p.arrows();
            let p1 = Path::from_arrows(arrows[..*k1].to_vec()).expect("subpath");
            let p2 = Path::from_arrows(arrows[k1 + 1..*k2].to_vec()).expect("subpath");
            let p3 = Path::from_arrows(arrows[k2 + 1..].to_vec()).expect("subpath");
            let (u2, u1) = (&arrows[*k1], &arrows[*k2]);
            let factor = mat_mul(
                field,
                &mat_mul(
                    field,
                    &mat_mul(field, &path_matrix(field, l, &p1, &u2.target), &s2.dotted[&u2.id]),
                    &mat_mul(field, &path_matrix(field, n, &p2, &u1.target), &s.dotted[&u1.id]),
                ),
                &path_matrix(field, m, &p3, i),
            );
            let c = field.mul(&eps, &field.from_rational(c)?);
            t = mat_add(field, &t, &mat_scale(field, &c, &factor));
        }
        dotted.insert(v.id.clone(), t);
    }
    Ok(MorphismData { vertex, dotted })
}
