use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boxcore::{find_triangulation, norm, DimensionVector, FreeBox, TriangulationMode};
use crate::matrix::{is_invertible, solve, Matrix};
use crate::scalar::{Field, PrimeField};

use super::hom::{compose_morphisms, hom_space};
use super::representation::{identity_morphism, MorphismData, RepError, Representation};

#[derive(Debug, Clone, Copy)]
pub struct IsoOptions {
    /// Exhaustive search when `|k|^dim Hom` stays below this.
    pub enumerate_limit: u64,
    /// Random combinations tried otherwise.
    pub samples: usize,
    pub seed: u64,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            enumerate_limit: 1 << 20,
            samples: 8,
            seed: 0x5eed,
        }
    }
}

/// `dim End(M) = 1`.
pub fn is_brick<F: Field>(field: &F, b: &FreeBox, m: &Representation<F::Elem>) -> Result<bool, RepError> {
    Ok(hom_space(field, b, m, m)?.len() == 1)
}

/// Candidate combinations of a basis: all of them for small finite fields,
/// otherwise seeded random ones.
fn combinations<F: Field>(field: &F, k: usize, opts: &IsoOptions) -> Vec<Vec<F::Elem>> {
    if let (Some(elems), Some(p)) = (field.elements(), field.order()) {
        if let Some(total) = p.checked_pow(k as u32).filter(|t| *t <= opts.enumerate_limit) {
            let mut out = Vec::with_capacity(total as usize);
            for mut idx in 0..total {
                let mut c = Vec::with_capacity(k);
                for _ in 0..k {
                    c.push(elems[(idx % p) as usize].clone());
                    idx /= p;
                }
                out.push(c);
            }
            return out;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.samples).map(|_| (0..k).map(|_| field.random(&mut rng)).collect()).collect()
}

fn combine<F: Field>(field: &F, basis: &[MorphismData<F::Elem>], c: &[F::Elem]) -> MorphismData<F::Elem> {
    let terms: Vec<(F::Elem, &MorphismData<F::Elem>)> = c.iter().cloned().zip(basis.iter()).collect();
    MorphismData::combine(field, &terms)
}

/// Whether `M` and `N` are isomorphic. With a full triangulation a morphism
/// is invertible iff all `S_i` are; otherwise an explicit inverse is solved for.
/// Over infinite fields (or huge Hom spaces) a negative answer is probabilistic.
pub fn are_isomorphic<F: Field>(
    field: &F,
    b: &FreeBox,
    m: &Representation<F::Elem>,
    n: &Representation<F::Elem>,
    opts: &IsoOptions,
) -> Result<bool, RepError> {
    if b.vertices().iter().any(|v| m.dim(v) != n.dim(v)) {
        return Ok(false);
    }
    let forward = hom_space(field, b, m, n)?;
    if m.total_dim() == 0 {
        return Ok(true);
    }
    if forward.is_empty() {
        return Ok(false);
    }
    let roiter = find_triangulation(b, TriangulationMode::Full).is_ok();
    let backward = if roiter { Vec::new() } else { hom_space(field, b, n, m)? };
    for c in combinations(field, forward.len(), opts) {
        let s = combine(field, &forward, &c);
        if !s.vertex.values().all(|x| is_invertible(field, x)) {
            continue;
        }
        if roiter || has_inverse(field, b, (m, n), &s, &backward)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Solves `T S = 1_M`, `S T = 1_N` for `T` in the span of `backward`.
fn has_inverse<F: Field>(
    field: &F,
    b: &FreeBox,
    reps: (&Representation<F::Elem>, &Representation<F::Elem>),
    s: &MorphismData<F::Elem>,
    backward: &[MorphismData<F::Elem>],
) -> Result<bool, RepError> {
    let (m, n) = reps;
    if backward.is_empty() {
        return Ok(false);
    }
    let flatten = |x: &MorphismData<F::Elem>| -> Vec<F::Elem> {
        x.vertex.values().chain(x.dotted.values()).flat_map(|a| a.data().to_vec()).collect()
    };
    let (id_m, id_n) = (identity_morphism(field, b, m), identity_morphism(field, b, n));
    let mut columns = Vec::new();
    for t in backward {
        let mut col = flatten(&compose_morphisms(field, b, (m, n, m), s, t)?);
        col.extend(flatten(&compose_morphisms(field, b, (n, m, n), t, s)?));
        columns.push(col);
    }
    let mut rhs = flatten(&id_m);
    rhs.extend(flatten(&id_n));
    let a = Matrix::from_fn(rhs.len(), columns.len(), |r, c| columns[c][r].clone());
    Ok(solve(field, &a, &rhs).is_some())
}

/// All bricks of dimension vector `d` over `F_p` up to isomorphism, each
/// represented by its lexicographically least matrix tuple.
pub fn enumerate_bricks(
    field: &PrimeField,
    b: &FreeBox,
    d: &DimensionVector,
    budget: u64,
) -> Result<Vec<Representation<u64>>, RepError> {
    let n = norm(b, d);
    let p = field.modulus();
    let total = p.checked_pow(n as u32).filter(|t| *t <= budget).ok_or_else(|| {
        RepError::BudgetExceeded {
            needed: format!("{p}^{n}"),
            budget,
        }
    })?;
    let dims: DimensionVector = b
        .vertices()
        .into_iter()
        .map(|v| {
            let k = d.get(&v).copied().unwrap_or(0);
            (v, k)
        })
        .collect();
    let shapes: Vec<(String, usize, usize)> = b
        .solid_arrows()
        .map(|a| (a.id.clone(), dims[&a.target], dims[&a.source]))
        .collect();
    let opts = IsoOptions::default();
    let mut found: Vec<Representation<u64>> = Vec::new();
    let mut digits = vec![0u64; n];
    for idx in 0..total {
        // most significant digit first, so the order is lexicographic
        let mut x = idx;
        for k in (0..n).rev() {
            digits[k] = x % p;
            x /= p;
        }
        let mut pos = 0;
        let matrices = shapes
            .iter()
            .map(|(id, r, c)| {
                let m = Matrix::from_fn(*r, *c, |i, j| digits[pos + i * c + j]);
                pos += r * c;
                (id.clone(), m)
            })
            .collect();
        let rep = Representation { dims: dims.clone(), matrices };
        if !is_brick(field, b, &rep)? {
            continue;
        }
        let mut new = true;
        for other in &found {
            if are_isomorphic(field, b, other, &rep, &opts)? {
                new = false;
                break;
            }
        }
        if new {
            found.push(rep);
        }
    }
    Ok(found)
}
