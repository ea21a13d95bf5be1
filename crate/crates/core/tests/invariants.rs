//! Property tests: closure under transformations, Hom residuals, associativity
//! of composition and the text/JSON round trips.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use brickbox::boxcore::{validate_box, FreeBox};
use brickbox::dsl::{parse_box, print_box};
use brickbox::freecat::GradedElement;
use brickbox::json::RepresentationRecord;
use brickbox::matrix::{zeros, Matrix};
use brickbox::reduction::{
    generator_change, reduce_minimal_edge, regularize, superfluous_candidates, ReductionChain, ReductionStep,
};
use brickbox::rep::{compose_morphisms, hom_space, is_morphism, MorphismData, Representation};
use brickbox::scalar::{q, FieldSpec, PrimeField};

const BOXES: [&str; 7] = ["box11", "box12_full", "box12_nov", "chain_stage1", "chain_stage2", "kt", "pair"];

fn corpus(name: &str) -> FreeBox {
    let path = format!("{}/corpus/{name}.box", env!("CARGO_MANIFEST_DIR"));
    parse_box(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// One random applicable transformation, if any.
fn random_step(b: &FreeBox, rng: &mut ChaCha8Rng) -> Option<(FreeBox, ReductionStep)> {
    let mut options: Vec<u8> = vec![0];
    let edges: Vec<String> = b
        .solid_arrows()
        .filter(|a| !a.is_loop() && b.differential(&a.id).is_zero())
        .map(|a| a.id.clone())
        .collect();
    let superfluous: Vec<String> = b
        .solid_arrows()
        .filter(|a| !superfluous_candidates(b, &a.id).is_empty())
        .map(|a| a.id.clone())
        .collect();
    // minimal edges make boxes grow fast, keep them small
    if !edges.is_empty() && b.num_arrows() < 30 {
        options.push(1);
    }
    if !superfluous.is_empty() {
        options.push(2);
    }
    match options[rng.gen_range(0..options.len())] {
        0 => {
            let arrows: Vec<_> = b.arrows().cloned().collect();
            let x = &arrows[rng.gen_range(0..arrows.len())];
            let scale = [q(1), q(-1), q(2), q(-1) / q(3)][rng.gen_range(0..4)].clone();
            let mut image = GradedElement::arrow(x).scale(&scale);
            let parallel: Vec<_> = b
                .arrows()
                .filter(|y| y.id != x.id && y.kind == x.kind && y.source == x.source && y.target == x.target)
                .collect();
            if !parallel.is_empty() && rng.gen_bool(0.5) {
                let y = parallel[rng.gen_range(0..parallel.len())];
                image = image.add(&GradedElement::arrow(y)).unwrap();
            }
            Some(generator_change(b, &BTreeMap::from([(x.id.clone(), image)])).unwrap())
        }
        1 => Some(reduce_minimal_edge(b, &edges[rng.gen_range(0..edges.len())]).unwrap()),
        _ => Some(regularize(b, &superfluous[rng.gen_range(0..superfluous.len())], None).unwrap()),
    }
}

fn random_rep(b: &FreeBox, max_dim: usize, p: u64, sparsity: f64, rng: &mut ChaCha8Rng) -> Representation<u64> {
    let dims: BTreeMap<String, usize> = b.vertices().into_iter().map(|v| (v, rng.gen_range(0..=max_dim))).collect();
    let matrices = b
        .solid_arrows()
        .map(|a| {
            let (r, c) = (dims[&a.target], dims[&a.source]);
            let m = Matrix::from_fn(r, c, |_, _| if rng.gen_bool(sparsity) { 0 } else { rng.gen_range(0..p) });
            (a.id.clone(), m)
        })
        .collect();
    Representation { dims, matrices }
}

fn random_morphism(
    f: &PrimeField,
    b: &FreeBox,
    m: &Representation<u64>,
    n: &Representation<u64>,
    rng: &mut ChaCha8Rng,
) -> MorphismData<u64> {
    let basis = hom_space(f, b, m, n).unwrap();
    if basis.is_empty() {
        return MorphismData {
            vertex: b.vertices().into_iter().map(|v| (v.clone(), zeros(f, n.dim(&v), m.dim(&v)))).collect(),
            dotted: b
                .dotted_arrows()
                .map(|u| (u.id.clone(), zeros(f, n.dim(&u.target), m.dim(&u.source))))
                .collect(),
        };
    }
    let terms: Vec<(u64, &MorphismData<u64>)> =
        basis.iter().map(|s| (rng.gen_range(0..f.modulus()), s)).collect();
    MorphismData::combine(f, &terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transformations_keep_boxes_closed(seed in any::<u64>(), which in 0..BOXES.len(), len in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = corpus(BOXES[which]);
        let mut chain = ReductionChain::new();
        for _ in 0..len {
            let Some((next, step)) = random_step(&b, &mut rng) else { break };
            let report = validate_box(&next);
            prop_assert!(report.is_valid(), "{report}");
            chain.push(step);
            b = next;
            prop_assert_eq!(parse_box(&print_box(&b)).unwrap(), b.clone());
            let json = serde_json::to_string(&b).unwrap();
            prop_assert_eq!(serde_json::from_str::<FreeBox>(&json).unwrap(), b.clone());
        }
        chain.replay().unwrap();
        let log = serde_json::to_string(&chain).unwrap();
        prop_assert_eq!(serde_json::from_str::<ReductionChain>(&log).unwrap(), chain);
    }

    #[test]
    fn hom_basis_has_zero_residuals(seed in any::<u64>(), which in 0..BOXES.len(), p in prop::sample::select(vec![2u64, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(p).unwrap();
        let b = corpus(BOXES[which]);
        let m = random_rep(&b, 2, p, 0.5, &mut rng);
        let n = random_rep(&b, 2, p, 0.5, &mut rng);
        for s in hom_space(&f, &b, &m, &n).unwrap() {
            prop_assert!(is_morphism(&f, &b, &m, &n, &s).unwrap());
        }
        let s = random_morphism(&f, &b, &m, &n, &mut rng);
        prop_assert!(is_morphism(&f, &b, &m, &n, &s).unwrap());
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>(), which in 0..BOXES.len(), p in prop::sample::select(vec![2u64, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(p).unwrap();
        let b = corpus(BOXES[which]);
        let reps: Vec<_> = (0..4).map(|_| random_rep(&b, 2, p, 0.7, &mut rng)).collect();
        let s1 = random_morphism(&f, &b, &reps[0], &reps[1], &mut rng);
        let s2 = random_morphism(&f, &b, &reps[1], &reps[2], &mut rng);
        let s3 = random_morphism(&f, &b, &reps[2], &reps[3], &mut rng);
        let s21 = compose_morphisms(&f, &b, (&reps[0], &reps[1], &reps[2]), &s1, &s2).unwrap();
        let s32 = compose_morphisms(&f, &b, (&reps[1], &reps[2], &reps[3]), &s2, &s3).unwrap();
        prop_assert!(is_morphism(&f, &b, &reps[0], &reps[2], &s21).unwrap());
        let left = compose_morphisms(&f, &b, (&reps[0], &reps[2], &reps[3]), &s21, &s3).unwrap();
        let right = compose_morphisms(&f, &b, (&reps[0], &reps[1], &reps[3]), &s1, &s32).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn representation_json_round_trip(seed in any::<u64>(), which in 0..BOXES.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(5).unwrap();
        let b = corpus(BOXES[which]);
        let m = random_rep(&b, 3, 5, 0.3, &mut rng);
        let rec = RepresentationRecord::from_rep(&f, FieldSpec::Prime(5), &m);
        let back: RepresentationRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        prop_assert_eq!(back.to_rep(&f, &b).unwrap(), m);
    }
}

#[test]
fn canonical_text_is_a_fixed_point() {
    for name in BOXES {
        let text = print_box(&corpus(name));
        assert_eq!(print_box(&parse_box(&text).unwrap()), text);
    }
}
