use adjacency_core::classify::{classify, Verdict};
use adjacency_core::lemma_lab::{enumerate_preservers, EnumerationTask};
use adjacency_core::maps::{check_preserver, tabulate, StandardMapSpec, TabulatedMap};
use adjacency_core::matrix::{distance, MatrixSpace};
use adjacency_core::{Elem, Field, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just((2, 1)),
        Just((3, 1)),
        Just((5, 1)),
        Just((2, 2)),
        Just((2, 3)),
        Just((3, 2))
    ]
    .prop_map(|(p, k)| Field::with_order(p, k).unwrap())
}

/// A field, a shape and `count` matrices of that shape.
fn matrices(count: usize) -> impl Strategy<Value = (Field, Vec<Matrix>)> {
    (field_strategy(), 1usize..=4, 1usize..=4).prop_flat_map(move |(f, m, n)| {
        let q = f.order();
        prop::collection::vec(prop::collection::vec(0..q, m * n), count).prop_map(move |all| {
            let mats = all
                .into_iter()
                .map(|e| Matrix::new(&f, m, n, e.into_iter().map(Elem).collect()).unwrap())
                .collect();
            (f.clone(), mats)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_distance_is_a_metric((_f, v) in matrices(3)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let ab = distance(a, b).unwrap();
        prop_assert_eq!(ab == 0, a == b);
        prop_assert_eq!(ab, distance(b, a).unwrap());
        prop_assert!(distance(a, c).unwrap() <= ab + distance(b, c).unwrap());
    }

    #[test]
    fn normal_form_reduces_to_block_identity((f, v) in matrices(1)) {
        let a = &v[0];
        let (t, s, r) = a.rank_normal_form();
        prop_assert!(t.is_invertible() && s.is_invertible());
        let (m, n) = a.shape();
        prop_assert_eq!(t.mul(a).unwrap().mul(&s).unwrap(), Matrix::block_identity(&f, m, n, r));
        prop_assert_eq!(r, a.rank());
    }

    #[test]
    fn rank_survives_transpose_and_automorphisms((f, v) in matrices(1)) {
        let a = &v[0];
        prop_assert_eq!(a.transpose().rank(), a.rank());
        for aut in f.automorphisms() {
            prop_assert_eq!(a.apply_entrywise(aut).rank(), a.rank());
        }
    }

    #[test]
    fn kernel_and_image_dimensions_add_up((_f, v) in matrices(1)) {
        let a = &v[0];
        prop_assert_eq!(a.kernel().len() + a.row_space().len(), a.rows());
        for x in a.kernel() {
            prop_assert!(a.left_apply(&x).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn chains_are_geodesics((_f, v) in matrices(2)) {
        let chain = v[0].adjacency_chain(&v[1]).unwrap();
        prop_assert_eq!(chain.len(), distance(&v[0], &v[1]).unwrap() + 1);
        prop_assert_eq!(chain.last().unwrap(), &v[1]);
        for w in chain.windows(2) {
            prop_assert_eq!(distance(&w[0], &w[1]).unwrap(), 1);
        }
    }

    #[test]
    fn codes_round_trip((f, v) in matrices(1)) {
        let a = &v[0];
        let (m, n) = a.shape();
        prop_assert_eq!(&Matrix::from_code(&f, m, n, a.code()).unwrap(), a);
    }

    #[test]
    fn standard_maps_are_isometries(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Field::with_order([2, 3, 2][which], [1, 1, 2][which]).unwrap();
        let spec = StandardMapSpec::random(&f, (2, 2), (2, 3), &mut rng).unwrap();
        let space = MatrixSpace::new(&f, 2, 2).unwrap();
        for _ in 0..20 {
            let a = space.get(rng.gen_range(0..space.size())).unwrap();
            let b = space.get(rng.gen_range(0..space.size())).unwrap();
            let (x, y) = (spec.eval(&a).unwrap(), spec.eval(&b).unwrap());
            prop_assert_eq!(distance(&x, &y).unwrap(), distance(&a, &b).unwrap());
        }
    }
}

/// Random tables, kept only if they preserve adjacency, must be exactly the
/// ones the enumerator emits: checked on a tiny space by sampling.
#[test]
fn enumerator_agrees_with_the_preservation_check_on_samples() {
    let f = Field::prime(2).unwrap();
    let task = EnumerationTask::new(&f, (1, 2), (2, 2), false);
    let emitted: std::collections::BTreeSet<Vec<u64>> = enumerate_preservers(&task)
        .unwrap()
        .map(|t| t.outputs().iter().map(Matrix::code).collect())
        .collect();
    let cod = MatrixSpace::new(&f, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hits = 0;
    for i in 0..4000 {
        let codes: Vec<u64> = if i % 2 == 0 {
            // bias half the samples towards emitted tables
            emitted
                .iter()
                .nth(rng.gen_range(0..emitted.len()))
                .unwrap()
                .clone()
        } else {
            (0..4).map(|_| rng.gen_range(0..16)).collect()
        };
        let outputs = codes.iter().map(|&c| cod.get(c).unwrap()).collect();
        let map = TabulatedMap::new(&f, (1, 2), (2, 2), outputs).unwrap();
        let preserves = check_preserver(&map).preserves_adjacency;
        assert_eq!(preserves, emitted.contains(&codes), "{codes:?}");
        hits += usize::from(preserves);
    }
    assert!(hits > 2000);
}

#[test]
fn emitted_square_preservers_classify_cleanly() {
    let f = Field::prime(2).unwrap();
    let task = EnumerationTask::new(&f, (2, 2), (2, 2), true);
    for map in enumerate_preservers(&task).unwrap() {
        let verdict = classify(&map).unwrap().verdict;
        if let Verdict::Standard(spec) = verdict {
            assert_eq!(tabulate(&spec).unwrap(), map);
        }
    }
}
