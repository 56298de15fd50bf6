mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reconlab_core::graph6::{graph6_decode, graph6_encode, Graph6Record};
use reconlab_core::hypomorphism::{find_hypomorphism, gen_pair, verify_hypomorphism, EXACT_TOL};
use reconlab_core::io::{cone_from_json, cone_to_json, matrix_from_json, matrix_to_json};
use reconlab_core::matrix::{deck, eigen_sorted, majors_multiset, perm_similarity, Permutation};
use reconlab_core::presentation::{
    factor_presentation, good_position_report, lambda0_certified, lambda0_search,
    perturb_presentation, project_origin,
};
use reconlab_core::solid_angle::{
    angle_fraction, cone_contains, monotonicity_check, Cone,
};
use reconlab_core::suite::{random_orthogonal, random_pd};

use common::{columns, gaussian_matrix, sym};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph6Record> {
    (3..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .zip(bits)
                .filter_map(|(e, b)| b.then_some(e))
                .collect();
            Graph6Record::from_edges(n, &edges).unwrap()
        })
    })
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph6_round_trip(g in graph_strategy(12)) {
        let text = graph6_encode(&g).unwrap();
        prop_assert_eq!(graph6_decode(&text).unwrap(), g);
    }

    #[test]
    fn search_matches_per_index_enumeration(
        (g, tau) in graph_strategy(6).prop_flat_map(|g| {
            let n = g.order();
            (Just(g), perm_strategy(n))
        })
    ) {
        let pair = gen_pair(&g, &tau).unwrap();
        let oracle = common::per_index_hypomorphic(&pair.a.rows(), &pair.b.rows());
        prop_assert_eq!(pair.sigma.is_some(), oracle);
        if let Some(sigma) = &pair.sigma {
            prop_assert!(verify_hypomorphism(&pair.a, &pair.b, sigma, EXACT_TOL).unwrap().valid);
            prop_assert_eq!(majors_multiset(&pair.a).unwrap(), majors_multiset(&pair.b).unwrap());
        }
    }

    #[test]
    fn relabelled_deck_is_similar_to_original(
        (g, tau) in graph_strategy(7).prop_flat_map(|g| {
            let n = g.order();
            (Just(g), perm_strategy(n))
        })
    ) {
        let a = g.adjacency_matrix().unwrap();
        let b = perm_similarity(&a, &tau).unwrap();
        let (da, db) = (deck(&a).unwrap(), deck(&b).unwrap());
        for i in 0..a.n() {
            let (x, y) = (eigen_sorted(&da[i]).values, eigen_sorted(&db[tau.apply(i)]).values);
            for (p, q) in x.iter().zip(&y) {
                prop_assert!((p - q).abs() <= 1e-9);
            }
        }
        let (ma, mb) = (majors_multiset(&a).unwrap(), majors_multiset(&b).unwrap());
        for (p, q) in ma.iter().zip(&mb) {
            prop_assert!((p - q).abs() <= 1e-10);
        }
    }

    #[test]
    fn cycles_are_hypomorphic_to_every_relabelling(
        (n, tau) in (3usize..=8).prop_flat_map(|n| (Just(n), perm_strategy(n)))
    ) {
        let pair = gen_pair(&Graph6Record::cycle(n), &tau).unwrap();
        let sigma = pair.sigma.expect("every card of a cycle is a path");
        prop_assert!(verify_hypomorphism(&pair.a, &pair.b, &sigma, EXACT_TOL).unwrap().valid);
    }

    #[test]
    fn similarity_preserves_spectrum(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_pd(&mut rng, n, -1.0);
        let tau = Permutation::rotation(n, 1).compose(&Permutation::reflection(n));
        let b = perm_similarity(&a, &tau).unwrap();
        let (ea, eb) = (eigen_sorted(&a).values, eigen_sorted(&b).values);
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!((x - y).abs() <= 1e-10 * a.scale());
        }
        let back = perm_similarity(&b, &tau.inverse()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn factor_and_perturb(seed in any::<u64>(), n in 2usize..8, s in -2.0..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_pd(&mut rng, n, 0.25);
        let u = factor_presentation(&a).unwrap();
        prop_assert!(u.gram().max_abs_diff(&a) <= 1e-9 * a.scale());
        let path = project_origin(&u).unwrap().at(s);
        prop_assert!(path.t >= -path.u0_norm_sq * (1.0 + 1e-12));
        let expected = a.plus_ones(path.t);
        let got = perturb_presentation(&u, s).unwrap().gram();
        prop_assert!(got.max_abs_diff(&expected) <= 1e-9 * a.scale());
    }

    #[test]
    fn lambda0_is_certified(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = gaussian_matrix(&mut rng, n, n);
        let a = sym(((&w + w.transpose()) * 0.5).row_iter().map(|r| r.iter().copied().collect()).collect());
        let l0 = lambda0_search(&a);
        prop_assert!(lambda0_certified(&a, l0));
        // good position at every certified λ
        let t = reconlab_core::presentation::t_of_lambda(&a, l0).unwrap();
        prop_assert!(good_position_report(&a.shifted(-l0, t)).unwrap().is_good);
    }

    #[test]
    fn exact_angles_are_congruence_invariant(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cone = Cone::new(DVector::zeros(d), columns(&gaussian_matrix(&mut rng, d, d)), None).unwrap();
        let q = random_orthogonal(&mut rng, d);
        let before = angle_fraction(&cone, 1, 0).unwrap().fraction;
        let after = angle_fraction(&cone.transformed(&q), 1, 0).unwrap().fraction;
        prop_assert!((before - after).abs() <= 1e-12);
        prop_assert!(before < 0.5);
    }

    #[test]
    fn positive_combinations_are_contained(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gaussian_matrix(&mut rng, d, d);
        let cone = Cone::new(DVector::zeros(d), columns(&g), None).unwrap();
        let coef = DVector::from_fn(d, |i, _| 0.1 + i as f64);
        prop_assert!(cone_contains(&cone, &(&g * &coef)).unwrap());
        let mut flipped = coef.clone();
        flipped[d - 1] = -1.0;
        prop_assert!(!cone_contains(&cone, &(&g * flipped)).unwrap());
    }

    #[test]
    fn nested_cones_are_monotone(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gaussian_matrix(&mut rng, d, d);
        let outer = Cone::new(DVector::zeros(d), columns(&g), None).unwrap();
        // inner generators are positive combinations of the outer ones
        let mix = gaussian_matrix(&mut rng, d, d).abs().add_scalar(0.05);
        let inner = Cone::new(DVector::zeros(d), columns(&(&g * mix)), None).unwrap();
        let r = monotonicity_check(&inner, &outer, 20_000, seed).unwrap();
        prop_assert!(r.holds, "{:?} vs {:?}", r.inner.fraction, r.outer.fraction);
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_pd(&mut rng, n, 0.0);
        prop_assert_eq!(matrix_from_json(&matrix_to_json(&a).unwrap()).unwrap(), a);
        let cone = Cone::new(DVector::zeros(n), columns(&gaussian_matrix(&mut rng, n, n)), Some(n)).unwrap();
        prop_assert_eq!(cone_from_json(&cone_to_json(&cone).unwrap()).unwrap(), cone);
    }
}

#[test]
fn monte_carlo_is_worker_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cone = Cone::new(DVector::zeros(5), columns(&gaussian_matrix(&mut rng, 5, 5)), None).unwrap();
    let reference = angle_fraction(&cone, 300_000, 99).unwrap();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let est = pool.install(|| angle_fraction(&cone, 300_000, 99).unwrap());
        assert_eq!(est, reference);
    }
}

#[test]
fn non_isomorphic_four_vertex_graphs_are_not_hypomorphic() {
    let classes = common::graph_classes(4);
    for (i, x) in classes.iter().enumerate() {
        for y in &classes[i + 1..] {
            assert!(find_hypomorphism(&sym(x.clone()), &sym(y.clone())).unwrap().is_none());
        }
    }
}
