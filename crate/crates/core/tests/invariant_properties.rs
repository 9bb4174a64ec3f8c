use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use realchip::builders::{edge_split, example1, random_real_graph, subdivide, GraphProfile};
use realchip::divisor::{canonical_divisor, laplacian, linearly_equivalent, q_reduce};
use realchip::metric::{metric_invariants, random_metric_graph, QDivisor, QMetricGraph};
use realchip::properties::{random_divisor, random_potential, random_real_divisor, random_real_potential};
use realchip::real::{conjugate, conjugate_potential, is_real_potential, parity_signature, real_witness};
use realchip::{invariants, RealGraph};

fn profile() -> impl Strategy<Value = GraphProfile> {
    prop::sample::select(GraphProfile::ALL.to_vec())
}

fn real_graph() -> impl Strategy<Value = RealGraph> {
    (any::<u64>(), 1usize..=10, 0usize..=16, profile()).prop_map(|(seed, v, e, p)| random_real_graph(seed, v, e, p))
}

fn admissible_triple() -> impl Strategy<Value = (i64, i64, u8)> {
    (0i64..=10, 0i64..=11, 0u8..=1).prop_filter("admissible", |&(g, s, a)| {
        (s - g - 1) % 2 == 0 && s <= g + 1 && (a == 0 || s < g) && (a == 1 || s >= 1)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn invariants_obey_the_bounds(g in real_graph()) {
        let report = invariants(&g);
        prop_assert!(report.bounds_hold(), "{:?}", report.bound_violations());
        prop_assert_eq!(report.genus, g.genus());
        prop_assert!(report.s_prime <= report.s);
    }

    #[test]
    fn example1_realises_its_triple((g, s, a) in admissible_triple()) {
        prop_assert_eq!(invariants(&example1(g, s, a).unwrap()).triple(), (g, s, a));
    }

    #[test]
    fn json_round_trips(g in real_graph()) {
        prop_assert_eq!(RealGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn subdivision_preserves_invariants(g in real_graph(), d in 1usize..=4) {
        let sub = subdivide(&g, d).unwrap();
        prop_assert_eq!(invariants(&sub).triple(), invariants(&g).triple());
        prop_assert_eq!(sub.n_edges(), d * g.n_edges());
    }

    #[test]
    fn edge_split_clears_isolated_edges(g in real_graph()) {
        let split = edge_split(&g);
        prop_assert_eq!(invariants(&split).isolated_real_edge_count, 0);
        prop_assert_eq!(invariants(&split).triple(), invariants(&g).triple());
    }

    #[test]
    fn conjugation_commutes_with_the_laplacian(g in real_graph(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_potential(&mut rng, g.n_vertices(), -4, 4);
        let d = random_divisor(&mut rng, g.n_vertices(), -3, 3);
        prop_assert_eq!(conjugate(&g, &conjugate(&g, &d)), d.clone());
        prop_assert_eq!(conjugate(&g, &laplacian(&g, &f)), laplacian(&g, &conjugate_potential(&g, &f)));
        prop_assert_eq!(laplacian(&g, &f).degree(), 0);
    }

    #[test]
    fn reduction_picks_one_representative(g in real_graph(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.n_vertices();
        let d = random_divisor(&mut rng, n, -3, 3);
        let moved = &d + &laplacian(&g, &random_potential(&mut rng, n, -3, 3));
        prop_assert_eq!(q_reduce(&g, &d, 0).0, q_reduce(&g, &moved, 0).0);
        prop_assert!(linearly_equivalent(&g, &d, &moved).is_some());
    }

    #[test]
    fn real_witnesses_are_real(g in real_graph(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_real_divisor(&g, &mut rng, -3, 3);
        let moved = &d + &laplacian(&g, &random_real_potential(&g, &mut rng, -3, 3));
        let f = real_witness(&g, &d, &moved).unwrap();
        prop_assert!(is_real_potential(&g, &f));
        prop_assert_eq!(&d + &laplacian(&g, &f), moved.clone());
        prop_assert_eq!(parity_signature(&g, &d).unwrap(), parity_signature(&g, &moved).unwrap());
    }

    #[test]
    fn canonical_parity_is_even(g in real_graph()) {
        prop_assert!(parity_signature(&g, &canonical_divisor(&g)).unwrap().is_all_even());
    }

    #[test]
    fn metric_graphs_round_trip(seed in any::<u64>(), p in profile(), den in 1i64..=6) {
        let gamma = random_metric_graph(seed, 6, 8, p, den);
        let back = QMetricGraph::from_json(&gamma.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), gamma.to_json());
        prop_assert!(metric_invariants(&gamma).bounds_hold());
        let mut d = QDivisor::new();
        for e in 0..gamma.graph().n_edges() {
            let p = gamma.edge_point(e, gamma.length(e) / 2).unwrap();
            d.add(p, 1);
            d.add(gamma.conjugate_point(&p), 1);
        }
        prop_assert!(d.is_real(&gamma));
        prop_assert_eq!(QDivisor::from_json(&gamma, &d.to_json(&gamma)).unwrap(), d.clone());
        prop_assert_eq!(d.conjugate(&gamma), d);
    }
}
