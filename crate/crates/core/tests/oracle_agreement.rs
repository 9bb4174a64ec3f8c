use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realchip::builders::{random_real_graph, GraphProfile};
use realchip::divisor::{complete_linear_system, is_q_reduced, laplacian, linearly_equivalent, q_reduce, rank};
use realchip::properties::{random_divisor, random_real_divisor};
use realchip::real::real_rank;
use realchip::{invariants, Budget, Divisor, RawGraph, RealGraph};
use realchip_oracles as oracle;

fn small_graphs(count: u64, max_vertices: usize, max_edges: usize) -> impl Iterator<Item = (u64, RealGraph)> {
    (0..count).map(move |seed| {
        let profile = GraphProfile::ALL[seed as usize % GraphProfile::ALL.len()];
        (seed, random_real_graph(seed, max_vertices, max_edges, profile))
    })
}

#[test]
fn equivalence_agrees_with_the_lattice() {
    for (seed, g) in small_graphs(200, 6, 9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.n_vertices();
        let lattice = oracle::LatticeOracle::new(&g);
        for _ in 0..20 {
            let d1 = random_divisor(&mut rng, n, -2, 2);
            let d2 = if rng.random_bool(0.5) {
                let f = realchip::properties::random_potential(&mut rng, n, -3, 3);
                &d1 + &laplacian(&g, &f)
            } else {
                random_divisor(&mut rng, n, -2, 2)
            };
            let ours = linearly_equivalent(&g, &d1, &d2);
            assert_eq!(ours.is_some(), lattice.equivalent(&d1, &d2), "seed {seed}");
            assert_eq!(ours.is_some(), oracle::lattice_equivalent(&g, &d1, &d2), "seed {seed}");
            if let Some(f) = ours {
                assert_eq!(&d1 + &laplacian(&g, &f), d2, "seed {seed}");
            }
        }
    }
}

#[test]
fn reduced_forms_satisfy_the_definition() {
    for (seed, g) in small_graphs(200, 6, 9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.n_vertices();
        for _ in 0..10 {
            let d = random_divisor(&mut rng, n, -3, 3);
            let q = rng.random_range(0..n);
            let (reduced, f) = q_reduce(&g, &d, q);
            assert!(oracle::is_q_reduced_brute(&g, &reduced.divisor, q), "seed {seed}");
            assert_eq!(&d + &laplacian(&g, &f), reduced.divisor);
            assert_eq!(is_q_reduced(&g, &d, q), oracle::is_q_reduced_brute(&g, &d, q), "seed {seed}");
        }
    }
}

#[test]
fn rank_and_linear_systems_match_brute_force() {
    let budget = Budget::default();
    for (seed, g) in small_graphs(150, 5, 7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let n = g.n_vertices();
        for _ in 0..4 {
            let d = random_divisor(&mut rng, n, -1, 2);
            if d.degree() > 4 {
                continue;
            }
            assert_eq!(rank(&g, &d, &budget).unwrap(), oracle::rank_brute(&g, &d), "seed {seed} {d:?}");
            let mut ours = complete_linear_system(&g, &d, &budget).unwrap();
            let mut theirs = oracle::linear_system_brute(&g, &d);
            ours.sort();
            theirs.sort();
            assert_eq!(ours, theirs, "seed {seed}");
        }
    }
}

#[test]
fn real_rank_matches_the_member_scan() {
    let budget = Budget::default();
    for (seed, g) in small_graphs(150, 5, 7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 11);
        for _ in 0..4 {
            let d = random_real_divisor(&g, &mut rng, -1, 2);
            if d.degree() > 4 {
                continue;
            }
            let ours = real_rank(&g, &d, &budget).unwrap();
            assert_eq!(ours, oracle::real_rank_by_scan(&g, &d), "seed {seed} {d:?}");
            assert!(ours >= rank(&g, &d, &budget).unwrap());
        }
    }
}

#[test]
fn a_invariant_matches_walk_search() {
    for (seed, g) in small_graphs(1000, 10, 16) {
        assert_eq!(invariants(&g).a, oracle::a_invariant_by_walks(&g), "seed {seed}");
    }
}

fn antipodal_square() -> RealGraph {
    let mut raw = RawGraph::default();
    for v in ["u", "p", "w", "pc"] {
        raw.add_vertex(v);
    }
    raw.add_edge("up", "u", "p");
    raw.add_edge("pw", "p", "w");
    raw.add_edge("wpc", "w", "pc");
    raw.add_edge("pcu", "pc", "u");
    raw.conj_vertices("p", "pc");
    raw.conj_edges("up", "pcu");
    raw.conj_edges("pw", "wpc");
    RealGraph::from_raw(&raw).unwrap()
}

#[test]
fn antipodal_square_real_rank() {
    let g = antipodal_square();
    let u = g.vertex_index("u").unwrap();
    let w = g.vertex_index("w").unwrap();
    let d = &Divisor::unit(4, u) + &Divisor::unit(4, w);
    let expected = oracle::real_rank_by_scan(&g, &d);
    assert_eq!(real_rank(&g, &d, &Budget::default()).unwrap(), expected);
    assert_eq!(expected, 1);
    // u+w, 2p and 2p̄ make up |u+w|; only u+w is real
    assert_eq!(oracle::linear_system_brute(&g, &d).len(), 3);
}
