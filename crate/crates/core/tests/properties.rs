use std::f64::consts::PI;

use proptest::prelude::*;
use quantum_dtn::dtn::{dtn_matrix, harmonic_extension, DtnError};
use quantum_dtn::graph::MetricGraph;
use quantum_dtn::io::{deserialize_graph, serialize_graph};
use quantum_dtn::linalg::{eigenvalues_sym, SymMatrix};
use quantum_dtn::oracle::{counting_function, BoundaryCondition};
use quantum_dtn::synthesis::synthesize;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

/// Cycle-with-chords graph on 4 vertices with the given boundary.
fn theta(l: &[f64; 5], boundary: &[usize]) -> MetricGraph {
    MetricGraph::from_edge_list(
        4,
        &[(0, 1, l[0]), (1, 2, l[1]), (2, 3, l[2]), (3, 0, l[3]), (0, 2, l[4])],
        boundary,
    )
    .unwrap()
}

fn arb_graph() -> impl Strategy<Value = MetricGraph> {
    let len = 0.2f64..2.5;
    prop_oneof![
        len.clone().prop_map(|l| MetricGraph::segment(l).unwrap()),
        prop::collection::vec(len.clone(), 2..5).prop_map(|ls| MetricGraph::path(&ls).unwrap()),
        prop::collection::vec(len.clone(), 2..5).prop_map(|ls| MetricGraph::parallel(&ls).unwrap()),
        prop::collection::vec(len.clone(), 1..5).prop_map(|ls| MetricGraph::star(&ls).unwrap()),
        [len.clone(), len.clone(), len.clone(), len.clone(), len]
            .prop_map(|l| theta(&l, &[1, 3])),
    ]
}

/// `None` when λ hits the spectrum.
fn dtn(g: &MetricGraph, lambda: f64) -> Option<SymMatrix> {
    match dtn_matrix(g, lambda) {
        Ok(r) => Some(r),
        Err(DtnError::SpectrumHit(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

fn close(a: &SymMatrix, b: &SymMatrix, tol: f64) -> bool {
    (a - b).norm_inf() <= tol * (1.0 + a.norm_inf())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn subdividing_an_edge_changes_nothing(g in arb_graph(), pick in 0usize..16, t in 0.05f64..0.95, lambda in -5.0f64..20.0) {
        let e = g.edges()[pick % g.edge_count()].id;
        let h = g.subdivide_edge(e, t).unwrap();
        let (r, s) = (dtn(&g, lambda), dtn(&h, lambda));
        prop_assume!(r.is_some() && s.is_some());
        prop_assert!(close(&r.unwrap(), &s.unwrap(), TOL));
    }

    #[test]
    fn edge_orientation_is_irrelevant(g in arb_graph(), pick in 0usize..16, lambda in -5.0f64..20.0) {
        let e = g.edges()[pick % g.edge_count()].id;
        let r = dtn(&g, lambda);
        prop_assume!(r.is_some());
        let f = dtn(&g.flip_edge(e).unwrap(), lambda).unwrap();
        prop_assert!(close(&r.unwrap(), &f, 1e-12));
    }

    #[test]
    fn scaling_lengths_scales_the_spectral_parameter(g in arb_graph(), lambda in 0.05f64..20.0) {
        let w = lambda.sqrt();
        let (r, s) = (dtn(&g, lambda), dtn(&g.scale_lengths(w).unwrap(), 1.0));
        prop_assume!(r.is_some() && s.is_some());
        prop_assert!(close(&r.unwrap(), &s.unwrap().scale(w), TOL));
    }

    #[test]
    fn negative_lambda_gives_positive_definite(g in arb_graph(), tau in 0.01f64..50.0) {
        let r = dtn_matrix(&g, -tau).unwrap();
        prop_assert!(eigenvalues_sym(&r)[0] > 0.0);
    }

    #[test]
    fn derivative_is_minus_the_energy(g in arb_graph(), lambda in -4.0f64..12.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..g.boundary_size()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = 1e-5;
        let (r0, rp, rm) = (dtn(&g, lambda), dtn(&g, lambda + h), dtn(&g, lambda - h));
        prop_assume!(r0.is_some() && rp.is_some() && rm.is_some());
        let r0 = r0.unwrap();
        // keep away from poles, where the difference quotient is meaningless
        prop_assume!(r0.norm_inf() < 1e3);
        let fd = (rp.unwrap().quadratic_form(&x) - rm.unwrap().quadratic_form(&x)) / (2.0 * h);
        let energy = harmonic_extension(&g, lambda, &x).unwrap().l2_norm_squared();
        prop_assert!(fd < 0.0 || energy == 0.0);
        prop_assert!((fd + energy).abs() <= 1e-5 * (1.0 + energy), "{} vs {}", fd, -energy);
    }

    #[test]
    fn graph_files_round_trip(g in arb_graph()) {
        let text = serialize_graph(&g).unwrap();
        let back = deserialize_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_graph(&back).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn robin_counts_decrease_with_the_parameter(g in arb_graph(), lambda in 0.3f64..25.0, a in 0.0f64..3.0, gap in 0.1f64..5.0) {
        let na = counting_function(&g, BoundaryCondition::Robin(a), lambda);
        let nb = counting_function(&g, BoundaryCondition::Robin(a + gap), lambda);
        let nd = counting_function(&g, BoundaryCondition::Dirichlet, lambda);
        prop_assume!(na.is_ok() && nb.is_ok() && nd.is_ok());
        let (na, nb, nd) = (na.unwrap().count, nb.unwrap().count, nd.unwrap().count);
        prop_assert!(na >= nb && nb >= nd);
    }
}

#[test]
fn synthesized_graphs_meet_structural_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 2..=5 {
        for lambda in [0.5, 1.0, 4.0] {
            let rows: Vec<Vec<f64>> = {
                let mut m = vec![vec![0.0; k]; k];
                for i in 0..k {
                    for j in i..k {
                        let x = rng.gen_range(-3.0..3.0);
                        m[i][j] = x;
                        m[j][i] = x;
                    }
                }
                m
            };
            let a = SymMatrix::from_rows(&rows).unwrap();
            let g = synthesize(&a, lambda).unwrap();
            assert!(g.is_valid());
            assert_eq!(g.boundary_size(), k);
            let pairs = k * (k - 1) / 2;
            assert!(g.vertex_count() - k <= pairs * 12 + pairs);
            let w = f64::sqrt(lambda);
            for e in g.edges() {
                let phase = e.length * w;
                assert!(phase > 0.0 && phase < 2.0 * PI);
                assert!((phase - PI).abs() >= 1e-6 && (2.0 * PI - phase) >= 1e-6);
            }
            // determinism
            let again = synthesize(&a, lambda).unwrap();
            assert_eq!(serialize_graph(&g).unwrap(), serialize_graph(&again).unwrap());
        }
    }
}

#[test]
fn quarter_wave_segment_is_the_swap_matrix() {
    let r = dtn_matrix(&MetricGraph::segment(PI / 2.0).unwrap(), 1.0).unwrap();
    let swap = SymMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
    assert!(close(&r, &swap, 1e-15));
    let g = synthesize(&swap, 1.0).unwrap();
    assert!(close(&dtn_matrix(&g, 1.0).unwrap(), &swap, 1e-10));
}
