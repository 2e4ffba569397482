use nalgebra::DMatrix;
use proptest::prelude::*;
use steerlp::measurements::{random_povm, random_projective};
use steerlp::quantum::{assemblage_from_measurements, assemblage_from_state, BipartiteState, HermitianOperator, C64};
use steerlp::random::{random_bipartite_hs, seeded};

/// `Tr_A((M (x) 1) rho)` via an explicit product followed by a partial trace.
fn steer_oracle(rho: &BipartiteState, m: &HermitianOperator) -> DMatrix<C64> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let big = m.kron(&HermitianOperator::identity(db)).matrix() * rho.matrix().matrix();
    DMatrix::from_fn(db, db, |b, bp| (0..da).map(|i| big[(i * db + b, i * db + bp)]).sum())
}

#[test]
fn steering_matches_partial_trace_oracle() {
    for seed in 0..5 {
        for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let rho = random_bipartite_hs(&mut seeded(seed), da, db);
            let ms = random_povm(2, da, da + 1, seed).unwrap();
            for povm in ms.elements() {
                for e in povm {
                    let got = rho.steer(e).unwrap();
                    let want = steer_oracle(&rho, e);
                    assert!((got.matrix() - want).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn reduced_states_are_consistent() {
    let rho = random_bipartite_hs(&mut seeded(4), 2, 3);
    let b = rho.steer(&HermitianOperator::identity(2)).unwrap();
    assert!(b.distance(&rho.reduced_b()) < 1e-12);
    assert!((rho.reduced_a().trace() - 1.0).abs() < 1e-12);
}

#[test]
fn coordinates_round_trip_and_are_orthonormal() {
    for d in 2..=4 {
        let rho = steerlp::random::random_state_hs(&mut seeded(d as u64), d);
        let c = rho.coords();
        assert_eq!(c.len(), d * d);
        let back = HermitianOperator::from_coords(d, &c).unwrap();
        assert!(back.distance(&rho) < 1e-12);
        let norm2: f64 = c.iter().map(|x| x * x).sum();
        assert!((norm2 - rho.inner(&rho)).abs() < 1e-12);
    }
}

fn dims() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn maximally_entangled_state_gives_transposed_measurements(d in dims(), m in 1usize..4, seed in any::<u64>(), povm in any::<bool>()) {
        let set = if povm { random_povm(m, d, d + 1, seed).unwrap() } else { random_projective(m, d, seed).unwrap() };
        let phi = BipartiteState::maximally_entangled(d);
        let from_state = assemblage_from_state(&phi, &set).unwrap();
        let direct = assemblage_from_measurements(&set);
        for (ra, rb) in from_state.elements().iter().zip(direct.elements()) {
            for (a, b) in ra.iter().zip(rb) {
                prop_assert!(a.distance(b) < 1e-12);
            }
        }
    }

    #[test]
    fn depolarizing_preserves_trace_and_mixes_toward_identity(d in dims(), eta in 0.0f64..1.0, seed in any::<u64>()) {
        let rho = steerlp::random::random_state_hs(&mut seeded(seed), d);
        let out = rho.depolarized(eta);
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        let expect = &rho.scale(eta) + &HermitianOperator::maximally_mixed(d).scale(1.0 - eta);
        prop_assert!(out.distance(&expect) < 1e-12);
        prop_assert!(out.min_eigenvalue() >= (1.0 - eta) / d as f64 - 1e-12);
    }
}
