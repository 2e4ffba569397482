use steerlp::measurements::{bloch_operator, bloch_vector};
use steerlp::polytope::io::{read_polytope, write_polytope};
use steerlp::polytope::{
    analyze, contains, fibonacci_sphere, gauge, icosphere, mub_polytope, mub_shrinking_factor, outer_from_inner,
    rational_pure_states, refine_polytope, FacetOptions, HullMode, StatePolytope, MUB_TUPLE_CAP,
};
use steerlp::random::{haar_unitary, random_pure_state, random_state_hs, seeded};

fn bloch_points(p: &StatePolytope) -> Vec<[f64; 3]> {
    p.vertices().iter().map(bloch_vector).collect()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Inradius of a 3-D point set around the origin: over all planes through three
/// points with every point on one side, the smallest distance to the origin.
fn brute_force_inradius(pts: &[[f64; 3]]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let n = cross(sub(pts[j], pts[i]), sub(pts[k], pts[i]));
                let len = dot(n, n).sqrt();
                if len < 1e-9 {
                    continue;
                }
                let n = [n[0] / len, n[1] / len, n[2] / len];
                let off = dot(n, pts[i]);
                let (n, off) = if off < 0.0 { ([-n[0], -n[1], -n[2]], -off) } else { (n, off) };
                if pts.iter().all(|p| dot(n, *p) <= off + 1e-9) {
                    best = best.min(off);
                }
            }
        }
    }
    best
}

/// Minimum of the support function over many sampled directions; an upper
/// estimate of the inradius.
fn sampled_support_minimum(pts: &[[f64; 3]], samples: usize) -> f64 {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..samples)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
            let s = (1.0 - z * z).sqrt();
            let u = [s * (golden * i as f64).cos(), s * (golden * i as f64).sin(), z];
            pts.iter().map(|p| dot(*p, u)).fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn qubit_shrinking_factor_matches_geometric_oracles() {
    let polys = [
        rational_pure_states(2, 2).unwrap(),
        rational_pure_states(2, 3).unwrap(),
        rational_pure_states(2, 5).unwrap(),
        icosphere(1).unwrap(),
        fibonacci_sphere(30).unwrap(),
    ];
    for p in &polys {
        let (_, rep) = analyze(p, &FacetOptions::default()).unwrap();
        let pts = bloch_points(p);
        let inr = brute_force_inradius(&pts);
        assert!((rep.r - inr).abs() < 1e-9, "{}: {} vs {inr}", p.provenance(), rep.r);
        let sup = sampled_support_minimum(&pts, 20000);
        assert!(sup >= rep.r - 1e-12 && sup < rep.r + 5e-3, "{}: {sup} vs {}", p.provenance(), rep.r);
    }
}

#[test]
fn exact_and_float_hulls_agree() {
    for q in [2, 4, 7] {
        let p = rational_pure_states(2, q).unwrap();
        let (pf, rf) = analyze(&p, &FacetOptions::default()).unwrap();
        let exact = FacetOptions { mode: HullMode::Exact, ..Default::default() };
        let (pe, re) = analyze(&p, &exact).unwrap();
        assert_eq!(pf.facets().unwrap().len(), pe.facets().unwrap().len());
        assert!((rf.r - re.r).abs() < 1e-12);
    }
}

#[test]
fn qutrit_mub_complementarity_polytope() {
    let (p, rep) = analyze(&mub_polytope(3).unwrap(), &FacetOptions::default()).unwrap();
    assert_eq!(p.facets().unwrap().len(), 81);
    assert!((rep.r - 0.25).abs() < 1e-9);
    assert!((mub_shrinking_factor(2, MUB_TUPLE_CAP).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);

    let outer = outer_from_inner(&p).unwrap();
    let mut rng = seeded(11);
    for _ in 0..50 {
        let rho = random_pure_state(&mut rng, 3);
        assert!(contains(&outer, &rho, 1e-7).unwrap());
    }
}

#[test]
fn depolarized_states_lie_inside_and_worst_state_escapes() {
    let (p, rep) = analyze(&rational_pure_states(3, 2).unwrap(), &FacetOptions::default()).unwrap();
    let mut rng = seeded(5);
    for i in 0..1000 {
        let rho = if i % 2 == 0 { random_pure_state(&mut rng, 3) } else { random_state_hs(&mut rng, 3) };
        assert!(gauge(&p, &rho.depolarized(rep.r)).unwrap() >= 1.0 - 1e-7, "sample {i}");
    }
    assert!(contains(&p, &rep.worst_state.depolarized(rep.r), 1e-7).unwrap());
    assert!(!contains(&p, &rep.worst_state.depolarized(rep.r + 1e-3), 1e-7).unwrap());
}

#[test]
fn shrinking_factor_is_unitarily_invariant() {
    for (d, p) in [(2, icosphere(1).unwrap()), (3, mub_polytope(3).unwrap())] {
        let (_, base) = analyze(&p, &FacetOptions::default()).unwrap();
        let u = haar_unitary(&mut seeded(d as u64), d);
        let (_, rot) = analyze(&p.conjugated(&u).unwrap(), &FacetOptions::default()).unwrap();
        assert!((base.r - rot.r).abs() < 1e-9, "d={d}: {} vs {}", base.r, rot.r);
    }
}

#[test]
fn refinement_is_monotone() {
    let out = refine_polytope(&rational_pure_states(2, 2).unwrap(), 4, &FacetOptions::default()).unwrap();
    assert_eq!(out.steps_done(), 4);
    for w in out.history.windows(2) {
        assert!(w[1].r >= w[0].r - 1e-12 && w[1].vertices > w[0].vertices, "{:?}", out.history);
    }
}

#[test]
fn large_vertex_file_round_trip() {
    let mut verts = fibonacci_sphere(612).unwrap().vertices().to_vec();
    verts.push(bloch_operator(1.0, [0.0, 0.0, 1.0]));
    verts.push(bloch_operator(1.0, [0.0, 0.0, -1.0]));
    let p = StatePolytope::new(verts, steerlp::polytope::PolytopeKind::Inner, "fib612+z").unwrap();
    let (p, rep) = analyze(&p, &FacetOptions::default()).unwrap();
    assert_eq!(p.len(), 614);
    assert!(rep.r > 0.99);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("poly614.json");
    write_polytope(&path, &p.clone().without_facets().with_shrinking_factor(rep.r).unwrap()).unwrap();
    let back = read_polytope(&path).unwrap();
    assert_eq!(back.len(), 614);
    assert_eq!(back.shrinking_factor(), Some(rep.r));
    let (_, again) = analyze(&back, &FacetOptions::default()).unwrap();
    assert!((again.r - rep.r).abs() < 1e-12);
}
