use crate::error::{Error, Result};
use crate::lp::solver::{ConicProblem, SolveStatus, SolverOptions, SparseRow};
use crate::polytope::StatePolytope;
use crate::quantum::HermitianOperator;

/// Largest `s` such that `1/d + s (rho - 1/d)` lies in the hull of `p`, found by LP.
/// Returns infinity when `rho` is the maximally mixed state.
pub fn gauge(p: &StatePolytope, rho: &HermitianOperator) -> Result<f64> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: rho.dim() });
    }
    let target = rho.coords();
    let n = p.len();
    // Variables: s, then convex weights.
    let mut lp = ConicProblem::new(n + 1);
    lp.set_cost(0, -1.0);
    let verts: Vec<Vec<f64>> = p.vertex_coords();
    let d2 = target.len();
    let mut rows: Vec<SparseRow> = Vec::with_capacity(d2);
    for c in 1..d2 {
        let mut row: SparseRow = vec![(0, target[c])];
        row.extend(verts.iter().enumerate().map(|(i, v)| (i + 1, -v[c - 1])));
        rows.push(row);
    }
    rows.push((1..=n).map(|i| (i, 1.0)).collect());
    let mut rhs = vec![0.0; d2 - 1];
    rhs.push(1.0);
    lp.add_equalities(&rows, &rhs);
    lp.add_nonnegative(1..=n);
    let sol = lp.solve(&SolverOptions::default())?;
    match sol.status {
        s if s.is_optimal() => Ok(sol.x[0]),
        SolveStatus::Unbounded => Ok(f64::INFINITY),
        SolveStatus::Infeasible => Err(Error::Infeasible("membership LP".into())),
        _ => Err(Error::Solver(format!("membership LP ended with {}", sol.raw_status))),
    }
}

/// Whether `rho` lies in the hull of `p`, up to `tol` in the gauge.
pub fn contains(p: &StatePolytope, rho: &HermitianOperator, tol: f64) -> Result<bool> {
    Ok(gauge(p, rho)? >= 1.0 - tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::bloch_operator;
    use crate::polytope::rational_pure_states;

    #[test]
    fn octahedron_gauge_along_diagonal() {
        let p = rational_pure_states(2, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let rho = bloch_operator(1.0, [s, s, s]);
        assert!((gauge(&p, &rho).unwrap() - s).abs() < 1e-7);
        let z = bloch_operator(1.0, [0.0, 0.0, 1.0]);
        assert!((gauge(&p, &z).unwrap() - 1.0).abs() < 1e-7);
        assert!(gauge(&p, &HermitianOperator::maximally_mixed(2)).unwrap() > 1e6);
    }
}
