//! Bounds on the steering robustness of bipartite states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::robustness::{package, solve_visibility_lp, BoundKind, LpOptions, RobustnessResult};
use crate::lp::solver::SolveStatus;
use crate::measurements::bloch_vector;
use crate::polytope::{analyze, FacetOptions, PolytopeKind, StatePolytope};
use crate::quantum::assemblage::steer_all;
use crate::quantum::{BipartiteState, HermitianOperator, MeasurementSet, DEFAULT_TOL};

/// The state mixed in as `eta rho + (1 - eta) tau`.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseModel {
    /// `tau = 1/d_A (x) rho_B`.
    LocalWhite,
    /// `tau = 1/(d_A d_B)`.
    GlobalWhite,
    Custom(HermitianOperator),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    LocalWhite,
    GlobalWhite,
    Custom,
}

impl NoiseModel {
    pub fn kind(&self) -> NoiseKind {
        match self {
            NoiseModel::LocalWhite => NoiseKind::LocalWhite,
            NoiseModel::GlobalWhite => NoiseKind::GlobalWhite,
            NoiseModel::Custom(_) => NoiseKind::Custom,
        }
    }

    /// The noise state `tau` for `rho`, validated to be a unit-trace PSD operator.
    pub fn target(&self, rho: &BipartiteState) -> Result<BipartiteState> {
        let (da, db) = (rho.dim_a(), rho.dim_b());
        let tau = match self {
            NoiseModel::LocalWhite => HermitianOperator::maximally_mixed(da).kron(&rho.reduced_b()),
            NoiseModel::GlobalWhite => HermitianOperator::maximally_mixed(da * db),
            NoiseModel::Custom(t) => t.clone(),
        };
        BipartiteState::new(da, db, tau).map_err(|e| Error::param(format!("noise target: {e}")))
    }
}

fn check_dims(rho: &BipartiteState, m: &MeasurementSet, p: &StatePolytope) -> Result<()> {
    if m.dim() != rho.dim_a() {
        return Err(Error::DimensionMismatch { expected: rho.dim_a(), found: m.dim() });
    }
    if p.dim() != rho.dim_b() {
        return Err(Error::DimensionMismatch { expected: rho.dim_b(), found: p.dim() });
    }
    Ok(())
}

/// LP over an outer vertex set: every `eta` above the returned value makes the
/// noisy state steerable with `m`. The certificate is the corresponding steering inequality.
pub fn state_upper_bound(
    rho: &BipartiteState,
    m: &MeasurementSet,
    outer: &StatePolytope,
    noise: &NoiseModel,
    opts: &LpOptions,
) -> Result<RobustnessResult> {
    check_dims(rho, m, outer)?;
    if outer.kind() != PolytopeKind::Outer {
        return Err(Error::param("state_upper_bound needs an outer vertex set"));
    }
    let tau = noise.target(rho)?;
    let signal = steer_all(rho, m.elements())?;
    let noise_family = steer_all(&tau, m.elements())?;
    let sol = solve_visibility_lp(&signal, &noise_family, outer.vertices(), opts)?;
    let mut res = package(sol, outer, "lp-state-upper")?;
    res.lower = 0.0;
    res.upper = res.eta_tilde;
    res.kind = BoundKind::UpperOnly;
    Ok(res)
}

/// LP with the quasi-measurements `Lambda_{1/mu}(M)` over an inner polytope: every
/// `eta` up to the returned value leaves the noisy state unsteerable for all
/// measurements in the hull of the quasi-measurements. An infeasible LP yields the
/// trivial bound 0 with status `infeasible`.
pub fn state_lower_bound(
    rho: &BipartiteState,
    m: &MeasurementSet,
    mu: f64,
    inner: &StatePolytope,
    noise: &NoiseModel,
    opts: &LpOptions,
) -> Result<RobustnessResult> {
    check_dims(rho, m, inner)?;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::param(format!("measurement shrinking factor {mu} is outside (0, 1]")));
    }
    if inner.kind() != PolytopeKind::Inner {
        return Err(Error::param("state_lower_bound needs an inner polytope"));
    }
    let quasi = m.depolarized(1.0 / mu);
    let tau = noise.target(rho)?;
    let signal = steer_all(rho, quasi.elements())?;
    let noise_family = steer_all(&tau, quasi.elements())?;
    let opts = LpOptions { certificate: false, ..*opts };
    let sol = solve_visibility_lp(&signal, &noise_family, inner.vertices(), &opts)?;
    if sol.status == SolveStatus::Infeasible {
        return Ok(RobustnessResult {
            eta_tilde: 0.0,
            lower: 0.0,
            upper: f64::INFINITY,
            r_used: Some(mu),
            kind: BoundKind::LowerOnly,
            status: sol.status,
            raw_status: sol.raw_status,
            normalization_residual: f64::NAN,
            certificate: None,
            wall_time_s: sol.wall_time_s,
            method: "lp-state-lower".into(),
        });
    }
    let mut res = package(sol, inner, "lp-state-lower")?;
    res.lower = res.eta_tilde;
    res.upper = f64::INFINITY;
    res.r_used = Some(mu);
    res.kind = BoundKind::LowerOnly;
    Ok(res)
}

/// Shrinking factor `mu` of the polytope spanned by the Bloch directions `+-n_x` of
/// a set of projective qubit measurements.
pub fn measurement_shrinking_factor(m: &MeasurementSet) -> Result<f64> {
    if m.dim() != 2 || m.outcomes() != 2 || !m.is_projective(DEFAULT_TOL) {
        return Err(Error::param("measurement shrinking factor is defined for dichotomic projective qubit measurements"));
    }
    let mut dirs = Vec::new();
    for x in 0..m.count() {
        let n = bloch_vector(m.element(x, 0));
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len < 0.5 {
            return Err(Error::param(format!("measurement {x} is trivial")));
        }
        let n = [n[0] / len, n[1] / len, n[2] / len];
        dirs.push(crate::measurements::bloch_operator(1.0, n));
        dirs.push(crate::measurements::bloch_operator(1.0, [-n[0], -n[1], -n[2]]));
    }
    let p = StatePolytope::new(dirs, PolytopeKind::Inner, "measurement-directions")?;
    Ok(analyze(&p, &FacetOptions::default())?.1.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{bloch_operator, dichotomic_from_axes};
    use crate::polytope::{icosphere, outer_from_inner};

    fn mubs() -> MeasurementSet {
        dichotomic_from_axes(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn octahedron_directions_give_inverse_sqrt3() {
        assert!((measurement_shrinking_factor(&mubs()).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn separable_state_bounds_reach_one() {
        let a = bloch_operator(1.0, [0.2, 0.1, -0.25]);
        let b = bloch_operator(1.0, [0.1, -0.3, 0.2]);
        let rho = BipartiteState::product(&a, &b).unwrap();
        let (p, _) = analyze(&icosphere(1).unwrap(), &FacetOptions::default()).unwrap();
        let outer = outer_from_inner(&p).unwrap();
        let up = state_upper_bound(&rho, &mubs(), &outer, &NoiseModel::LocalWhite, &LpOptions::default()).unwrap();
        assert!(up.upper >= 1.0 - 1e-7, "{}", up.upper);
        let mu = measurement_shrinking_factor(&mubs()).unwrap();
        let lo = state_lower_bound(&rho, &mubs(), mu, &p, &NoiseModel::LocalWhite, &LpOptions::default()).unwrap();
        assert!(lo.lower >= 1.0 - 1e-7, "{}", lo.lower);
    }

    #[test]
    fn noise_targets() {
        let rho = BipartiteState::maximally_entangled(2);
        let local = NoiseModel::LocalWhite.target(&rho).unwrap();
        let global = NoiseModel::GlobalWhite.target(&rho).unwrap();
        assert!(local.matrix().distance(global.matrix()) < 1e-15);
        let bad = NoiseModel::Custom(HermitianOperator::identity(4));
        assert!(bad.target(&rho).is_err());
    }
}
