//! The visibility LP shared by every robustness bound:
//!
//! `max eta` s.t. `eta A_{a|x} + (1 - eta) B_{a|x} = sum_l p(a|x,l) v_l`, `p >= 0`,
//! `sum_a p(a|x,l)` independent of `x`.
//!
//! `A` is the signal (assemblage), `B` the noise it is mixed with and `v_l` the
//! polytope vertices. Variables are `eta` followed by `p(a|x,l)` at column
//! `1 + l*m*k + x*k + a`. Coordinate rows use the orthonormal Hermitian basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::solver::{ConicProblem, SolveStatus, SolverOptions, SparseRow};
use crate::polytope::{PolytopeKind, StatePolytope};
use crate::quantum::{assemblage_from_measurements, basis_element, Assemblage, HermitianOperator, MeasurementSet};

/// Coefficients below this are treated as structural zeros when assembling rows.
const ZERO_COEF: f64 = 1e-14;
/// The implied normalization `sum_{l,a} p(a|x,l) = Tr(sum_a A_{a|x})` is checked to this.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Step above the optimum at which a certificate must separate the target.
pub const CERTIFICATE_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOptions {
    pub solver: SolverOptions,
    /// Extract and validate the dual certificate.
    pub certificate: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), certificate: true }
    }
}

/// A linear functional `S(s) = sum_{a,x} Tr(F_{a|x} s_{a|x})` with
/// `S <= bound` on every assemblage the polytope's hidden states can simulate.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// `F[x][a]`.
    pub functionals: Vec<Vec<HermitianOperator>>,
    pub bound: f64,
    /// `S(eta A + (1 - eta) B) = alpha + beta * eta`.
    pub alpha: f64,
    pub beta: f64,
    /// `S` at `eta_tilde + 1e-6` exceeds `bound`.
    pub validated: bool,
}

impl Certificate {
    pub fn value(&self, assemblage: &[Vec<HermitianOperator>]) -> f64 {
        self.functionals
            .iter()
            .zip(assemblage)
            .flat_map(|(fs, ss)| fs.iter().zip(ss).map(|(f, s)| f.inner(s)))
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub eta: f64,
    pub status: SolveStatus,
    pub raw_status: String,
    pub normalization_residual: f64,
    pub certificate: Option<Certificate>,
    pub wall_time_s: f64,
    pub rows: usize,
    pub columns: usize,
}

pub(crate) fn now() -> Option<std::time::Instant> {
    #[cfg(not(target_arch = "wasm32"))]
    {
        Some(std::time::Instant::now())
    }
    #[cfg(target_arch = "wasm32")]
    {
        None
    }
}

pub(crate) fn elapsed(t: Option<std::time::Instant>) -> f64 {
    t.map_or(0.0, |t| t.elapsed().as_secs_f64())
}

fn check_family(name: &str, f: &[Vec<HermitianOperator>], m: usize, k: usize, d: usize) -> Result<()> {
    if f.len() != m || f.iter().any(|row| row.len() != k || row.iter().any(|o| o.dim() != d)) {
        return Err(Error::param(format!("{name} does not have shape {m} x {k} in dimension {d}")));
    }
    Ok(())
}

/// Blocks `(x, a)` carrying coordinate rows. For `x >= 1` the last outcome is implied
/// by the other outcomes, the `x = 0` block and the equal-marginal rows.
pub(crate) fn kept_blocks(m: usize, k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |x| (0..k).filter(move |&a| x == 0 || a + 1 < k).map(move |a| (x, a)))
}

/// Solves the visibility LP for `signal`, `noise` (both `[x][a]`) and `vertices`.
pub fn solve_visibility_lp(
    signal: &[Vec<HermitianOperator>],
    noise: &[Vec<HermitianOperator>],
    vertices: &[HermitianOperator],
    opts: &LpOptions,
) -> Result<LinearSolution> {
    let start = now();
    let m = signal.len();
    let k = signal.first().map_or(0, |r| r.len());
    let d = vertices.first().map(|v| v.dim()).ok_or_else(|| Error::param("polytope has no vertices"))?;
    if m == 0 || k == 0 {
        return Err(Error::param("empty assemblage"));
    }
    check_family("signal", signal, m, k, d)?;
    check_family("noise", noise, m, k, d)?;
    let n = vertices.len();
    let d2 = d * d;
    let col = |l: usize, x: usize, a: usize| 1 + l * m * k + x * k + a;
    let ncols = 1 + n * m * k;
    let vcoords: Vec<Vec<f64>> = vertices.iter().map(|v| v.coords()).collect();

    let mut lp = ConicProblem::new(ncols);
    lp.set_cost(0, -1.0);

    // Coordinate rows, remembering which (x, a, c) each one encodes.
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut rhs = Vec::new();
    let mut row_tags: Vec<(usize, usize, usize)> = Vec::new();
    for (x, a) in kept_blocks(m, k) {
        let sc = signal[x][a].coords();
        let nc = noise[x][a].coords();
        for c in 0..d2 {
            let diff = sc[c] - nc[c];
            let mut row: SparseRow = Vec::with_capacity(n + 1);
            if diff.abs() > ZERO_COEF {
                row.push((0, diff));
            }
            for (l, v) in vcoords.iter().enumerate() {
                if v[c].abs() > ZERO_COEF {
                    row.push((col(l, x, a), -v[c]));
                }
            }
            if row.is_empty() {
                if nc[c].abs() > 1e-12 {
                    return Err(Error::Infeasible(format!(
                        "coordinate {c} of block (x={x}, a={a}) cannot be matched by any vertex"
                    )));
                }
                continue;
            }
            rows.push(row);
            rhs.push(-nc[c]);
            row_tags.push((x, a, c));
        }
    }
    let first_coord_row = lp.add_equalities(&rows, &rhs);

    let mut marg: Vec<SparseRow> = Vec::with_capacity(n * m.saturating_sub(1));
    for l in 0..n {
        for x in 1..m {
            let mut row: SparseRow = (0..k).map(|a| (col(l, x, a), 1.0)).collect();
            row.extend((0..k).map(|a| (col(l, 0, a), -1.0)));
            marg.push(row);
        }
    }
    let zeros = vec![0.0; marg.len()];
    lp.add_equalities(&marg, &zeros);
    lp.add_nonnegative(1..ncols);

    let sol = lp.solve(&opts.solver)?;
    let (rows_total, cols_total) = (lp.num_rows(), lp.num_vars());
    let mut out = LinearSolution {
        eta: f64::NAN,
        status: sol.status,
        raw_status: sol.raw_status.clone(),
        normalization_residual: f64::NAN,
        certificate: None,
        wall_time_s: 0.0,
        rows: rows_total,
        columns: cols_total,
    };
    match sol.status {
        SolveStatus::Infeasible => {
            out.wall_time_s = elapsed(start);
            return Ok(out);
        }
        SolveStatus::Unbounded => {
            out.eta = f64::INFINITY;
            out.wall_time_s = elapsed(start);
            return Ok(out);
        }
        SolveStatus::Failed => {
            return Err(Error::Solver(format!("visibility LP ended with status {}", sol.raw_status)));
        }
        _ => {}
    }
    out.eta = sol.x[0];
    let expected: f64 = signal[0].iter().map(|s| s.trace()).sum();
    let total: f64 = (0..n).flat_map(|l| (0..k).map(move |a| (l, a))).map(|(l, a)| sol.x[col(l, 0, a)]).sum();
    out.normalization_residual = (total - expected).abs();

    if opts.certificate {
        let mut functionals: Vec<Vec<HermitianOperator>> = vec![vec![HermitianOperator::zeros(d); k]; m];
        let basis: Vec<HermitianOperator> = (0..d2).map(|c| basis_element(d, c)).collect();
        for (r, &(x, a, c)) in row_tags.iter().enumerate() {
            let z = sol.z[first_coord_row + r];
            functionals[x][a] = &functionals[x][a] + &basis[c].scale(z);
        }
        out.certificate = Some(build_certificate(functionals, signal, noise, vertices, out.eta));
    }
    out.wall_time_s = elapsed(start);
    Ok(out)
}

fn build_certificate(
    mut functionals: Vec<Vec<HermitianOperator>>,
    signal: &[Vec<HermitianOperator>],
    noise: &[Vec<HermitianOperator>],
    vertices: &[HermitianOperator],
    eta: f64,
) -> Certificate {
    let pair = |fs: &[Vec<HermitianOperator>], s: &[Vec<HermitianOperator>]| -> f64 {
        fs.iter().zip(s).flat_map(|(f, s)| f.iter().zip(s).map(|(f, s)| f.inner(s))).sum()
    };
    let mut alpha = pair(&functionals, noise);
    let mut beta = pair(&functionals, signal) - alpha;
    if beta < 0.0 {
        functionals.iter_mut().flatten().for_each(|f| *f = f.scale(-1.0));
        alpha = -alpha;
        beta = -beta;
    }
    let bound = vertices
        .iter()
        .map(|v| {
            functionals
                .iter()
                .map(|fs| fs.iter().map(|f| f.inner(v)).fold(f64::NEG_INFINITY, f64::max))
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let validated = eta.is_finite() && alpha + beta * (eta + CERTIFICATE_STEP) > bound;
    Certificate { functionals, bound, alpha, beta, validated }
}

/// How the LP value relates to the true robustness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Inner polytope: `eta_tilde <= eta* <= eta_tilde / r`.
    Bracket,
    /// Outer vertex set: `eta_tilde >= eta*` only.
    UpperOnly,
    /// A lower bound on a state's robustness.
    LowerOnly,
}

#[derive(Clone, Debug)]
pub struct RobustnessResult {
    pub eta_tilde: f64,
    pub lower: f64,
    pub upper: f64,
    pub r_used: Option<f64>,
    pub kind: BoundKind,
    pub status: SolveStatus,
    pub raw_status: String,
    pub normalization_residual: f64,
    pub certificate: Option<Certificate>,
    pub wall_time_s: f64,
    pub method: String,
}

impl RobustnessResult {
    /// `eta_tilde > 1`: robust beyond the depolarizing threshold.
    pub fn exceeds_one(&self) -> bool {
        self.eta_tilde > 1.0
    }

    pub fn normalization_ok(&self) -> bool {
        !self.status.is_optimal() || self.normalization_residual <= NORMALIZATION_TOL
    }
}

/// `(eta_tilde, eta_tilde / r)`.
pub fn bracket(eta_tilde: f64, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::param(format!("shrinking factor {r} is outside (0, 1]")));
    }
    Ok((eta_tilde, eta_tilde / r))
}

pub(crate) fn package(sol: LinearSolution, polytope: &StatePolytope, method: &str) -> Result<RobustnessResult> {
    if sol.status == SolveStatus::Infeasible {
        return Err(Error::Infeasible(format!(
            "{method}: no decomposition over the polytope '{}' exists (does it contain the maximally mixed state in its interior?)",
            polytope.provenance()
        )));
    }
    let r = polytope.shrinking_factor();
    let eta = sol.eta;
    let (kind, lower, upper) = match polytope.kind() {
        PolytopeKind::Inner => {
            let upper = match r {
                Some(r) => bracket(eta, r)?.1,
                None => f64::INFINITY,
            };
            (BoundKind::Bracket, eta, upper)
        }
        PolytopeKind::Outer => (BoundKind::UpperOnly, r.map_or(0.0, |r| eta * r), eta),
    };
    Ok(RobustnessResult {
        eta_tilde: eta,
        lower,
        upper,
        r_used: r,
        kind,
        status: sol.status,
        raw_status: sol.raw_status,
        normalization_residual: sol.normalization_residual,
        certificate: sol.certificate,
        wall_time_s: sol.wall_time_s,
        method: method.into(),
    })
}

/// `Tr(s) 1/d` for each element.
pub fn white_noise(family: &[Vec<HermitianOperator>]) -> Vec<Vec<HermitianOperator>> {
    family.iter().map(|row| row.iter().map(|s| s.depolarized(0.0)).collect()).collect()
}

/// Polytope LP for an assemblage mixed with white noise `Tr(s_{a|x}) 1/d`.
pub fn approx_robustness(a: &Assemblage, p: &StatePolytope, opts: &LpOptions) -> Result<RobustnessResult> {
    if a.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: p.dim() });
    }
    let noise = white_noise(a.elements());
    let sol = solve_visibility_lp(a.elements(), &noise, p.vertices(), opts)?;
    package(sol, p, "lp-polytope")
}

/// The same LP on the assemblage `M^T / d`.
pub fn measurement_robustness(m: &MeasurementSet, p: &StatePolytope, opts: &LpOptions) -> Result<RobustnessResult> {
    approx_robustness(&assemblage_from_measurements(m), p, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{dichotomic_from_axes, fibonacci_qubit};
    use crate::polytope::{analyze, outer_from_inner, rational_pure_states, FacetOptions};

    fn octa() -> StatePolytope {
        analyze(&rational_pure_states(2, 2).unwrap(), &FacetOptions::default()).unwrap().0
    }

    #[test]
    fn sigma_z_on_octahedron_is_one() {
        let m = dichotomic_from_axes(&[[0.0, 0.0, 1.0]]).unwrap();
        let r = measurement_robustness(&m, &octa(), &LpOptions::default()).unwrap();
        assert!((r.eta_tilde - 1.0).abs() < 1e-7, "{}", r.eta_tilde);
        assert!(r.normalization_ok());
    }

    #[test]
    fn three_mubs_bracket_and_certificate() {
        let m = dichotomic_from_axes(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let r = measurement_robustness(&m, &octa(), &LpOptions::default()).unwrap();
        let exact = 1.0 / 3f64.sqrt();
        assert!(r.lower <= exact + 1e-7 && r.upper >= exact - 1e-7, "{r:?}");
        let cert = r.certificate.unwrap();
        assert!(cert.validated);
        assert!((cert.beta - 1.0).abs() < 1e-6);
    }

    #[test]
    fn outer_set_scales_by_inverse_r() {
        let p = octa();
        let m = fibonacci_qubit(5).unwrap();
        let inner = measurement_robustness(&m, &p, &LpOptions::default()).unwrap();
        let outer = measurement_robustness(&m, &outer_from_inner(&p).unwrap(), &LpOptions::default()).unwrap();
        let r = p.shrinking_factor().unwrap();
        assert!((outer.eta_tilde - inner.eta_tilde / r).abs() < 1e-8);
        assert_eq!(outer.kind, BoundKind::UpperOnly);
    }

    #[test]
    fn bracket_arithmetic() {
        assert_eq!(bracket(0.5, 1.0).unwrap(), (0.5, 0.5));
        assert_eq!(bracket(0.25, 0.25).unwrap(), (0.25, 1.0));
        assert!(bracket(0.5, 0.0).is_err());
        assert!(bracket(0.5, 1.5).is_err());
    }
}
