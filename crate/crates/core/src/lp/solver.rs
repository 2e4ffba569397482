//! Thin wrapper around the Clarabel interior-point solver: a triplet builder for
//! `min c.x  s.t.  A x + s = b, s in K` with zero, nonnegative, second-order and
//! PSD-triangle cones.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iter: u32,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol_feas: 1e-9, tol_gap: 1e-9, max_iter: 400, verbose: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// Solved to the solver's reduced accuracy thresholds.
    AlmostOptimal,
    Infeasible,
    Unbounded,
    Failed,
}

impl SolveStatus {
    pub fn is_optimal(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::AlmostOptimal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::AlmostOptimal => "almost-optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Failed => "failed",
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Cone {
    Zero(usize),
    Nonneg(usize),
    Soc(usize),
    Psd(usize),
}

/// Constraint rows are added in cone blocks; row `i` of a block reads `a_i . x + s_i = b_i`.
#[derive(Clone, Debug, Default)]
pub struct ConicProblem {
    n: usize,
    objective: Vec<f64>,
    rows: usize,
    ti: Vec<usize>,
    tj: Vec<usize>,
    tv: Vec<f64>,
    rhs: Vec<f64>,
    cones: Vec<Cone>,
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    /// Dual variables, one per constraint row, in the order rows were added.
    pub z: Vec<f64>,
    pub objective: f64,
    pub iterations: u32,
    pub solve_time: f64,
    pub raw_status: String,
}

pub type SparseRow = Vec<(usize, f64)>;

impl ConicProblem {
    pub fn new(num_vars: usize) -> Self {
        Self { n: num_vars, objective: vec![0.0; num_vars], ..Default::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_nonzeros(&self) -> usize {
        self.tv.len()
    }

    /// Sets the coefficient of `x_j` in the minimized objective.
    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.objective[j] = c;
    }

    fn push_rows(&mut self, rows: &[SparseRow], rhs: &[f64]) -> usize {
        assert_eq!(rows.len(), rhs.len());
        let first = self.rows;
        for (row, &b) in rows.iter().zip(rhs) {
            for &(j, v) in row {
                assert!(j < self.n, "column {j} out of range");
                if v != 0.0 {
                    self.ti.push(self.rows);
                    self.tj.push(j);
                    self.tv.push(v);
                }
            }
            self.rhs.push(b);
            self.rows += 1;
        }
        first
    }

    /// `a_i . x = b_i`. Returns the index of the first row.
    pub fn add_equalities(&mut self, rows: &[SparseRow], rhs: &[f64]) -> usize {
        if rows.is_empty() {
            return self.rows;
        }
        self.cones.push(Cone::Zero(rows.len()));
        self.push_rows(rows, rhs)
    }

    /// `x_j >= 0` for every listed variable.
    pub fn add_nonnegative(&mut self, vars: impl IntoIterator<Item = usize>) -> usize {
        let rows: Vec<SparseRow> = vars.into_iter().map(|j| vec![(j, -1.0)]).collect();
        if rows.is_empty() {
            return self.rows;
        }
        let rhs = vec![0.0; rows.len()];
        self.cones.push(Cone::Nonneg(rows.len()));
        self.push_rows(&rows, &rhs)
    }

    /// `(x_{v0}, ..., x_{vn})` in the second-order cone `x_{v0} >= |(x_{v1}, ...)|`.
    pub fn add_second_order(&mut self, vars: &[usize]) -> usize {
        let rows: Vec<SparseRow> = vars.iter().map(|&j| vec![(j, -1.0)]).collect();
        let rhs = vec![0.0; rows.len()];
        self.cones.push(Cone::Soc(rows.len()));
        self.push_rows(&rows, &rhs)
    }

    /// `svec(S) = -rows . x` must lie in the PSD-triangle cone of `n x n` matrices
    /// (upper triangle by columns, off-diagonal entries scaled by `sqrt 2`).
    pub fn add_psd_triangle(&mut self, n: usize, rows: &[SparseRow]) -> usize {
        assert_eq!(rows.len(), n * (n + 1) / 2);
        let rhs = vec![0.0; rows.len()];
        self.cones.push(Cone::Psd(n));
        self.push_rows(rows, &rhs)
    }

    pub fn solve(&self, opts: &SolverOptions) -> Result<ConicSolution> {
        let p = CscMatrix::<f64>::zeros((self.n, self.n));
        let a = CscMatrix::new_from_triplets(self.rows, self.n, self.ti.clone(), self.tj.clone(), self.tv.clone());
        let cones: Vec<SupportedConeT<f64>> = self
            .cones
            .iter()
            .map(|c| match *c {
                Cone::Zero(k) => Ok(SupportedConeT::ZeroConeT(k)),
                Cone::Nonneg(k) => Ok(SupportedConeT::NonnegativeConeT(k)),
                Cone::Soc(k) => Ok(SupportedConeT::SecondOrderConeT(k)),
                Cone::Psd(k) => psd_cone(k),
            })
            .collect::<Result<_>>()?;
        let settings = DefaultSettingsBuilder::default()
            .verbose(opts.verbose)
            .max_iter(opts.max_iter)
            .tol_feas(opts.tol_feas)
            .tol_gap_abs(opts.tol_gap)
            .tol_gap_rel(opts.tol_gap)
            .presolve_enable(false)
            .build()
            .map_err(|e| Error::Solver(format!("settings: {e}")))?;
        let mut solver = DefaultSolver::new(&p, &self.objective, &a, &self.rhs, &cones, settings)
            .map_err(|e| Error::Solver(format!("setup: {e}")))?;
        solver.solve();
        let sol = &solver.solution;
        let status = match sol.status {
            SolverStatus::Solved => SolveStatus::Optimal,
            SolverStatus::AlmostSolved => SolveStatus::AlmostOptimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
            _ => SolveStatus::Failed,
        };
        Ok(ConicSolution {
            status,
            x: sol.x.clone(),
            z: sol.z.clone(),
            objective: sol.obj_val,
            iterations: sol.iterations,
            solve_time: sol.solve_time,
            raw_status: format!("{:?}", sol.status),
        })
    }
}

#[cfg(feature = "sdp")]
fn psd_cone(k: usize) -> Result<SupportedConeT<f64>> {
    Ok(SupportedConeT::PSDTriangleConeT(k))
}

#[cfg(not(feature = "sdp"))]
fn psd_cone(_k: usize) -> Result<SupportedConeT<f64>> {
    Err(Error::Solver("PSD cones need the `sdp` feature".into()))
}

/// Whether PSD cones are available in this build.
pub const fn psd_supported() -> bool {
    cfg!(feature = "sdp")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // max x + y s.t. x + 2y = 4, x, y >= 0, x <= 3 via slack z.
        let mut p = ConicProblem::new(3);
        p.set_cost(0, -1.0);
        p.set_cost(1, -1.0);
        p.add_equalities(&[vec![(0, 1.0), (1, 2.0)], vec![(0, 1.0), (2, 1.0)]], &[4.0, 3.0]);
        p.add_nonnegative(0..3);
        let s = p.solve(&SolverOptions::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-7 && (s.x[1] - 0.5).abs() < 1e-7);
        assert!((s.objective + 3.5).abs() < 1e-7);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = ConicProblem::new(1);
        p.add_equalities(&[vec![(0, 1.0)]], &[-1.0]);
        p.add_nonnegative([0]);
        assert_eq!(p.solve(&SolverOptions::default()).unwrap().status, SolveStatus::Infeasible);

        let mut q = ConicProblem::new(1);
        q.set_cost(0, -1.0);
        q.add_nonnegative([0]);
        assert_eq!(q.solve(&SolverOptions::default()).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn second_order_cone() {
        // min t s.t. (t, 3, 4) in SOC.
        let mut p = ConicProblem::new(3);
        p.set_cost(0, 1.0);
        p.add_equalities(&[vec![(1, 1.0)], vec![(2, 1.0)]], &[3.0, 4.0]);
        p.add_second_order(&[0, 1, 2]);
        let s = p.solve(&SolverOptions::default()).unwrap();
        assert!((s.objective - 5.0).abs() < 1e-7);
    }

    #[cfg(feature = "sdp")]
    #[test]
    fn psd_triangle_cone() {
        // min X_02 over 3x3 PSD X with unit diagonal and X_01 = 1; optimum -1.
        let mut p = ConicProblem::new(6);
        p.set_cost(3, 1.0);
        let s2 = std::f64::consts::SQRT_2;
        p.add_equalities(
            &[vec![(0, 1.0)], vec![(2, 1.0)], vec![(5, 1.0)], vec![(1, 1.0)]],
            &[1.0, 1.0, 1.0, 1.0],
        );
        let rows: Vec<SparseRow> = (0..6)
            .map(|i| vec![(i, if matches!(i, 1 | 3 | 4) { -s2 } else { -1.0 })])
            .collect();
        p.add_psd_triangle(3, &rows);
        let s = p.solve(&SolverOptions::default()).unwrap();
        assert!(s.status.is_optimal());
        assert!((s.objective + 1.0).abs() < 1e-6, "{}", s.objective);
    }
}
