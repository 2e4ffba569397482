//! Exact robustness by conic programming over all deterministic strategies:
//!
//! `max eta` s.t. `eta A_{a|x} + (1 - eta) Tr(A_{a|x}) 1/d = sum_l D(a|x,l) G_l`, `G_l >= 0`.
//!
//! For qubits each `G_l` is a second-order cone on its Pauli coordinates; otherwise
//! its real `2d x 2d` embedding is constrained to the PSD cone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::robustness::{elapsed, kept_blocks, now, white_noise};
use crate::lp::solver::{psd_supported, ConicProblem, SolveStatus, SolverOptions, SparseRow};
use crate::quantum::{assemblage_from_measurements, basis_element, Assemblage, HermitianOperator, MeasurementSet};

/// Default cap on the number `k^m` of deterministic strategies.
pub const STRATEGY_CAP: u128 = 1 << 20;

/// A deterministic response function: outcome `outcomes[x]` for setting `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub index: usize,
    pub outcomes: Vec<usize>,
}

impl DeterministicStrategy {
    /// `D(a|x)`.
    pub fn response(&self, a: usize, x: usize) -> bool {
        self.outcomes[x] == a
    }
}

pub fn strategy_count(m: usize, k: usize) -> u128 {
    (k as u128).checked_pow(m as u32).unwrap_or(u128::MAX)
}

fn check_cap(m: usize, k: usize, cap: u128) -> Result<usize> {
    let count = strategy_count(m, k);
    if count > cap {
        return Err(Error::CapExceeded { what: "deterministic strategy count (use the polytope LP instead)", value: count, cap });
    }
    Ok(count as usize)
}

/// Outcome of setting `x` under strategy `l`, mixed radix with setting 0 most significant.
fn digit(l: usize, x: usize, m: usize, k: usize) -> usize {
    (l / k.pow((m - 1 - x) as u32)) % k
}

/// All `k^m` strategies in mixed-radix order.
pub fn enumerate_strategies(m: usize, k: usize, cap: u128) -> Result<Vec<DeterministicStrategy>> {
    if m == 0 || k == 0 {
        return Err(Error::param("need m >= 1 and k >= 1"));
    }
    let count = check_cap(m, k, cap)?;
    Ok((0..count)
        .map(|l| DeterministicStrategy { index: l, outcomes: (0..m).map(|x| digit(l, x, m, k)).collect() })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    pub solver: SolverOptions,
    pub cap: u128,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), cap: STRATEGY_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct ExactResult {
    pub eta: f64,
    pub status: SolveStatus,
    pub raw_status: String,
    pub strategies: usize,
    pub wall_time_s: f64,
    pub method: &'static str,
}

pub fn exact_robustness_measurements(m: &MeasurementSet, opts: &SdpOptions) -> Result<ExactResult> {
    exact_robustness_family(m.elements(), opts)
}

pub fn exact_robustness_assemblage(a: &Assemblage, opts: &SdpOptions) -> Result<ExactResult> {
    exact_robustness_family(a.elements(), opts)
}

/// The oracle on `M^T/d`, equal to the measurement value.
pub fn exact_robustness_via_assemblage(m: &MeasurementSet, opts: &SdpOptions) -> Result<ExactResult> {
    exact_robustness_assemblage(&assemblage_from_measurements(m), opts)
}

/// svec (upper triangle by columns, off-diagonals times `sqrt 2`) of the real
/// embedding `[[Re B, -Im B], [Im B, Re B]]`.
fn embedded_svec(b: &HermitianOperator) -> Vec<f64> {
    let d = b.dim();
    let n = 2 * d;
    let mat = b.matrix();
    let entry = |i: usize, j: usize| -> f64 {
        match (i < d, j < d) {
            (true, true) => mat[(i, j)].re,
            (true, false) => -mat[(i, j - d)].im,
            (false, true) => mat[(i - d, j)].im,
            (false, false) => mat[(i - d, j - d)].re,
        }
    };
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for i in 0..=j {
            let s = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
            out.push(s * entry(i, j));
        }
    }
    out
}

fn exact_robustness_family(family: &[Vec<HermitianOperator>], opts: &SdpOptions) -> Result<ExactResult> {
    let start = now();
    let m = family.len();
    let k = family.first().map_or(0, |r| r.len());
    if m == 0 || k == 0 {
        return Err(Error::param("empty measurement family"));
    }
    let d = family[0][0].dim();
    if d > 2 && !psd_supported() {
        return Err(Error::Solver("the exact oracle for d >= 3 needs the `sdp` feature".into()));
    }
    let count = check_cap(m, k, opts.cap)?;
    let d2 = d * d;
    let col = |l: usize, c: usize| 1 + l * d2 + c;
    let mut lp = ConicProblem::new(1 + count * d2);
    lp.set_cost(0, -1.0);
    let noise = white_noise(family);

    let mut rows: Vec<SparseRow> = Vec::new();
    let mut rhs = Vec::new();
    for (x, a) in kept_blocks(m, k) {
        let sc = family[x][a].coords();
        let nc = noise[x][a].coords();
        let members: Vec<usize> = (0..count).filter(|&l| digit(l, x, m, k) == a).collect();
        for c in 0..d2 {
            let mut row: SparseRow = Vec::with_capacity(members.len() + 1);
            let diff = sc[c] - nc[c];
            if diff != 0.0 {
                row.push((0, diff));
            }
            row.extend(members.iter().map(|&l| (col(l, c), -1.0)));
            rows.push(row);
            rhs.push(-nc[c]);
        }
    }
    lp.add_equalities(&rows, &rhs);
    drop(rows);

    if d == 2 {
        for l in 0..count {
            let vars: Vec<usize> = (0..4).map(|c| col(l, c)).collect();
            lp.add_second_order(&vars);
        }
    } else {
        let embeds: Vec<Vec<f64>> = (0..d2).map(|c| embedded_svec(&basis_element(d, c))).collect();
        let tri = embeds[0].len();
        for l in 0..count {
            let cone_rows: Vec<SparseRow> = (0..tri)
                .map(|e| (0..d2).filter(|&c| embeds[c][e] != 0.0).map(|c| (col(l, c), -embeds[c][e])).collect())
                .collect();
            lp.add_psd_triangle(2 * d, &cone_rows);
        }
    }

    let sol = lp.solve(&opts.solver)?;
    let eta = match sol.status {
        s if s.is_optimal() => sol.x[0],
        SolveStatus::Unbounded => f64::INFINITY,
        SolveStatus::Infeasible => return Err(Error::Infeasible("exact robustness program".into())),
        _ => return Err(Error::Solver(format!("exact robustness program ended with {}", sol.raw_status))),
    };
    Ok(ExactResult {
        eta,
        status: sol.status,
        raw_status: sol.raw_status,
        strategies: count,
        wall_time_s: elapsed(start),
        method: "sdp-exact",
    })
}
