use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quantum::hermitian::{HermitianOperator, C64};
use crate::quantum::measurement::{check_shape, MeasurementSet};
use crate::quantum::validate::{ValidationReport, DEFAULT_TOL};

/// Conditional states `sigma_{a|x}` on the steered side, `elements[x][a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Assemblage {
    dim: usize,
    outcomes: usize,
    elements: Vec<Vec<HermitianOperator>>,
    reduced: HermitianOperator,
}

impl Assemblage {
    /// Validates positivity, no-signalling and unit trace of the reduced state at `1e-10`.
    pub fn new(elements: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        let a = Self::new_unchecked(elements)?;
        match a.validate(DEFAULT_TOL).failure() {
            None => Ok(a),
            Some(msg) => Err(Error::InvalidAssemblage(msg)),
        }
    }

    /// Shape checks only. The reduced state is taken from the first setting.
    pub fn new_unchecked(elements: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        let (dim, outcomes) = check_shape(&elements).map_err(Error::InvalidAssemblage)?;
        let reduced = elements[0].iter().fold(HermitianOperator::zeros(dim), |acc, s| &acc + s);
        Ok(Self { dim, outcomes, elements, reduced })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn settings(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<HermitianOperator>] {
        &self.elements
    }

    pub fn element(&self, x: usize, a: usize) -> &HermitianOperator {
        &self.elements[x][a]
    }

    pub fn reduced(&self) -> &HermitianOperator {
        &self.reduced
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_assemblage(&self.elements, tol)
    }
}

pub fn validate_assemblage(elements: &[Vec<HermitianOperator>], tol: f64) -> ValidationReport {
    let mut report = ValidationReport::new("assemblage");
    if check_shape(elements).is_err() {
        report.push("shape", 1.0, 0.0);
        return report;
    }
    let d = elements[0][0].dim();
    let positivity = elements
        .iter()
        .flatten()
        .map(|s| (-s.min_eigenvalue()).max(0.0))
        .fold(0.0, f64::max);
    let marginals: Vec<HermitianOperator> = elements
        .iter()
        .map(|row| row.iter().fold(HermitianOperator::zeros(d), |acc, s| &acc + s))
        .collect();
    let mut signalling: f64 = 0.0;
    for (i, a) in marginals.iter().enumerate() {
        for b in &marginals[i + 1..] {
            signalling = signalling.max((a - b).op_norm());
        }
    }
    report.push("positivity", positivity, tol);
    report.push("no-signalling", signalling, tol);
    report.push("trace", (marginals[0].trace() - 1.0).abs(), tol);
    report
}

/// A density matrix on `C^{d_A} (x) C^{d_B}`, with the `A` index most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    matrix: HermitianOperator,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, matrix: HermitianOperator) -> Result<Self> {
        let state = Self::new_unchecked(dim_a, dim_b, matrix)?;
        match state.validate(DEFAULT_TOL).failure() {
            None => Ok(state),
            Some(msg) => Err(Error::InvalidState(msg)),
        }
    }

    pub fn new_unchecked(dim_a: usize, dim_b: usize, matrix: HermitianOperator) -> Result<Self> {
        if matrix.dim() != dim_a * dim_b {
            return Err(Error::DimensionMismatch { expected: dim_a * dim_b, found: matrix.dim() });
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    /// `|phi+_d> = sum_i |ii> / sqrt(d)`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = DVector::<C64>::zeros(d * d);
        for i in 0..d {
            v[i * d + i] = C64::new(1.0, 0.0);
        }
        Self { dim_a: d, dim_b: d, matrix: HermitianOperator::projector(&v) }
    }

    pub fn product(rho_a: &HermitianOperator, rho_b: &HermitianOperator) -> Result<Self> {
        Self::new(rho_a.dim(), rho_b.dim(), rho_a.kron(rho_b))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::new("bipartite-state");
        report.push("positivity", (-self.matrix.min_eigenvalue()).max(0.0), tol);
        report.push("trace", (self.matrix.trace() - 1.0).abs(), tol);
        report
    }

    /// `Tr_A(rho)`.
    pub fn reduced_b(&self) -> HermitianOperator {
        contract_a(&self.matrix, &HermitianOperator::identity(self.dim_a), self.dim_a, self.dim_b)
    }

    /// `Tr_B(rho)`.
    pub fn reduced_a(&self) -> HermitianOperator {
        let (da, db) = (self.dim_a, self.dim_b);
        let m = self.matrix.matrix();
        let mut out = DMatrix::<C64>::zeros(da, da);
        for i in 0..da {
            for j in 0..da {
                for b in 0..db {
                    out[(i, j)] += m[(i * db + b, j * db + b)];
                }
            }
        }
        HermitianOperator::hermitian_part(out)
    }

    /// Conditional operator `Tr_A((M (x) 1) rho)` for an arbitrary Hermitian `M` on `A`.
    pub fn steer(&self, m: &HermitianOperator) -> Result<HermitianOperator> {
        if m.dim() != self.dim_a {
            return Err(Error::DimensionMismatch { expected: self.dim_a, found: m.dim() });
        }
        Ok(contract_a(&self.matrix, m, self.dim_a, self.dim_b))
    }
}

/// `sigma[b, b'] = sum_{i,j} M[i, j] rho[(j, b), (i, b')]`, by explicit index contraction.
fn contract_a(rho: &HermitianOperator, m: &HermitianOperator, da: usize, db: usize) -> HermitianOperator {
    let r = rho.matrix();
    let mm = m.matrix();
    let mut out = DMatrix::<C64>::zeros(db, db);
    for b in 0..db {
        for bp in 0..db {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..da {
                for j in 0..da {
                    acc += mm[(i, j)] * r[(j * db + b, i * db + bp)];
                }
            }
            out[(b, bp)] = acc;
        }
    }
    HermitianOperator::hermitian_part(out)
}

/// `sigma_{a|x} = M_{a|x}^T / d`, the assemblage obtained on a maximally entangled state.
pub fn assemblage_from_measurements(m: &MeasurementSet) -> Assemblage {
    let d = m.dim() as f64;
    let elements: Vec<Vec<HermitianOperator>> = m
        .elements()
        .iter()
        .map(|povm| povm.iter().map(|e| e.transpose().scale(1.0 / d)).collect())
        .collect();
    Assemblage::new_unchecked(elements).expect("shape inherited from a valid measurement set")
}

/// `sigma_{a|x} = Tr_A((M_{a|x} (x) 1) rho_AB)`.
pub fn assemblage_from_state(rho: &BipartiteState, m: &MeasurementSet) -> Result<Assemblage> {
    let elements = steer_all(rho, m.elements())?;
    Assemblage::new_unchecked(elements)
}

/// Conditional operators for an arbitrary operator family (e.g. quasi-measurements).
pub fn steer_all(rho: &BipartiteState, family: &[Vec<HermitianOperator>]) -> Result<Vec<Vec<HermitianOperator>>> {
    family
        .iter()
        .map(|povm| povm.iter().map(|e| rho.steer(e)).collect::<Result<Vec<_>>>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit(rows: [[(f64, f64); 2]; 2]) -> HermitianOperator {
        let mut m = DMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = C64::new(rows[i][j].0, rows[i][j].1);
            }
        }
        HermitianOperator::new(m).unwrap()
    }

    fn sigma_y_povm() -> MeasurementSet {
        let plus = qubit([[(0.5, 0.0), (0.0, -0.5)], [(0.0, 0.5), (0.5, 0.0)]]);
        let minus = qubit([[(0.5, 0.0), (0.0, 0.5)], [(0.0, -0.5), (0.5, 0.0)]]);
        MeasurementSet::new(vec![vec![plus, minus]]).unwrap()
    }

    #[test]
    fn sigma_z_assemblage_is_scaled_projectors() {
        let up = qubit([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, 0.0)]]);
        let down = qubit([[(0.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]]);
        let m = MeasurementSet::new(vec![vec![up.clone(), down.clone()]]).unwrap();
        let a = assemblage_from_measurements(&m);
        assert!(a.element(0, 0).distance(&up.scale(0.5)) < 1e-15);
        assert!(a.element(0, 1).distance(&down.scale(0.5)) < 1e-15);
        assert!(a.validate(DEFAULT_TOL).passed);
    }

    #[test]
    fn sigma_y_assemblage_flips_off_diagonal_sign() {
        let m = sigma_y_povm();
        let a = assemblage_from_measurements(&m);
        let s = a.element(0, 0).matrix();
        assert!((s[(0, 1)] - C64::new(0.0, 0.25)).norm() < 1e-15);
        assert!((s[(1, 0)] - C64::new(0.0, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn maximally_entangled_state_reproduces_transpose_rule() {
        let m = sigma_y_povm();
        let phi = BipartiteState::maximally_entangled(2);
        let from_state = assemblage_from_state(&phi, &m).unwrap();
        let direct = assemblage_from_measurements(&m);
        for (r1, r2) in from_state.elements().iter().zip(direct.elements()) {
            for (s1, s2) in r1.iter().zip(r2) {
                assert!(s1.distance(s2) < 1e-12);
            }
        }
    }

    #[test]
    fn product_state_gives_weighted_reduced_state() {
        let rho_a = qubit([[(0.7, 0.0), (0.1, 0.2)], [(0.1, -0.2), (0.3, 0.0)]]);
        let rho_b = qubit([[(0.4, 0.0), (0.0, -0.1)], [(0.0, 0.1), (0.6, 0.0)]]);
        let state = BipartiteState::product(&rho_a, &rho_b).unwrap();
        let m = sigma_y_povm();
        let a = assemblage_from_state(&state, &m).unwrap();
        for x in 0..m.count() {
            for k in 0..m.outcomes() {
                let w = m.element(x, k).inner(&rho_a);
                assert!(a.element(x, k).distance(&rho_b.scale(w)) < 1e-14);
            }
        }
        assert!(state.reduced_b().distance(&rho_b) < 1e-15);
        assert!(state.reduced_a().distance(&rho_a) < 1e-15);
    }

    #[test]
    fn signalling_gap_is_operator_norm_of_marginal_difference() {
        let r0 = qubit([[(0.5, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.5, 0.0)]]);
        let r1 = qubit([[(0.8, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.2, 0.0)]]);
        let elements = vec![
            vec![r0.scale(0.5), r0.scale(0.5)],
            vec![r1.scale(0.25), r1.scale(0.75)],
        ];
        let report = validate_assemblage(&elements, DEFAULT_TOL);
        assert!(!report.passed);
        assert!((report.violation("no-signalling").unwrap() - (&r0 - &r1).op_norm()).abs() < 1e-15);
        assert!((report.violation("no-signalling").unwrap() - 0.3).abs() < 1e-12);
        assert!(Assemblage::new(elements).is_err());
    }

    #[test]
    fn steer_rejects_wrong_dimension() {
        let phi = BipartiteState::maximally_entangled(2);
        assert!(phi.steer(&HermitianOperator::identity(3)).is_err());
    }
}
