use crate::error::{Error, Result};
use crate::quantum::hermitian::HermitianOperator;
use crate::quantum::validate::{ValidationReport, DEFAULT_TOL};

/// `m` POVMs with `k` outcomes each, stored as `elements[x][a] = M_{a|x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    dim: usize,
    outcomes: usize,
    elements: Vec<Vec<HermitianOperator>>,
}

impl MeasurementSet {
    /// Builds a measurement set, rejecting it if any element has an eigenvalue
    /// below `-1e-10` or any POVM misses the identity by more than `1e-10`.
    pub fn new(elements: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        Self::with_tolerance(elements, DEFAULT_TOL)
    }

    pub fn with_tolerance(elements: Vec<Vec<HermitianOperator>>, tol: f64) -> Result<Self> {
        let set = Self::new_unchecked(elements)?;
        let report = set.validate(tol);
        match report.failure() {
            None => Ok(set),
            Some(msg) => Err(Error::InvalidMeasurement(msg)),
        }
    }

    /// Only checks that shapes agree; positivity and completeness are not enforced.
    pub fn new_unchecked(elements: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        let (dim, outcomes) = check_shape(&elements).map_err(Error::InvalidMeasurement)?;
        Ok(Self { dim, outcomes, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// Number of measurements `m`.
    pub fn count(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, x: usize, a: usize) -> &HermitianOperator {
        &self.elements[x][a]
    }

    pub fn elements(&self) -> &[Vec<HermitianOperator>] {
        &self.elements
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_measurements(&self.elements, tol)
    }

    /// Every element is a projector (`M^2 = M` within `tol`).
    pub fn is_projective(&self, tol: f64) -> bool {
        self.elements.iter().flatten().all(|m| {
            let sq = m.matrix() * m.matrix();
            (sq - m.matrix()).iter().all(|z| z.norm() <= tol)
        })
    }

    /// Elements mapped through the depolarizing map with visibility `eta`.
    /// For `eta > 1` the result is a set of quasi-measurements and is not validated.
    pub fn depolarized(&self, eta: f64) -> MeasurementSet {
        let elements = self
            .elements
            .iter()
            .map(|povm| povm.iter().map(|m| m.depolarized(eta)).collect())
            .collect();
        MeasurementSet { dim: self.dim, outcomes: self.outcomes, elements }
    }

    /// The same POVMs with outcomes permuted by `perm` and settings by `settings`.
    pub fn relabeled(&self, settings: &[usize], perm: &[usize]) -> MeasurementSet {
        let elements = settings
            .iter()
            .map(|&x| perm.iter().map(|&a| self.elements[x][a].clone()).collect())
            .collect();
        MeasurementSet { dim: self.dim, outcomes: self.outcomes, elements }
    }
}

pub(crate) fn check_shape(elements: &[Vec<HermitianOperator>]) -> std::result::Result<(usize, usize), String> {
    let first = elements.first().ok_or("no measurements")?;
    let k = first.len();
    if k == 0 {
        return Err("measurement with no outcomes".into());
    }
    let d = first[0].dim();
    for (x, povm) in elements.iter().enumerate() {
        if povm.len() != k {
            return Err(format!("setting {x} has {} outcomes, expected {k}", povm.len()));
        }
        if let Some(op) = povm.iter().find(|op| op.dim() != d) {
            return Err(format!("setting {x} has an element of dimension {}, expected {d}", op.dim()));
        }
    }
    Ok((d, k))
}

pub fn validate_measurements(elements: &[Vec<HermitianOperator>], tol: f64) -> ValidationReport {
    let mut report = ValidationReport::new("measurement-set");
    if check_shape(elements).is_err() {
        report.push("shape", 1.0, 0.0);
        return report;
    }
    let d = elements[0][0].dim();
    let positivity = elements
        .iter()
        .flatten()
        .map(|m| (-m.min_eigenvalue()).max(0.0))
        .fold(0.0, f64::max);
    let identity = HermitianOperator::identity(d);
    let completeness = elements
        .iter()
        .map(|povm| {
            let sum = povm.iter().fold(HermitianOperator::zeros(d), |acc, m| &acc + m);
            (&sum - &identity).op_norm()
        })
        .fold(0.0, f64::max);
    report.push("positivity", positivity, tol);
    report.push("completeness", completeness, tol);
    report
}
