//! Hermitian operators and their real coordinates in the generalized Gell-Mann basis.
//!
//! The basis is orthonormal under the Hilbert-Schmidt inner product:
//! index 0 is `1/sqrt(d)`, followed by one symmetric and one antisymmetric
//! element per off-diagonal pair `(j, k)`, `j < k` in lexicographic order, and
//! finally the `d - 1` diagonal elements. For `d = 2` the traceless coordinates
//! are the Bloch vector divided by `sqrt(2)`, in `(x, y, z)` order.

use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entry-wise tolerance for conjugate symmetry.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<C64>,
}

impl HermitianOperator {
    /// Wraps a square matrix, rejecting it when `|A_ij - conj(A_ji)|` exceeds
    /// [`HERMITICITY_TOL`] (relative to the largest entry when that exceeds one).
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        let dev = hermiticity_deviation(&mat);
        let scale = mat.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if dev > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::hermitian_part(mat))
    }

    /// Takes `(A + A^dagger) / 2` without checking how far `A` was from Hermitian.
    pub fn hermitian_part(mat: DMatrix<C64>) -> Self {
        let adj = mat.adjoint();
        Self { mat: (mat + adj).scale(0.5) }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut mat = DMatrix::zeros(d, d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                mat[(i, j)] = C64::new(v, 0.0);
            }
        }
        Self::new(mat)
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: DMatrix::zeros(d, d) }
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: DMatrix::identity(d, d) }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::identity(d).scale(1.0 / d as f64)
    }

    /// `|v><v| / <v|v>`.
    pub fn projector(v: &DVector<C64>) -> Self {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let mat = (v * v.adjoint()).unscale(norm2);
        Self::hermitian_part(mat)
    }

    /// Rebuilds an operator from its `d^2` basis coordinates.
    pub fn from_coords(d: usize, coords: &[f64]) -> Result<Self> {
        if coords.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: coords.len() });
        }
        let mut mat = DMatrix::<C64>::zeros(d, d);
        let id = coords[0] / (d as f64).sqrt();
        for j in 0..d {
            mat[(j, j)] = C64::new(id, 0.0);
        }
        let mut idx = 1;
        for j in 0..d {
            for k in j + 1..d {
                let s = coords[idx] / SQRT_2;
                let a = coords[idx + 1] / SQRT_2;
                mat[(j, k)] = C64::new(s, -a);
                mat[(k, j)] = C64::new(s, a);
                idx += 2;
            }
        }
        for l in 1..d {
            let c = coords[idx] / ((l * (l + 1)) as f64).sqrt();
            for j in 0..l {
                mat[(j, j)].re += c;
            }
            mat[(l, l)].re -= l as f64 * c;
            idx += 1;
        }
        Ok(Self { mat })
    }

    pub fn coords(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        out.push(self.trace() / (d as f64).sqrt());
        for j in 0..d {
            for k in j + 1..d {
                let z = self.mat[(j, k)];
                out.push(SQRT_2 * z.re);
                out.push(-SQRT_2 * z.im);
            }
        }
        for l in 1..d {
            let head: f64 = (0..l).map(|j| self.mat[(j, j)].re).sum();
            out.push((head - l as f64 * self.mat[(l, l)].re) / ((l * (l + 1)) as f64).sqrt());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: self.mat.scale(s) }
    }

    /// `Tr(A B)`, real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> f64 {
        self.mat.iter().zip(other.mat.transpose().iter()).map(|(a, b)| (a * b).re).sum()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = SymmetricEigen::new(self.mat.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_columns(
            &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
        );
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.mat.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("empty operator")
    }

    /// Operator norm (largest absolute eigenvalue).
    pub fn op_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Orthonormal eigenbasis of the eigenspace whose eigenvalues lie within `tol` of the maximum.
    pub fn top_eigenvectors(&self, tol: f64) -> Vec<DVector<C64>> {
        let (values, vectors) = self.eigh();
        let top = *values.last().expect("empty operator");
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= top - tol)
            .map(|(i, _)| vectors.column(i).into_owned())
            .collect()
    }

    /// `eta * A + (1 - eta) * Tr(A) * 1/d`.
    pub fn depolarized(&self, eta: f64) -> Self {
        let d = self.dim();
        let shift = (1.0 - eta) * self.trace() / d as f64;
        let mut mat = self.mat.scale(eta);
        for j in 0..d {
            mat[(j, j)].re += shift;
        }
        Self { mat }
    }

    /// `A (x) B`.
    pub fn kron(&self, other: &Self) -> Self {
        Self { mat: self.mat.kronecker(&other.mat) }
    }
}

/// Depolarizing map with visibility `eta`; any real `eta` is accepted.
pub fn depolarize(a: &HermitianOperator, eta: f64, d: usize) -> Result<HermitianOperator> {
    if a.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
    }
    Ok(a.depolarized(eta))
}

/// The `j`-th element of the orthonormal Hermitian basis in dimension `d`.
pub fn basis_element(d: usize, j: usize) -> HermitianOperator {
    let mut coords = vec![0.0; d * d];
    coords[j] = 1.0;
    HermitianOperator::from_coords(d, &coords).expect("length matches")
}

pub(crate) fn hermiticity_deviation(mat: &DMatrix<C64>) -> f64 {
    let n = mat.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    dev
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { mat: &self.mat - &rhs.mat }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basis_is_orthonormal() {
        for d in 2..=4 {
            for i in 0..d * d {
                let bi = basis_element(d, i);
                for j in 0..d * d {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((bi.inner(&basis_element(d, j)) - expect).abs() < 1e-14, "d={d} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn qubit_coords_are_scaled_bloch_vector() {
        // rho = (1 + 0.3 x + 0.4 y + 0.5 z) / 2
        let rho = HermitianOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.75, 0.0), c(0.15, -0.2), c(0.15, 0.2), c(0.25, 0.0)],
        ))
        .unwrap();
        let k = rho.coords();
        let s = SQRT_2;
        for (got, want) in k.iter().zip([1.0 / s, 0.3 / s, 0.4 / s, 0.5 / s]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn depolarize_examples() {
        let zero = HermitianOperator::from_real(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(depolarize(&zero, 1.0, 2).unwrap(), zero);
        let mixed = depolarize(&zero, 0.0, 2).unwrap();
        assert!(mixed.distance(&HermitianOperator::maximally_mixed(2)) < 1e-15);
        let half = depolarize(&zero, 0.5, 2).unwrap();
        let want = HermitianOperator::from_real(&[vec![0.75, 0.0], vec![0.0, 0.25]]).unwrap();
        assert!(half.distance(&want) < 1e-15);
        assert!(matches!(depolarize(&zero, 0.5, 3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn top_eigenvectors_of_degenerate_maximum() {
        let f = HermitianOperator::from_real(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, -2.0],
        ])
        .unwrap();
        let v = f.top_eigenvectors(1e-9);
        assert_eq!(v.len(), 2);
        for x in &v {
            assert!(x[2].norm() < 1e-12);
        }
    }

    fn arb_hermitian(d: usize) -> impl Strategy<Value = HermitianOperator> {
        proptest::collection::vec(-1.0..1.0f64, d * d)
            .prop_map(move |c| HermitianOperator::from_coords(d, &c).unwrap())
    }

    proptest! {
        #[test]
        fn coords_round_trip(a in (2usize..=4).prop_flat_map(arb_hermitian)) {
            let back = HermitianOperator::from_coords(a.dim(), &a.coords()).unwrap();
            prop_assert!(back.distance(&a) < 1e-12);
            prop_assert!(hermiticity_deviation(a.matrix()) < 1e-12);
        }

        #[test]
        fn depolarization_composes(a in (2usize..=3).prop_flat_map(arb_hermitian), eta in -2.0..2.0f64, xi in -2.0..2.0f64) {
            let lhs = a.depolarized(xi).depolarized(eta);
            let rhs = a.depolarized(eta * xi);
            prop_assert!(lhs.distance(&rhs) < 1e-12);
            prop_assert!((a.depolarized(eta).trace() - a.trace()).abs() < 1e-12);
        }

        #[test]
        fn transpose_commutes_with_depolarization(a in (2usize..=3).prop_flat_map(arb_hermitian), eta in -2.0..2.0f64) {
            prop_assert!(a.transpose().depolarized(eta).distance(&a.depolarized(eta).transpose()) < 1e-12);
        }
    }
}
