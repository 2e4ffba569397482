//! Generators for the measurement families used in the experiments, and the
//! closed-form robustness bound for coplanar qubit measurements.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quantum::{HermitianOperator, MeasurementSet, C64};
use crate::random::{haar_unitary, seeded};

/// Golden-angle increment `pi (sqrt(5) - 1)` of the Fibonacci lattice.
pub fn golden_angle() -> f64 {
    PI * (5f64.sqrt() - 1.0)
}

/// Qubit operator `(t * 1 + n . sigma) / 2`.
pub fn bloch_operator(t: f64, n: [f64; 3]) -> HermitianOperator {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new((t + n[2]) / 2.0, 0.0),
            C64::new(n[0] / 2.0, -n[1] / 2.0),
            C64::new(n[0] / 2.0, n[1] / 2.0),
            C64::new((t - n[2]) / 2.0, 0.0),
        ],
    );
    HermitianOperator::hermitian_part(m)
}

/// Bloch vector `(Tr(rho sigma_x), Tr(rho sigma_y), Tr(rho sigma_z))` of a qubit operator.
pub fn bloch_vector(op: &HermitianOperator) -> [f64; 3] {
    let m = op.matrix();
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)].re - m[(1, 1)].re)]
}

/// Dichotomic projective qubit measurements `{(1 + n.sigma)/2, (1 - n.sigma)/2}`.
pub fn dichotomic_from_axes(axes: &[[f64; 3]]) -> Result<MeasurementSet> {
    let elements = axes
        .iter()
        .map(|&n| vec![bloch_operator(1.0, n), bloch_operator(1.0, [-n[0], -n[1], -n[2]])])
        .collect();
    MeasurementSet::new(elements)
}

/// Bloch axes of the `m`-point Fibonacci-lattice qubit family.
pub fn fibonacci_axes(m: usize) -> Result<Vec<[f64; 3]>> {
    if m < 2 {
        return Err(Error::param(format!("Fibonacci families need m >= 2, got {m}")));
    }
    let phi = golden_angle();
    Ok((0..m)
        .map(|i| {
            let z = 1.0 - i as f64 / (m - 1) as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let ang = i as f64 * phi;
            [r * ang.cos(), r * ang.sin(), z]
        })
        .collect())
}

pub fn fibonacci_qubit(m: usize) -> Result<MeasurementSet> {
    dichotomic_from_axes(&fibonacci_axes(m)?)
}

/// The two orthonormal vectors defining the `x`-th (0-based) qutrit Fibonacci measurement.
pub fn fibonacci_qutrit_vectors(m: usize, x: usize) -> (DVector<C64>, DVector<C64>) {
    let t = x as f64 / (m - 1) as f64;
    let z = 1.0 - t;
    let theta = x as f64 * golden_angle();
    let phase = PI * t;
    let s = (1.0 - z * z).max(0.0).sqrt();
    let psi1 = DVector::from_vec(vec![
        C64::new(s * theta.cos(), 0.0),
        C64::new(s * theta.sin(), 0.0),
        C64::from_polar(z, phase),
    ]);
    let psi2 = DVector::from_vec(vec![
        C64::new(theta.sin(), 0.0),
        C64::new(-theta.cos(), 0.0),
        C64::new(0.0, 0.0),
    ]);
    (psi1, psi2)
}

pub fn fibonacci_qutrit(m: usize) -> Result<MeasurementSet> {
    if m < 2 {
        return Err(Error::param(format!("Fibonacci families need m >= 2, got {m}")));
    }
    let id = HermitianOperator::identity(3);
    let elements = (0..m)
        .map(|x| {
            let (p1, p2) = fibonacci_qutrit_vectors(m, x);
            let m1 = HermitianOperator::projector(&p1);
            let m2 = HermitianOperator::projector(&p2);
            let m3 = &(&id - &m1) - &m2;
            vec![m1, m2, m3]
        })
        .collect();
    MeasurementSet::new(elements)
}

/// Angles of coplanar Bloch axes, reduced modulo `pi`, sorted, deduplicated and
/// rotated so that the first one is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarAngles(Vec<f64>);

impl PlanarAngles {
    /// Angles closer than this (modulo `pi`) are merged.
    pub const MERGE_TOL: f64 = 1e-12;

    pub fn new(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::param("at least one planar angle is required"));
        }
        if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::param(format!("non-finite angle {a}")));
        }
        let mut v: Vec<f64> = angles.iter().map(|a| a.rem_euclid(PI)).collect();
        v.sort_by(f64::total_cmp);
        let base = v[0];
        let mut out: Vec<f64> = Vec::with_capacity(v.len());
        for a in v {
            let rel = a - base;
            if out.last().is_none_or(|&last| rel - last > Self::MERGE_TOL) && PI - rel > Self::MERGE_TOL {
                out.push(rel);
            }
        }
        Ok(Self(out))
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }
}

/// Measurements with Bloch axes `(sin a, 0, cos a)`.
pub fn planar_measurements(angles: &PlanarAngles) -> Result<MeasurementSet> {
    let axes: Vec<[f64; 3]> = angles.angles().iter().map(|a| [a.sin(), 0.0, a.cos()]).collect();
    dichotomic_from_axes(&axes)
}

/// `1 / (sum_{x>=2} sin((a_x - a_{x-1}) / 2) + cos(a_m / 2))`.
pub fn planar_bound(angles: &PlanarAngles) -> f64 {
    let a = angles.angles();
    let gaps: f64 = a.windows(2).map(|w| ((w[1] - w[0]) / 2.0).sin()).sum();
    1.0 / (gaps + (a[a.len() - 1] / 2.0).cos())
}

/// `m` Haar-random orthonormal bases in dimension `d`, as rank-1 projective measurements.
pub fn random_projective(m: usize, d: usize, seed: u64) -> Result<MeasurementSet> {
    if m == 0 || d < 2 {
        return Err(Error::param("random_projective needs m >= 1 and d >= 2"));
    }
    let mut rng = seeded(seed);
    let elements = (0..m)
        .map(|_| {
            let u = haar_unitary(&mut rng, d);
            (0..d).map(|a| HermitianOperator::projector(&u.column(a).into_owned())).collect()
        })
        .collect();
    MeasurementSet::new(elements)
}

/// `m` random rank-1 POVMs with `k` outcomes in dimension `d`, `d <= k <= d^2`.
///
/// Each POVM is `M_a = |v_a><v_a|` where `v_a^dagger` is the `a`-th row of the
/// first `d` columns of a Haar-random `k x k` unitary, so `sum_a M_a = V^dagger V = 1`
/// and `Tr M_a` averages `d / k`. Extremality is not enforced; see [`is_extremal`].
pub fn random_povm(m: usize, d: usize, k: usize, seed: u64) -> Result<MeasurementSet> {
    if m == 0 || d < 2 {
        return Err(Error::param("random_povm needs m >= 1 and d >= 2"));
    }
    if k < d || k > d * d {
        return Err(Error::param(format!("rank-1 POVMs in d={d} need {d} <= k <= {}, got k={k}", d * d)));
    }
    let mut rng = seeded(seed);
    let elements = (0..m)
        .map(|_| {
            let u = haar_unitary(&mut rng, k);
            (0..k)
                .map(|a| {
                    let v = DVector::from_fn(d, |j, _| u[(a, j)].conj());
                    let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                    HermitianOperator::projector(&v).scale(w)
                })
                .collect()
        })
        .collect();
    MeasurementSet::new(elements)
}

/// A POVM with rank-1 elements is extremal iff its elements are linearly independent.
pub fn is_extremal(povm: &[HermitianOperator]) -> bool {
    let d = povm[0].dim();
    let rows: Vec<Vec<f64>> = povm.iter().map(|m| m.coords()).collect();
    let mat = DMatrix::from_fn(rows.len(), d * d, |i, j| rows[i][j]);
    let rank = mat.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-9).count();
    rank == povm.len() && povm.iter().all(|m| m.eigenvalues().iter().filter(|&&e| e > 1e-9).count() == 1)
}
