//! Facet enumeration by the double-description method.
//!
//! Points `p_i` in `R^D` are homogenized to `h_i = (p_i, -1)`. A facet `a.x <= b`
//! corresponds to an extreme ray `y = (a, b)` of the cone `{y : h_i . y <= 0}`,
//! which is built by inserting one constraint at a time.

use std::fmt::Debug;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Scalars the double-description method can run on.
pub trait HullScalar: Clone + Debug + Send + Sync {
    fn zero() -> Self;
    fn from_f64_exact(x: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    /// Sign with the scalar's zero tolerance.
    fn sign(&self) -> i8;
    fn to_f64(&self) -> f64;
    /// Rescale a ray to keep magnitudes bounded.
    fn normalize(v: &mut [Self]);
}

/// Values of `h . y` within this distance of zero count as incident.
pub const FLOAT_TOL: f64 = 1e-9;

impl HullScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64_exact(x: f64) -> Self {
        x
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        if *self > FLOAT_TOL {
            1
        } else if *self < -FLOAT_TOL {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn normalize(v: &mut [Self]) {
        let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if m > 0.0 {
            v.iter_mut().for_each(|x| *x /= m);
        }
    }
}

impl HullScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_f64_exact(x: f64) -> Self {
        BigRational::from_float(x).expect("finite")
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn normalize(v: &mut [Self]) {
        if let Some(m) = v.iter().map(|x| x.abs()).filter(|x| !x.is_zero()).min() {
            v.iter_mut().for_each(|x| *x = &*x / &m);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn contains(&self, sub: &Bits) -> bool {
        self.0.iter().zip(&sub.0).all(|(a, b)| a & b == *b)
    }
    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let t = x.trailing_zeros() as usize;
                out.push(w * 64 + t);
                x &= x - 1;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct HullFacet<T> {
    /// `a` in `a . x <= b`.
    pub normal: Vec<T>,
    pub offset: T,
    /// Indices of the points lying on the facet.
    pub incident: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct HullOptions {
    /// Abort when the intermediate ray count exceeds this.
    pub max_rays: usize,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self { max_rays: 2_000_000 }
    }
}

struct Ray<T> {
    y: Vec<T>,
    zeros: Bits,
}

fn dot<T: HullScalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Greedy choice of `D + 1` affinely independent points, maximizing the residual
/// against the span already chosen so that the starting simplex is well conditioned.
fn initial_simplex(points: &[Vec<f64>], dim: usize) -> Result<Vec<usize>> {
    let h: Vec<Vec<f64>> = points.iter().map(|p| p.iter().copied().chain([-1.0]).collect()).collect();
    let scale = h.iter().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for _ in 0..=dim {
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for (i, row) in h.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = row.clone();
            for b in &basis {
                let c: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|b| n > b.1) {
                best = Some((i, n, r));
            }
        }
        match best {
            Some((i, n, r)) if n > 1e-7 * scale.max(1.0) => {
                basis.push(r.into_iter().map(|x| x / n).collect());
                chosen.push(i);
            }
            _ => {
                return Err(Error::Degenerate(format!(
                    "points span an affine space of dimension {} < {dim}",
                    chosen.len().saturating_sub(1)
                )))
            }
        }
    }
    Ok(chosen)
}

/// Inverse of a square matrix by Gauss-Jordan elimination with partial pivoting.
fn invert<T: HullScalar>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::from_f64_exact(1.0) } else { T::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| a[r][col].sign() != 0 || a[r][col].to_f64() != 0.0)
            .max_by(|&x, &y| a[x][col].to_f64().abs().total_cmp(&a[y][col].to_f64().abs()))?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        a[col].iter_mut().for_each(|x| *x = x.div(&p));
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col].clone();
                if f.to_f64() != 0.0 || f.sign() != 0 {
                    for (x, pv) in row.iter_mut().zip(&pivot) {
                        *x = x.sub(&pv.mul(&f));
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Complete irredundant facet list of the convex hull of `points`, which must
/// affinely span `R^D`.
pub fn convex_hull_facets<T: HullScalar>(points: &[Vec<T>], opts: &HullOptions) -> Result<Vec<HullFacet<T>>> {
    let n = points.len();
    let dim = points.first().map(|p| p.len()).ok_or_else(|| Error::Degenerate("no points".into()))?;
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::param("points have different dimensions"));
    }
    if dim == 0 || n < dim + 1 {
        return Err(Error::Degenerate(format!("{n} points cannot span dimension {dim}")));
    }
    let approx: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|x| x.to_f64()).collect()).collect();
    let init = initial_simplex(&approx, dim)?;
    let h: Vec<Vec<T>> = points
        .iter()
        .map(|p| p.iter().cloned().chain([T::from_f64_exact(-1.0)]).collect())
        .collect();

    let h0: Vec<Vec<T>> = init.iter().map(|&i| h[i].clone()).collect();
    let inv = invert(&h0).ok_or_else(|| Error::Degenerate("initial simplex is singular".into()))?;
    let mut rays: Vec<Ray<T>> = (0..=dim)
        .map(|j| {
            let mut y: Vec<T> = (0..=dim).map(|r| T::zero().sub(&inv[r][j])).collect();
            T::normalize(&mut y);
            let mut zeros = Bits::new(n);
            for (k, &i) in init.iter().enumerate() {
                if k != j {
                    zeros.set(i);
                }
            }
            Ray { y, zeros }
        })
        .collect();

    let mut in_init = vec![false; n];
    init.iter().for_each(|&i| in_init[i] = true);
    for i in (0..n).filter(|&i| !in_init[i]) {
        let s: Vec<T> = rays.iter().map(|r| dot(&h[i], &r.y)).collect();
        let sg: Vec<i8> = s.iter().map(|v| v.sign()).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&r| sg[r] > 0).collect();
        if pos.is_empty() {
            for (r, ray) in rays.iter_mut().enumerate() {
                if sg[r] == 0 {
                    ray.zeros.set(i);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&r| sg[r] < 0).collect();
        let mut fresh: Vec<Ray<T>> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 1 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(r, ray)| r == p || r == q || !ray.zeros.contains(&common));
                if !adjacent {
                    continue;
                }
                let (sp, sq) = (&s[p], &s[q]);
                let mut y: Vec<T> =
                    rays[q].y.iter().zip(&rays[p].y).map(|(yq, yp)| sp.mul(yq).sub(&sq.mul(yp))).collect();
                T::normalize(&mut y);
                let mut zeros = common;
                zeros.set(i);
                fresh.push(Ray { y, zeros });
            }
        }
        let mut kept: Vec<Ray<T>> = Vec::with_capacity(rays.len() - pos.len() + fresh.len());
        for (r, mut ray) in rays.into_iter().enumerate() {
            match sg[r] {
                0 => {
                    ray.zeros.set(i);
                    kept.push(ray);
                }
                x if x < 0 => kept.push(ray),
                _ => {}
            }
        }
        kept.extend(fresh);
        if kept.len() > opts.max_rays {
            return Err(Error::CapExceeded { what: "intermediate facet count", value: kept.len() as u128, cap: opts.max_rays as u128 });
        }
        rays = kept;
    }

    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(rays.len());
    for ray in rays {
        if ray.zeros.count() < dim || !seen.insert(ray.zeros.clone()) {
            continue;
        }
        let mut y = ray.y;
        let offset = y.pop().expect("homogeneous coordinate");
        out.push(HullFacet { normal: y, offset, incident: ray.zeros.ones() });
    }
    Ok(out)
}

/// Re-fits each floating-point facet to its incident points (least squares via SVD)
/// and normalizes the normal to unit maximum entry.
pub fn refit_facets(points: &[Vec<f64>], facets: &mut [HullFacet<f64>]) {
    for f in facets.iter_mut() {
        let dim = f.normal.len();
        let rows = f.incident.len();
        let m = DMatrix::from_fn(rows, dim + 1, |r, c| if c < dim { points[f.incident[r]][c] } else { -1.0 });
        let svd = (m.transpose() * &m).symmetric_eigen();
        let (imin, _) = svd
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let v = svd.eigenvectors.column(imin);
        let old: Vec<f64> = f.normal.iter().copied().chain([f.offset]).collect();
        let agree: f64 = old.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        let sgn = if agree < 0.0 { -1.0 } else { 1.0 };
        let mut y: Vec<f64> = v.iter().map(|x| sgn * x).collect();
        let scale = y[..dim].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        y.iter_mut().for_each(|x| *x /= scale);
        f.offset = y[dim];
        y.truncate(dim);
        f.normal = y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn cube() -> Vec<Vec<f64>> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push((0..3).map(|b| if i >> b & 1 == 1 { 1.0 } else { -1.0 }).collect());
        }
        v
    }

    #[test]
    fn cube_has_six_facets_of_four_vertices() {
        let mut pts = cube();
        pts.push(vec![0.0, 0.0, 0.0]);
        pts.push(vec![1.0, 0.0, 0.0]);
        let f = convex_hull_facets(&pts, &HullOptions::default()).unwrap();
        assert_eq!(f.len(), 6);
        for facet in &f {
            let corners = facet.incident.iter().filter(|&&i| i < 8).count();
            assert_eq!(corners, 4);
            assert!((facet.offset - 1.0).abs() < 1e-12);
        }
        assert_eq!(f.iter().filter(|x| x.incident.contains(&9)).count(), 1);
    }

    #[test]
    fn octahedron_exact() {
        let r = |x: i64| BigRational::from_integer(BigInt::from(x));
        let mut pts = Vec::new();
        for k in 0..3 {
            for s in [1, -1] {
                let mut p = vec![r(0), r(0), r(0)];
                p[k] = r(s);
                pts.push(p);
            }
        }
        let f = convex_hull_facets(&pts, &HullOptions::default()).unwrap();
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|x| x.incident.len() == 3));
    }

    #[test]
    fn simplex_in_four_dimensions() {
        let mut pts: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        pts.push(vec![0.0; 4]);
        let f = convex_hull_facets(&pts, &HullOptions::default()).unwrap();
        assert_eq!(f.len(), 5);
    }

    #[test]
    fn flat_input_is_degenerate() {
        let pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]];
        assert!(matches!(convex_hull_facets(&pts, &HullOptions::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ray_cap_is_enforced() {
        let pts = cube();
        let r = convex_hull_facets(&pts, &HullOptions { max_rays: 3 });
        assert!(matches!(r, Err(Error::CapExceeded { .. })));
    }
}
