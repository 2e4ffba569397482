//! Pure states `|v><v| / <v|v>` for Gaussian-integer vectors `v` with `<v|v> <= q`.

use std::collections::HashSet;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::polytope::{PolytopeKind, StatePolytope};
use crate::quantum::{HermitianOperator, C64};

/// Qubit operator `(t 1 + n . sigma) / 2`.
pub fn bloch_to_operator(t: f64, n: [f64; 3]) -> HermitianOperator {
    crate::measurements::bloch_operator(t, n)
}

/// Canonical integer key of the projector onto `v`: the Hermitian matrix
/// `v v^dagger` with its entries divided by their common gcd and the first
/// nonzero diagonal entry made positive (it always is).
fn projector_key(v: &[(i64, i64)]) -> Vec<i64> {
    let d = v.len();
    let mut key = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in j..d {
            let (a, b) = v[j];
            let (c, e) = v[k];
            // (a + bi)(c - ei)
            key.push(a * c + b * e);
            key.push(b * c - a * e);
        }
    }
    let g = key.iter().fold(0i64, |g, &x| g.gcd(&x));
    key.iter_mut().for_each(|x| *x /= g);
    key
}

fn gaussian_components(q: i64) -> Vec<(i64, i64)> {
    let r = (q as f64).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            if a * a + b * b <= q {
                out.push((a, b));
            }
        }
    }
    out
}

/// All distinct rank-one projectors onto Gaussian-integer vectors of squared norm at most `q`.
pub fn rational_pure_states(d: usize, q: u32) -> Result<StatePolytope> {
    if d < 2 {
        return Err(Error::param(format!("dimension must be at least 2, got {d}")));
    }
    if q < 2 {
        return Err(Error::param(format!("q must be at least 2, got {q}")));
    }
    let q = q as i64;
    let comps = gaussian_components(q);
    let total = (comps.len() as u128).pow(d as u32);
    const ENUM_CAP: u128 = 50_000_000;
    if total > ENUM_CAP {
        return Err(Error::CapExceeded { what: "Gaussian-integer vector enumeration", value: total, cap: ENUM_CAP });
    }
    let mut seen = HashSet::new();
    let mut vertices = Vec::new();
    let mut exact = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let v: Vec<(i64, i64)> = idx.iter().map(|&i| comps[i]).collect();
        let norm: i64 = v.iter().map(|(a, b)| a * a + b * b).sum();
        if norm > 0 && norm <= q && seen.insert(projector_key(&v)) {
            let vec = DVector::from_iterator(d, v.iter().map(|&(a, b)| C64::new(a as f64, b as f64)));
            vertices.push(HermitianOperator::projector(&vec));
            if d == 2 {
                exact.push(exact_bloch(&v, norm));
            }
        }
        // Odometer increment, last component fastest.
        let mut pos = d;
        loop {
            if pos == 0 {
                let mut p = StatePolytope::new(vertices, PolytopeKind::Inner, format!("rational(d={d},q={q})"))?;
                if d == 2 {
                    p.set_exact_bloch(exact);
                }
                return Ok(p);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < comps.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Bloch vector `(2 Re P01, -2 Im P01, P00 - P11)` of the projector onto `v`.
fn exact_bloch(v: &[(i64, i64)], norm: i64) -> [BigRational; 3] {
    let (a, b) = v[0];
    let (c, e) = v[1];
    let re = a * c + b * e;
    let im = b * c - a * e;
    let rat = |num: i64| BigRational::new(BigInt::from(num), BigInt::from(norm));
    [rat(2 * re), rat(-2 * im), rat(a * a + b * b - c * c - e * e)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::bloch_vector;
    use num_traits::ToPrimitive;

    #[test]
    fn table_counts() {
        let counts: Vec<usize> = (2..=10).map(|q| rational_pure_states(2, q).unwrap().len()).collect();
        assert_eq!(counts, vec![6, 14, 14, 22, 38, 54, 54, 78, 94]);
        assert_eq!(rational_pure_states(3, 2).unwrap().len(), 15);
        assert_eq!(rational_pure_states(3, 3).unwrap().len(), 55);
    }

    #[test]
    fn exact_bloch_vectors_match_float_vertices() {
        let p = rational_pure_states(2, 5).unwrap();
        for (v, e) in p.vertices().iter().zip(p.exact_bloch().unwrap()) {
            let f = bloch_vector(v);
            for i in 0..3 {
                assert!((f[i] - e[i].to_f64().unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_small_q() {
        assert!(rational_pure_states(2, 1).is_err());
        assert!(rational_pure_states(1, 3).is_err());
    }
}
