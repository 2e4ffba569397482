//! Complete sets of mutually unbiased bases in prime dimension.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::polytope::{PolytopeKind, StatePolytope};
use crate::quantum::{HermitianOperator, C64};

/// Default cap on the `d^(d+1)` index tuples scanned by [`mub_shrinking_factor`].
pub const MUB_TUPLE_CAP: u128 = 1_000_000;

pub fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

/// `d + 1` bases, each a list of `d` unit vectors. For `d = 2` these are the
/// eigenbases of `sigma_z`, `sigma_x`, `sigma_y`; for odd primes the computational
/// basis followed by `|phi_a^x> = sum_k w^(x k^2 + a k) |k> / sqrt(d)`.
pub fn mub_bases(d: usize) -> Result<Vec<Vec<DVector<C64>>>> {
    if !is_prime(d) {
        return Err(Error::param(format!("MUB construction needs a prime dimension, got {d}")));
    }
    let s = 1.0 / (d as f64).sqrt();
    let unit = |k: usize| DVector::from_fn(d, |i, _| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0));
    let mut bases = vec![(0..d).map(unit).collect::<Vec<_>>()];
    if d == 2 {
        let v = |a: C64, b: C64| DVector::from_vec(vec![a * s, b * s]);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        bases.push(vec![v(one, one), v(one, -one)]);
        bases.push(vec![v(one, i), v(one, -i)]);
        return Ok(bases);
    }
    for x in 0..d {
        let basis = (0..d)
            .map(|a| {
                DVector::from_fn(d, |k, _| {
                    let phase = ((x * k * k + a * k) % d) as f64 * 2.0 * PI / d as f64;
                    C64::from_polar(s, phase)
                })
            })
            .collect();
        bases.push(basis);
    }
    Ok(bases)
}

/// The `d(d+1)` projectors of a complete MUB set.
pub fn mub_polytope(d: usize) -> Result<StatePolytope> {
    let vertices = mub_bases(d)?.iter().flatten().map(HermitianOperator::projector).collect();
    StatePolytope::new(vertices, PolytopeKind::Inner, format!("mub(d={d})"))
}

/// `r = 1 / (d (1 - nu) + 1)` with `nu` the smallest eigenvalue of
/// `sum_x |phi_{j_x}^x><phi_{j_x}^x|` over all index tuples `j`.
pub fn mub_shrinking_factor(d: usize, cap: u128) -> Result<f64> {
    let bases = mub_bases(d)?;
    let tuples = (d as u128).pow(d as u32 + 1);
    if tuples > cap {
        return Err(Error::CapExceeded { what: "MUB index tuples", value: tuples, cap });
    }
    let proj: Vec<Vec<HermitianOperator>> =
        bases.iter().map(|b| b.iter().map(HermitianOperator::projector).collect()).collect();
    let mut nu = f64::INFINITY;
    let mut idx = vec![0usize; d + 1];
    'outer: loop {
        let sum = idx
            .iter()
            .enumerate()
            .fold(HermitianOperator::zeros(d), |acc, (x, &j)| &acc + &proj[x][j]);
        nu = nu.min(sum.min_eigenvalue());
        for pos in (0..=d).rev() {
            idx[pos] += 1;
            if idx[pos] < d {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    Ok(1.0 / (d as f64 * (1.0 - nu) + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<usize> = (0..20).filter(|&d| is_prime(d)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(mub_polytope(4).is_err());
    }

    #[test]
    fn bases_are_mutually_unbiased() {
        for d in [2, 3, 5] {
            let b = mub_bases(d).unwrap();
            assert_eq!(b.len(), d + 1);
            for x in 0..=d {
                for y in 0..=d {
                    for a in 0..d {
                        for c in 0..d {
                            let o = b[x][a].dotc(&b[y][c]).norm_sqr();
                            let want = if x != y { 1.0 / d as f64 } else if a == c { 1.0 } else { 0.0 };
                            assert!((o - want).abs() < 1e-12, "d={d} x={x} y={y}");
                        }
                    }
                }
            }
            assert_eq!(mub_polytope(d).unwrap().len(), d * (d + 1));
        }
    }

    #[test]
    fn analytic_shrinking_factors() {
        assert!((mub_shrinking_factor(2, MUB_TUPLE_CAP).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((mub_shrinking_factor(3, MUB_TUPLE_CAP).unwrap() - 0.25).abs() < 1e-9);
        assert!(matches!(mub_shrinking_factor(7, MUB_TUPLE_CAP), Err(Error::CapExceeded { .. })));
    }
}
