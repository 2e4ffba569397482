//! Seeded random sampling of unitaries, states and measurements.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::quantum::{BipartiteState, HermitianOperator, C64};

/// Name and version of the generator, recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/rand_chacha-0.9/seed_from_u64";

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of `R` removed.
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, d: usize) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

pub fn random_pure_state<R: Rng>(rng: &mut R, d: usize) -> HermitianOperator {
    HermitianOperator::projector(&random_unit_vector(rng, d))
}

/// Density matrix sampled from the Hilbert-Schmidt measure.
pub fn random_state_hs<R: Rng>(rng: &mut R, d: usize) -> HermitianOperator {
    let g = ginibre(rng, d, d);
    let rho = &g * g.adjoint();
    let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    HermitianOperator::hermitian_part(rho.unscale(tr))
}

pub fn random_bipartite_hs<R: Rng>(rng: &mut R, da: usize, db: usize) -> BipartiteState {
    BipartiteState::new_unchecked(da, db, random_state_hs(rng, da * db)).expect("dimensions agree")
}

/// Convex mixture of `terms` product states whose local Bloch-type radii
/// (relative to the maximally mixed state) are at most `radius_a` and `radius_b`.
pub fn random_separable<R: Rng>(rng: &mut R, da: usize, db: usize, terms: usize, radius_a: f64, radius_b: f64) -> BipartiteState {
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut rho = HermitianOperator::zeros(da * db);
    for w in weights {
        let a = random_pure_state(rng, da).depolarized(radius_a * rng.random::<f64>());
        let b = random_pure_state(rng, db).depolarized(radius_b * rng.random::<f64>());
        rho = &rho + &a.kron(&b).scale(w);
    }
    BipartiteState::new_unchecked(da, db, rho).expect("dimensions agree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary_and_reproducible() {
        let u = haar_unitary(&mut seeded(3), 4);
        let id = &u.adjoint() * &u;
        assert!((id - DMatrix::<C64>::identity(4, 4)).iter().all(|z| z.norm() < 1e-12));
        assert_eq!(u, haar_unitary(&mut seeded(3), 4));
    }

    #[test]
    fn hs_states_are_valid() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            let rho = random_state_hs(&mut rng, 4);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(rho.min_eigenvalue() > -1e-12);
        }
    }
}
