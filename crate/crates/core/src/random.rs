//! Seeded random vectors, matrices and structured operators.
//!
//! Randomized suites derive one independent stream per trial from a master
//! seed with [`trial_rng`], so any failing trial can be replayed on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::frame::FrameSystem;
use crate::numerics::Operator;
use crate::C64;

/// The generator used throughout: portable and reproducible across platforms.
pub type TrialRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed of trial `trial` under master seed `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(seed ^ splitmix64(trial))
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    rng_from_seed(trial_seed(seed, trial))
}

/// Standard complex Gaussian scalar (`E|z|² = 1`).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Operator {
    Operator::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Real Gaussian matrix (imaginary parts zero).
pub fn real_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Operator {
    Operator::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), 0.0))
}

/// Product of a `rows × rank` and a `rank × cols` Gaussian matrix.
pub fn low_rank_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, rank: usize) -> Operator {
    &gaussian_matrix(rng, rows, rank) * &gaussian_matrix(rng, rank, cols)
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let g = gaussian_matrix(rng, n, n).to_nalgebra();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = Operator::from_nalgebra(&q);
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `Q diag(d) Q*` for a random unitary `Q`: a normal operator with spectrum `d`.
pub fn normal_with_spectrum<R: Rng + ?Sized>(rng: &mut R, d: &[C64]) -> Operator {
    let q = random_unitary(rng, d.len());
    &(&q * &Operator::from_diag(d)) * &q.adjoint()
}

/// Random normal operator with Gaussian spectrum.
pub fn random_normal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let d = gaussian_vector(rng, n);
    normal_with_spectrum(rng, &d)
}

/// Random Parseval frame of `count ≥ n` vectors in `ℂⁿ`: the columns of the
/// first `n` rows of a `count × count` unitary.
pub fn random_parseval<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> FrameSystem {
    assert!(count >= n, "a Parseval frame of ℂ^{n} needs at least {n} vectors");
    let u = random_unitary(rng, count);
    let vectors = (0..count).map(|k| (0..n).map(|i| u[(i, k)]).collect()).collect();
    FrameSystem::new(n, vectors).expect("nonempty, consistent dimensions")
}

/// Random family of `count` Gaussian vectors in `ℂⁿ`.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> FrameSystem {
    let vectors = (0..count).map(|_| gaussian_vector(rng, n)).collect();
    FrameSystem::new(n, vectors).expect("nonempty, consistent dimensions")
}

/// Gaussian vector in the column span of `basis`.
pub fn vector_in_span<R: Rng + ?Sized>(rng: &mut R, basis: &Operator) -> Vec<C64> {
    let g = gaussian_vector(rng, basis.cols());
    basis.apply(&g).expect("coefficient length matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::optimal_bounds;
    use crate::numerics::Tolerance;

    #[test]
    fn trial_streams_are_reproducible_and_distinct() {
        let a = gaussian_vector(&mut trial_rng(42, 3), 4);
        let b = gaussian_vector(&mut trial_rng(42, 3), 4);
        let c = gaussian_vector(&mut trial_rng(42, 4), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_and_parseval() {
        let mut rng = rng_from_seed(1);
        let u = random_unitary(&mut rng, 6);
        assert!((&(&u.adjoint() * &u) - &Operator::identity(6)).max_abs() < 1e-13);
        let f = random_parseval(&mut rng, 3, 7);
        let b = optimal_bounds(&f, &Tolerance::default()).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_operators_commute_with_adjoint() {
        let t = random_normal(&mut rng_from_seed(2), 5);
        let ta = t.adjoint();
        assert!((&(&ta * &t) - &(&t * &ta)).max_abs() < 1e-12);
    }
}
