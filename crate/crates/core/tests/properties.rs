//! Property-based invariants over seeded random instances.

use framekit::frame::{frame_operator, optimal_bounds, FrameSystem};
use framekit::numerics::{norm_sq, penrose_residuals, pinv, Operator, Tolerance};
use framekit::operator_theory::{relative_hyponormality, self_commutator};
use framekit::random::{gaussian_matrix, gaussian_vector, random_system, rng_from_seed};
use framekit::signal::{Grid, Signal};
use framekit::theta::check_theta_frame;
use framekit::wavepacket::{generate_system, partition_combination, PartitionCombination, WavePacketParams};
use framekit::C64;
use proptest::prelude::*;
use rand::Rng;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn self_commutator_is_traceless(seed in any::<u64>(), n in 1usize..16) {
        let t = gaussian_matrix(&mut rng_from_seed(seed), n, n);
        let c = self_commutator(&t).unwrap();
        let trace: f64 = c.diagonal().iter().map(|z| z.re).sum();
        prop_assert!(trace.abs() <= 1e-10 * (1.0 + t.frobenius().powi(2)));
    }

    #[test]
    fn relative_constant_scales_quadratically(seed in any::<u64>(), n in 1usize..10, s in 0.1f64..10.0) {
        let mut rng = rng_from_seed(seed);
        let t1 = gaussian_matrix(&mut rng, n, n);
        let t2 = gaussian_matrix(&mut rng, n, n);
        let tol = Tolerance::default();
        let base = relative_hyponormality(&t1, &t2, &tol).unwrap();
        let scaled = relative_hyponormality(&t1, &t2.scale_real(s), &tol).unwrap();
        prop_assert!(base.holds && scaled.holds);
        prop_assert!((scaled.lambda_opt - s * s * base.lambda_opt).abs() <= 1e-7 * s * s * base.lambda_opt);
    }

    #[test]
    fn identity_theta_recovers_classical_bounds(seed in any::<u64>(), n in 1usize..12, extra in 0usize..8) {
        let f = random_system(&mut rng_from_seed(seed), n, n + extra);
        let tol = Tolerance::default();
        let b = optimal_bounds(&f, &tol).unwrap();
        let r = check_theta_frame(&f, &Operator::identity(n), &tol).unwrap();
        prop_assert!((r.alpha() - b.lower).abs() <= 1e-8 * b.upper);
        prop_assert!((r.beta_opt - b.upper).abs() <= 1e-8 * b.upper);
    }

    #[test]
    fn wave_packets_preserve_the_window_norm(seed in any::<u64>(), q in 1usize..6, periods in 1usize..6) {
        let grid = Grid::new(q, periods).unwrap();
        let n = grid.n() as i64;
        let mut rng = rng_from_seed(seed);
        let psi = Signal::from_coords(grid, &gaussian_vector(&mut rng, grid.n())).unwrap();
        let a_list: Vec<i64> = (-n.max(2)..=n.max(2)).filter(|&a| a != 0 && gcd(a, n) == 1).take(3).collect();
        let c_list: Vec<f64> = (0..3).map(|_| rng.random_range(0..4 * periods) as f64 / periods as f64).collect();
        let params = WavePacketParams {
            psi: psi.clone(),
            a_list,
            b: rng.random_range(1..=q) as f64 / q as f64,
            k_range: [0, rng.random_range(1..5)],
            c_list,
            dedupe: false,
        };
        let f = generate_system(&params).unwrap();
        let want = psi.norm_sq();
        for v in f.vectors() {
            prop_assert!((norm_sq(v) - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn singleton_partition_weights_the_frame_operator(seed in any::<u64>(), n in 1usize..10, count in 1usize..14) {
        let mut rng = rng_from_seed(seed);
        let f = random_system(&mut rng, n, count);
        let alphas: Vec<C64> = (0..count).map(|_| C64::from_polar(1.0, rng.random_range(0.0..6.3))).collect();
        let pc = PartitionCombination::new((0..count).map(|i| vec![i]).collect(), alphas.clone());
        let phi = partition_combination(&f, &pc).unwrap();
        let mut direct = Operator::zeros(n, n);
        for (a, v) in alphas.iter().zip(f.vectors()) {
            direct = &direct + &Operator::outer(v, v).scale_real(a.norm_sqr());
        }
        prop_assert!((&frame_operator(&phi) - &direct).max_abs() <= 1e-12 * direct.max_abs().max(1.0));
    }

    #[test]
    fn pseudoinverse_satisfies_penrose(seed in any::<u64>(), m in 1usize..14, k in 1usize..14, r in 1usize..14) {
        let mut rng = rng_from_seed(seed);
        let r = r.min(m).min(k);
        let a = &gaussian_matrix(&mut rng, m, r) * &gaussian_matrix(&mut rng, r, k);
        let x = pinv(&a, &Tolerance::default()).unwrap();
        prop_assert!(penrose_residuals(&a, &x).unwrap().max() <= 1e-9);
    }
}

#[test]
fn canonical_basis_is_parseval() {
    let f = FrameSystem::canonical_basis(5);
    let b = optimal_bounds(&f, &Tolerance::default()).unwrap();
    assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);
}
