//! Acceptance criteria: worked-example reproductions and seeded randomized
//! theorem checks, each with its runtime budget.

use std::time::{Duration, Instant};

use framekit::models::{
    example_3_12, example_3_2, example_3_5, remark_3_3, theorem_3_10_counterexample, verify_example_3_12,
    verify_example_3_2, verify_example_3_5, verify_example_4_3, verify_remark_3_3, ExampleOutcome,
};
use framekit::numerics::{herm_eig, inner, is_psd, norm_sq, penrose_residuals, pinv, unit_vector, Operator, Tolerance};
use framekit::operator_theory::{djordjevic_hyponormal, hyponormality};
use framekit::random::{gaussian_matrix, gaussian_vector, low_rank_matrix, normal_with_spectrum, trial_rng};
use framekit::signal::{indicator, Grid};
use framekit::suites::{
    djordjevic_compare, douglas_branch_trial, theorem_3_10_instance, theorem_3_5_trial, theorem_3_8_trial,
    theorems_4_trial, DouglasBranch, TrialOutcome,
};
use framekit::theta::{check_k_frame_on, check_theta_frame, check_theta_frame_on, transform_frame_check};
use framekit::C64;
use rand::Rng;

const SEED: u64 = 20_240_601;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Run a criterion, print its verdict and enforce the runtime budget.
fn criterion(name: &str, budget: Duration, body: impl FnOnce()) {
    let start = Instant::now();
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let ok = result.is_ok() && elapsed < budget;
    println!(
        "{} {name} ({:.3}s, budget {}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    if let Err(e) = result {
        std::panic::resume_unwind(e);
    }
    assert!(elapsed < budget, "{name} took {elapsed:?}, budget {budget:?}");
}

fn assert_outcome(out: &ExampleOutcome) {
    assert!(out.passed(), "{}: first failed check {:?}", out.id, out.first_failure());
}

fn assert_trial(label: &str, trial: u64, o: &TrialOutcome) {
    assert!(o.passed, "{label} trial {trial} ({}): {}", o.case, o.detail);
}

#[test]
fn criterion_01_example_3_2() {
    criterion("example 3.2", Duration::from_secs(1), || {
        let (f, theta, space) = example_3_2(32, 1).unwrap();
        let k = check_k_frame_on(&f, &theta, &space.margin_basis(), &tol()).unwrap();
        assert!((k.a_opt - 1.0).abs() <= 1e-9, "A_opt = {}", k.a_opt);
        assert!((k.b_opt - 1.0).abs() <= 1e-9, "B_opt = {}", k.b_opt);
        let r = check_theta_frame(&f, &theta, &tol()).unwrap();
        assert!(!r.passes());
        let w = r.kernel_obstruction().expect("kernel witness");
        let chi1 = unit_vector(32, 0);
        assert!((inner(w, &chi1).norm() - 1.0).abs() <= 1e-9, "witness is not chi_1");
        assert!(norm_sq(&theta.apply(&chi1).unwrap()) == 0.0);
        assert_outcome(&verify_example_3_2(32, 1, &tol()).unwrap());
    });
}

#[test]
fn criterion_02_example_3_5() {
    criterion("example 3.5", Duration::from_secs(1), || {
        let (f, theta, params) = example_3_5().unwrap();
        let r = check_theta_frame(&f, &theta, &tol()).unwrap();
        assert!(r.beta_opt.is_infinite() && r.kernel_obstruction().is_some());
        let grid = params.psi.grid();
        let b = 1.0f64;
        let h = indicator(grid, 0.0, 1.0)
            .unwrap()
            .add(&indicator(grid, 2.0, 3.0).unwrap().scale(C64::new(b.sqrt(), 0.0)))
            .unwrap()
            .coords();
        assert!((f.energy(&h) - (1.0 + b)).abs() <= 1e-10);
        assert!((norm_sq(&theta.apply(&h).unwrap()) - 1.0).abs() <= 1e-10);
        assert_outcome(&verify_example_3_5(b, &tol()).unwrap());
    });
}

#[test]
fn criterion_03_remark_3_3() {
    criterion("remark 3.3", Duration::from_secs(1), || {
        let (f, theta, space) = remark_3_3(64).unwrap();
        let r = check_theta_frame_on(&f, &theta, &space.margin_basis(), &tol()).unwrap();
        assert!(r.lower_ok);
        let gamma = r.alpha().min(1.0) / 2.0;
        assert!(gamma > 0.0 && gamma < 1.0);
        let b = framekit::frame::optimal_bounds(&f, &tol()).unwrap();
        assert!(b.lower < 0.01, "delta_0 = {}", b.lower);
        assert_outcome(&verify_remark_3_3(64, &tol()).unwrap());
    });
}

#[test]
fn criterion_04_douglas() {
    criterion("Douglas tri-equivalence", Duration::from_secs(10), || {
        for (offset, branch) in [(0u64, DouglasBranch::Inclusion), (1_000, DouglasBranch::Exclusion)] {
            for trial in 0..200 {
                let mut rng = trial_rng(SEED, offset + trial);
                let o = douglas_branch_trial(&mut rng, branch, &tol()).unwrap();
                assert_trial("douglas", trial, &o);
            }
        }
    });
}

#[test]
fn criterion_05_djordjevic() {
    criterion("Djordjević criterion", Duration::from_secs(10), || {
        let check = |a: &Operator, case: &str, trial: u64| {
            let o = djordjevic_compare(a, case, &tol()).unwrap();
            assert_trial("djordjevic", trial, &o);
            let d = djordjevic_hyponormal(a, &tol()).unwrap();
            let h = hyponormality(a, &tol(), None).unwrap();
            if !d.verdict {
                assert!(d.witness_min_eig < 0.0 && h.commutator_min_eig < 0.0, "trial {trial}: signs disagree");
            }
        };
        let mut normal_count = 0;
        for trial in 0..550u64 {
            let mut rng = trial_rng(SEED, trial);
            let n = rng.random_range(1..=12);
            if trial < 500 {
                check(&gaussian_matrix(&mut rng, n, n), "gaussian", trial);
            } else {
                let d = gaussian_vector(&mut rng, n);
                let a = normal_with_spectrum(&mut rng, &d);
                assert!(djordjevic_hyponormal(&a, &tol()).unwrap().verdict, "normal trial {trial}");
                check(&a, "normal", trial);
                normal_count += 1;
            }
        }
        assert_eq!(normal_count, 50);
    });
}

#[test]
fn criterion_06_theorem_3_8() {
    criterion("Theorem 3.8", Duration::from_secs(30), || {
        for trial in 0..50 {
            let o = theorem_3_8_trial(trial, &mut trial_rng(SEED, trial), &tol()).unwrap();
            assert_trial("theorem 3.8", trial, &o);
        }
    });
}

#[test]
fn criterion_07_theorem_3_10_and_example_3_12() {
    criterion("Theorem 3.10 / Example 3.12", Duration::from_secs(10), || {
        // The stated sandwich, on the unitary U its proof covers.
        for trial in 0..50 {
            let (f, theta, u) = theorem_3_10_instance(&mut trial_rng(SEED, trial), true);
            let t = transform_frame_check(&f, &theta, &u, &tol()).unwrap();
            assert!(t.commutes && t.u_is_unitary, "trial {trial}");
            assert!(t.lower_sandwich_ok && t.upper_ok, "trial {trial}: stated bounds fail");
        }
        // General invertible U: B₂ ≤ B₁‖U‖² and the corrected lower sandwich.
        for trial in 0..50 {
            let (f, theta, u) = theorem_3_10_instance(&mut trial_rng(SEED, 10_000 + trial), false);
            let t = transform_frame_check(&f, &theta, &u, &tol()).unwrap();
            assert!(t.commutes && t.upper_ok && t.corrected_lower_sandwich_ok, "trial {trial}");
        }
        // The stated lower sandwich fails for U = 1/2 on ℂ¹.
        let (f, theta, u) = theorem_3_10_counterexample().unwrap();
        let t = transform_frame_check(&f, &theta, &u, &tol()).unwrap();
        assert!(!t.lower_sandwich_ok && t.corrected_bounds_hold());

        // Example 3.12.
        let (f, theta, u0) = example_3_12().unwrap();
        let t = transform_frame_check(&f, &theta, &u0, &tol()).unwrap();
        assert!(!t.commutes && t.commutator_witness.is_some());
        let w = t.report_g.witnesses.lower.as_ref().expect("lower witness");
        assert!(t.report_g.alpha() <= 1e-12);
        assert!(t.g.energy(w) <= 1e-12, "lower witness energy {}", t.g.energy(w));
        let grid = Grid::new(4, 4).unwrap();
        let f0 = framekit::numerics::normalized(&indicator(grid, 0.0, 1.0).unwrap().coords());
        assert!(t.g.energy(&f0) <= 1e-12);
        assert_outcome(&verify_example_3_12(&tol()).unwrap());
    });
}

#[test]
fn criterion_08_theorem_3_5() {
    criterion("Theorem 3.5 biconditional", Duration::from_secs(60), || {
        for trial in 0..100 {
            let o = theorem_3_5_trial(trial, &mut trial_rng(SEED, trial), &tol()).unwrap();
            assert_trial("theorem 3.5", trial, &o);
        }
    });
}

#[test]
fn criterion_09_theorems_4_1_4_2_and_example_4_3() {
    criterion("Theorems 4.1/4.2 / Example 4.3", Duration::from_secs(30), || {
        for trial in 0..100 {
            let o = theorems_4_trial(trial, &mut trial_rng(SEED, trial), &tol()).unwrap();
            assert_trial("theorems 4.1/4.2", trial, &o);
        }
        let out = verify_example_4_3(&[1.0, 2.0, -1.0], &tol()).unwrap();
        assert_outcome(&out);
        let mu = out.checks.iter().find(|c| c.name == "mu_opt").unwrap();
        assert!((mu.value - 4.0).abs() <= 1e-9);
        assert!(out.checks.iter().any(|c| c.name.starts_with("zero sum") && c.passed));
    });
}

#[test]
fn criterion_10_numerics_floor() {
    criterion("numerics floor", Duration::from_secs(10), || {
        for trial in 0..500 {
            let mut rng = trial_rng(SEED, trial);
            let (m, k) = (rng.random_range(1..=16), rng.random_range(1..=16));
            let a = if trial % 2 == 0 {
                gaussian_matrix(&mut rng, m, k)
            } else {
                let r = rng.random_range(1..=m.min(k));
                low_rank_matrix(&mut rng, m, k, r)
            };

            let x = pinv(&a, &tol()).unwrap();
            let p = penrose_residuals(&a, &x).unwrap();
            assert!(p.max() <= 1e-8, "trial {trial}: Penrose residuals {p:?}");

            let h = (&a * &a.adjoint()).hermitian_part();
            let h = &h - &Operator::identity(m).scale_real(rng.random_range(0.0..2.0) * h.norm());
            let e = herm_eig(&h).unwrap();
            let rec = &(&e.vectors * &Operator::from_real_diag(&e.values)) * &e.vectors.adjoint();
            assert!((&rec - &h).norm() <= 1e-9 * h.norm().max(f64::MIN_POSITIVE), "trial {trial}: reconstruction");

            let gram = &a.adjoint() * &a;
            assert!(is_psd(&gram, &tol()).unwrap().verdict, "trial {trial}: Gram matrix not PSD");
        }
    });
}
