//! Randomized invariant suites. Each trial draws its instance from its own
//! seeded stream ([`crate::random::trial_rng`]) and compares a verdict with
//! an independent oracle; a failing trial is replayed from its sub-seed.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::frame::{frame_operator, FrameSystem};
use crate::numerics::{inner, norm_sq, quad_form, rayleigh, Operator, Tolerance};
use crate::operator_theory::{djordjevic_hyponormal, douglas_check, hyponormality};
use crate::random::{
    gaussian, gaussian_matrix, gaussian_vector, low_rank_matrix, normal_with_spectrum, random_parseval, random_system,
    random_unitary, rng_from_seed, trial_seed, TrialRng,
};
use crate::signal::{indicator, mult_operator, Grid, Signal};
use crate::theta::{check_k_frame, check_theta_frame, construct_theorem_3_8, transform_frame_check};
use crate::wavepacket::{
    generate_system, partition_combination, theorem_3_5_check, theorem_4_1_check, theorem_4_2_check, FiniteSumSpec,
    PartitionCombination, WavePacketParams,
};
use crate::C64;

#[derive(Clone, Debug, Serialize)]
pub struct TrialOutcome {
    pub passed: bool,
    /// Instance family, e.g. `"inclusion"` or `"normal"`.
    pub case: String,
    /// Numeric witnesses of the comparison.
    pub detail: String,
}

impl TrialOutcome {
    fn new(passed: bool, case: &str, detail: String) -> Self {
        TrialOutcome { passed, case: case.to_string(), detail }
    }
}

/// A trial: trial index, its stream and the tolerances.
pub type TrialFn = fn(u64, &mut TrialRng, &Tolerance) -> Result<TrialOutcome>;

/// Registered suites, by CLI name.
pub const SUITES: &[(&str, TrialFn)] = &[
    ("douglas", douglas_trial),
    ("djordjevic", djordjevic_trial),
    ("theta-frame-selfcheck", theta_selfcheck_trial),
    ("theorem-3.5", theorem_3_5_trial),
    ("theorem-3.8", theorem_3_8_trial),
    ("theorem-3.10", theorem_3_10_trial),
    ("theorems-4.1-4.2", theorems_4_trial),
];

pub fn suite(name: &str) -> Option<TrialFn> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
}

/// Run trial `trial` of a suite under master seed `seed`.
pub fn run_trial(f: TrialFn, seed: u64, trial: u64, tol: &Tolerance) -> Result<TrialOutcome> {
    let mut rng = rng_from_seed(trial_seed(seed, trial));
    f(trial, &mut rng, tol)
}

fn rel_le(a: f64, b: f64, slack: f64, scale: f64) -> bool {
    a <= b + slack * scale.max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------- Douglas

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DouglasBranch {
    /// `T₁ = T₂S₀`: all three conditions must hold.
    Inclusion,
    /// `rank T₂ < rows`, `T₁` square of full rank: all three must fail.
    Exclusion,
}

/// Douglas instance of the given branch with dimensions at most `max_dim`.
pub fn douglas_instance<R: Rng + ?Sized>(rng: &mut R, branch: DouglasBranch, max_dim: usize) -> (Operator, Operator) {
    match branch {
        DouglasBranch::Inclusion => {
            let m = rng.random_range(1..=max_dim);
            let k = rng.random_range(1..=max_dim);
            let l = rng.random_range(1..=max_dim);
            let r = rng.random_range(1..=m.min(k));
            let t2 = low_rank_matrix(rng, m, k, r);
            let s0 = gaussian_matrix(rng, k, l);
            (&t2 * &s0, t2)
        }
        DouglasBranch::Exclusion => {
            let m = rng.random_range(2..=max_dim);
            let k = rng.random_range(1..=max_dim);
            let r = rng.random_range(1..m.min(k) + 1).min(m - 1);
            (gaussian_matrix(rng, m, m), low_rank_matrix(rng, m, k, r))
        }
    }
}

/// Tri-equivalence of the three Douglas conditions on a constructed instance.
pub fn douglas_branch_trial<R: Rng + ?Sized>(
    rng: &mut R,
    branch: DouglasBranch,
    tol: &Tolerance,
) -> Result<TrialOutcome> {
    let (t1, t2) = douglas_instance(rng, branch, 24);
    let r = douglas_check(&t1, &t2, tol)?;
    let t1n = t1.norm();
    let detail = format!(
        "dims {}x{} / {}x{}: range_included={} lambda_min={:e} factor={} residual={:e} (|T1|={:e})",
        t1.rows(),
        t1.cols(),
        t2.rows(),
        t2.cols(),
        r.range_included,
        r.lambda_min,
        r.factor.is_some(),
        r.factor_residual,
        t1n
    );
    Ok(match branch {
        DouglasBranch::Inclusion => {
            TrialOutcome::new(r.consistent && r.holds() && r.factor_residual <= 1e-8 * t1n, "inclusion", detail)
        }
        DouglasBranch::Exclusion => TrialOutcome::new(
            r.consistent && !r.range_included && r.lambda_min.is_infinite() && r.factor.is_none(),
            "exclusion",
            detail,
        ),
    })
}

/// Even trials test inclusion, odd trials exclusion.
pub fn douglas_trial(trial: u64, rng: &mut TrialRng, tol: &Tolerance) -> Result<TrialOutcome> {
    let branch = if trial.is_multiple_of(2) { DouglasBranch::Inclusion } else { DouglasBranch::Exclusion };
    douglas_branch_trial(rng, branch, tol)
}

// ------------------------------------------------------------- Djordjević

/// Moore–Penrose criterion against the direct commutator test on `a`.
pub fn djordjevic_compare(a: &Operator, case: &str, tol: &Tolerance) -> Result<TrialOutcome> {
    let d = djordjevic_hyponormal(a, tol)?;
    let h = hyponormality(a, tol, None)?;
    let n2 = a.norm().powi(2);
    let trace_ok = h.commutator_trace.abs() <= 1e-10 * n2.max(1.0);
    let normal_ok = !h.global_verdict || h.commutator_norm <= 10.0 * tol.psd_floor * n2.max(1.0);
    Ok(TrialOutcome::new(
        d.verdict == h.global_verdict && trace_ok && normal_ok,
        case,
        format!(
            "dim {}: djordjevic verdict={} min_eig={:e}; commutator verdict={} min_eig={:e}; trace={:e}",
            a.rows(),
            d.verdict,
            d.witness_min_eig,
            h.global_verdict,
            h.commutator_min_eig,
            h.commutator_trace
        ),
    ))
}

/// Every tenth trial draws a normal matrix, the rest a Gaussian one.
pub fn djordjevic_trial(trial: u64, rng: &mut TrialRng, tol: &Tolerance) -> Result<TrialOutcome> {
    let n = rng.random_range(1..=12);
    if trial % 10 == 9 {
        let d = gaussian_vector(rng, n);
        djordjevic_compare(&normal_with_spectrum(rng, &d), "normal", tol)
    } else {
        djordjevic_compare(&gaussian_matrix(rng, n, n), "gaussian", tol)
    }
}

// ------------------------------------------------------ Θ-frame self-check

/// A random Θ of one of several shapes, with its family name.
pub fn random_theta<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Operator, &'static str) {
    match rng.random_range(0..5) {
        0 => (gaussian_matrix(rng, n, n), "gaussian"),
        1 => {
            let d: Vec<C64> = (0..n).map(|_| gaussian(rng) * 2.0).collect();
            (normal_with_spectrum(rng, &d), "normal")
        }
        2 => (random_unitary(rng, n), "unitary"),
        3 => {
            let d: Vec<f64> =
                (0..n).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.5..2.0) }).collect();
            (Operator::from_real_diag(&d), "diagonal-with-zeros")
        }
        _ => {
            let r = rng.random_range(1..=n);
            (low_rank_matrix(rng, n, n, r), "low-rank")
        }
    }
}

/// Replay the reported constants on 1000 random vectors, check sharpness of
/// the witnesses and the implied K-frame bounds.
pub fn theta_selfcheck_trial(_trial: u64, rng: &mut TrialRng, tol: &Tolerance) -> Result<TrialOutcome> {
    let n = rng.random_range(1..=12);
    let count = rng.random_range(1..=2 * n + 2);
    let f = random_system(rng, n, count);
    let (theta, case) = random_theta(rng, n);
    let r = check_theta_frame(&f, &theta, tol)?;
    let s = frame_operator(&f);
    let c = &theta * &theta.adjoint();
    let d = &theta.adjoint() * &theta;
    let mut failures = Vec::new();
    if r.passes() {
        let alpha = r.alpha();
        for _ in 0..1000 {
            let x = gaussian_vector(rng, n);
            let energy = quad_form(&s, &x)?;
            let lo = alpha * quad_form(&c, &x)?;
            let hi = r.beta_opt * quad_form(&d, &x)?;
            let scale = energy.abs() + lo.abs() + hi.abs();
            if !rel_le(lo, energy, tol.verdict_rel, scale) || !rel_le(energy, hi, tol.verdict_rel, scale) {
                failures.push(format!("sandwich violated: {lo:e} <= {energy:e} <= {hi:e}"));
                break;
            }
        }
        let th_norm = theta.norm();
        let k = check_k_frame(&f, &theta, tol)?;
        if !(k.a_opt >= alpha * (1.0 - tol.verdict_rel) - tol.psd_floor
            && k.b_opt <= r.beta_opt * th_norm * th_norm * (1.0 + tol.verdict_rel) + tol.psd_floor)
        {
            failures.push(format!("K-frame bounds ({:e}, {:e}) not implied", k.a_opt, k.b_opt));
        }
    }
    if let (Some(alpha), Some(w)) = (r.alpha_opt, &r.witnesses.lower) {
        let q = rayleigh(&s, &c, w)?;
        if (q - alpha).abs() > 1e-6 * alpha.abs().max(1e-3) {
            failures.push(format!("lower witness quotient {q:e} vs alpha {alpha:e}"));
        }
    }
    if let Some(w) = &r.witnesses.upper {
        let q = rayleigh(&s, &d, w)?;
        if r.beta_opt > 0.0 && (q - r.beta_opt).abs() > 1e-6 * r.beta_opt {
            failures.push(format!("upper witness quotient {q:e} vs beta {:e}", r.beta_opt));
        }
    }
    if let Some(w) = r.kernel_obstruction() {
        let tw = norm_sq(&theta.apply(w)?);
        let e = quad_form(&s, w)?;
        if !(e > tol.psd_floor && tw <= 1e-8 * (e + d.norm())) {
            failures.push(format!("kernel witness: energy {e:e}, |Theta w|^2 {tw:e}"));
        }
    }
    let detail = format!(
        "n={n} N={count}: alpha={:?} beta={:e} lower_ok={} upper_ok={} {}",
        r.alpha_opt,
        r.beta_opt,
        r.lower_ok,
        r.upper_ok,
        failures.join("; ")
    );
    Ok(TrialOutcome::new(failures.is_empty(), case, detail))
}

// ------------------------------------------------------------ Theorem 3.5

/// A random `(ψ, Θ)` instance on a grid with `n ≤ 64`.
pub fn theorem_3_5_instance<R: Rng + ?Sized>(rng: &mut R) -> Result<(FrameSystem, Operator, &'static str)> {
    let q = rng.random_range(1..=4usize);
    let periods = rng.random_range(2..=(64 / q).min(8));
    let grid = Grid::new(q, periods)?;
    let n = grid.n();
    let gauss_psi = |rng: &mut R| Signal::from_coords(grid, &gaussian_vector(rng, n));
    let gabor = |psi: Signal, k_hi: i64| WavePacketParams {
        psi,
        a_list: vec![1],
        b: 1.0,
        k_range: [0, k_hi],
        c_list: (0..q).map(|m| m as f64).collect(),
        dedupe: true,
    };
    Ok(match rng.random_range(0..4) {
        0 => {
            let f = generate_system(&gabor(gauss_psi(rng)?, periods as i64))?;
            (f, random_unitary(rng, n), "unitary")
        }
        1 => {
            let f = generate_system(&gabor(gauss_psi(rng)?, periods as i64))?;
            let d: Vec<f64> =
                (0..n).map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random_range(0.5..2.0) }).collect();
            (f, Operator::from_real_diag(&d), "diagonal-with-zeros")
        }
        2 => {
            // Window supported on the first unit, translated over the first
            // `units` units; Θ multiplies by the indicator of `mask` units.
            let units = rng.random_range(1..periods);
            let mask = if rng.random_bool(0.5) { units } else { units + 1 };
            let first = indicator(grid, 0.0, 1.0)?;
            let vals: Vec<C64> = first.values().iter().map(|v| v * C64::new(rng.random_range(0.5..2.0), 0.0)).collect();
            let psi = Signal::new(grid, vals)?;
            let f = generate_system(&gabor(psi, units as i64))?;
            let theta = mult_operator(&indicator(grid, 0.0, mask as f64)?);
            (f, theta, if mask == units { "masked-matching" } else { "masked-wider" })
        }
        _ => {
            let f =
                generate_system(&WavePacketParams { a_list: vec![1, -1], ..gabor(gauss_psi(rng)?, periods as i64) })?;
            let d: Vec<C64> =
                (0..n).map(|_| C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..6.3))).collect();
            (f, Operator::from_diag(&d), "diagonal-invertible")
        }
    })
}

pub fn theorem_3_5_trial(_trial: u64, rng: &mut TrialRng, tol: &Tolerance) -> Result<TrialOutcome> {
    let (f, theta, case) = theorem_3_5_instance(rng)?;
    let r = theorem_3_5_check(&f, &theta, tol)?;
    Ok(TrialOutcome::new(
        r.agrees,
        case,
        format!(
            "n={}: relative lambda={:e} range_included={} theta-frame={} (alpha={:?}, beta={:e})",
            f.dim(),
            r.relative.lambda_opt,
            r.range_included,
            r.report.passes(),
            r.report.alpha_opt,
            r.report.beta_opt
        ),
    ))
}

// ------------------------------------------------------------ Theorem 3.8

/// Random normal Θ with spectrum moduli in `[0.2, 2]`.
pub fn random_normal_theta<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let d: Vec<C64> = (0..n).map(|_| C64::from_polar(rng.random_range(0.2..2.0), rng.random_range(0.0..6.3))).collect();
    normal_with_spectrum(rng, &d)
}

pub fn theorem_3_8_trial(_trial: u64, rng: &mut TrialRng, tol: &Tolerance) -> Result<TrialOutcome> {
    let n = rng.random_range(1..=32);
    let count = rng.random_range(n..=2 * n);
    let f = random_parseval(rng, n, count);
    let theta = random_normal_theta(rng, n);
    let c = construct_theorem_3_8(&f, &theta, None, tol)?;
    let ta = theta.adjoint();
    let mut worst_eq = 0.0f64;
    let mut converse = true;
    for _ in 0..100 {
        let x = gaussian_vector(rng, n);
        let energy: f64 = c.g.vectors().iter().map(|v| inner(&x, v).norm_sqr()).sum();
        let ts = norm_sq(&ta.apply(&x)?);
        let t = norm_sq(&theta.apply(&x)?);
        worst_eq = worst_eq.max((energy - ts).abs() / ts);
        converse &= ts.sqrt() <= t.sqrt() * (1.0 + 1e-9);
    }
    Ok(TrialOutcome::new(
        c.tight && worst_eq <= 1e-9 && converse,
        "normal",
        format!("n={n} N={count}: tight={} max relative equality defect={worst_eq:e} converse={converse}", c.tight),
    ))
}

// ----------------------------------------------------------- Theorem 3.10

/// `Θ = Q diag(θ) Q*`, `U = Q diag(u) Q*` and a random frame; `U` is
/// unitary when `unitary` is set, otherwise `|u_i| ∈ [0.3, 3]`.
pub fn theorem_3_10_instance<R: Rng + ?Sized>(rng: &mut R, unitary: bool) -> (FrameSystem, Operator, Operator) {
    let n = rng.random_range(1..=16);
    let q = random_unitary(rng, n);
    let conj = |d: Vec<C64>| &(&q * &Operator::from_diag(&d)) * &q.adjoint();
    let th: Vec<C64> =
        (0..n).map(|_| C64::from_polar(rng.random_range(0.2..2.0), rng.random_range(0.0..6.3))).collect();
    let u: Vec<C64> = (0..n)
        .map(|_| {
            let r = if unitary { 1.0 } else { rng.random_range(0.3..3.0) };
            C64::from_polar(r, rng.random_range(0.0..6.3))
        })
        .collect();
    let count = rng.random_range(n..=2 * n + 1);
    (random_system(rng, n, count), conj(th), conj(u))
}

/// Even trials: unitary `U`, checked against the bounds as stated. Odd
/// trials: general invertible `U`, checked against the corrected sandwich
/// and `B₂ ≤ B₁‖U‖²`.
pub fn theorem_3_10_trial(trial: u64, rng: &mut TrialRng, tol: &Tolerance) -> Result<TrialOutcome> {
    let unitary = trial.is_multiple_of(2);
    let (f, theta, u) = theorem_3_10_instance(rng, unitary);
    let t = transform_frame_check(&f, &theta, &u, tol)?;
    let ok = if unitary { t.bounds_hold() } else { t.corrected_bounds_hold() };
    Ok(TrialOutcome::new(
        t.commutes && ok,
        if unitary { "unitary" } else { "invertible" },
        format!(
            "n={}: commutator={:e} A1={:?} A2={:?} B1={:e} B2={:e} |U|={:e} |U^-1|={:e} lambda={:?}",
            f.dim(),
            t.commutator_norm,
            t.report_f.alpha_opt,
            t.report_g.alpha_opt,
            t.report_f.beta_opt,
            t.report_g.beta_opt,
            t.u_norm,
            t.u_inv_norm,
            t.relative_lambda
        ),
    ))
}

// ------------------------------------------------------ Theorems 4.1, 4.2

/// Random redundant frame, random partition and unitary Θ.
pub fn theorem_4_1_instance<R: Rng + ?Sized>(rng: &mut R) -> (FrameSystem, PartitionCombination, Operator) {
    let n = rng.random_range(2..=8);
    let count = 2 * n;
    let f = random_system(rng, n, count);
    let cells_n = rng.random_range(1..=count);
    let mut perm: Vec<usize> = (0..count).collect();
    for i in (1..count).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    // The first `cells_n` shuffled indices seed the cells, the rest are
    // assigned at random.
    let mut cells: Vec<Vec<usize>> = perm[..cells_n].iter().map(|&i| vec![i]).collect();
    for &i in &perm[cells_n..] {
        let c = rng.random_range(0..cells_n);
        cells[c].push(i);
    }
    let coefficients =
        (0..count).map(|_| C64::from_polar(rng.random_range(0.2..2.0), rng.random_range(0.0..6.3))).collect();
    (f, PartitionCombination::new(cells, coefficients), random_unitary(rng, n))
}

/// Random Gabor-type parameters, nonzero scalars and windows; with
/// probability one half the windows are chosen so that `Σ α_s ψ_s`
/// vanishes on a whole residue class (or entirely), which destroys the
/// frame property of the sum.
pub fn theorem_4_2_instance<R: Rng + ?Sized>(rng: &mut R) -> Result<(FiniteSumSpec, WavePacketParams, Operator, bool)> {
    let q = rng.random_range(1..=3usize);
    let periods = rng.random_range(2..=4usize);
    let grid = Grid::new(q, periods)?;
    let n = grid.n();
    let p = rng.random_range(1..=4usize);
    let alphas: Vec<C64> =
        (0..p).map(|_| C64::from_polar(rng.random_range(0.3..2.0), rng.random_range(0.0..6.3))).collect();
    let mut psis: Vec<Signal> =
        (0..p).map(|_| Signal::from_coords(grid, &gaussian_vector(rng, n))).collect::<Result<_>>()?;
    let degenerate = p >= 2 && rng.random_bool(0.5);
    if degenerate {
        let residue = rng.random_range(0..q);
        let wipe_all = rng.random_bool(0.2);
        let target: Vec<C64> = gaussian_vector(rng, n)
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                // Dilation by −1 maps the residue class r to −r, so both go.
                let wiped = wipe_all || i % q == residue || i % q == (q - residue) % q;
                if wiped {
                    C64::new(0.0, 0.0)
                } else {
                    v
                }
            })
            .collect();
        let mut rest = target;
        for s in 0..p - 1 {
            for (r, v) in rest.iter_mut().zip(psis[s].coords()) {
                *r -= alphas[s] * v;
            }
        }
        let last: Vec<C64> = rest.iter().map(|v| v / alphas[p - 1]).collect();
        psis[p - 1] = Signal::from_coords(grid, &last)?;
    }
    let a_list = if n > 2 && rng.random_bool(0.5) { vec![1, -1] } else { vec![1] };
    let params = WavePacketParams {
        psi: psis[0].clone(),
        a_list,
        b: 1.0,
        k_range: [0, periods as i64],
        c_list: (0..q).map(|m| m as f64).collect(),
        dedupe: false,
    };
    Ok((FiniteSumSpec { alphas, psis }, params, random_unitary(rng, n), degenerate))
}

pub fn theorem_4_1_trial<R: Rng + ?Sized>(rng: &mut R, tol: &Tolerance) -> Result<TrialOutcome> {
    let (f, pc, theta) = theorem_4_1_instance(rng);
    let phi = partition_combination(&f, &pc)?;
    let r = theorem_4_1_check(&phi, &f, &theta, Some(&pc.coefficient_map(f.len())), tol)?;
    Ok(TrialOutcome::new(
        r.preconditions_hold && r.agrees && r.lambda_bound_ok != Some(false) && r.upper_estimate_ok,
        "partition",
        format!(
            "n={} cells={}: lambda_opt={:?} phi passes={} lambda bound={:?} upper estimate={}",
            f.dim(),
            pc.cells.len(),
            r.lambda_opt,
            r.report_phi.passes(),
            r.lambda_bound_ok,
            r.upper_estimate_ok
        ),
    ))
}

pub fn theorem_4_2_trial<R: Rng + ?Sized>(rng: &mut R, tol: &Tolerance) -> Result<TrialOutcome> {
    let (spec, params, theta, degenerate) = theorem_4_2_instance(rng)?;
    let r = theorem_4_2_check(&spec, &params, &theta, tol)?;
    let expected = !degenerate;
    Ok(TrialOutcome::new(
        r.preconditions_hold && r.agrees && r.report.passes() == expected && r.upper_bound_ok != Some(false),
        if degenerate { "finite-sum-degenerate" } else { "finite-sum" },
        format!(
            "n={} p={}: mu_opt={:?} F_p passes={} upper bound={:?}",
            params.psi.grid().n(),
            spec.p(),
            r.mu_opt,
            r.report.passes(),
            r.upper_bound_ok
        ),
    ))
}

/// One partition instance and one finite-sum instance per trial.
pub fn theorems_4_trial(_trial: u64, rng: &mut TrialRng, tol: &Tolerance) -> Result<TrialOutcome> {
    let a = theorem_4_1_trial(rng, tol)?;
    let b = theorem_4_2_trial(rng, tol)?;
    Ok(TrialOutcome::new(
        a.passed && b.passed,
        &format!("{}+{}", a.case, b.case),
        format!("{} | {}", a.detail, b.detail),
    ))
}
