//! Pinned desk-scale models of the worked examples and a registry that runs
//! each one against its documented expected outcome.
//!
//! Every model is deterministic: grid sizes and parameter lists are fixed,
//! and the few sampled quantities draw from fixed seeds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{frame_operator, optimal_bounds, FrameSystem};
use crate::json::{cvec, real};
use crate::numerics::{norm_sq, normalized, unit_vector, Operator, Tolerance};
use crate::random::{gaussian_vector, random_parseval, rng_from_seed, vector_in_span};
use crate::signal::{
    indicator, mult_operator, operator_of, shift_operators, summing_operator, Grid, OperatorKind, Signal,
    TruncatedSequenceSpace,
};
use crate::suites::{random_normal_theta, theorem_3_10_instance};
use crate::theta::{
    check_k_frame_on, check_theta_frame, check_theta_frame_on, construct_theorem_3_8, transform_frame_check,
};
use crate::wavepacket::{
    finite_sum_system, generate_system, theorem_3_5_check, theorem_4_2_check, FiniteSumSpec, WavePacketParams,
};
use crate::C64;

/// Identifiers accepted by [`verify_example`].
pub const EXAMPLE_IDS: &[&str] = &["3.2", "3.3", "3.5", "3.8", "3.10", "3.12", "4.3"];

/// One asserted expectation with the value that decided it.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(serialize_with = "real")]
    pub value: f64,
    /// The expectation in words, e.g. `"1 ± 1e-9"` or `"< 0.01"`.
    pub expected: String,
}

impl Check {
    /// `|value − target| ≤ eps`.
    pub fn close(name: &str, value: f64, target: f64, eps: f64) -> Self {
        Check {
            name: name.into(),
            passed: (value - target).abs() <= eps,
            value,
            expected: format!("{target} ± {eps:e}"),
        }
    }

    /// `value < limit`.
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), passed: value < limit, value, expected: format!("< {limit}") }
    }

    /// `value > limit`.
    pub fn above(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), passed: value > limit, value, expected: format!("> {limit}") }
    }

    /// A boolean expectation, recorded as value 1 (true) or 0 (false).
    pub fn truth(name: &str, value: bool, expected: bool) -> Self {
        Check {
            name: name.into(),
            passed: value == expected,
            value: if value { 1.0 } else { 0.0 },
            expected: expected.to_string(),
        }
    }
}

/// A named vector attached to an outcome.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub name: String,
    #[serde(serialize_with = "cvec")]
    pub vector: Vec<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleOutcome {
    pub id: String,
    pub title: String,
    pub checks: Vec<Check>,
    pub witnesses: Vec<Witness>,
}

impl ExampleOutcome {
    fn new(id: &str, title: &str) -> Self {
        ExampleOutcome { id: id.into(), title: title.into(), checks: vec![], witnesses: vec![] }
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn witness(&mut self, name: &str, vector: Vec<C64>) {
        self.witnesses.push(Witness { name: name.into(), vector });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Run the pinned model for `id` and evaluate its expectations.
pub fn verify_example(id: &str, tol: &Tolerance) -> Result<ExampleOutcome> {
    match id {
        "3.2" => verify_example_3_2(32, 1, tol),
        "3.3" => verify_remark_3_3(64, tol),
        "3.5" => verify_example_3_5(1.0, tol),
        "3.8" => verify_theorem_3_8(tol),
        "3.10" => verify_theorem_3_10(tol),
        "3.12" => verify_example_3_12(tol),
        "4.3" => verify_example_4_3(&[1.0, 2.0, -1.0], tol),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

fn energy(f: &FrameSystem, x: &[C64]) -> f64 {
    f.energy(x)
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

// ------------------------------------------------------------ Example 3.2

/// Canonical basis of `ℂⁿ`, the backward shift `Θ` and the truncated space.
pub fn example_3_2(n: usize, margin: usize) -> Result<(FrameSystem, Operator, TruncatedSequenceSpace)> {
    let space = TruncatedSequenceSpace::new(n, margin)?;
    let (backward, _) = shift_operators(&space);
    Ok((FrameSystem::canonical_basis(n), backward, space))
}

/// A K-frame (K = backward shift) with bounds 1, 1 on the margin that is not
/// a Θ-frame for the same operator: `χ₁ ∈ ker Θ` carries energy.
pub fn verify_example_3_2(n: usize, margin: usize, tol: &Tolerance) -> Result<ExampleOutcome> {
    let (f, theta, space) = example_3_2(n, margin)?;
    let mut out = ExampleOutcome::new("3.2", "canonical basis: K-frame for the backward shift, not a Θ-frame");
    let k = check_k_frame_on(&f, &theta, &space.margin_basis(), tol)?;
    out.check(Check::close("k_frame.a_opt (margin)", k.a_opt, 1.0, 1e-9));
    out.check(Check::close("k_frame.b_opt (margin)", k.b_opt, 1.0, 1e-9));
    let r = check_theta_frame(&f, &theta, tol)?;
    out.check(Check::truth("theta_frame.passes", r.passes(), false));
    out.check(Check::truth("theta_frame.upper_ok", r.upper_ok, false));
    let w = r.kernel_obstruction().map(<[C64]>::to_vec).unwrap_or_default();
    let chi1 = unit_vector(n, 0);
    let overlap = if w.is_empty() { 0.0 } else { crate::numerics::inner(&w, &chi1).norm() };
    out.check(Check::close("|<witness, chi_1>|", overlap, 1.0, 1e-9));
    out.check(Check::close("|Theta chi_1|^2", norm_sq(&theta.apply(&chi1)?), 0.0, 1e-12));
    out.check(Check::close("sum |<chi_1, e_k>|^2", energy(&f, &chi1), 1.0, 1e-12));
    out.witness("kernel_witness", w);
    Ok(out)
}

// ------------------------------------------------------------- Remark 3.3

/// `f_k = χ_k + χ_{k+1}` (`k < n`), `f_n = χ_n`, with `Θ` the summing operator.
pub fn remark_3_3(n: usize) -> Result<(FrameSystem, Operator, TruncatedSequenceSpace)> {
    let space = TruncatedSequenceSpace::new(n, 1)?;
    let theta = summing_operator(&space);
    let vectors = (0..n).map(|k| theta.column(k)).collect();
    Ok((FrameSystem::new(n, vectors)?, theta, space))
}

/// Lower Θ-inequality with some `γ ∈ (0,1)` on the margin while the
/// classical lower frame bound collapses.
pub fn verify_remark_3_3(n: usize, tol: &Tolerance) -> Result<ExampleOutcome> {
    let (f, theta, space) = remark_3_3(n)?;
    let mut out =
        ExampleOutcome::new("3.3", "summing operator: lower Θ-bound holds, classical lower bound degenerates");
    let basis = space.margin_basis();
    let r = check_theta_frame_on(&f, &theta, &basis, tol)?;
    out.check(Check::truth("lower_ok (margin)", r.lower_ok, true));
    let alpha = r.alpha();
    out.check(Check::above("alpha_opt (margin)", alpha, tol.psd_floor));
    let gamma = alpha.min(1.0) / 2.0;
    out.check(Check::above("gamma", gamma, 0.0));
    out.check(Check::below("gamma", gamma, 1.0));
    let ta = theta.adjoint();
    let mut rng = rng_from_seed(33);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let x = vector_in_span(&mut rng, &basis);
        let lhs = norm_sq(&ta.apply(&x)?);
        worst = worst.min(energy(&f, &x) - gamma * lhs);
    }
    out.check(Check::above("min sampled sum - gamma |Theta* f|^2", worst, 0.0));
    let b = optimal_bounds(&f, tol)?;
    out.check(Check::below("classical delta_0", b.lower, 0.01));
    out.witness("classical_lower_witness", b.lower_witness);
    Ok(out)
}

// ------------------------------------------------------------ Example 3.5

fn grid_4x4() -> Grid {
    Grid::new(4, 4).expect("positive grid")
}

/// `{χ_[k,k+1)}₀³` on `Grid(4, 4)` as the wave packet system
/// `a = 1, b = 1, k ∈ [0,4), c = 0`, and `Θ = multiplication by χ_[0,1)`.
pub fn example_3_5() -> Result<(FrameSystem, Operator, WavePacketParams)> {
    let grid = grid_4x4();
    let params = WavePacketParams {
        psi: indicator(grid, 0.0, 1.0)?,
        a_list: vec![1],
        b: 1.0,
        k_range: [0, 4],
        c_list: vec![0.0],
        dedupe: true,
    };
    let f = generate_system(&params)?;
    Ok((f, mult_operator(&indicator(grid, 0.0, 1.0)?), params))
}

/// Kernel obstruction to the upper Θ-bound and the worked witness
/// `h = χ_[0,1) + √B χ_[2,3)` with `Σ|⟨h, f_k⟩|² = 1 + B > B‖Θh‖²`.
pub fn verify_example_3_5(b: f64, tol: &Tolerance) -> Result<ExampleOutcome> {
    let (f, theta, _) = example_3_5()?;
    let grid = grid_4x4();
    let mut out = ExampleOutcome::new("3.5", "unit-interval translates: upper Θ-bound fails on ker Θ");
    let r = check_theta_frame(&f, &theta, tol)?;
    out.check(Check::truth("upper_ok", r.upper_ok, false));
    out.check(Check::truth("beta_opt is infinite", r.beta_opt.is_infinite(), true));
    let w = r.kernel_obstruction().map(<[C64]>::to_vec).unwrap_or_default();
    out.check(Check::truth("kernel witness present", !w.is_empty(), true));
    if !w.is_empty() {
        out.check(Check::close("|Theta w|^2", norm_sq(&theta.apply(&w)?), 0.0, 1e-12));
        out.check(Check::close("sum |<w, f_k>|^2", energy(&f, &w), 1.0, 1e-10));
        // The top eigenvalue of S on ker Θ is degenerate: any unit vector of
        // span{χ_[1,2), χ_[2,3), χ_[3,4)} is a valid witness.
        let span = Operator::from_columns(
            grid.n(),
            &(1..4)
                .map(|k| Ok(normalized(&indicator(grid, k as f64, k as f64 + 1.0)?.coords())))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let proj = span.adjoint().apply(&w)?;
        out.check(Check::close("|P_span w|^2", norm_sq(&proj), 1.0, 1e-10));
    }
    out.witness("kernel_witness", w);

    let chi01 = indicator(grid, 0.0, 1.0)?;
    let chi23 = indicator(grid, 2.0, 3.0)?;
    let h = chi01.add(&chi23.scale(C64::new(b.sqrt(), 0.0)))?.coords();
    let sum = energy(&f, &h);
    let theta_h = norm_sq(&theta.apply(&h)?);
    out.check(Check::close("sum |<h, f_k>|^2", sum, 1.0 + b, 1e-10));
    out.check(Check::close("|Theta h|^2", theta_h, 1.0, 1e-10));
    out.check(Check::above("sum - B |Theta h|^2", sum - b * theta_h, 0.0));
    out.witness("h", h);

    let t35 = theorem_3_5_check(&f, &theta, tol)?;
    out.check(Check::truth("relative hyponormality (i)", t35.relative.holds, false));
    out.check(Check::truth("biconditional agrees", t35.agrees, true));
    Ok(out)
}

// ------------------------------------------------------------ Theorem 3.8

/// A seeded Parseval frame of `ℂ⁸` with 12 vectors and a normal `Θ`.
pub fn theorem_3_8_model() -> (FrameSystem, Operator) {
    let mut rng = rng_from_seed(38);
    let f = random_parseval(&mut rng, 8, 12);
    let theta = random_normal_theta(&mut rng, 8);
    (f, theta)
}

/// `{Θf_k}` is `(Θ, 1)`-tight for a Parseval frame and hyponormal `Θ`.
pub fn verify_theorem_3_8(tol: &Tolerance) -> Result<ExampleOutcome> {
    let (f, theta) = theorem_3_8_model();
    let mut out = ExampleOutcome::new("3.8", "image of a Parseval frame under a hyponormal Θ is (Θ,1)-tight");
    let c = construct_theorem_3_8(&f, &theta, None, tol)?;
    out.check(Check::truth("Theta hyponormal", c.hyponormality.verdict(), true));
    out.check(Check::truth("(Theta, 1)-tight", c.tight, true));
    out.check(Check::close("|S_G - Theta Theta*| (relative)", c.equality_defect, 0.0, 1e-9));
    let ta = theta.adjoint();
    let mut rng = rng_from_seed(380);
    let (mut worst, mut converse) = (0.0f64, true);
    for _ in 0..100 {
        let x = gaussian_vector(&mut rng, f.dim());
        let ts = norm_sq(&ta.apply(&x)?);
        worst = worst.max((energy(&c.g, &x) - ts).abs() / ts);
        converse &= ts.sqrt() <= norm_sq(&theta.apply(&x)?).sqrt() * (1.0 + 1e-9);
    }
    out.check(Check::close("max relative |sum - |Theta* f|^2|", worst, 0.0, 1e-9));
    out.check(Check::truth("|Theta* f| <= |Theta f| on samples", converse, true));
    Ok(out)
}

// ----------------------------------------------------------- Theorem 3.10

/// The one-dimensional counterexample to the stated lower sandwich for
/// non-unitary `U`: `F = {1}`, `Θ = 1`, `U = 1/2`.
pub fn theorem_3_10_counterexample() -> Result<(FrameSystem, Operator, Operator)> {
    let f = FrameSystem::canonical_basis(1);
    Ok((f, Operator::identity(1), Operator::from_real_diag(&[0.5])))
}

/// Bound sandwich for a commuting invertible `U`: the stated bounds for a
/// unitary `U`, the corrected bounds for a general one, and the counterexample.
pub fn verify_theorem_3_10(tol: &Tolerance) -> Result<ExampleOutcome> {
    let mut out = ExampleOutcome::new("3.10", "frame bounds under a commuting invertible U");
    let mut rng = rng_from_seed(310);
    let (f, theta, u) = theorem_3_10_instance(&mut rng, true);
    let t = transform_frame_check(&f, &theta, &u, tol)?;
    out.check(Check::truth("unitary U: commutes", t.commutes, true));
    out.check(Check::truth("unitary U: stated bounds hold", t.bounds_hold(), true));
    let (f, theta, u) = theorem_3_10_instance(&mut rng, false);
    let t = transform_frame_check(&f, &theta, &u, tol)?;
    out.check(Check::truth("invertible U: commutes", t.commutes, true));
    out.check(Check::truth("invertible U: corrected bounds hold", t.corrected_bounds_hold(), true));
    out.check(Check::truth("invertible U: B2 <= B1 |U|^2", t.upper_ok, true));
    let (f, theta, u) = theorem_3_10_counterexample()?;
    let t = transform_frame_check(&f, &theta, &u, tol)?;
    out.check(Check::close("counterexample A2", t.report_g.alpha(), 0.25, 1e-12));
    out.check(Check::truth("counterexample: stated lower sandwich", t.lower_sandwich_ok, false));
    out.check(Check::truth("counterexample: corrected bounds", t.corrected_bounds_hold(), true));
    Ok(out)
}

// ----------------------------------------------------------- Example 3.12

/// `{E_m χ_[0,1)}_{m=0..3}` on `Grid(4, 4)` (`b = 0`), `Θ = multiplication
/// by χ_[0,1)` and `U₀ = T₁`.
pub fn example_3_12() -> Result<(FrameSystem, Operator, Operator)> {
    let grid = grid_4x4();
    let params = WavePacketParams {
        psi: indicator(grid, 0.0, 1.0)?,
        a_list: vec![1],
        b: 0.0,
        k_range: [0, 1],
        c_list: vec![0.0, 1.0, 2.0, 3.0],
        dedupe: true,
    };
    let f = generate_system(&params)?;
    let theta = mult_operator(&indicator(grid, 0.0, 1.0)?);
    let u0 = operator_of(grid, OperatorKind::Translate(1.0))?;
    Ok((f, theta, u0))
}

/// `T₁` does not commute with `Θ*`, and the translated system loses the
/// lower Θ-bound at `f₀ = χ_[0,1)`.
pub fn verify_example_3_12(tol: &Tolerance) -> Result<ExampleOutcome> {
    let (f, theta, u0) = example_3_12()?;
    let grid = grid_4x4();
    let mut out = ExampleOutcome::new("3.12", "modulated unit window: translation breaks the lower Θ-bound");
    let ta = theta.adjoint();

    let mut rng = rng_from_seed(312);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = gaussian_vector(&mut rng, grid.n());
        let e = energy(&f, &x);
        let t = norm_sq(&theta.apply(&x)?);
        let ts = norm_sq(&ta.apply(&x)?);
        worst = worst.max((e - t).abs().max((e - ts).abs()) / t.max(1.0));
    }
    out.check(Check::close("max |sum - |Theta f|^2| (= |Theta* f|^2)", worst, 0.0, 1e-10));

    let t = transform_frame_check(&f, &theta, &u0, tol)?;
    out.check(Check::truth("commutes", t.commutes, false));
    let ones = Signal::from_fn(grid, |_| C64::new(1.0, 0.0)).coords();
    let chi01 = indicator(grid, 0.0, 1.0)?.coords();
    let chi12 = indicator(grid, 1.0, 2.0)?.coords();
    let lhs = ta.apply(&u0.apply(&ones)?)?;
    let rhs = u0.apply(&ta.apply(&ones)?)?;
    out.check(Check::close("Theta* U0 1 = chi_[0,1)", dist(&lhs, &chi01), 0.0, 1e-12));
    out.check(Check::close("U0 Theta* 1 = chi_[1,2)", dist(&rhs, &chi12), 0.0, 1e-12));
    if let Some(w) = &t.commutator_witness {
        // Eqs. (3.20)–(3.21): Θ*U₀x = (T₁x)·χ_[0,1) and U₀Θ*x = (T₁x)·χ_[1,2).
        let shifted = u0.apply(&w.f)?;
        let mask = |lo: usize, hi: usize| -> Vec<C64> {
            shifted
                .iter()
                .enumerate()
                .map(|(i, z)| if (lo..hi).contains(&i) { *z } else { C64::new(0.0, 0.0) })
                .collect()
        };
        let q = grid.q();
        let d1 = dist(&w.theta_star_u_f, &mask(0, q));
        let d2 = dist(&w.u_theta_star_f, &mask(q, 2 * q));
        out.check(Check::close("witness: Theta* U0 x = (T1 x) chi_[0,1)", d1, 0.0, 1e-12));
        out.check(Check::close("witness: U0 Theta* x = (T1 x) chi_[1,2)", d2, 0.0, 1e-12));
        out.witness("commutator_f", w.f.clone());
        out.witness("theta_star_u0_f", w.theta_star_u_f.clone());
        out.witness("u0_theta_star_f", w.u_theta_star_f.clone());
    } else {
        out.check(Check::truth("commutator witness present", false, true));
    }

    out.check(Check::truth("transformed lower_ok", t.report_g.lower_ok, false));
    let f0 = normalized(&chi01);
    out.check(Check::close("sum |<f0, U0 f_k>|^2", energy(&t.g, &f0), 0.0, 1e-12));
    out.check(Check::close("|Theta* f0|^2", norm_sq(&ta.apply(&f0)?), 1.0, 1e-12));
    if let Some(w) = &t.report_g.witnesses.lower {
        out.check(Check::close("lower witness energy", energy(&t.g, w), 0.0, 1e-12));
        out.witness("lower_witness", w.clone());
    }
    Ok(out)
}

// ------------------------------------------------------------ Example 4.3

/// `Θ = E_1`, `ψ_s = χ_[0,1)` for every `s`, `a = 1`, `b = 1`, `k ∈ [0, 4)`,
/// `c ∈ {0, 1, 2, 3}` on `Grid(4, 4)`: an orthonormal basis per window.
pub fn example_4_3(alphas: &[f64]) -> Result<(FiniteSumSpec, WavePacketParams, Operator)> {
    let grid = grid_4x4();
    let psi = indicator(grid, 0.0, 1.0)?;
    let params = WavePacketParams {
        psi: psi.clone(),
        a_list: vec![1],
        b: 1.0,
        k_range: [0, 4],
        c_list: vec![0.0, 1.0, 2.0, 3.0],
        dedupe: true,
    };
    let spec =
        FiniteSumSpec { alphas: alphas.iter().map(|&a| C64::new(a, 0.0)).collect(), psis: vec![psi; alphas.len()] };
    Ok((spec, params, operator_of(grid, OperatorKind::Modulate(1.0))?))
}

/// `μ_opt = |Σα_s|²` for a nonzero sum, and failure when the sum vanishes.
pub fn verify_example_4_3(alphas: &[f64], tol: &Tolerance) -> Result<ExampleOutcome> {
    let mut out = ExampleOutcome::new("4.3", "finite sums of one window: μ = |Σ α_s|²");
    let (spec, params, theta) = example_4_3(alphas)?;
    let r = theorem_4_2_check(&spec, &params, &theta, tol)?;
    let expected: f64 = alphas.iter().sum::<f64>().powi(2);
    let mu = r.best_xi.and_then(|i| r.mu_opt[i]).unwrap_or(0.0);
    out.check(Check::close("mu_opt", mu, expected, 1e-9));
    out.check(Check::truth("preconditions", r.preconditions_hold, true));
    out.check(Check::truth("F_p is a Theta-frame", r.report.passes(), true));
    out.check(Check::truth("biconditional agrees", r.agrees, true));
    out.check(Check::truth("upper estimate", r.upper_bound_ok.unwrap_or(false), true));

    let zero_sum = [1.0, -1.0];
    let (spec, params, theta) = example_4_3(&zero_sum)?;
    let r = theorem_4_2_check(&spec, &params, &theta, tol)?;
    let mu0 = r.mu_opt.iter().map(|m| m.unwrap_or(0.0)).fold(0.0, f64::max);
    out.check(Check::close("zero sum: mu_opt", mu0, 0.0, 1e-9));
    out.check(Check::truth("zero sum: F_p is a Theta-frame", r.report.passes(), false));
    out.check(Check::truth("zero sum: biconditional agrees", r.agrees, true));
    let s = frame_operator(&finite_sum_system(&spec, &params)?);
    out.check(Check::close("zero sum: |S_Fp|", s.max_abs(), 0.0, 1e-12));
    Ok(out)
}
