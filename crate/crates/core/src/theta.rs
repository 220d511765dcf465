//! Θ-controlled frame inequalities
//! `α‖Θ*f‖² ≤ Σ_k |⟨f, f_k⟩|² ≤ β‖Θf‖²`, K-frames, `(Θ, α₀)`-tight frames
//! and the constructions built on them.
//!
//! With `S` the frame operator, `C = ΘΘ*` and `D = Θ*Θ`, the optimal
//! constants are extreme eigenvalues of the pencils `(S, C)` and `(S, D)`.
//! The lower inequality is vacuous on `ker Θ*` and the upper one cannot hold
//! when `S` has energy on `ker Θ`; both situations are reported with
//! witnesses rather than as errors.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{frame_operator, optimal_bounds, FrameSystem};
use crate::json::{cvec, opt_cvec, opt_real, real};
use crate::numerics::{herm_eig, norm_sq, pencil_lower, pencil_upper, pinv, quad_form, svd, Operator, Tolerance};
use crate::operator_theory::{hyponormality, relative_hyponormality, HyponormalityReport};
use crate::random::vector_in_span;
use crate::C64;

#[derive(Clone, Debug, Default, Serialize)]
pub struct ThetaWitnesses {
    /// Vector attaining `alpha_opt`.
    #[serde(serialize_with = "opt_cvec")]
    pub lower: Option<Vec<C64>>,
    /// Vector attaining a finite `beta_opt`.
    #[serde(serialize_with = "opt_cvec")]
    pub upper: Option<Vec<C64>>,
    /// Unit vector with `Θf ≈ 0` but `Σ|⟨f, f_k⟩|² > 0`.
    #[serde(serialize_with = "opt_cvec")]
    pub kernel: Option<Vec<C64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaFrameReport {
    /// Greatest `α` with `α‖Θ*f‖² ≤ ⟨Sf, f⟩`; absent when `Θ = 0`.
    #[serde(serialize_with = "opt_real")]
    pub alpha_opt: Option<f64>,
    /// Least `β` with `⟨Sf, f⟩ ≤ β‖Θf‖²`; infinite on a kernel obstruction.
    #[serde(serialize_with = "real")]
    pub beta_opt: f64,
    /// `alpha_opt > psd_floor` (vacuously true when `Θ = 0`).
    pub lower_ok: bool,
    /// `beta_opt` finite.
    pub upper_ok: bool,
    pub witnesses: ThetaWitnesses,
    /// Largest eigenvalue of `S` compressed to `ker Θ`.
    pub kernel_excess: f64,
}

impl ThetaFrameReport {
    /// Both Θ-frame inequalities hold.
    pub fn passes(&self) -> bool {
        self.lower_ok && self.upper_ok
    }

    pub fn kernel_obstruction(&self) -> Option<&[C64]> {
        self.witnesses.kernel.as_deref()
    }

    /// `alpha_opt`, with the vacuous case `Θ = 0` read as `+∞`.
    pub fn alpha(&self) -> f64 {
        self.alpha_opt.unwrap_or(f64::INFINITY)
    }
}

fn check_square(name: &str, t: &Operator, n: usize) -> Result<()> {
    if t.rows() != n || t.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{} but the system lives in dimension {n}",
            t.rows(),
            t.cols()
        )));
    }
    Ok(())
}

fn check_subspace(p: &Operator, n: usize) -> Result<()> {
    if p.rows() != n {
        return Err(Error::DimensionMismatch(format!("subspace basis has {} rows, expected {n}", p.rows())));
    }
    Ok(())
}

fn compress(x: &Operator, p: Option<&Operator>) -> Operator {
    match p {
        Some(p) => (&(&p.adjoint() * x) * p).hermitian_part(),
        None => x.clone(),
    }
}

fn embed(v: Vec<C64>, p: Option<&Operator>) -> Vec<C64> {
    match p {
        Some(p) => p.apply(&v).expect("witness lives in subspace coordinates"),
        None => v,
    }
}

fn theta_report(s: &Operator, theta: &Operator, p: Option<&Operator>, tol: &Tolerance) -> Result<ThetaFrameReport> {
    let ta = theta.adjoint();
    let s = compress(s, p);
    let c = compress(&(theta * &ta), p);
    let d = compress(&(&ta * theta), p);
    let lower = pencil_lower(&s, &c, tol)?;
    let upper = pencil_upper(&s, &d, tol)?;
    let alpha_opt = lower.as_ref().map(|b| b.value.max(0.0));
    let lower_ok = alpha_opt.is_none_or(|a| a > tol.psd_floor);
    let upper_ok = upper.is_finite();
    let mut witnesses = ThetaWitnesses { lower: lower.map(|b| embed(b.witness, p)), ..Default::default() };
    if upper_ok {
        witnesses.upper = Some(embed(upper.witness, p));
    } else {
        witnesses.kernel = Some(embed(upper.witness, p));
    }
    Ok(ThetaFrameReport {
        alpha_opt,
        beta_opt: upper.value,
        lower_ok,
        upper_ok,
        witnesses,
        kernel_excess: upper.kernel_excess,
    })
}

/// Optimal Θ-frame constants of `f` on the whole space.
pub fn check_theta_frame(f: &FrameSystem, theta: &Operator, tol: &Tolerance) -> Result<ThetaFrameReport> {
    check_square("Theta", theta, f.dim())?;
    theta_report(&frame_operator(f), theta, None, tol)
}

/// Optimal Θ-frame constants for `f` restricted to the span of the
/// orthonormal columns of `subspace`.
pub fn check_theta_frame_on(
    f: &FrameSystem,
    theta: &Operator,
    subspace: &Operator,
    tol: &Tolerance,
) -> Result<ThetaFrameReport> {
    check_square("Theta", theta, f.dim())?;
    check_subspace(subspace, f.dim())?;
    theta_report(&frame_operator(f), theta, Some(subspace), tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct KFrameReport {
    /// Greatest `A` with `A‖K*f‖² ≤ ⟨Sf, f⟩`; `+∞` when `K = 0`.
    #[serde(serialize_with = "real")]
    pub a_opt: f64,
    /// `λ_max(S)`.
    pub b_opt: f64,
    /// `K` vanishes and the lower inequality is vacuous.
    pub degenerate: bool,
    #[serde(serialize_with = "opt_cvec")]
    pub lower_witness: Option<Vec<C64>>,
    #[serde(serialize_with = "cvec")]
    pub upper_witness: Vec<C64>,
}

fn k_report(s: &Operator, k: &Operator, p: Option<&Operator>, tol: &Tolerance) -> Result<KFrameReport> {
    let s = compress(s, p);
    let kk = compress(&(k * &k.adjoint()), p);
    let lower = pencil_lower(&s, &kk, tol)?;
    let eig = herm_eig(&s)?;
    let upper_witness = embed(eig.vector(eig.values.len() - 1), p);
    Ok(match lower {
        Some(b) => KFrameReport {
            a_opt: b.value.max(0.0),
            b_opt: eig.max().max(0.0),
            degenerate: false,
            lower_witness: Some(embed(b.witness, p)),
            upper_witness,
        },
        None => KFrameReport {
            a_opt: f64::INFINITY,
            b_opt: eig.max().max(0.0),
            degenerate: true,
            lower_witness: None,
            upper_witness,
        },
    })
}

/// Optimal K-frame constants `A‖K*f‖² ≤ Σ|⟨f, f_k⟩|² ≤ B‖f‖²`.
pub fn check_k_frame(f: &FrameSystem, k: &Operator, tol: &Tolerance) -> Result<KFrameReport> {
    check_square("K", k, f.dim())?;
    k_report(&frame_operator(f), k, None, tol)
}

/// [`check_k_frame`] restricted to the span of the orthonormal columns of `subspace`.
pub fn check_k_frame_on(f: &FrameSystem, k: &Operator, subspace: &Operator, tol: &Tolerance) -> Result<KFrameReport> {
    check_square("K", k, f.dim())?;
    check_subspace(subspace, f.dim())?;
    k_report(&frame_operator(f), k, Some(subspace), tol)
}

/// K-frame bounds `(α, β‖Θ‖²)` with `K = Θ` implied by a Θ-frame.
pub fn theta_to_k_bounds(report: &ThetaFrameReport, theta: &Operator) -> Result<(f64, f64)> {
    if !report.passes() {
        return Err(Error::NotThetaFrame(format!("lower_ok = {}, upper_ok = {}", report.lower_ok, report.upper_ok)));
    }
    let n = theta.norm();
    Ok((report.alpha(), report.beta_opt * n * n))
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaTight {
    pub is_theta_tight: bool,
    /// The common constant (`alpha_opt`, or 0 when the lower side fails).
    pub alpha0: f64,
    /// `Θ = I`, excluded by the definition; reported rather than rejected.
    pub theta_is_identity: bool,
    pub report: ThetaFrameReport,
}

fn is_identity(theta: &Operator, tol: &Tolerance) -> bool {
    theta.is_square() && (theta - &Operator::identity(theta.rows())).max_abs() <= tol.verdict_rel
}

/// Whether a single `α₀` satisfies `α₀‖Θ*f‖² ≤ ⟨Sf, f⟩ ≤ α₀‖Θf‖²`, i.e.
/// `beta_opt ≤ alpha_opt`.
///
/// Since `trace(ΘΘ*) = trace(Θ*Θ)`, such a sandwich forces `ΘΘ* = Θ*Θ`
/// and `S = α₀ΘΘ*`, so this agrees with the equality formulation.
pub fn theta_tight_check(f: &FrameSystem, theta: &Operator, tol: &Tolerance) -> Result<ThetaTight> {
    let report = check_theta_frame(f, theta, tol)?;
    let alpha0 = if report.lower_ok { report.alpha_opt.unwrap_or(0.0) } else { 0.0 };
    let is_theta_tight = report.passes()
        && report.alpha_opt.is_some()
        && report.beta_opt <= alpha0 * (1.0 + tol.verdict_rel) + tol.psd_floor;
    Ok(ThetaTight { is_theta_tight, alpha0, theta_is_identity: is_identity(theta, tol), report })
}

/// Whether `f` is `(Θ, α₀)`-tight for the prescribed `α₀ > 0`.
pub fn theta_tight_check_at(f: &FrameSystem, theta: &Operator, alpha0: f64, tol: &Tolerance) -> Result<bool> {
    let report = check_theta_frame(f, theta, tol)?;
    Ok(alpha0 > 0.0
        && report.alpha() >= alpha0 * (1.0 - tol.verdict_rel) - tol.psd_floor
        && report.beta_opt <= alpha0 * (1.0 + tol.verdict_rel) + tol.psd_floor)
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem38 {
    /// `{Θ f_k}`.
    pub g: FrameSystem,
    pub report: ThetaFrameReport,
    /// `(Θ, 1)`-tight.
    pub tight: bool,
    /// `‖S_G − ΘΘ*‖ / max(1, ‖ΘΘ*‖)`; zero in exact arithmetic.
    pub equality_defect: f64,
    pub hyponormality: HyponormalityReport,
}

/// Image `{Θ f_k}` of a Parseval frame under a hyponormal `Θ`, which is a
/// `(Θ, 1)`-tight frame since `Σ|⟨f, Θf_k⟩|² = ‖Θ*f‖² ≤ ‖Θf‖²`.
pub fn construct_theorem_3_8(
    f_parseval: &FrameSystem,
    theta: &Operator,
    verdict_subspace: Option<&Operator>,
    tol: &Tolerance,
) -> Result<Theorem38> {
    check_square("Theta", theta, f_parseval.dim())?;
    let b = optimal_bounds(f_parseval, tol)?;
    if (b.lower - 1.0).abs() > tol.verdict_rel || (b.upper - 1.0).abs() > tol.verdict_rel {
        return Err(Error::NotParseval { lower: b.lower, upper: b.upper });
    }
    let hyp = hyponormality(theta, tol, verdict_subspace)?;
    if !hyp.verdict() {
        return Err(Error::NotHyponormal { min_eig: hyp.margin_min_eig.unwrap_or(hyp.commutator_min_eig) });
    }
    let g = f_parseval.map(theta)?;
    let c = theta * &theta.adjoint();
    let equality_defect = (&frame_operator(&g) - &c).norm() / c.norm().max(1.0);
    let tight = theta_tight_check_at(&g, theta, 1.0, tol)?;
    let report = check_theta_frame(&g, theta, tol)?;
    Ok(Theorem38 { g, report, tight, equality_defect, hyponormality: hyp })
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorWitness {
    #[serde(serialize_with = "cvec")]
    pub f: Vec<C64>,
    /// `Θ*U f`.
    #[serde(serialize_with = "cvec")]
    pub theta_star_u_f: Vec<C64>,
    /// `UΘ* f`.
    #[serde(serialize_with = "cvec")]
    pub u_theta_star_f: Vec<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformCheck {
    /// `{U f_k}`.
    pub g: FrameSystem,
    pub commutes: bool,
    /// `‖UΘ* − Θ*U‖`.
    pub commutator_norm: f64,
    /// Top singular direction of the commutator when it does not vanish.
    pub commutator_witness: Option<CommutatorWitness>,
    pub report_f: ThetaFrameReport,
    pub report_g: ThetaFrameReport,
    pub u_norm: f64,
    pub u_inv_norm: f64,
    pub theta_norm: f64,
    /// `λ` of the pair `(Θ, U*)` when relatively hyponormal.
    #[serde(serialize_with = "opt_real")]
    pub relative_lambda: Option<f64>,
    /// `A₁‖U‖⁻² ≤ A₂ ≤ A₁‖U⁻¹‖²`, as stated in the homeomorphism theorem.
    /// Its proof uses `Σ|⟨Uf, Uf_k⟩|² = Σ|⟨f, f_k⟩|²`, which needs `U`
    /// unitary; for other `U` this can fail (e.g. `n = 1`, `|U| = 1/2`).
    pub lower_sandwich_ok: bool,
    /// `A₁‖U⁻¹‖⁻² ≤ A₂ ≤ A₁‖U‖²`, valid whenever `U` commutes with both
    /// `Θ` and `Θ*` (e.g. a simultaneously diagonalized normal pair).
    pub corrected_lower_sandwich_ok: bool,
    /// `‖U*U − I‖ ≤ verdict_rel`.
    pub u_is_unitary: bool,
    /// `B₂ ≤ B₁‖U‖²`.
    pub upper_ok: bool,
    /// `B₁ ≤ λB₂‖Θ‖²`, evaluated when the pair is relatively hyponormal.
    pub relative_upper_ok: Option<bool>,
}

impl TransformCheck {
    /// The bounds exactly as stated in the theorem (sound for unitary `U`).
    pub fn bounds_hold(&self) -> bool {
        self.lower_sandwich_ok && self.upper_ok && self.relative_upper_ok.unwrap_or(true)
    }

    /// The bounds that hold for every invertible `U` commuting with `Θ` and
    /// `Θ*`: the corrected lower sandwich and `B₂ ≤ B₁‖U‖²`.
    pub fn corrected_bounds_hold(&self) -> bool {
        self.corrected_lower_sandwich_ok && self.upper_ok
    }
}

fn le(a: f64, b: f64, tol: &Tolerance) -> bool {
    a <= b * (1.0 + tol.verdict_rel) + tol.psd_floor
}

/// Image of `f` under an invertible `U` and the bound sandwich of the
/// homeomorphism theorem.
pub fn transform_frame_check(
    f: &FrameSystem,
    theta: &Operator,
    u: &Operator,
    tol: &Tolerance,
) -> Result<TransformCheck> {
    check_square("Theta", theta, f.dim())?;
    check_square("U", u, f.dim())?;
    let sv = svd(u)?;
    let u_norm = sv.max_singular();
    let smin = sv.singulars.last().copied().unwrap_or(0.0);
    if u_norm == 0.0 || smin <= tol.rank_rel * u_norm {
        return Err(Error::SingularU { condition: if smin > 0.0 { u_norm / smin } else { f64::INFINITY } });
    }
    let u_inv_norm = 1.0 / smin;
    let theta_norm = theta.norm();
    let ta = theta.adjoint();
    let comm = &(u * &ta) - &(&ta * u);
    let commutator_norm = comm.norm();
    let commutes = commutator_norm <= tol.verdict_rel * u_norm * theta_norm;
    let commutator_witness = if commutes {
        None
    } else {
        let csv = svd(&comm)?;
        let x = csv.right.column(0);
        Some(CommutatorWitness {
            theta_star_u_f: ta.apply(&u.apply(&x)?)?,
            u_theta_star_f: u.apply(&ta.apply(&x)?)?,
            f: x,
        })
    };
    let g = f.map(u)?;
    let report_f = check_theta_frame(f, theta, tol)?;
    let report_g = check_theta_frame(&g, theta, tol)?;
    let (a1, a2, b1, b2) = (report_f.alpha(), report_g.alpha(), report_f.beta_opt, report_g.beta_opt);
    let lower_sandwich_ok = le(a1 / (u_norm * u_norm), a2, tol) && le(a2, a1 * u_inv_norm * u_inv_norm, tol);
    let corrected_lower_sandwich_ok = le(a1 / (u_inv_norm * u_inv_norm), a2, tol) && le(a2, a1 * u_norm * u_norm, tol);
    let u_is_unitary = (&(&u.adjoint() * u) - &Operator::identity(u.rows())).norm() <= tol.verdict_rel;
    let upper_ok = le(b2, b1 * u_norm * u_norm, tol);
    let rel = relative_hyponormality(theta, &u.adjoint(), tol)?;
    let relative_lambda = rel.holds.then_some(rel.lambda_opt);
    let relative_upper_ok = relative_lambda.map(|l| le(b1, l * b2 * theta_norm * theta_norm, tol));
    Ok(TransformCheck {
        g,
        commutes,
        commutator_norm,
        commutator_witness,
        report_f,
        report_g,
        u_norm,
        u_inv_norm,
        theta_norm,
        relative_lambda,
        lower_sandwich_ok,
        corrected_lower_sandwich_ok,
        u_is_unitary,
        upper_ok,
        relative_upper_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PinvChain {
    /// `dim R(Θ)`.
    pub range_dim: usize,
    /// `max ‖ΘΘ†v − v‖` over an orthonormal basis of `R(Θ)`.
    pub identity_residual: f64,
    /// `A‖Θ†‖⁻²`.
    pub lower_constant: f64,
    /// `λ_min` of `S` compressed to `R(Θ)`.
    pub compressed_min_eig: f64,
    /// Least `⟨Sf, f⟩ / ‖f‖²` over the sampled `f ∈ R(Θ)`.
    #[serde(serialize_with = "real")]
    pub sampled_min_ratio: f64,
    /// `S` restricted to `R(Θ)` is invertible there.
    pub restricted_invertible: bool,
    /// `‖(S|_{R(Θ)})⁻¹‖ ≤ ‖Θ†‖² / A`.
    pub inverse_bound_ok: bool,
    pub holds: bool,
}

/// The pseudoinverse chain on `R(Θ)`: `ΘΘ† = I` there and
/// `⟨Sf, f⟩ ≥ A‖Θ†‖⁻²‖f‖²`, so `S` is invertible on `R(Θ)`.
pub fn pseudoinverse_bound_chain<R: Rng + ?Sized>(
    f: &FrameSystem,
    theta: &Operator,
    tol: &Tolerance,
    samples: usize,
    rng: &mut R,
) -> Result<PinvChain> {
    check_square("Theta", theta, f.dim())?;
    let sv = svd(theta)?;
    let r = sv.rank(tol.rank_rel);
    if r == 0 {
        return Ok(PinvChain {
            range_dim: 0,
            identity_residual: 0.0,
            lower_constant: 0.0,
            compressed_min_eig: 0.0,
            sampled_min_ratio: f64::INFINITY,
            restricted_invertible: true,
            inverse_bound_ok: true,
            holds: true,
        });
    }
    let report = check_theta_frame(f, theta, tol)?;
    if !report.lower_ok {
        return Err(Error::NotThetaFrame("the lower Θ-frame inequality fails".into()));
    }
    let a = report.alpha();
    let basis = sv.left.columns(0, r);
    let tp = pinv(theta, tol)?;
    let proj = theta * &tp;
    let identity_residual = (&(&proj * &basis) - &basis).norm();
    let tp_norm = tp.norm();
    let lower_constant = a / (tp_norm * tp_norm);
    let s = frame_operator(f);
    let compressed = (&(&basis.adjoint() * &s) * &basis).hermitian_part();
    let compressed_min_eig = herm_eig(&compressed)?.min();
    let mut sampled_min_ratio = f64::INFINITY;
    for _ in 0..samples {
        let x = vector_in_span(rng, &basis);
        sampled_min_ratio = sampled_min_ratio.min(quad_form(&s, &x)? / norm_sq(&x));
    }
    let floor = lower_constant * (1.0 - tol.verdict_rel) - tol.psd_floor;
    let restricted_invertible = compressed_min_eig > tol.psd_floor;
    let inverse_bound_ok = restricted_invertible && le(1.0 / compressed_min_eig, 1.0 / lower_constant, tol);
    let holds = identity_residual <= tol.verdict_rel.max(1e3 * f64::EPSILON) * r as f64
        && compressed_min_eig >= floor
        && sampled_min_ratio >= floor
        && restricted_invertible
        && inverse_bound_ok;
    Ok(PinvChain {
        range_dim: r,
        identity_residual,
        lower_constant,
        compressed_min_eig,
        sampled_min_ratio,
        restricted_invertible,
        inverse_bound_ok,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{norm, unit_vector};
    use crate::random::{random_parseval, random_system, rng_from_seed};
    use crate::signal::{shift_operators, summing_operator, TruncatedSequenceSpace};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn diag(d: &[f64]) -> Operator {
        Operator::from_real_diag(d)
    }

    #[test]
    fn identity_theta_reduces_to_classical_bounds() {
        let f = random_system(&mut rng_from_seed(3), 4, 7);
        let r = check_theta_frame(&f, &Operator::identity(4), &tol()).unwrap();
        let b = optimal_bounds(&f, &tol()).unwrap();
        assert_abs_diff_eq!(r.alpha_opt.unwrap(), b.lower, epsilon = 1e-10);
        assert_abs_diff_eq!(r.beta_opt, b.upper, epsilon = 1e-10);
        let k = check_k_frame(&f, &Operator::identity(4), &tol()).unwrap();
        assert_abs_diff_eq!(k.a_opt, b.lower, epsilon = 1e-10);
        assert_abs_diff_eq!(k.b_opt, b.upper, epsilon = 1e-10);
    }

    #[test]
    fn backward_shift_separates_k_frames_from_theta_frames() {
        let space = TruncatedSequenceSpace::new(8, 1).unwrap();
        let (back, _) = shift_operators(&space);
        let f = FrameSystem::canonical_basis(8);
        let k = check_k_frame_on(&f, &back, &space.margin_basis(), &tol()).unwrap();
        assert_abs_diff_eq!(k.a_opt, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.b_opt, 1.0, epsilon = 1e-12);
        let r = check_theta_frame(&f, &back, &tol()).unwrap();
        assert!(!r.upper_ok && r.lower_ok);
        let w = r.kernel_obstruction().unwrap();
        assert_abs_diff_eq!(w[0].norm(), 1.0, epsilon = 1e-12);
        assert!(norm(&back.apply(w).unwrap()) < 1e-12);
    }

    #[test]
    fn k_frame_degenerate_for_zero_k() {
        let k = check_k_frame(&FrameSystem::canonical_basis(3), &Operator::zeros(3, 3), &tol()).unwrap();
        assert!(k.degenerate && k.a_opt.is_infinite());
    }

    #[test]
    fn summing_operator_controls_the_lower_bound() {
        let space = TruncatedSequenceSpace::new(16, 1).unwrap();
        let t = summing_operator(&space);
        let vectors = (0..16)
            .map(|k| {
                let mut v = unit_vector(16, k);
                if k + 1 < 16 {
                    v[k + 1] = C64::new(1.0, 0.0);
                }
                v
            })
            .collect();
        let f = FrameSystem::new(16, vectors).unwrap();
        let r = check_theta_frame_on(&f, &t, &space.margin_basis(), &tol()).unwrap();
        assert!(r.lower_ok);
        assert!(optimal_bounds(&f, &tol()).unwrap().lower < 0.05);
    }

    #[test]
    fn theta_to_k_examples() {
        let f = FrameSystem::canonical_basis(2);
        let r = check_theta_frame(&f, &Operator::identity(2).scale_real(2.0), &tol()).unwrap();
        let (a, b) = theta_to_k_bounds(&r, &Operator::identity(2).scale_real(2.0)).unwrap();
        assert_abs_diff_eq!(a, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-12);
        let bad = check_theta_frame(&f, &diag(&[1.0, 0.0]), &tol()).unwrap();
        assert!(matches!(theta_to_k_bounds(&bad, &diag(&[1.0, 0.0])), Err(Error::NotThetaFrame(_))));
    }

    #[test]
    fn tightness_examples() {
        let f = random_parseval(&mut rng_from_seed(9), 3, 5);
        let twice = Operator::identity(3).scale_real(2.0);
        let t = theta_tight_check(&f, &twice, &tol()).unwrap();
        assert!(t.is_theta_tight && !t.theta_is_identity);
        assert_abs_diff_eq!(t.alpha0, 0.25, epsilon = 1e-12);
        assert!(!theta_tight_check_at(&f, &twice, 1.0, &tol()).unwrap());
        assert!(theta_tight_check(&f, &Operator::identity(3), &tol()).unwrap().theta_is_identity);
        let zero = FrameSystem::new(3, vec![vec![C64::new(0.0, 0.0); 3]]).unwrap();
        assert!(!theta_tight_check(&zero, &twice, &tol()).unwrap().is_theta_tight);
    }

    #[test]
    fn theorem_3_8_examples() {
        let f = FrameSystem::canonical_basis(2);
        let d = diag(&[1.0, 2.0]);
        let c = construct_theorem_3_8(&f, &d, None, &tol()).unwrap();
        assert!(c.tight && c.equality_defect < 1e-14);
        let not_parseval = FrameSystem::new(2, vec![unit_vector(2, 0)]).unwrap();
        assert!(matches!(construct_theorem_3_8(&not_parseval, &d, None, &tol()), Err(Error::NotParseval { .. })));
        let jordan = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(construct_theorem_3_8(&f, &jordan, None, &tol()), Err(Error::NotHyponormal { .. })));
    }

    #[test]
    fn transform_examples() {
        let f = random_system(&mut rng_from_seed(4), 3, 6);
        let theta = diag(&[1.0, 2.0, 3.0]);
        let t = transform_frame_check(&f, &theta, &Operator::identity(3), &tol()).unwrap();
        assert!(t.commutes && t.bounds_hold());
        assert_eq!(t.report_f.alpha_opt, t.report_g.alpha_opt);
        assert_eq!(t.report_f.beta_opt, t.report_g.beta_opt);
        let u = diag(&[0.5, 3.0, 1.5]);
        let t = transform_frame_check(&f, &theta, &u, &tol()).unwrap();
        assert!(t.commutes && t.corrected_bounds_hold() && !t.u_is_unitary);

        // One dimension, U = 1/2: A₂ = A₁/4 < A₁‖U‖⁻² = 4A₁.
        let one = FrameSystem::canonical_basis(1);
        let t = transform_frame_check(&one, &diag(&[1.0]), &diag(&[0.5]), &tol()).unwrap();
        assert!(t.commutes && !t.lower_sandwich_ok && t.corrected_bounds_hold());
        assert!(matches!(
            transform_frame_check(&f, &theta, &diag(&[1.0, 0.0, 1.0]), &tol()),
            Err(Error::SingularU { .. })
        ));
    }

    #[test]
    fn pinv_chain_examples() {
        let mut rng = rng_from_seed(5);
        let f = random_system(&mut rng, 3, 6);
        let c = pseudoinverse_bound_chain(&f, &Operator::identity(3), &tol(), 100, &mut rng).unwrap();
        assert!(c.holds && c.range_dim == 3);
        let p = diag(&[1.0, 1.0, 0.0]);
        let c = pseudoinverse_bound_chain(&f, &p, &tol(), 100, &mut rng).unwrap();
        assert!(c.holds && c.range_dim == 2);
        let c = pseudoinverse_bound_chain(&f, &Operator::zeros(3, 3), &tol(), 100, &mut rng).unwrap();
        assert!(c.holds && c.range_dim == 0);
    }

    #[test]
    fn report_serializes_infinity() {
        let r = check_theta_frame(&FrameSystem::canonical_basis(2), &diag(&[1.0, 0.0]), &tol()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains(r#""beta_opt":"inf""#), "{s}");
    }
}
