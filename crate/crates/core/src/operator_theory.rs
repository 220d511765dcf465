//! Hyponormality, relative hyponormality, Douglas factorization and the
//! Moore–Penrose hyponormality criterion.
//!
//! In finite dimension `trace(T*T − TT*) = 0`, so a globally hyponormal
//! matrix is normal. Non-normal behaviour of infinite-dimensional shifts is
//! modelled by restricting the commutator to a test subspace; reports expose
//! both verdicts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, is_psd, pencil_upper, pinv, range_inclusion, Operator, Tolerance};
use crate::C64;

/// `T*T − TT*`.
pub fn self_commutator(t: &Operator) -> Result<Operator> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    let ta = t.adjoint();
    // Symmetrized: for normal T the difference is pure rounding noise.
    Ok((&(&ta * t) - &(t * &ta)).hermitian_part())
}

#[derive(Clone, Debug, Serialize)]
pub struct HyponormalityReport {
    /// `λ_min(T*T − TT*)`.
    pub commutator_min_eig: f64,
    /// `commutator_min_eig ≥ −psd_floor · max(1, ‖T‖²)`.
    pub global_verdict: bool,
    /// Verdict of the commutator compressed to the supplied test subspace.
    pub margin_verdict: Option<bool>,
    /// `λ_min` of the compressed commutator.
    pub margin_min_eig: Option<f64>,
    /// `trace(T*T − TT*)`, zero up to rounding for every square `T`.
    pub commutator_trace: f64,
    /// `‖T*T − TT*‖`.
    pub commutator_norm: f64,
}

impl HyponormalityReport {
    /// The margin verdict when a test subspace was supplied, else the global one.
    pub fn verdict(&self) -> bool {
        self.margin_verdict.unwrap_or(self.global_verdict)
    }
}

/// Hyponormality of `T`, globally and optionally on the span of the
/// orthonormal columns of `test_subspace`.
pub fn hyponormality(t: &Operator, tol: &Tolerance, test_subspace: Option<&Operator>) -> Result<HyponormalityReport> {
    let c = self_commutator(t)?;
    let eig = herm_eig(&c)?;
    let t_norm = t.norm();
    let commutator_min_eig = eig.min();
    let global_verdict = commutator_min_eig >= -tol.psd_floor * (t_norm * t_norm).max(1.0);
    let (margin_verdict, margin_min_eig) = match test_subspace {
        Some(p) => {
            if p.rows() != t.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "test subspace has {} rows for a {}-dimensional operator",
                    p.rows(),
                    t.rows()
                )));
            }
            let v = is_psd(&(&(&p.adjoint() * &c) * p).hermitian_part(), tol)?;
            (Some(v.verdict), Some(v.min_eigenvalue))
        }
        None => (None, None),
    };
    Ok(HyponormalityReport {
        commutator_min_eig,
        global_verdict,
        margin_verdict,
        margin_min_eig,
        commutator_trace: c.diagonal().iter().map(|z| z.re).sum(),
        commutator_norm: eig.spectral_norm(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelativeHyponormality {
    /// A finite `λ` exists.
    pub holds: bool,
    /// Least `λ ≥ 0` with `λ T₁*T₁ ⪰ T₂T₂*`.
    #[serde(serialize_with = "crate::json::real")]
    pub lambda_opt: f64,
    /// `T₂ = 0`: the inequality holds with `λ = 0`, a degenerate pass since
    /// the definition asks for `λ > 0`.
    pub degenerate: bool,
    /// Attaining vector (generalized eigenvector, or a vector of `ker T₁`
    /// on which `T₂*` does not vanish when `λ` is infinite).
    #[serde(serialize_with = "crate::json::cvec")]
    pub witness: Vec<C64>,
}

/// Relative hyponormality of the pair `(T₁, T₂)`.
pub fn relative_hyponormality(t1: &Operator, t2: &Operator, tol: &Tolerance) -> Result<RelativeHyponormality> {
    if t1.cols() != t2.rows() {
        return Err(Error::DimensionMismatch(format!("T1*T1 is {0}x{0} but T2T2* is {1}x{1}", t1.cols(), t2.rows())));
    }
    let x = t2 * &t2.adjoint();
    let y = &t1.adjoint() * t1;
    let b = pencil_upper(&x, &y, tol)?;
    Ok(RelativeHyponormality {
        holds: b.is_finite(),
        lambda_opt: b.value,
        degenerate: b.value == 0.0 && t2.norm() <= tol.psd_floor,
        witness: b.witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DouglasReport {
    /// (i) `R(T₁) ⊆ R(T₂)`.
    pub range_included: bool,
    /// (ii) least `λ ≥ 0` with `T₁T₁* ⪯ λ² T₂T₂*`.
    #[serde(serialize_with = "crate::json::real")]
    pub lambda_min: f64,
    /// (iii) `S = T₂† T₁` when it factors `T₁ = T₂S` within tolerance.
    pub factor: Option<Operator>,
    /// `‖T₂ T₂†T₁ − T₁‖`.
    pub factor_residual: f64,
    /// The three conditions agree.
    pub consistent: bool,
}

impl DouglasReport {
    /// All three conditions hold.
    pub fn holds(&self) -> bool {
        self.range_included && self.lambda_min.is_finite() && self.factor.is_some()
    }
}

/// Evaluate the three Douglas conditions independently.
pub fn douglas_check(t1: &Operator, t2: &Operator, tol: &Tolerance) -> Result<DouglasReport> {
    if t1.rows() != t2.rows() {
        return Err(Error::DimensionMismatch(format!(
            "Douglas operands need equal row counts, got {} and {}",
            t1.rows(),
            t2.rows()
        )));
    }
    let range_included = range_inclusion(t1, t2, tol)?;
    let x = t1 * &t1.adjoint();
    let y = t2 * &t2.adjoint();
    let lambda_min = pencil_upper(&x, &y, tol)?.value.sqrt();
    let s = &pinv(t2, tol)? * t1;
    let factor_residual = (&(t2 * &s) - t1).norm();
    let factor = (factor_residual <= tol.verdict_rel * t1.norm()).then_some(s);
    let consistent = range_included == lambda_min.is_finite() && range_included == factor.is_some();
    Ok(DouglasReport { range_included, lambda_min, factor, factor_residual, consistent })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DjordjevicVerdict {
    pub verdict: bool,
    /// `λ_min(AA* − 2AA*(AA* + A*A)†AA*)`.
    pub witness_min_eig: f64,
}

/// Hyponormality through `2AA*(AA* + A*A)†AA* ⪯ AA*`.
pub fn djordjevic_hyponormal(a: &Operator, tol: &Tolerance) -> Result<DjordjevicVerdict> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let aa = a * &a.adjoint();
    let sum = &aa + &(&a.adjoint() * a);
    let middle = &(&aa * &pinv(&sum, tol)?) * &aa;
    let g = (&aa - &middle.scale_real(2.0)).hermitian_part();
    let v = is_psd(&g, tol)?;
    Ok(DjordjevicVerdict { verdict: v.verdict, witness_min_eig: v.min_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{shift_operators, TruncatedSequenceSpace};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rotation(th: f64) -> Operator {
        Operator::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]])
    }

    #[test]
    fn hyponormality_examples() {
        let r = hyponormality(&rotation(0.3), &tol(), None).unwrap();
        assert!(r.global_verdict);
        assert!(r.commutator_norm < 1e-15);
        assert!(hyponormality(&Operator::from_real_diag(&[1.0, 2.0]), &tol(), None).unwrap().global_verdict);

        let space = TruncatedSequenceSpace::new(8, 1).unwrap();
        let (_, forward) = shift_operators(&space);
        let r = hyponormality(&forward, &tol(), Some(&space.margin_basis())).unwrap();
        assert!(!r.global_verdict);
        assert_abs_diff_eq!(r.commutator_min_eig, -1.0, epsilon = 1e-14);
        assert_eq!(r.margin_verdict, Some(true));
        assert_abs_diff_eq!(r.commutator_trace, 0.0, epsilon = 1e-14);
        assert!(hyponormality(&Operator::zeros(2, 3), &tol(), None).is_err());
    }

    #[test]
    fn relative_hyponormality_examples() {
        let i2 = Operator::identity(2);
        let r = relative_hyponormality(&i2, &i2, &tol()).unwrap();
        assert!(r.holds);
        assert_abs_diff_eq!(r.lambda_opt, 1.0, epsilon = 1e-14);
        let r = relative_hyponormality(&Operator::zeros(2, 2), &i2, &tol()).unwrap();
        assert!(!r.holds);
        assert!(r.lambda_opt.is_infinite());
        let r = relative_hyponormality(&i2, &i2.scale_real(2.0), &tol()).unwrap();
        assert_abs_diff_eq!(r.lambda_opt, 4.0, epsilon = 1e-13);
        let r = relative_hyponormality(&i2, &Operator::zeros(2, 2), &tol()).unwrap();
        assert!(r.holds && r.degenerate);
        assert!(relative_hyponormality(&i2, &Operator::identity(3), &tol()).is_err());
    }

    #[test]
    fn douglas_examples() {
        let r = douglas_check(&Operator::identity(2), &Operator::from_real_diag(&[1.0, 0.0]), &tol()).unwrap();
        assert!(!r.range_included && r.lambda_min.is_infinite() && r.factor.is_none() && r.consistent);

        let r = douglas_check(&Operator::from_real_diag(&[1.0, 0.0]), &Operator::from_real_diag(&[2.0, 0.0]), &tol())
            .unwrap();
        assert!(r.holds() && r.consistent);
        assert_abs_diff_eq!(r.lambda_min, 0.5, epsilon = 1e-14);
        let f = r.factor.unwrap();
        assert!((&f - &Operator::from_real_diag(&[0.5, 0.0])).max_abs() < 1e-14);

        let t2 = Operator::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 3.0, 1.0]]);
        let s0 = Operator::from_real_rows(&[&[0.5, -1.0], &[2.0, 0.0], &[1.0, 1.0]]);
        let t1 = &t2 * &s0;
        let r = douglas_check(&t1, &t2, &tol()).unwrap();
        assert!(r.holds() && r.consistent);
        assert!((&(&t2 * r.factor.as_ref().unwrap()) - &t1).norm() <= 1e-12);
    }

    #[test]
    fn djordjevic_examples() {
        let v = djordjevic_hyponormal(&rotation(1.1), &tol()).unwrap();
        assert!(v.verdict);
        assert!(djordjevic_hyponormal(&Operator::zeros(3, 3), &tol()).unwrap().verdict);
        let jordan = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let v = djordjevic_hyponormal(&jordan, &tol()).unwrap();
        assert!(!v.verdict && v.witness_min_eig < -0.5);
        assert!(!hyponormality(&jordan, &tol(), None).unwrap().global_verdict);
    }
}
