//! Extremal constants of a Hermitian pencil `(X, Y)`, with `X, Y ⪰ 0`.
//!
//! * [`pencil_upper`]: the least `λ` with `X ⪯ λY` (infinite when `X` has
//!   energy on `ker Y`).
//! * [`pencil_lower`]: the greatest `α` with `αY ⪯ X`.
//!
//! Both whiten against `Y` on its numerical range: with `Y = U Λ U*` and the
//! eigenvalues below `rank_rel · λ_max(Y)` discarded, the pencil becomes the
//! ordinary eigenproblem of `Λ_r^{-1/2} U_r* X U_r Λ_r^{-1/2}`. For the lower
//! constant the compression of `X` is replaced by its Schur complement with
//! respect to `ker Y`, because a vector may lower `⟨Xf, f⟩` through its
//! kernel component without changing `⟨Yf, f⟩`.

use serde::Serialize;

use super::decomp::{herm_eig, pinv, HermEig, Tolerance};
use super::operator::{normalized, Operator};
use crate::error::{Error, Result};
use crate::C64;

/// An extremal pencil constant together with a vector attaining it.
#[derive(Clone, Debug, Serialize)]
pub struct PencilBound {
    /// The constant; `f64::INFINITY` for an unbounded upper constant.
    #[serde(serialize_with = "crate::json::real")]
    pub value: f64,
    /// Attaining vector: a generalized eigenvector when finite, otherwise a
    /// unit vector of `ker Y` on which `X` is positive.
    #[serde(serialize_with = "crate::json::cvec")]
    pub witness: Vec<C64>,
    /// Dimension of the numerical range of `Y`.
    pub range_dim: usize,
    /// `λ_max` of the compression of `X` to `ker Y`.
    pub kernel_excess: f64,
}

impl PencilBound {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

struct Split {
    range: Operator,
    kernel: Operator,
    range_values: Vec<f64>,
}

fn check_pair(x: &Operator, y: &Operator) -> Result<()> {
    if !x.is_square() {
        return Err(Error::NotSquare { rows: x.rows(), cols: x.cols() });
    }
    if !y.is_square() {
        return Err(Error::NotSquare { rows: y.rows(), cols: y.cols() });
    }
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!("pencil operands of size {} and {}", x.rows(), y.rows())));
    }
    Ok(())
}

fn split(y: &Operator, tol: &Tolerance) -> Result<Split> {
    let eig: HermEig = herm_eig(y)?;
    let n = y.rows();
    let cutoff = tol.rank_rel * eig.max().max(0.0);
    let keep: Vec<usize> = (0..n).filter(|&i| eig.values[i] > cutoff && eig.values[i] > 0.0).collect();
    let drop: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let range = Operator::from_fn(n, keep.len(), |i, j| eig.vectors[(i, keep[j])]);
    let kernel = Operator::from_fn(n, drop.len(), |i, j| eig.vectors[(i, drop[j])]);
    let range_values = keep.iter().map(|&i| eig.values[i]).collect();
    Ok(Split { range, kernel, range_values })
}

fn whitener(s: &Split) -> Operator {
    let scale: Vec<f64> = s.range_values.iter().map(|v| 1.0 / v.sqrt()).collect();
    Operator::from_fn(s.range.rows(), s.range.cols(), |i, j| s.range[(i, j)] * scale[j])
}

/// `B* X B`, symmetrized: a compression that is pure rounding noise would
/// otherwise fail the relative Hermitian-defect check.
fn compress(x: &Operator, basis: &Operator) -> Operator {
    (&(&basis.adjoint() * x) * basis).hermitian_part()
}

fn kernel_part(x: &Operator, s: &Split) -> Result<(f64, Vec<C64>)> {
    if s.kernel.cols() == 0 {
        return Ok((0.0, vec![]));
    }
    let xkk = compress(x, &s.kernel);
    let eig = herm_eig(&xkk)?;
    let top = eig.vector(eig.values.len() - 1);
    Ok((eig.max(), normalized(&s.kernel.apply(&top)?)))
}

/// Least `λ ≥ 0` with `X ⪯ λY`.
pub fn pencil_upper(x: &Operator, y: &Operator, tol: &Tolerance) -> Result<PencilBound> {
    check_pair(x, y)?;
    let s = split(y, tol)?;
    let (kernel_excess, kernel_witness) = kernel_part(x, &s)?;
    let x_norm = herm_eig(x)?.spectral_norm();
    if kernel_excess > tol.psd_threshold(x_norm) {
        return Ok(PencilBound {
            value: f64::INFINITY,
            witness: kernel_witness,
            range_dim: s.range.cols(),
            kernel_excess,
        });
    }
    if s.range.cols() == 0 {
        // Y = 0 and X vanishes: any λ works.
        return Ok(PencilBound {
            value: 0.0,
            witness: vec![C64::new(0.0, 0.0); x.rows()],
            range_dim: 0,
            kernel_excess,
        });
    }
    let w = whitener(&s);
    let b = compress(x, &w);
    let eig = herm_eig(&b)?;
    let top = eig.vector(eig.values.len() - 1);
    Ok(PencilBound { value: eig.max().max(0.0), witness: w.apply(&top)?, range_dim: s.range.cols(), kernel_excess })
}

/// Greatest `α` with `αY ⪯ X`; `None` when `Y` vanishes numerically (the
/// inequality is then vacuous and carries no constant).
pub fn pencil_lower(x: &Operator, y: &Operator, tol: &Tolerance) -> Result<Option<PencilBound>> {
    check_pair(x, y)?;
    let s = split(y, tol)?;
    if s.range.cols() == 0 {
        return Ok(None);
    }
    let (kernel_excess, _) = kernel_part(x, &s)?;
    let w = whitener(&s);
    let b_plain = compress(x, &w);
    let (b, correction) = if s.kernel.cols() == 0 {
        (b_plain, None)
    } else {
        // Schur complement of X in the (range, kernel) block split.
        let xkk = compress(x, &s.kernel);
        let xkr = &(&s.kernel.adjoint() * x) * &w;
        let xkk_pinv = pinv(&xkk, tol)?;
        let gain = &xkk_pinv * &xkr;
        let b = &b_plain - &(&xkr.adjoint() * &gain);
        (b, Some(gain))
    };
    let eig = herm_eig(&b.hermitian_part())?;
    let z = eig.vector(0);
    let mut witness = w.apply(&z)?;
    if let Some(gain) = correction {
        let k = s.kernel.apply(&gain.apply(&z)?)?;
        for (wi, ki) in witness.iter_mut().zip(k) {
            *wi -= ki;
        }
    }
    Ok(Some(PencilBound { value: eig.min(), witness, range_dim: s.range.cols(), kernel_excess }))
}

/// Generalized Rayleigh quotient `⟨Xf, f⟩ / ⟨Yf, f⟩`.
pub fn rayleigh(x: &Operator, y: &Operator, f: &[C64]) -> Result<f64> {
    let num = quad_form(x, f)?;
    let den = quad_form(y, f)?;
    Ok(num / den)
}

/// `Re ⟨Hf, f⟩`.
pub fn quad_form(h: &Operator, f: &[C64]) -> Result<f64> {
    let hf = h.apply(f)?;
    Ok(super::operator::inner(&hf, f).re)
}
