//! Hermitian eigendecomposition, SVD, pseudoinverse, and the positivity and
//! range tests built on them.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use crate::error::{Error, Result};
use crate::C64;

const EIG_EPS: f64 = 1e-15;
const SVD_EPS: f64 = f64::EPSILON;

/// Numerical thresholds shared by every verdict in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Eigenvalue floor for positivity, scaled by `max(1, ‖H‖)`.
    pub psd_floor: f64,
    /// Relative cutoff for singular values (and pencil eigenvalues).
    pub rank_rel: f64,
    /// Relative slack for inequality and equality verdicts.
    pub verdict_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { psd_floor: 1e-9, rank_rel: 1e-10, verdict_rel: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(psd_floor: f64, rank_rel: f64, verdict_rel: f64) -> Result<Self> {
        for (name, v) in [("psd_floor", psd_floor), ("rank_rel", rank_rel), ("verdict_rel", verdict_rel)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidTolerance(format!("{name} = {v}")));
            }
        }
        Ok(Tolerance { psd_floor, rank_rel, verdict_rel })
    }

    /// The negative eigenvalue floor used by positivity verdicts on `H`.
    pub fn psd_threshold(&self, h_norm: f64) -> f64 {
        self.psd_floor * h_norm.max(1.0)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl HermEig {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue magnitude, the spectral norm of the input.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }
}

/// Hermitian eigendecomposition with the default Hermitian-defect check.
pub fn herm_eig(h: &Operator) -> Result<HermEig> {
    herm_eig_with(h, &Tolerance::default())
}

/// Hermitian eigendecomposition; rejects inputs whose relative
/// anti-Hermitian part exceeds `tol.verdict_rel`.
pub fn herm_eig_with(h: &Operator, tol: &Tolerance) -> Result<HermEig> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let defect = h.hermitian_defect();
    if defect > tol.verdict_rel {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.rows();
    if n == 0 {
        return Ok(HermEig { values: vec![], vectors: Operator::zeros(0, 0) });
    }
    let sym = h.hermitian_part().to_nalgebra();
    let eig = SymmetricEigen::try_new(sym, EIG_EPS, 2000 * n).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Operator::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermEig { values, vectors })
}

/// Thin SVD `M = left · diag(singulars) · right*`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub left: Operator,
    pub singulars: Vec<f64>,
    pub right: Operator,
}

impl Svd {
    pub fn max_singular(&self) -> f64 {
        self.singulars.first().copied().unwrap_or(0.0)
    }

    /// Count of singular values above `rank_rel · σ_max`.
    pub fn rank(&self, rank_rel: f64) -> usize {
        let smax = self.max_singular();
        if smax <= 0.0 {
            return 0;
        }
        self.singulars.iter().filter(|&&s| s > rank_rel * smax).count()
    }
}

pub fn svd(m: &Operator) -> Result<Svd> {
    let (r, c) = (m.rows(), m.cols());
    if r < c {
        // M* = U Σ V*  ⇒  M = V Σ U*.
        let t = jacobi_svd(&m.adjoint())?;
        return Ok(Svd { left: t.right, singulars: t.singulars, right: t.left });
    }
    jacobi_svd(m)
}

/// One-sided (Hestenes) Jacobi SVD of a matrix with `rows ≥ cols`.
///
/// Column pairs are rotated until mutually orthogonal to working precision;
/// unlike bidiagonalization-based solvers this stays accurate on
/// rank-deficient input, which the range and Douglas tests depend on.
fn jacobi_svd(m: &Operator) -> Result<Svd> {
    const MAX_SWEEPS: usize = 80;
    let (r, k) = (m.rows(), m.cols());
    if k == 0 {
        return Ok(Svd { left: Operator::zeros(r, 0), singulars: vec![], right: Operator::zeros(0, 0) });
    }
    if !m.max_abs().is_finite() {
        return Err(Error::NoConvergence);
    }
    let mut w: Vec<Vec<C64>> = (0..k).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..k)
        .map(|j| (0..k).map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    let norm_sq = |x: &[C64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>();
    // Inner products carry rounding of order `rows · ε`; a tighter
    // orthogonality threshold would never be met.
    let ortho = SVD_EPS * r as f64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = norm_sq(&w[p]);
                let beta = norm_sq(&w[q]);
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= ortho * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate [w_p, e^{-iφ} w_q], whose Gram matrix is real.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for cols in [&mut w, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    for (a, b) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let bq = phase * *b;
                        let ap = *a;
                        *a = ap * cs - bq * sn;
                        *b = ap * sn + bq * cs;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }
    let sigma: Vec<f64> = w.iter().map(|x| norm_sq(x).sqrt()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let smax = sigma[order[0]];
    let mut left_cols: Vec<Vec<C64>> = Vec::with_capacity(k);
    for &j in &order {
        let s = sigma[j];
        let candidate: Vec<C64> = if s > SVD_EPS * smax * k as f64 && s > 0.0 {
            w[j].iter().map(|z| z / s).collect()
        } else {
            complete_orthonormal(&left_cols, r)
        };
        left_cols.push(candidate);
    }
    let left = Operator::from_fn(r, k, |i, j| left_cols[j][i]);
    let right = Operator::from_fn(k, k, |i, j| v[order[j]][i]);
    let singulars = order.iter().map(|&j| sigma[j]).collect();
    Ok(Svd { left, singulars, right })
}

/// A unit vector orthogonal to the given orthonormal columns (Gram–Schmidt
/// over the standard basis, keeping the best-conditioned candidate).
fn complete_orthonormal(cols: &[Vec<C64>], dim: usize) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for e in 0..dim {
        let mut x = vec![C64::new(0.0, 0.0); dim];
        x[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in cols {
                let proj: C64 = c.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi -= proj * ci;
                }
            }
        }
        let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, x));
        }
        if n > 0.5 {
            break;
        }
    }
    let (n, x) = best.expect("dimension is positive");
    x.into_iter().map(|z| z / n).collect()
}

impl Operator {
    /// Operator (spectral) norm: the largest singular value.
    pub fn norm(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return 0.0;
        }
        match svd(self) {
            Ok(s) => s.max_singular(),
            Err(_) => self.frobenius(),
        }
    }
}

pub fn numerical_rank(m: &Operator, tol: &Tolerance) -> Result<usize> {
    Ok(svd(m)?.rank(tol.rank_rel))
}

/// Moore–Penrose pseudoinverse by truncated SVD. The zero matrix maps to the
/// zero matrix of transposed shape.
pub fn pinv(m: &Operator, tol: &Tolerance) -> Result<Operator> {
    let dec = svd(m)?;
    let cutoff = tol.rank_rel * dec.max_singular();
    let mut out = Operator::zeros(m.cols(), m.rows());
    for (idx, &s) in dec.singulars.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..m.cols() {
            let vi = dec.right[(i, idx)] * inv;
            for j in 0..m.rows() {
                out[(i, j)] += vi * dec.left[(j, idx)].conj();
            }
        }
    }
    Ok(out)
}

/// Residuals of the four Penrose identities, each relative to `‖M‖`
/// (or to `‖M†‖` for the identities living on the pseudoinverse side).
#[derive(Clone, Debug, Serialize)]
pub struct PenroseResiduals {
    pub axa: f64,
    pub xax: f64,
    pub ax_hermitian: f64,
    pub xa_hermitian: f64,
}

impl PenroseResiduals {
    pub fn max(&self) -> f64 {
        self.axa.max(self.xax).max(self.ax_hermitian).max(self.xa_hermitian)
    }
}

pub fn penrose_residuals(a: &Operator, x: &Operator) -> Result<PenroseResiduals> {
    let ax = a.matmul(x)?;
    let xa = x.matmul(a)?;
    let na = a.norm().max(f64::MIN_POSITIVE);
    let nx = x.norm().max(f64::MIN_POSITIVE);
    Ok(PenroseResiduals {
        axa: (&ax.matmul(a)? - a).norm() / na,
        xax: (&xa.matmul(x)? - x).norm() / nx,
        ax_hermitian: (&ax - &ax.adjoint()).norm(),
        xa_hermitian: (&xa - &xa.adjoint()).norm(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub verdict: bool,
    pub min_eigenvalue: f64,
}

/// Positivity test `λ_min(H) ≥ −psd_floor · max(1, ‖H‖)`.
pub fn is_psd(h: &Operator, tol: &Tolerance) -> Result<PsdVerdict> {
    let eig = herm_eig_with(h, tol)?;
    let min_eigenvalue = eig.min();
    Ok(PsdVerdict { verdict: min_eigenvalue >= -tol.psd_threshold(eig.spectral_norm()), min_eigenvalue })
}

/// `R(A) ⊆ R(B)`, decided by comparing numerical ranks of `B` and `[B | A]`.
///
/// Both operands are scaled to unit norm first; ranges are scale invariant
/// and the relative cutoff would otherwise be dominated by the larger one.
pub fn range_inclusion(a: &Operator, b: &Operator, tol: &Tolerance) -> Result<bool> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "range inclusion needs equal row counts, got {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 {
        return Ok(true);
    }
    if nb == 0.0 {
        return Ok(false);
    }
    let bs = b.scale_real(1.0 / nb);
    let joint = bs.hstack(&a.scale_real(1.0 / na))?;
    Ok(numerical_rank(&joint, tol)? == numerical_rank(&bs, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn tolerance_rejects_negative_fields() {
        assert!(Tolerance::new(-1.0, 0.0, 0.0).is_err());
        assert!(Tolerance::new(0.0, f64::NAN, 0.0).is_err());
        assert!(Tolerance::new(0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn herm_eig_of_diagonal_sorts_ascending() {
        let e = herm_eig(&Operator::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values.len(), 3);
        for (v, want) in e.values.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*v, want, epsilon = 1e-14);
        }
        // eigenvector for 1 is ±e_2 up to phase
        assert_abs_diff_eq!(e.vectors[(1, 0)].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn herm_eig_of_swap_matches_closed_form() {
        // [[0,1],[1,0]]: eigenpairs (-1, (1,-1)/√2), (1, (1,1)/√2).
        let e = herm_eig(&Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let v0 = e.vector(0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v0[0].norm(), r, epsilon = 1e-12);
        assert_abs_diff_eq!((v0[0] + v0[1]).norm(), 0.0, epsilon = 1e-12);
        let v1 = e.vector(1);
        assert_abs_diff_eq!((v1[0] - v1[1]).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn herm_eig_of_zero() {
        let e = herm_eig(&Operator::zeros(2, 2)).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
        let g = &e.vectors.adjoint() * &e.vectors;
        assert!((&g - &Operator::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn herm_eig_rejects_bad_input() {
        let m = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(herm_eig(&Operator::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn herm_eig_handles_complex_hermitian() {
        // [[2, i],[-i, 2]] has eigenvalues 1 and 3.
        let m = Operator::from_row_major(
            2,
            2,
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        )
        .unwrap();
        let e = herm_eig(&m).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e.values[1], 3.0, epsilon = 1e-13);
        for i in 0..2 {
            let v = e.vector(i);
            let mv = m.apply(&v).unwrap();
            for k in 0..2 {
                assert_abs_diff_eq!((mv[k] - v[k] * e.values[i]).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn svd_examples() {
        let s = svd(&Operator::from_real_diag(&[2.0, 1.0])).unwrap();
        assert_abs_diff_eq!(s.singulars[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.singulars[1], 1.0, epsilon = 1e-14);

        // eigenvalues of M*M are {4, 0}
        let s = svd(&Operator::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert_abs_diff_eq!(s.singulars[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.singulars[1], 0.0, epsilon = 1e-14);

        let s = svd(&Operator::zeros(3, 2)).unwrap();
        assert_eq!(s.singulars, vec![0.0, 0.0]);
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let m = Operator::from_fn(3, 5, |i, j| C64::new((i * 5 + j) as f64 % 7.0 - 3.0, (i as f64) - j as f64 * 0.5));
        let s = svd(&m).unwrap();
        let sigma = Operator::from_real_diag(&s.singulars);
        let rec = &(&s.left * &sigma) * &s.right.adjoint();
        assert!((&rec - &m).norm() <= 1e-10 * m.norm());
        assert!(s.singulars.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pinv_examples() {
        let p = pinv(&Operator::from_real_diag(&[2.0, 0.0]), &tol()).unwrap();
        assert!((&p - &Operator::from_real_diag(&[0.5, 0.0])).max_abs() < 1e-14);

        let p = pinv(&Operator::identity(3), &tol()).unwrap();
        assert!((&p - &Operator::identity(3)).max_abs() < 1e-14);

        // rank one: M = 2 u u*, u = (1,1)/√2, so M† = (1/2) u u* = 0.25·ones
        let ones = Operator::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let p = pinv(&ones, &tol()).unwrap();
        assert!((&p - &ones.scale_real(0.25)).max_abs() < 1e-14);

        let z = pinv(&Operator::zeros(2, 3), &tol()).unwrap();
        assert_eq!((z.rows(), z.cols()), (3, 2));
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn psd_examples() {
        let v = is_psd(&Operator::identity(3), &tol()).unwrap();
        assert!(v.verdict);
        assert_abs_diff_eq!(v.min_eigenvalue, 1.0, epsilon = 1e-14);

        let v = is_psd(&Operator::from_real_diag(&[1.0, -1.0]), &tol()).unwrap();
        assert!(!v.verdict);
        assert_abs_diff_eq!(v.min_eigenvalue, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn truncated_shift_commutator_is_indefinite() {
        // forward shift on C^4: T*T - TT* = diag(1,0,0,-1)
        let t = Operator::from_fn(4, 4, |i, j| if i == j + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let comm = &(&t.adjoint() * &t) - &(&t * &t.adjoint());
        let v = is_psd(&comm, &tol()).unwrap();
        assert!(!v.verdict);
        assert_abs_diff_eq!(v.min_eigenvalue, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn range_inclusion_examples() {
        let b = Operator::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(range_inclusion(&b, &b, &tol()).unwrap());
        let p = Operator::from_real_diag(&[1.0, 0.0]);
        assert!(!range_inclusion(&Operator::identity(2), &p, &tol()).unwrap());
        // e1 is not in span{(1,1)}: rank [B | A] = 2 > rank B = 1
        let ones = Operator::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(!range_inclusion(&p, &ones, &tol()).unwrap());
        assert!(matches!(
            range_inclusion(&Operator::zeros(2, 2), &Operator::zeros(3, 3), &tol()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn range_inclusion_ignores_scale() {
        let a = Operator::from_real_rows(&[&[1e-8], &[1e-8]]);
        let b = Operator::from_real_rows(&[&[1e6, 0.0], &[1e6, 1e-3]]);
        assert!(range_inclusion(&a, &b, &tol()).unwrap());
        let zero = Operator::zeros(2, 1);
        assert!(range_inclusion(&zero, &b, &tol()).unwrap());
        assert!(!range_inclusion(&a, &zero, &tol()).unwrap());
    }
}
