//! Classical frame analysis: analysis and synthesis maps, the frame operator,
//! optimal bounds and reconstruction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, inner, Operator, Tolerance};
use crate::C64;

/// A finite ordered family `{f_k} ⊂ ℂⁿ`, optionally labelled by `(j, k, m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameSystemJson", into = "FrameSystemJson")]
pub struct FrameSystem {
    dim: usize,
    vectors: Vec<Vec<C64>>,
    labels: Option<Vec<[i64; 3]>>,
}

impl FrameSystem {
    pub fn new(dim: usize, vectors: Vec<Vec<C64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptySystem);
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a system of dimension {dim}",
                v.len()
            )));
        }
        Ok(FrameSystem { dim, vectors, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<[i64; 3]>) -> Result<Self> {
        if labels.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} vectors",
                labels.len(),
                self.vectors.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// The standard orthonormal basis `e_1, …, e_n`.
    pub fn canonical_basis(n: usize) -> Self {
        let vectors = (0..n).map(|i| crate::numerics::unit_vector(n, i)).collect();
        FrameSystem { dim: n, vectors, labels: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k]
    }

    pub fn labels(&self) -> Option<&[[i64; 3]]> {
        self.labels.as_deref()
    }

    /// Flat index of a `(j, k, m)` label.
    pub fn index_of(&self, label: [i64; 3]) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| *l == label)
    }

    /// Image system `{M f_k}`; labels are kept.
    pub fn map(&self, m: &Operator) -> Result<FrameSystem> {
        if m.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator applied to a system of dimension {}",
                m.rows(),
                m.cols(),
                self.dim
            )));
        }
        let vectors = self.vectors.iter().map(|v| m.apply(v)).collect::<Result<Vec<_>>>()?;
        Ok(FrameSystem { dim: m.rows(), vectors, labels: self.labels.clone() })
    }

    /// `Σ_k |⟨f, f_k⟩|²`.
    pub fn energy(&self, f: &[C64]) -> f64 {
        self.vectors.iter().map(|v| inner(f, v).norm_sqr()).sum()
    }
}

/// Analysis matrix `V*`: row `k` is `f_k*`, so `V* f = {⟨f, f_k⟩}`.
pub fn analysis_matrix(f: &FrameSystem) -> Operator {
    Operator::from_fn(f.len(), f.dim, |k, i| f.vectors[k][i].conj())
}

/// Synthesis matrix `V`: column `k` is `f_k`.
pub fn synthesis_matrix(f: &FrameSystem) -> Operator {
    Operator::from_fn(f.dim, f.len(), |i, k| f.vectors[k][i])
}

/// `S = V V* = Σ_k f_k f_k*`.
pub fn frame_operator(f: &FrameSystem) -> Operator {
    let n = f.dim;
    let mut s = Operator::zeros(n, n);
    for v in &f.vectors {
        for i in 0..n {
            if v[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                s[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    s
}

/// Optimal frame bounds `δ₀ = λ_min(S)`, `γ₀ = λ_max(S)` with eigenvectors
/// attaining them.
#[derive(Clone, Debug, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
    /// `δ₀ > psd_floor`: the family is a frame for the whole space.
    pub is_frame: bool,
    pub lower_witness: Vec<C64>,
    pub upper_witness: Vec<C64>,
}

pub fn optimal_bounds(f: &FrameSystem, tol: &Tolerance) -> Result<FrameBounds> {
    let eig = herm_eig(&frame_operator(f))?;
    let lower = eig.min().max(0.0);
    let upper = eig.max().max(lower);
    Ok(FrameBounds {
        lower,
        upper,
        tight: (upper - lower).abs() <= tol.verdict_rel * upper,
        is_frame: lower > tol.psd_floor,
        lower_witness: eig.vector(0),
        upper_witness: eig.vector(eig.values.len() - 1),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    /// Frame coefficients `⟨S⁻¹f, f_k⟩`.
    pub coefficients: Vec<C64>,
    /// `Σ_k c_k f_k`.
    pub reassembled: Vec<C64>,
}

/// Canonical reconstruction `f = Σ ⟨S⁻¹f, f_k⟩ f_k`.
pub fn reconstruct(f: &FrameSystem, x: &[C64], tol: &Tolerance) -> Result<Reconstruction> {
    if x.len() != f.dim {
        return Err(Error::DimensionMismatch(format!("vector of length {} for dimension {}", x.len(), f.dim)));
    }
    let eig = herm_eig(&frame_operator(f))?;
    if eig.min() <= tol.psd_floor {
        return Err(Error::NotAFrame { lower: eig.min() });
    }
    let mut s_inv_x = vec![C64::new(0.0, 0.0); f.dim];
    for (i, &lam) in eig.values.iter().enumerate() {
        let v = eig.vector(i);
        let c = inner(x, &v) / lam;
        crate::numerics::axpy(c, &v, &mut s_inv_x);
    }
    let coefficients: Vec<C64> = f.vectors.iter().map(|v| inner(&s_inv_x, v)).collect();
    let mut reassembled = vec![C64::new(0.0, 0.0); f.dim];
    for (c, v) in coefficients.iter().zip(&f.vectors) {
        crate::numerics::axpy(*c, v, &mut reassembled);
    }
    Ok(Reconstruction { coefficients, reassembled })
}

#[derive(Serialize, Deserialize)]
struct VectorJson {
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FrameSystemJson {
    n: usize,
    vectors: Vec<VectorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<[i64; 3]>>,
}

impl TryFrom<FrameSystemJson> for FrameSystem {
    type Error = Error;
    fn try_from(j: FrameSystemJson) -> Result<Self> {
        let vectors = j
            .vectors
            .into_iter()
            .map(|v| {
                let im = if v.im.is_empty() { vec![0.0; v.re.len()] } else { v.im };
                if im.len() != v.re.len() {
                    return Err(Error::DimensionMismatch("re and im lengths differ".into()));
                }
                Ok(v.re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let sys = FrameSystem::new(j.n, vectors)?;
        match j.labels {
            Some(l) => sys.with_labels(l),
            None => Ok(sys),
        }
    }
}

impl From<FrameSystem> for FrameSystemJson {
    fn from(s: FrameSystem) -> Self {
        FrameSystemJson {
            n: s.dim,
            vectors: s
                .vectors
                .iter()
                .map(|v| VectorJson { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() })
                .collect(),
            labels: s.labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::unit_vector;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    fn mercedes_benz() -> FrameSystem {
        let vs = (0..3)
            .map(|k| {
                let th = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                real(&[th.cos(), th.sin()])
            })
            .collect();
        FrameSystem::new(2, vs).unwrap()
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert_eq!(FrameSystem::new(2, vec![]), Err(Error::EmptySystem));
        assert!(FrameSystem::new(2, vec![real(&[1.0])]).is_err());
    }

    #[test]
    fn analysis_examples() {
        assert_eq!(analysis_matrix(&FrameSystem::canonical_basis(3)), Operator::identity(3));
        let twice = FrameSystem::new(2, vec![unit_vector(2, 0), unit_vector(2, 0)]).unwrap();
        let a = analysis_matrix(&twice);
        assert_eq!(a.row(0), a.row(1));
        let f = FrameSystem::new(2, vec![real(&[1.0, 1.0])]).unwrap();
        assert_eq!(analysis_matrix(&f).apply(&unit_vector(2, 0)).unwrap(), real(&[1.0]));
        assert_eq!(synthesis_matrix(&f), analysis_matrix(&f).adjoint());
    }

    #[test]
    fn frame_operator_examples() {
        assert_eq!(frame_operator(&FrameSystem::canonical_basis(4)), Operator::identity(4));
        let f = FrameSystem::new(2, vec![unit_vector(2, 0), unit_vector(2, 0), unit_vector(2, 1)]).unwrap();
        assert_eq!(frame_operator(&f), Operator::from_real_diag(&[2.0, 1.0]));
        // Σ over three unit vectors at 120°: cos² sums to 3/2, cross terms cancel.
        let s = frame_operator(&mercedes_benz());
        assert!((&s - &Operator::identity(2).scale_real(1.5)).max_abs() < 1e-15);
    }

    #[test]
    fn optimal_bounds_examples() {
        let b = optimal_bounds(&FrameSystem::canonical_basis(3), &tol()).unwrap();
        assert_eq!((b.lower, b.upper, b.tight, b.is_frame), (1.0, 1.0, true, true));
        let f = FrameSystem::new(2, vec![unit_vector(2, 0), unit_vector(2, 0), unit_vector(2, 1)]).unwrap();
        let b = optimal_bounds(&f, &tol()).unwrap();
        assert_abs_diff_eq!(b.lower, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.upper, 2.0, epsilon = 1e-14);
        assert!(!b.tight);
        let b = optimal_bounds(&mercedes_benz(), &tol()).unwrap();
        assert_abs_diff_eq!(b.lower, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(b.upper, 1.5, epsilon = 1e-14);
        assert!(b.tight);
    }

    #[test]
    fn rank_deficient_family_is_reported_not_rejected() {
        let f = FrameSystem::new(3, vec![unit_vector(3, 0), unit_vector(3, 1)]).unwrap();
        let b = optimal_bounds(&f, &tol()).unwrap();
        assert!(!b.is_frame);
        assert_eq!(b.lower, 0.0);
        assert!(matches!(reconstruct(&f, &unit_vector(3, 2), &tol()), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn reconstruct_examples() {
        let r = reconstruct(&FrameSystem::canonical_basis(3), &unit_vector(3, 1), &tol()).unwrap();
        for (c, want) in r.coefficients.iter().zip([0.0, 1.0, 0.0]) {
            assert_abs_diff_eq!((c - C64::new(want, 0.0)).norm(), 0.0, epsilon = 1e-14);
        }
        // S⁻¹ = diag(1/2, 1): coefficients (1/2, 1/2, 0)
        let f = FrameSystem::new(2, vec![unit_vector(2, 0), unit_vector(2, 0), unit_vector(2, 1)]).unwrap();
        let r = reconstruct(&f, &unit_vector(2, 0), &tol()).unwrap();
        for (c, want) in r.coefficients.iter().zip([0.5, 0.5, 0.0]) {
            assert_abs_diff_eq!((c - C64::new(want, 0.0)).norm(), 0.0, epsilon = 1e-14);
        }
        let r = reconstruct(&mercedes_benz(), &[C64::new(0.0, 0.0); 2], &tol()).unwrap();
        assert!(r.coefficients.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn json_roundtrip_with_labels() {
        let f = FrameSystem::canonical_basis(2).with_labels(vec![[0, 0, 0], [0, 1, 0]]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: FrameSystem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.index_of([0, 1, 0]), Some(1));
        assert!(serde_json::from_str::<FrameSystem>(r#"{"n":2,"vectors":[]}"#).is_err());
    }
}
