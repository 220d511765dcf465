//! Wave packet systems `{D_{a_j} T_{bk} E_{c_m} ψ}`, the coordinate-space
//! characterization of Θ-frames, and linear combinations of wave packets
//! (partition sums and finite sums over several windows).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{analysis_matrix, frame_operator, FrameSystem};
use crate::json::{cvec, de_cvec, opt_real, real};
use crate::numerics::{pencil_lower, pinv, range_inclusion, Operator, Tolerance};
use crate::operator_theory::{hyponormality, relative_hyponormality, HyponormalityReport, RelativeHyponormality};
use crate::signal::{dilate, modulate, translate, Signal};
use crate::theta::{check_theta_frame, ThetaFrameReport};
use crate::C64;

const DEDUPE_EPS: f64 = 1e-12;

fn default_true() -> bool {
    true
}

/// Parameters of a finite wave packet system. The grid is the window's grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacketParams {
    /// Window `ψ`.
    pub psi: Signal,
    /// Dilation factors `a_j`, each coprime to `n`.
    pub a_list: Vec<i64>,
    /// Translation step `b ≥ 0` with `b·q` an integer.
    pub b: f64,
    /// Half-open range `[lo, hi)` of translation indices `k`.
    pub k_range: [i64; 2],
    /// Modulation frequencies `c_m`, each with `c·P` an integer.
    pub c_list: Vec<f64>,
    /// Drop repeated vectors; with `b = 0` this collapses `k` to `{0}`.
    #[serde(default = "default_true")]
    pub dedupe: bool,
}

impl WavePacketParams {
    /// Check alignment, coprimality and range shape without generating.
    pub fn validate(&self) -> Result<()> {
        let grid = self.psi.grid();
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::InvalidParams(format!("translation step b = {} must be finite and >= 0", self.b)));
        }
        grid.shift_samples(self.b)?;
        if self.k_range[0] >= self.k_range[1] {
            return Err(Error::InvalidParams(format!("k_range [{}, {}) is empty", self.k_range[0], self.k_range[1])));
        }
        if self.a_list.is_empty() || self.c_list.is_empty() {
            return Err(Error::InvalidParams("a_list and c_list must be nonempty".into()));
        }
        let probe = Signal::zeros(grid);
        for &a in &self.a_list {
            dilate(&probe, a)?;
        }
        for &c in &self.c_list {
            modulate(&probe, c)?;
        }
        Ok(())
    }

    /// The translation indices actually used.
    pub fn k_values(&self) -> Vec<i64> {
        if self.b == 0.0 && self.dedupe {
            vec![0]
        } else {
            (self.k_range[0]..self.k_range[1]).collect()
        }
    }

    /// All `(j, k, m)` labels in lexicographic order, before deduplication;
    /// `j` and `m` index `a_list` and `c_list`, `k` is the translation index.
    pub fn labels(&self) -> Vec<[i64; 3]> {
        let ks = self.k_values();
        let mut out = Vec::with_capacity(self.a_list.len() * ks.len() * self.c_list.len());
        for j in 0..self.a_list.len() {
            for &k in &ks {
                for m in 0..self.c_list.len() {
                    out.push([j as i64, k, m as i64]);
                }
            }
        }
        out
    }

    /// Human-readable notes about degenerate or collapsed parameters.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.b == 0.0 && self.dedupe && self.k_range[1] - self.k_range[0] > 1 {
            w.push("b = 0: translations are trivial, k_range collapsed to {0}".to_string());
        }
        if self.psi.is_zero() {
            w.push("degenerate: window psi is zero, every generated vector vanishes".to_string());
        }
        w
    }

    /// `D_{a_j} T_{bk} E_{c_m} ψ` for the label `(j, k, m)` and window `psi`.
    pub fn packet(&self, psi: &Signal, label: [i64; 3]) -> Result<Signal> {
        let [j, k, m] = label;
        let e = modulate(psi, self.c_list[m as usize])?;
        let t = translate(&e, self.b * k as f64)?;
        dilate(&t, self.a_list[j as usize])
    }

    /// The same parameters with a different window.
    pub fn with_psi(&self, psi: Signal) -> WavePacketParams {
        WavePacketParams { psi, ..self.clone() }
    }
}

fn close(a: &[C64], b: &[C64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= DEDUPE_EPS)
}

/// Generate the system in orthonormal grid coordinates, labelled `(j, k, m)`.
pub fn generate_system(params: &WavePacketParams) -> Result<FrameSystem> {
    params.validate()?;
    let grid = params.psi.grid();
    let mut vectors: Vec<Vec<C64>> = Vec::new();
    let mut labels = Vec::new();
    for label in params.labels() {
        let v = params.packet(&params.psi, label)?.coords();
        if params.dedupe && vectors.iter().any(|w| close(w, &v)) {
            continue;
        }
        vectors.push(v);
        labels.push(label);
    }
    FrameSystem::new(grid.n(), vectors)?.with_labels(labels)
}

/// Matrix of the analysis map `W f = Σ ⟨f, f_k⟩ e_k`; `W* e_k = f_k`.
pub fn analysis_into_coordinates(f: &FrameSystem) -> Operator {
    analysis_matrix(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem35 {
    /// (i) `(Θ, Ξ)` relatively hyponormal, `Ξ = W*`.
    pub relative: RelativeHyponormality,
    /// (ii) `R(Θ) ⊆ R(Ξ)`.
    pub range_included: bool,
    /// (i) ∧ (ii).
    pub conditions_hold: bool,
    pub report: ThetaFrameReport,
    /// The operator conditions agree with the Θ-frame verdict.
    pub agrees: bool,
}

/// Coordinate-space characterization: the system is a Θ-frame iff
/// `(Θ, W*)` is relatively hyponormal and `R(Θ) ⊆ R(W*)`.
pub fn theorem_3_5_check(f: &FrameSystem, theta: &Operator, tol: &Tolerance) -> Result<Theorem35> {
    let xi = analysis_into_coordinates(f).adjoint();
    let report = check_theta_frame(f, theta, tol)?;
    let relative = relative_hyponormality(theta, &xi, tol)?;
    let range_included = range_inclusion(theta, &xi, tol)?;
    let conditions_hold = relative.holds && range_included;
    Ok(Theorem35 { agrees: conditions_hold == report.passes(), relative, range_included, conditions_hold, report })
}

/// Disjoint cells of flat system indices with one coefficient per index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionCombination {
    pub cells: Vec<Vec<usize>>,
    #[serde(serialize_with = "cvec", deserialize_with = "de_cvec")]
    pub coefficients: Vec<C64>,
}

impl PartitionCombination {
    pub fn new(cells: Vec<Vec<usize>>, coefficients: Vec<C64>) -> Self {
        PartitionCombination { cells, coefficients }
    }

    /// Cells given by `(j, k, m)` labels of `f`.
    pub fn from_labels(f: &FrameSystem, cells: &[Vec<[i64; 3]>], coefficients: Vec<C64>) -> Result<Self> {
        let cells = cells
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|&l| f.index_of(l).ok_or_else(|| Error::InvalidCombination(format!("unknown label {l:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PartitionCombination { cells, coefficients })
    }

    /// Singleton cells with unit coefficients.
    pub fn identity(len: usize) -> Self {
        PartitionCombination { cells: (0..len).map(|i| vec![i]).collect(), coefficients: vec![C64::new(1.0, 0.0); len] }
    }

    /// Check that the cells partition `0..len` and coefficients match.
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.coefficients.len() != len {
            return Err(Error::InvalidCombination(format!(
                "{} coefficients for {len} vectors",
                self.coefficients.len()
            )));
        }
        let mut seen = vec![false; len];
        for &i in self.cells.iter().flatten() {
            if i >= len {
                return Err(Error::InvalidCombination(format!("index {i} out of range for {len} vectors")));
            }
            if seen[i] {
                return Err(Error::PartitionNotDisjoint(i));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::PartitionNotExhaustive(i));
        }
        if self.cells.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidCombination("empty partition cell".into()));
        }
        Ok(())
    }

    /// The coefficient map `T` on coordinate sequences with
    /// `V_Φ* = T V_F*`: `T[r][i] = conj(α_i)` for `i` in cell `r`.
    pub fn coefficient_map(&self, len: usize) -> Operator {
        let mut t = Operator::zeros(self.cells.len(), len);
        for (r, cell) in self.cells.iter().enumerate() {
            for &i in cell {
                t[(r, i)] = self.coefficients[i].conj();
            }
        }
        t
    }
}

/// `Φ_r = Σ_{i ∈ cell r} α_i f_i`, one vector per cell.
pub fn partition_combination(f: &FrameSystem, pc: &PartitionCombination) -> Result<FrameSystem> {
    pc.validate(f.len())?;
    let vectors = pc
        .cells
        .iter()
        .map(|cell| {
            let mut v = vec![C64::new(0.0, 0.0); f.dim()];
            for &i in cell {
                crate::numerics::axpy(pc.coefficients[i], f.vector(i), &mut v);
            }
            v
        })
        .collect();
    FrameSystem::new(f.dim(), vectors)
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem41 {
    /// Greatest `λ` with `λ S_F ⪯ S_Φ`; absent when `S_F = 0`.
    #[serde(serialize_with = "opt_real")]
    pub lambda_opt: Option<f64>,
    pub report_f: ThetaFrameReport,
    pub report_phi: ThetaFrameReport,
    /// Hyponormality of `Θ*`.
    pub adjoint_hyponormality: HyponormalityReport,
    /// `F` is a Θ-frame and `Θ*` is hyponormal.
    pub preconditions_hold: bool,
    /// `(λ_opt > psd_floor) ⇔ Φ is a Θ-frame`.
    pub agrees: bool,
    /// `λ_opt ≥ A′/B` when `Φ` passes.
    pub lambda_bound_ok: Option<bool>,
    /// `‖T‖` of the coefficient map.
    pub coefficient_norm: f64,
    /// `β_Φ ≤ ‖T‖² β_F`.
    pub upper_estimate_ok: bool,
}

/// Lower comparison `Σ|⟨Φ_r, f⟩|² ≥ λ Σ|⟨f_k, f⟩|²` against the Θ-frame
/// verdict of `Φ`. Without an explicit coefficient map the minimal-norm `T`
/// with `V_Φ* = T V_F*` is used.
pub fn theorem_4_1_check(
    phi: &FrameSystem,
    f: &FrameSystem,
    theta: &Operator,
    coefficient_map: Option<&Operator>,
    tol: &Tolerance,
) -> Result<Theorem41> {
    if phi.dim() != f.dim() {
        return Err(Error::DimensionMismatch(format!("Phi has dimension {}, F has {}", phi.dim(), f.dim())));
    }
    let report_f = check_theta_frame(f, theta, tol)?;
    let report_phi = check_theta_frame(phi, theta, tol)?;
    let adjoint_hyponormality = hyponormality(&theta.adjoint(), tol, None)?;
    let preconditions_hold = report_f.passes() && adjoint_hyponormality.global_verdict;
    let lambda_opt = pencil_lower(&frame_operator(phi), &frame_operator(f), tol)?.map(|b| b.value.max(0.0));
    let lambda_positive = lambda_opt.is_some_and(|l| l > tol.psd_floor);
    let agrees = lambda_positive == report_phi.passes();
    let lambda_bound_ok = (report_phi.passes() && report_f.upper_ok).then(|| {
        let bound = report_phi.alpha() / report_f.beta_opt;
        lambda_opt.unwrap_or(f64::INFINITY) >= bound * (1.0 - tol.verdict_rel) - tol.psd_floor
    });
    let t = match coefficient_map {
        Some(t) => t.clone(),
        None => &analysis_matrix(phi) * &pinv(&analysis_matrix(f), tol)?,
    };
    let coefficient_norm = t.norm();
    let upper_estimate_ok = !report_f.upper_ok
        || report_phi.beta_opt
            <= coefficient_norm * coefficient_norm * report_f.beta_opt * (1.0 + tol.verdict_rel) + tol.psd_floor;
    Ok(Theorem41 {
        lambda_opt,
        report_f,
        report_phi,
        adjoint_hyponormality,
        preconditions_hold,
        agrees,
        lambda_bound_ok,
        coefficient_norm,
        upper_estimate_ok,
    })
}

/// Nonzero scalars `α_s` and windows `ψ_s` on a common grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSumSpec {
    #[serde(serialize_with = "cvec", deserialize_with = "de_cvec")]
    pub alphas: Vec<C64>,
    pub psis: Vec<Signal>,
}

impl FiniteSumSpec {
    pub fn p(&self) -> usize {
        self.alphas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.alphas.len() != self.psis.len() {
            return Err(Error::InvalidCombination(format!(
                "{} scalars for {} windows",
                self.alphas.len(),
                self.psis.len()
            )));
        }
        if let Some(s) = self.alphas.iter().position(|a| a.norm() == 0.0) {
            return Err(Error::InvalidCombination(format!("alpha_{} is zero; all scalars must be nonzero", s + 1)));
        }
        let grid = self.psis[0].grid();
        if self.psis.iter().any(|p| p.grid() != grid) {
            return Err(Error::InvalidCombination("windows live on different grids".into()));
        }
        Ok(())
    }
}

/// The system of one window with every label of `params` kept, so that
/// systems of different windows are indexed alike.
pub fn labelled_system(params: &WavePacketParams, psi: &Signal) -> Result<FrameSystem> {
    params.validate()?;
    if psi.grid() != params.psi.grid() {
        return Err(Error::DimensionMismatch("window grid differs from the parameter grid".into()));
    }
    let labels = params.labels();
    let vectors = labels.iter().map(|&l| params.packet(psi, l).map(|s| s.coords())).collect::<Result<Vec<_>>>()?;
    FrameSystem::new(psi.grid().n(), vectors)?.with_labels(labels)
}

/// `F_p`: for each label, `Σ_s α_s D_{a_j} T_{bk} E_{c_m} ψ_s`. The window
/// of `params` is ignored in favour of the spec's windows.
pub fn finite_sum_system(spec: &FiniteSumSpec, params: &WavePacketParams) -> Result<FrameSystem> {
    spec.validate()?;
    let systems = spec.psis.iter().map(|psi| labelled_system(params, psi)).collect::<Result<Vec<_>>>()?;
    let first = &systems[0];
    let vectors = (0..first.len())
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); first.dim()];
            for (alpha, sys) in spec.alphas.iter().zip(&systems) {
                crate::numerics::axpy(*alpha, sys.vector(k), &mut v);
            }
            v
        })
        .collect();
    FrameSystem::new(first.dim(), vectors)?.with_labels(params.labels())
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem42 {
    /// `μ_opt(ξ)`: greatest `μ` with `μ S_ξ ⪯ S_{F_p}`, per window.
    #[serde(serialize_with = "opt_reals")]
    pub mu_opt: Vec<Option<f64>>,
    /// Index `ξ` (0-based) with the largest `μ_opt`.
    pub best_xi: Option<usize>,
    /// Some `μ_opt(ξ) > psd_floor`.
    pub exists_mu: bool,
    /// Θ-frame verdict of each single-window system.
    pub base_passes: Vec<bool>,
    pub report: ThetaFrameReport,
    /// `Θ*` hyponormal.
    pub adjoint_hyponormal: bool,
    /// Every single-window system is a Θ-frame and `Θ*` is hyponormal.
    pub preconditions_hold: bool,
    /// `exists_mu ⇔ F_p is a Θ-frame`.
    pub agrees: bool,
    /// `p · max|α_s|² · Σ_s B_s`.
    #[serde(serialize_with = "real")]
    pub upper_constant: f64,
    /// `β_{F_p} ≤ upper_constant`, checked when `F_p` passes.
    pub upper_bound_ok: Option<bool>,
}

fn opt_reals<S: serde::Serializer>(v: &[Option<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    struct W(#[serde(serialize_with = "opt_real")] Option<f64>);
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&W(*x))?;
    }
    seq.end()
}

/// Existence of `μ > 0` and `ξ` with `μ Σ|⟨ψ_ξ-packets, f⟩|² ≤ Σ|⟨F_p, f⟩|²`
/// against the Θ-frame verdict of `F_p`, for the given scalars.
pub fn theorem_4_2_check(
    spec: &FiniteSumSpec,
    params: &WavePacketParams,
    theta: &Operator,
    tol: &Tolerance,
) -> Result<Theorem42> {
    let fp = finite_sum_system(spec, params)?;
    let s_fp = frame_operator(&fp);
    let mut mu_opt = Vec::with_capacity(spec.p());
    let mut base_passes = Vec::with_capacity(spec.p());
    let mut beta_sum = 0.0;
    for psi in &spec.psis {
        let sys = labelled_system(params, psi)?;
        let r = check_theta_frame(&sys, theta, tol)?;
        base_passes.push(r.passes());
        beta_sum += r.beta_opt;
        mu_opt.push(pencil_lower(&s_fp, &frame_operator(&sys), tol)?.map(|b| b.value.max(0.0)));
    }
    let best_xi = mu_opt
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|m| (i, m)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);
    let exists_mu = mu_opt.iter().any(|m| m.is_some_and(|m| m > tol.psd_floor));
    let report = check_theta_frame(&fp, theta, tol)?;
    let adjoint_hyponormal = hyponormality(&theta.adjoint(), tol, None)?.global_verdict;
    let max_alpha = spec.alphas.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let upper_constant = spec.p() as f64 * max_alpha * beta_sum;
    let upper_bound_ok =
        report.passes().then_some(report.beta_opt <= upper_constant * (1.0 + tol.verdict_rel) + tol.psd_floor);
    Ok(Theorem42 {
        mu_opt,
        best_xi,
        exists_mu,
        preconditions_hold: base_passes.iter().all(|&b| b) && adjoint_hyponormal,
        base_passes,
        agrees: exists_mu == report.passes(),
        report,
        adjoint_hyponormal,
        upper_constant,
        upper_bound_ok,
    })
}
