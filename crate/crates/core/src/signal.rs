//! Cyclic sampling model of `L²(ℝ)` windows and a truncated `ℓ²(ℕ)`.
//!
//! A [`Grid`] with `q` samples per unit and `P` units carries `n = qP`
//! samples at `t_i = i/q`; the inner product has weight `1/q` so that the
//! indicator of a unit interval has norm one. Translation, modulation and
//! dilation are exact unitaries on this group, which keeps every frame sum
//! finite and every operator identity exact.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Operator;
use crate::C64;

const ALIGN_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    q: usize,
    #[serde(rename = "P")]
    periods: usize,
}

impl Grid {
    pub fn new(q: usize, periods: usize) -> Result<Self> {
        if q == 0 || periods == 0 {
            return Err(Error::InvalidGrid(format!("q = {q} and P = {periods} must be positive")));
        }
        Ok(Grid { q, periods })
    }

    /// Samples per unit interval.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of unit intervals in one period.
    pub fn periods(&self) -> usize {
        self.periods
    }

    /// Total sample count `n = qP`.
    pub fn n(&self) -> usize {
        self.q * self.periods
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 / self.q as f64
    }

    /// Sample offset of a grid-aligned shift, reduced modulo `n`.
    pub fn shift_samples(&self, a: f64) -> Result<usize> {
        let steps = integral(a * self.q as f64).ok_or(Error::OffGridShift { shift: a })?;
        Ok(steps.rem_euclid(self.n() as i64) as usize)
    }

    fn check_frequency(&self, b: f64) -> Result<()> {
        integral(b * self.periods as f64).map(|_| ()).ok_or(Error::OffGridFrequency { freq: b })
    }

    fn check_dilation(&self, c: i64) -> Result<()> {
        if gcd(c.unsigned_abs(), self.n() as u64) != 1 {
            return Err(Error::NonCoprimeDilation { factor: c, n: self.n() });
        }
        Ok(())
    }
}

fn integral(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= ALIGN_EPS && r.is_finite()).then_some(r as i64)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Samples of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalJson", into = "SignalJson")]
pub struct Signal {
    grid: Grid,
    values: Vec<C64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::DimensionMismatch(format!("{} samples on a grid of {} points", values.len(), grid.n())));
        }
        Ok(Signal { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Signal { grid, values: vec![C64::new(0.0, 0.0); grid.n()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.t(i))).collect();
        Signal { grid, values }
    }

    /// Inverse of [`Signal::coords`].
    pub fn from_coords(grid: Grid, coords: &[C64]) -> Result<Self> {
        let s = (grid.q as f64).sqrt();
        Self::new(grid, coords.iter().map(|z| z * s).collect())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Coordinates in the orthonormal basis `{√q · δ_i}`: `values / √q`.
    /// Standard inner products of coordinates equal weighted inner products
    /// of signals.
    pub fn coords(&self) -> Vec<C64> {
        let s = 1.0 / (self.grid.q as f64).sqrt();
        self.values.iter().map(|z| z * s).collect()
    }

    /// `⟨f, g⟩ = (1/q) Σ f_i conj(g_i)`.
    pub fn inner(&self, other: &Signal) -> C64 {
        let w = 1.0 / self.grid.q as f64;
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() * w
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.grid.q as f64
    }

    pub fn scale(&self, s: C64) -> Signal {
        Signal { grid: self.grid, values: self.values.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch("signals live on different grids".into()));
        }
        Ok(Signal { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.norm_sqr() == 0.0)
    }
}

/// `T_a f(t) = f(t − a)`, cyclic.
pub fn translate(f: &Signal, a: f64) -> Result<Signal> {
    let grid = f.grid;
    let n = grid.n();
    let s = grid.shift_samples(a)?;
    let values = (0..n).map(|i| f.values[(i + n - s) % n]).collect();
    Ok(Signal { grid, values })
}

/// `E_b f(t) = e^{2πibt} f(t)`.
pub fn modulate(f: &Signal, b: f64) -> Result<Signal> {
    let grid = f.grid;
    grid.check_frequency(b)?;
    let values = f.values.iter().enumerate().map(|(i, v)| v * character(&grid, b, i)).collect();
    Ok(Signal { grid, values })
}

fn character(grid: &Grid, b: f64, i: usize) -> C64 {
    let phase = (b * i as f64 / grid.q as f64).rem_euclid(1.0);
    C64::from_polar(1.0, 2.0 * PI * phase)
}

/// Index dilation `f ↦ f(c · i mod n)`, a permutation when `gcd(c, n) = 1`.
pub fn dilate(f: &Signal, c: i64) -> Result<Signal> {
    let grid = f.grid;
    grid.check_dilation(c)?;
    let n = grid.n() as i64;
    let values = (0..n).map(|i| f.values[(c * i).rem_euclid(n) as usize]).collect();
    Ok(Signal { grid, values })
}

/// `χ_[s,t)` sampled on the grid; endpoints must be grid aligned with
/// `0 ≤ s < t ≤ P`.
pub fn indicator(grid: Grid, s: f64, t: f64) -> Result<Signal> {
    let bad = Error::OffGridEndpoints { start: s, end: t };
    let lo = integral(s * grid.q as f64).ok_or(bad.clone())?;
    let hi = integral(t * grid.q as f64).ok_or(bad.clone())?;
    if lo < 0 || hi > grid.n() as i64 || lo >= hi {
        return Err(bad);
    }
    let values = (0..grid.n() as i64)
        .map(|i| if (lo..hi).contains(&i) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
        .collect();
    Ok(Signal { grid, values })
}

/// Pointwise multiplication by `g` as a diagonal operator.
pub fn mult_operator(g: &Signal) -> Operator {
    Operator::from_diag(&g.values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Translate(f64),
    Modulate(f64),
    Dilate(i64),
}

/// Matrix of a translation, modulation or dilation on `grid`.
pub fn operator_of(grid: Grid, kind: OperatorKind) -> Result<Operator> {
    let n = grid.n();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match kind {
        OperatorKind::Translate(a) => {
            let s = grid.shift_samples(a)?;
            Ok(Operator::from_fn(n, n, |i, j| if j == (i + n - s) % n { one } else { zero }))
        }
        OperatorKind::Modulate(b) => {
            grid.check_frequency(b)?;
            let d: Vec<C64> = (0..n).map(|i| character(&grid, b, i)).collect();
            Ok(Operator::from_diag(&d))
        }
        OperatorKind::Dilate(c) => {
            grid.check_dilation(c)?;
            let ni = n as i64;
            Ok(Operator::from_fn(n, n, |i, j| if (c * i as i64).rem_euclid(ni) as usize == j { one } else { zero }))
        }
    }
}

/// `ℂⁿ` standing in for `ℓ²(ℕ)`; identities of the infinite shift are
/// asserted only on vectors supported in the first `n − margin` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSequenceSpace {
    n: usize,
    margin: usize,
}

impl TruncatedSequenceSpace {
    pub fn new(n: usize, margin: usize) -> Result<Self> {
        if n == 0 || margin >= n {
            return Err(Error::InvalidGrid(format!("need 0 <= margin < n, got n = {n}, margin = {margin}")));
        }
        Ok(TruncatedSequenceSpace { n, margin })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Columns `χ_1 … χ_{n−margin}`: an orthonormal basis of the margin subspace.
    pub fn margin_basis(&self) -> Operator {
        let keep = self.n - self.margin;
        Operator::from_fn(self.n, keep, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn in_margin(&self, v: &[C64]) -> bool {
        v.len() == self.n && v[self.n - self.margin..].iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

/// Backward shift `(ξ₁, …, ξ_n) ↦ (ξ₂, …, ξ_n, 0)` and its adjoint, the
/// forward shift `(ξ₁, …, ξ_n) ↦ (0, ξ₁, …, ξ_{n−1})`.
pub fn shift_operators(space: &TruncatedSequenceSpace) -> (Operator, Operator) {
    let n = space.n;
    let backward = Operator::from_fn(n, n, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let forward = backward.adjoint();
    (backward, forward)
}

/// `(ξ₁, ξ₂, …) ↦ (ξ₁, ξ₁ + ξ₂, ξ₂ + ξ₃, …)`: ones on the diagonal and the
/// first subdiagonal.
pub fn summing_operator(space: &TruncatedSequenceSpace) -> Operator {
    Operator::from_fn(
        space.n,
        space.n,
        |i, j| {
            if i == j || i == j + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        },
    )
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    q: usize,
    #[serde(rename = "P")]
    periods: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    indicator: Option<[f64; 2]>,
}

impl TryFrom<SignalJson> for Signal {
    type Error = Error;
    fn try_from(j: SignalJson) -> Result<Self> {
        let grid = Grid::new(j.q, j.periods)?;
        match (j.indicator, j.re) {
            (Some([s, t]), None) => indicator(grid, s, t),
            (None, Some(re)) => {
                let im = j.im.unwrap_or_else(|| vec![0.0; re.len()]);
                if im.len() != re.len() {
                    return Err(Error::DimensionMismatch(format!("re has {} samples, im has {}", re.len(), im.len())));
                }
                Signal::new(grid, re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i)).collect())
            }
            _ => Err(Error::InvalidGrid("signal needs exactly one of `re` or `indicator`".into())),
        }
    }
}

impl From<Signal> for SignalJson {
    fn from(s: Signal) -> Self {
        SignalJson {
            q: s.grid.q,
            periods: s.grid.periods,
            re: Some(s.values.iter().map(|z| z.re).collect()),
            im: Some(s.values.iter().map(|z| z.im).collect()),
            indicator: None,
        }
    }
}
