//! Dense complex matrices with adjoint semantics.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// A dense complex matrix stored row-major.
///
/// Every bounded operator of the finite models (analysis maps, shift and
/// multiplication operators, Θ, U, K, …) is an `Operator`. Vectors are plain
/// `[C64]` slices in orthonormal coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct Operator {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Operator { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Operator { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} operator", data.len())));
        }
        Ok(Operator { rows, cols, data })
    }

    /// Real matrix from nested rows. Panics on ragged input; intended for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged rows");
            C64::new(rows[i][j], 0.0)
        })
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<C64>]) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch(format!("column of length {} in a {n}-row operator", bad.len())));
        }
        Ok(Self::from_fn(n, columns.len(), |i, j| columns[j][i]))
    }

    /// The rank-one operator `u v*`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &Operator) -> Result<Operator> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Operator::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}x{} operator",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Operator) -> Result<Operator> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!("row counts {} and {} differ", self.rows, rhs.rows)));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                rhs[(i, j - self.cols)]
            }
        }))
    }

    /// Columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Operator {
        Self::from_fn(self.rows, end - start, |i, j| self[(i, start + j)])
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hermitian part `(H + H*)/2`.
    pub fn hermitian_part(&self) -> Operator {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// ‖M − M*‖_F / ‖M‖_F, zero for the zero matrix.
    pub fn hermitian_defect(&self) -> f64 {
        let norm = self.frobenius();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Operator {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

fn assert_same_shape(a: &Operator, b: &Operator) {
    assert!(a.rows == b.rows && a.cols == b.cols, "shape mismatch {}x{} vs {}x{}", a.rows, a.cols, b.rows, b.cols);
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_same_shape(self, rhs);
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_same_shape(self, rhs);
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panicking product for code paths whose shapes are already validated.
impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs).expect("operator shapes must agree")
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;
    fn try_from(j: OperatorJson) -> Result<Self> {
        let im = if j.im.is_empty() { vec![0.0; j.re.len()] } else { j.im };
        if im.len() != j.re.len() {
            return Err(Error::DimensionMismatch(format!("re has {} entries, im has {}", j.re.len(), im.len())));
        }
        let data = j.re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i)).collect();
        Operator::from_row_major(j.rows, j.cols, data)
    }
}

impl From<Operator> for OperatorJson {
    fn from(m: Operator) -> Self {
        OperatorJson {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

/// `⟨a, b⟩ = Σ a_i conj(b_i)`, linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    norm_sq(v).sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|z| z / n).collect()
}

pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[i] = C64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_of_identity_is_identity() {
        assert_eq!(Operator::identity(3).adjoint(), Operator::identity(3));
    }

    #[test]
    fn adjoint_transposes_real_shift() {
        let m = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(m.adjoint(), Operator::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]));
    }

    #[test]
    fn adjoint_conjugates_scalars() {
        let m = Operator::from_diag(&[c(0.0, 1.0)]);
        assert_eq!(m.adjoint()[(0, 0)], c(0.0, -1.0));
    }

    #[test]
    fn adjoint_swaps_shape() {
        let m = Operator::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let a = m.adjoint();
        assert_eq!((a.rows(), a.cols()), (3, 2));
        assert_eq!(a[(2, 1)], c(1.0, -2.0));
        assert_eq!(a.adjoint(), m);
    }

    #[test]
    fn matmul_checks_shapes() {
        let a = Operator::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch(_))));
        assert!(a.apply(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn json_shape_is_validated() {
        let bad = r#"{"rows":2,"cols":2,"re":[1,0,0],"im":[0,0,0]}"#;
        assert!(serde_json::from_str::<Operator>(bad).is_err());
        let ok = r#"{"rows":1,"cols":2,"re":[1,2]}"#;
        let m: Operator = serde_json::from_str(ok).unwrap();
        assert_eq!(m[(0, 1)], c(2.0, 0.0));
        let back: Operator = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn inner_is_linear_in_first_argument() {
        let a = [c(1.0, 1.0), c(0.0, 2.0)];
        let b = [c(2.0, 0.0), c(1.0, -1.0)];
        let s = c(0.5, -3.0);
        let sa: Vec<C64> = a.iter().map(|x| x * s).collect();
        let lhs = inner(&sa, &b);
        let rhs = s * inner(&a, &b);
        assert!((lhs - rhs).norm() < 1e-14);
        assert!((inner(&b, &a) - inner(&a, &b).conj()).norm() < 1e-14);
    }
}
