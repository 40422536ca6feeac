//! Small dense linear algebra sized for this crate (n <= 8).
//!
//! Three numeric layers, each used where its guarantees are needed:
//!
//! * [`MatF`], plain `f64` row-major matrices for gauge evaluation and
//!   finite-difference work;
//! * [`MatZ`], `i128` matrices with checked arithmetic for everything
//!   touching `SL(n,Z)` (determinants via fraction-free Bareiss elimination,
//!   exact inverses of unimodular matrices);
//! * [`RatMat`], `BigRational` matrices for the exact pipeline (Gram
//!   transforms, exact inverses, rank checks). Every `f64` is a binary
//!   rational, so lifting input data into this layer is lossless.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::fmath;
use crate::{Error, Result};

// ── f64 vectors ──────────────────────────────────────────────────────────

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    fmath::sqrt(dot(a, a))
}

// ── f64 matrices ─────────────────────────────────────────────────────────

/// Dense row-major `f64` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatF {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatF {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatF { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidSpec("empty matrix".to_string()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidSpec("ragged matrix rows".to_string()));
        }
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn transpose(&self) -> MatF {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &MatF) -> MatF {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    /// Max |a_ij - b_ij|.
    pub fn max_abs_diff(&self, other: &MatF) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| fmath::abs(x - y))
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..i).all(|j| fmath::abs(self.get(i, j) - self.get(j, i)) <= tol)
            })
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
///
/// Used for simplex basis refinement; `A` must be square and nonsingular to
/// working precision.
pub fn solve_gauss(a: &MatF, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                fmath::abs(m.get(i, col)).total_cmp(&fmath::abs(m.get(j, col)))
            })
            .unwrap();
        let pivot = m.get(pivot_row, col);
        if fmath::abs(pivot) < 1e-300 {
            return Err(Error::Singular);
        }
        if pivot_row != col {
            for j in 0..n {
                let (a1, a2) = (m.get(col, j), m.get(pivot_row, j));
                m.set(col, j, a2);
                m.set(pivot_row, j, a1);
            }
            x.swap(col, pivot_row);
        }
        for i in col + 1..n {
            let factor = m.get(i, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m.set(i, j, m.get(i, j) - factor * m.get(col, j));
            }
            x[i] -= factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= m.get(i, j) * x[j];
        }
        x[i] = s / m.get(i, i);
    }
    Ok(x)
}

/// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi
/// rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// the columns of the second component. Convergence to off-diagonal mass
/// below 1e-14 times the Frobenius norm; for the tiny symmetric matrices in
/// this crate a handful of sweeps suffices.
pub fn jacobi_eigen(a: &MatF) -> Result<(Vec<f64>, MatF)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.cols() });
    }
    if !a.is_symmetric(1e-12) {
        return Err(Error::InvalidSpec("matrix is not symmetric".to_string()));
    }
    let mut m = a.clone();
    // Symmetrize exactly so rotations preserve symmetry bit for bit.
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, avg);
            m.set(j, i, avg);
        }
    }
    let mut v = MatF::identity(n);
    let frob: f64 = fmath::sqrt(m.data.iter().map(|x| x * x).sum());
    let tol = 1e-14 * frob.max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(fmath::abs(m.get(i, j)));
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if fmath::abs(apq) <= tol * 1e-2 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (fmath::abs(theta) + fmath::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / fmath::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).total_cmp(&m.get(j, j)));
    let eigvals: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vecs = MatF::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vecs.set(k, new_col, v.get(k, old_col));
        }
    }
    Ok((eigvals, vecs))
}

// ── i128 matrices ────────────────────────────────────────────────────────

fn checked_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn checked_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// Dense row-major `i128` matrix with checked arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatZ {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl MatZ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatZ { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidSpec("empty matrix".to_string()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidSpec("ragged matrix rows".to_string()));
        }
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i128) {
        self.data[i * self.cols + j] = x;
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> MatZ {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &MatZ) -> Result<MatZ> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc = checked_add(acc, checked_mul(self.get(i, k), other.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[i128]) -> Result<Vec<i128>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        (0..self.rows)
            .map(|i| {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc = checked_add(acc, checked_mul(self.get(i, k), v[k])?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn matvec_f64(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) as f64 * v[k]).sum())
            .collect()
    }

    pub fn to_f64(&self) -> MatF {
        let mut m = MatF::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j) as f64);
            }
        }
        m
    }

    /// Determinant by fraction-free Bareiss elimination, exact in i128.
    pub fn det(&self) -> Result<i128> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut m = self.data.clone();
        let at = |m: &Vec<i128>, i: usize, j: usize| m[i * n + j];
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..n - 1 {
            if at(&m, k, k) == 0 {
                let swap = (k + 1..n).find(|&i| at(&m, i, k) != 0);
                match swap {
                    Some(i) => {
                        for j in 0..n {
                            m.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = checked_add(
                        checked_mul(at(&m, i, j), at(&m, k, k))?,
                        -checked_mul(at(&m, i, k), at(&m, k, j))?,
                    )?;
                    // Bareiss guarantees exact divisibility by the previous pivot.
                    m[i * n + j] = num / prev;
                }
                m[i * n + k] = 0;
            }
            prev = at(&m, k, k);
        }
        checked_mul(sign, at(&m, n - 1, n - 1))
    }
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    num_integer::Integer::gcd(&a, &b)
}

// ── exact rational matrices ──────────────────────────────────────────────

pub fn rat_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x)
        .ok_or_else(|| Error::InvalidSpec("non-finite number in exact data".to_string()))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rat_from_i128(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Dense `BigRational` matrix for the exact pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigRational>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidSpec("empty matrix".to_string()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidSpec("ragged matrix rows".to_string()));
        }
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let lifted: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::from_rows(&lifted)
    }

    pub fn from_matz(m: &MatZ) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, rat_from_i128(m.get(i, j)));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigRational) {
        self.data[i * self.cols + j] = x;
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMat) -> Result<RatMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * &v[k]).sum())
            .collect())
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RatMat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&i| !m.get(i, col).is_zero())
                .ok_or(Error::Singular)?;
            if pivot_row != col {
                for j in 0..n {
                    let a = m.get(col, j).clone();
                    let b = m.get(pivot_row, j).clone();
                    m.set(col, j, b);
                    m.set(pivot_row, j, a);
                    let a = inv.get(col, j).clone();
                    let b = inv.get(pivot_row, j).clone();
                    inv.set(col, j, b);
                    inv.set(pivot_row, j, a);
                }
            }
            let pivot = m.get(col, col).clone();
            for j in 0..n {
                m.set(col, j, m.get(col, j) / &pivot);
                inv.set(col, j, inv.get(col, j) / &pivot);
            }
            for i in 0..n {
                if i == col || m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col).clone();
                for j in 0..n {
                    let mv = m.get(i, j) - &factor * m.get(col, j);
                    m.set(i, j, mv);
                    let iv = inv.get(i, j) - &factor * inv.get(col, j);
                    inv.set(i, j, iv);
                }
            }
        }
        Ok(inv)
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let pivot_row = (rank..rows).find(|&i| !m.get(i, col).is_zero());
            let Some(pr) = pivot_row else { continue };
            if pr != rank {
                for j in 0..cols {
                    let a = m.get(rank, j).clone();
                    let b = m.get(pr, j).clone();
                    m.set(rank, j, b);
                    m.set(pr, j, a);
                }
            }
            for i in rank + 1..rows {
                if m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col) / m.get(rank, col);
                for j in col..cols {
                    let v = m.get(i, j) - &factor * m.get(rank, j);
                    m.set(i, j, v);
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    pub fn to_f64(&self) -> MatF {
        let mut m = MatF::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, rat_to_f64(self.get(i, j)));
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    /// True if every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.denom().is_one() || x.is_zero())
    }

    pub fn to_matz(&self) -> Result<MatZ> {
        let mut m = MatZ::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let r = self.get(i, j);
                if !r.denom().is_one() && !r.is_zero() {
                    return Err(Error::InvalidSpec("matrix is not integral".to_string()));
                }
                let int = r.to_integer();
                let v = int.to_i128().ok_or(Error::Overflow)?;
                m.set(i, j, v);
            }
        }
        Ok(m)
    }
}

/// Exact absolute value of a rational.
pub fn rat_abs(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn jacobi_recovers_diagonal_eigenvalues() {
        let m = MatF::from_rows(&[vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap();
        let (vals, _) = jacobi_eigen(&m).unwrap();
        assert!((vals[0] - 4.0).abs() < 1e-12);
        assert!((vals[1] - 9.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_matches_closed_form_for_2x2() {
        // trace 7, det 1, eigenvalues (7 +- 3 sqrt 5) / 2
        let m = MatF::from_rows(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap();
        let (vals, vecs) = jacobi_eigen(&m).unwrap();
        let s5 = 5.0f64.sqrt();
        assert!((vals[0] - (7.0 - 3.0 * s5) / 2.0).abs() < 1e-12);
        assert!((vals[1] - (7.0 + 3.0 * s5) / 2.0).abs() < 1e-12);
        // eigenvector columns satisfy M v = lambda v
        for k in 0..2 {
            let v = vec![vecs.get(0, k), vecs.get(1, k)];
            let mv = m.matvec(&v);
            for i in 0..2 {
                assert!((mv[i] - vals[k] * v[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bareiss_det_known_values() {
        let a = MatZ::from_rows(&[vec![2, 1], vec![3, 2]]).unwrap();
        assert_eq!(a.det().unwrap(), 1);
        let b = MatZ::from_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]).unwrap();
        assert_eq!(b.det().unwrap(), -3);
        let singular =
            MatZ::from_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).unwrap();
        assert_eq!(singular.det().unwrap(), 0);
        let perm = MatZ::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(perm.det().unwrap(), -1);
    }

    #[test]
    fn matz_mul_overflow_is_reported() {
        let big = MatZ::from_rows(&[vec![i128::MAX / 2, 0], vec![0, 1]]).unwrap();
        let three = MatZ::from_rows(&[vec![3, 0], vec![0, 1]]).unwrap();
        assert_eq!(big.mul(&three), Err(Error::Overflow));
    }

    #[test]
    fn rational_inverse_of_integer_gram() {
        // [[5,3],[3,2]] has determinant 1, so the inverse is integral.
        let q = RatMat::from_f64_rows(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap();
        let inv = q.inverse().unwrap();
        let expected =
            RatMat::from_f64_rows(&[vec![2.0, -3.0], vec![-3.0, 5.0]]).unwrap();
        assert_eq!(inv, expected);
        assert_eq!(q.mul(&inv).unwrap(), RatMat::identity(2));
    }

    #[test]
    fn rational_rank_detects_dependence() {
        let full = RatMat::from_f64_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(full.rank(), 2);
        let deficient =
            RatMat::from_f64_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(deficient.rank(), 1);
    }

    #[test]
    fn gauss_solver_round_trips() {
        let a = MatF::from_rows(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap();
        let x = solve_gauss(&a, &[1.0, 0.0]).unwrap();
        // A^-1 e1 = (2, -3)
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn rational_lift_of_f64_is_lossless() {
        let x = 0.1f64;
        let r = rat_from_f64(x).unwrap();
        assert_eq!(rat_to_f64(&r), x);
    }
}
