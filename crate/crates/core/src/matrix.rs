//! Dense matrices with first-class support for void (0-row or 0-column)
//! shapes, plus the rank, left-kernel and Hankel primitives the analysis is
//! built on.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix. `rows == 0` or `cols == 0` is a legal void matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds the matrix `[v_0 v_1 ...]` whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self> {
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let owned: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| T::from_int(v)).collect())
            .collect();
        Self::from_rows(cols, &owned).expect("ragged integer literal")
    }

    pub fn column_vector(v: &[T]) -> Self {
        Mat {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_void(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Rows `start..end` as a new matrix (void when the range is empty).
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows, "row range out of bounds");
        Mat {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn col_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols, "column range out of bounds");
        Self::from_fn(self.rows, end - start, |i, j| self.get(i, start + j).clone())
    }

    /// Stacks blocks vertically. All blocks must share a column count.
    pub fn vstack(blocks: &[&Mat<T>]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch(format!(
                    "vstack of {} and {} columns",
                    cols, b.cols
                )));
            }
            rows += b.rows;
            data.extend_from_slice(&b.data);
        }
        Ok(Mat { rows, cols, data })
    }

    /// Concatenates blocks horizontally. All blocks must share a row count.
    pub fn hstack(blocks: &[&Mat<T>]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if let Some(b) = blocks.iter().find(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                rows, b.rows
            )));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(Mat { rows, cols, data })
    }

    /// Matrix product honouring void conventions: an empty inner dimension
    /// yields the zero matrix of the outer shape.
    pub fn matmul(&self, rhs: &Mat<T>) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs.get(k, j).clone();
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].clone() + prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times {}-vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut out = Self::identity(self.rows);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_abs(&self.data)
    }

    /// Entry-wise comparison using the backend tolerance.
    pub fn approx_eq(&self, other: &Mat<T>, scale: f64) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_eq(b, scale))
    }

    /// Converts entries to another scalar backend through exact rationals
    /// when the source is exact, through `f64` otherwise.
    pub fn convert<U: Scalar>(&self) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(convert_scalar).collect(),
        }
    }
}

pub(crate) fn convert_scalar<T: Scalar, U: Scalar>(v: &T) -> U {
    match crate::scalar::parse_rational(&v.to_text()) {
        Some(r) if T::EXACT => U::from_rational(&r),
        _ => U::from_f64(v.to_f64_lossy()).expect("finite value"),
    }
}

impl<T: Scalar> Mul for &Mat<T> {
    type Output = Mat<T>;

    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        self.matmul(rhs).expect("incompatible matrix product")
    }
}

impl<T: Scalar> Add for &Mat<T> {
    type Output = Mat<T>;

    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.shape(), rhs.shape(), "incompatible matrix sum");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Mat<T> {
    type Output = Mat<T>;

    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.shape(), rhs.shape(), "incompatible matrix difference");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &Mat<T> {
    type Output = Mat<T>;

    fn neg(self) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }
}

/// Rank of `m`; zero for void matrices.
pub fn rank<T: Scalar>(m: &Mat<T>) -> usize {
    if m.is_void() {
        0
    } else {
        T::rank_of(m)
    }
}

/// Basis of the left kernel `{x : xᵀ M = 0}`, one vector per entry.
///
/// In exact mode the basis is the reduced-echelon null-space basis of `Mᵀ`
/// (each vector has a 1 in its free coordinate), so the result is
/// deterministic.
pub fn left_kernel_basis<T: Scalar>(m: &Mat<T>) -> Vec<Vec<T>> {
    if m.rows() == 0 {
        return Vec::new();
    }
    if m.cols() == 0 {
        return (0..m.rows())
            .map(|i| (0..m.rows()).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
    }
    T::left_kernel_of(m)
}

/// Basis of the column space of `m`, as the columns of the returned matrix.
pub fn column_basis<T: Scalar>(m: &Mat<T>) -> Mat<T> {
    // im M is the orthogonal complement of lk M.
    let lk = left_kernel_basis(m);
    let w = Mat::from_rows(m.rows(), &lk).expect("kernel vectors have row count length");
    let basis = left_kernel_basis(&w.transpose());
    Mat::from_columns(m.rows(), &basis).expect("basis vectors have row count length")
}

/// Solves `A X = B`; see [`Scalar::solve_of`] for the float semantics.
pub fn solve<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Option<Mat<T>>> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve with {} equations and a {}-row right-hand side",
            a.rows(),
            b.rows()
        )));
    }
    if a.cols() == 0 || b.cols() == 0 || a.rows() == 0 {
        let x = Mat::zeros(a.cols(), b.cols());
        return Ok(if b.is_zero() { Some(x) } else { None });
    }
    Ok(T::solve_of(a, b))
}

/// Block-Hankel matrix `H_k(f)` of a sequence stored column-wise in `seq`.
///
/// The result has `k + 1` block rows and `len - k` columns, with block
/// `(r, c)` equal to sample `r + c`. Requires `k ≤ len - 1`.
pub fn hankel<T: Scalar>(seq: &Mat<T>, k: usize) -> Result<Mat<T>> {
    let len = seq.cols();
    if len == 0 || k > len - 1 {
        return Err(Error::DepthOutOfRange { k: k as i64, len });
    }
    Ok(hankel_window(seq, k))
}

/// Same as [`hankel`] but yields a void matrix with zero columns when the
/// sequence is too short for the requested depth.
pub(crate) fn hankel_window<T: Scalar>(seq: &Mat<T>, k: usize) -> Mat<T> {
    let dim = seq.rows();
    let cols = seq.cols().saturating_sub(k);
    Mat::from_fn((k + 1) * dim, cols, |i, j| {
        let (block, comp) = (i / dim, i % dim);
        seq.get(comp, block + j).clone()
    })
}

/// `true` iff `H_{order-1}(seq)` has full row rank.
pub fn is_persistently_exciting<T: Scalar>(seq: &Mat<T>, order: usize) -> Result<bool> {
    if order == 0 {
        return Err(Error::InvalidArgument("excitation order must be at least 1".into()));
    }
    if seq.cols() < order {
        return Err(Error::SequenceTooShort {
            len: seq.cols(),
            order,
        });
    }
    let h = hankel(seq, order - 1)?;
    Ok(rank(&h) == h.rows())
}
