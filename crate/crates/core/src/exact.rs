//! Fraction-free elimination over the rationals.
//!
//! Rows are first scaled to integers (row scaling preserves rank, kernels and
//! solutions), then eliminated over `BigInt`. Pivots are chosen by largest
//! magnitude in the current column.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::matrix::Mat;

fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    row.iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect()
}

fn integer_rows(m: &Mat<BigRational>) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| integer_row(m.row(i))).collect()
}

fn pivot_row(a: &[Vec<BigInt>], from: usize, col: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in from..a.len() {
        if a[i][col].is_zero() {
            continue;
        }
        match best {
            Some(b) if a[b][col].magnitude() >= a[i][col].magnitude() => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Rank by Bareiss elimination with column skipping.
pub(crate) fn rank(m: &Mat<BigRational>) -> usize {
    let mut a = integer_rows(m);
    let (rows, cols) = m.shape();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(&a, r, c) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = &pivot_row[c];
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let num = pivot * &row[j] - &factor * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                row[j] = num / &prev;
            }
        }
        prev = head[r][c].clone();
        r += 1;
    }
    r
}

fn reduce_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// Gauss–Jordan over the integers with row-content reduction. Pivots are
/// searched only in the first `pivot_cols` columns. Returns the pivot
/// columns; row `i` of `a` then carries the pivot of `pivots[i]` and every
/// other pivot column is zero in that row.
fn integer_rref(a: &mut [Vec<BigInt>], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == a.len() {
            break;
        }
        let Some(p) = pivot_row(a, r, c) else {
            continue;
        };
        a.swap(r, p);
        reduce_content(&mut a[r]);
        let pivot_row = a[r].clone();
        let pivot = &pivot_row[c];
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let g = pivot.gcd(&row[c]);
            let pm = pivot / &g;
            let rm = &row[c] / &g;
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = &pm * &*v - &rm * pv;
            }
            reduce_content(row);
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Left kernel of `m` as the null space of `mᵀ`, one vector per free column,
/// normalised to 1 in that column.
pub(crate) fn left_kernel(m: &Mat<BigRational>) -> Vec<Vec<BigRational>> {
    let mt = m.transpose();
    let mut a = integer_rows(&mt);
    let n = mt.cols();
    let pivots = integer_rref(&mut a, n);
    let free = (0..n).filter(|c| !pivots.contains(c));
    free.map(|f| {
        let mut x = vec![BigRational::zero(); n];
        x[f] = BigRational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = -BigRational::new(a[i][f].clone(), a[i][pc].clone());
        }
        x
    })
    .collect()
}

/// Solves `A X = B` exactly; `None` when inconsistent. Free variables are 0.
pub(crate) fn solve(a: &Mat<BigRational>, b: &Mat<BigRational>) -> Option<Mat<BigRational>> {
    let aug = Mat::hstack(&[a, b]).ok()?;
    let mut rows = integer_rows(&aug);
    let n = a.cols();
    let pivots = integer_rref(&mut rows, n);
    if rows[pivots.len()..]
        .iter()
        .any(|r| r[n..].iter().any(|v| !v.is_zero()))
    {
        return None;
    }
    let mut x = Mat::zeros(n, b.cols());
    for (i, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x.set(
                pc,
                j,
                BigRational::new(rows[i][n + j].clone(), rows[i][pc].clone()),
            );
        }
    }
    Some(x)
}
