//! SVD-backed rank decisions for floating-point scalars.
//!
//! A singular value counts as zero when it does not exceed
//! `max(rows, cols) · ε · σ_max`.

use nalgebra::{DMatrix, RealField};

use crate::matrix::Mat;
use crate::scalar::Scalar;

fn to_dmatrix<F: Scalar + RealField + Copy>(m: &Mat<F>) -> DMatrix<F> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn tolerance<F: Scalar + RealField + Copy + num_traits::Float>(
    rows: usize,
    cols: usize,
    sigma_max: F,
) -> F {
    let scale = F::from_usize(rows.max(cols)).expect("dimension fits the float type");
    scale * <F as num_traits::Float>::epsilon() * sigma_max
}

fn sigma_max<F: RealField + Copy>(s: &nalgebra::DVector<F>) -> F {
    s.iter().copied().fold(F::zero(), |a, b| if b > a { b } else { a })
}

pub(crate) fn rank<F: Scalar + RealField + Copy + num_traits::Float>(m: &Mat<F>) -> usize {
    let s = to_dmatrix(m).singular_values();
    let tol = tolerance(m.rows(), m.cols(), sigma_max(&s));
    s.iter().filter(|&&v| v > tol).count()
}

pub(crate) fn left_kernel<F: Scalar + RealField + Copy + num_traits::Float>(
    m: &Mat<F>,
) -> Vec<Vec<F>> {
    let (rows, cols) = m.shape();
    // Pad with zero columns so the thin SVD returns a square U.
    let mut d = DMatrix::<F>::zeros(rows, cols.max(rows));
    d.view_mut((0, 0), (rows, cols)).copy_from(&to_dmatrix(m));
    let svd = d.svd(true, false);
    let u = svd.u.expect("U requested");
    let tol = tolerance(rows, cols, sigma_max(&svd.singular_values));
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(j, _)| u.column(j).iter().copied().collect())
        .collect()
}

pub(crate) fn solve<F: Scalar + RealField + Copy + num_traits::Float>(
    a: &Mat<F>,
    b: &Mat<F>,
) -> Option<Mat<F>> {
    let svd = to_dmatrix(a).svd(true, true);
    let tol = tolerance(a.rows(), a.cols(), sigma_max(&svd.singular_values));
    let x = svd.solve(&to_dmatrix(b), tol).ok()?;
    Some(Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rank_and_kernel() {
        let m = Mat::<f64>::from_i64_rows(&[&[1, 2], &[2, 4], &[0, 1]]);
        assert_eq!(rank(&m), 2);
        let lk = left_kernel(&m);
        assert_eq!(lk.len(), 1);
        let x = Mat::from_rows(3, &lk).unwrap();
        assert!((&x * &m).max_abs() < 1e-12);
    }

    #[test]
    fn f32_backend_works() {
        let m = Mat::<f32>::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn least_squares_solution() {
        let a = Mat::<f64>::from_i64_rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = Mat::<f64>::from_i64_rows(&[&[1], &[2], &[3]]);
        let x = solve(&a, &b).unwrap();
        assert!((x.get(0, 0) - 1.0).abs() < 1e-12);
        assert!((x.get(1, 0) - 2.0).abs() < 1e-12);
    }
}
