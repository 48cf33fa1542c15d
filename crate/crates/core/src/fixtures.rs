//! The three-state, two-input, two-output reference plant and its recorded
//! experiment, used for regression checks and the `reproduce-paper` command.

use crate::lti::StateSpaceSystem;
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Upper bounds on lag and state dimension used with the reference plant.
pub const EXAMPLE_L: usize = 4;
pub const EXAMPLE_N: usize = 4;
/// Lag and state dimension of the reference plant.
pub const EXAMPLE_LAG: usize = 2;
pub const EXAMPLE_STATES: usize = 3;
/// Length of the shortest informative experiment for `(L, N) = (4, 4)`.
pub const EXAMPLE_T: usize = 14;

pub fn example_system<T: Scalar>() -> StateSpaceSystem<T> {
    StateSpaceSystem::new(
        Mat::from_i64_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
        Mat::from_i64_rows(&[&[1, 0], &[0, 1], &[0, 1]]),
        Mat::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0]]),
        Mat::from_i64_rows(&[&[1, 0], &[0, 0]]),
    )
    .expect("reference plant is well formed")
}

pub fn example_x0<T: Scalar>() -> Vec<T> {
    [1, 1, 0].iter().map(|&v| T::from_int(v)).collect()
}

/// `u_{[0,13]}` of the online experiment, one sample per column.
pub fn example_inputs<T: Scalar>() -> Mat<T> {
    Mat::from_i64_rows(&[
        &[1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0],
        &[0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1],
    ])
}

/// `y_{[0,13]}` measured on the reference plant for [`example_inputs`].
pub fn example_outputs<T: Scalar>() -> Mat<T> {
    Mat::from_i64_rows(&[
        &[2, 2, 1, 3, 3, 2, 2, 2, 2, 3, 3, 2, 1, 0],
        &[1, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1],
    ])
}

/// The same inputs with `u(12)` changed from `e_2` to `e_1`: persistently
/// exciting of order 4 yet not informative.
pub fn modified_inputs<T: Scalar>() -> Mat<T> {
    Mat::from_i64_rows(&[
        &[1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0],
        &[0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1],
    ])
}

pub fn modified_outputs<T: Scalar>() -> Mat<T> {
    Mat::from_i64_rows(&[
        &[2, 2, 1, 3, 3, 2, 2, 2, 2, 3, 3, 2, 2, 1],
        &[1, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0],
    ])
}
