//! Data-side quantities: the input-output Hankel matrices `H_{k,t}` and
//! `G_{k,t}`, the rank-difference profile `δ_{k,t}`, the shortest lag and
//! minimum state count, the data-refined lag bound and the informativity
//! verdict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{hankel_window, rank, Mat};
use crate::scalar::{is_zero_vec, Scalar};

/// Recorded input-output samples `u_{[0,t-1]}`, `y_{[0,t-1]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentLog<T> {
    m: usize,
    p: usize,
    u: Vec<Vec<T>>,
    y: Vec<Vec<T>>,
}

impl<T: Scalar> ExperimentLog<T> {
    pub fn new(m: usize, p: usize) -> Result<Self> {
        if m == 0 || p == 0 {
            return Err(Error::DimensionMismatch(
                "logs need at least one input and one output channel".into(),
            ));
        }
        Ok(ExperimentLog {
            m,
            p,
            u: Vec::new(),
            y: Vec::new(),
        })
    }

    /// Builds a log from column-wise sample matrices of equal length.
    pub fn from_sequences(u: &Mat<T>, y: &Mat<T>) -> Result<Self> {
        if u.cols() != y.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} input samples but {} output samples",
                u.cols(),
                y.cols()
            )));
        }
        let mut log = Self::new(u.rows(), y.rows())?;
        for t in 0..u.cols() {
            log.push(u.column(t), y.column(t))?;
        }
        Ok(log)
    }

    pub fn push(&mut self, u: Vec<T>, y: Vec<T>) -> Result<()> {
        if u.len() != self.m || y.len() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "sample with {} inputs and {} outputs for m = {}, p = {}",
                u.len(),
                y.len(),
                self.m,
                self.p
            )));
        }
        self.u.push(u);
        self.y.push(y);
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of samples `t`.
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn input(&self, t: usize) -> &[T] {
        &self.u[t]
    }

    pub fn output(&self, t: usize) -> &[T] {
        &self.y[t]
    }

    /// `u_{[0,t-1]}` as an `m × t` matrix.
    pub fn inputs(&self) -> Mat<T> {
        Mat::from_columns(self.m, &self.u).expect("validated on push")
    }

    /// `y_{[0,t-1]}` as a `p × t` matrix.
    pub fn outputs(&self) -> Mat<T> {
        Mat::from_columns(self.p, &self.y).expect("validated on push")
    }

    /// The first `t` samples.
    pub fn prefix(&self, t: usize) -> Self {
        let t = t.min(self.len());
        ExperimentLog {
            m: self.m,
            p: self.p,
            u: self.u[..t].to_vec(),
            y: self.y[..t].to_vec(),
        }
    }

    pub fn input_is_zero(&self) -> bool {
        self.u.iter().all(|v| is_zero_vec(v))
    }

    pub fn convert<U: Scalar>(&self) -> ExperimentLog<U> {
        let conv = |s: &Vec<Vec<T>>| -> Vec<Vec<U>> {
            s.iter()
                .map(|v| v.iter().map(crate::matrix::convert_scalar).collect())
                .collect()
        };
        ExperimentLog {
            m: self.m,
            p: self.p,
            u: conv(&self.u),
            y: conv(&self.y),
        }
    }

    fn require_nonzero_input(&self) -> Result<()> {
        if self.input_is_zero() {
            Err(Error::ZeroInput)
        } else {
            Ok(())
        }
    }

    fn check_depth(&self, k: usize) -> Result<()> {
        if self.is_empty() || k > self.len() - 1 {
            return Err(Error::DepthOutOfRange {
                k: k as i64,
                len: self.len(),
            });
        }
        Ok(())
    }
}

/// Outcome of the informativity test, with every intermediate quantity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformativityReport {
    pub t: usize,
    pub ell_min: usize,
    pub n_min: usize,
    #[serde(rename = "L_actual")]
    pub l_actual: usize,
    #[serde(rename = "rank_H")]
    pub rank_h: usize,
    pub length_ok: bool,
    pub rank_ok: bool,
    pub informative: bool,
    /// `δ_{k,t}` for `k = -1, 0, …, ℓ_min`.
    pub delta_profile: Vec<usize>,
}

impl InformativityReport {
    /// Rank `H_{L^a,t}` must reach for the data to be informative.
    pub fn required_rank(&self, m: usize) -> usize {
        (self.l_actual + 1) * m + self.n_min
    }

    /// Human-readable name of the first failing condition, if any.
    pub fn failing_condition(&self) -> Option<&'static str> {
        if !self.length_ok {
            Some("length condition failed")
        } else if !self.rank_ok {
            Some("rank condition failed")
        } else {
            None
        }
    }
}

/// `H_{k,t}` without the range check: void (zero columns) when `t ≤ k`.
pub(crate) fn h_window<T: Scalar>(log: &ExperimentLog<T>, k: usize) -> Mat<T> {
    let y = hankel_window(&log.outputs(), k);
    let u = hankel_window(&log.inputs(), k);
    Mat::vstack(&[&y, &u]).expect("equal column counts")
}

/// `G_{k,t}` without the range check.
pub(crate) fn g_window<T: Scalar>(log: &ExperimentLog<T>, k: usize) -> Mat<T> {
    let u = hankel_window(&log.inputs(), k);
    if k == 0 {
        return Mat::vstack(&[&Mat::zeros(0, u.cols()), &u]).expect("equal column counts");
    }
    let head = log.prefix(log.len().saturating_sub(1));
    let y = hankel_window(&head.outputs(), k - 1);
    Mat::vstack(&[&y, &u]).expect("equal column counts")
}

pub(crate) fn rank_h<T: Scalar>(log: &ExperimentLog<T>, k: usize) -> usize {
    rank(&h_window(log, k))
}

pub(crate) fn rank_g<T: Scalar>(log: &ExperimentLog<T>, k: usize) -> usize {
    rank(&g_window(log, k))
}

/// `H_{k,t} = [H_k(y_{[0,t-1]}); H_k(u_{[0,t-1]})]`, for `0 ≤ k ≤ t-1`.
pub fn hankel_io<T: Scalar>(log: &ExperimentLog<T>, k: usize) -> Result<Mat<T>> {
    log.check_depth(k)?;
    Ok(h_window(log, k))
}

/// `G_{k,t} = [H_{k-1}(y_{[0,t-2]}); H_k(u_{[0,t-1]})]`: `H_{k,t}` with its
/// last block row of outputs removed. The output block is void for `k = 0`.
pub fn hankel_g<T: Scalar>(log: &ExperimentLog<T>, k: usize) -> Result<Mat<T>> {
    log.check_depth(k)?;
    Ok(g_window(log, k))
}

/// `δ_{k,t} = rank H_{k,t} - rank G_{k,t}` for `k ∈ [0, t-1]`, and `p` for `k = -1`.
pub fn delta<T: Scalar>(log: &ExperimentLog<T>, k: i64) -> Result<usize> {
    if k == -1 {
        return Ok(log.p());
    }
    if k < -1 {
        return Err(Error::DepthOutOfRange { k, len: log.len() });
    }
    let k = k as usize;
    log.check_depth(k)?;
    let (rh, rg) = (rank_h(log, k), rank_g(log, k));
    rh.checked_sub(rg).ok_or_else(|| {
        Error::Invariant(format!("rank G_{{{k}}} = {rg} exceeds rank H_{{{k}}} = {rh}"))
    })
}

/// `δ_{-1,t}, δ_{0,t}, …, δ_{q_t,t}` where `q_t` is the first zero.
fn delta_profile<T: Scalar>(log: &ExperimentLog<T>) -> Result<Vec<usize>> {
    log.require_nonzero_input()?;
    let mut profile = vec![log.p()];
    for k in 0..log.len() {
        let d = delta(log, k as i64)?;
        profile.push(d);
        if d == 0 {
            return Ok(profile);
        }
    }
    Err(Error::Invariant(
        "δ_{t-1,t} must vanish for a nonzero input".into(),
    ))
}

fn lag_and_states(profile: &[usize]) -> (usize, usize) {
    let ell_min = profile.len() - 2;
    let n_min = profile[1..].iter().sum();
    (ell_min, n_min)
}

/// `(ℓ_min,t, n_min,t)`: the first `k` with `δ_{k,t} = 0`, and the sum of
/// `δ_{i,t}` over `i ∈ [0, ℓ_min,t]`.
pub fn shortest_lag_min_states<T: Scalar>(log: &ExperimentLog<T>) -> Result<(usize, usize)> {
    Ok(lag_and_states(&delta_profile(log)?))
}

fn lag_bound_from(ell_min: usize, n_min: usize, lag_bound: usize, state_bound: usize) -> Result<usize> {
    if state_bound < n_min {
        return Err(Error::PriorBoundsViolated(format!(
            "data need at least {n_min} states but N = {state_bound}"
        )));
    }
    Ok(lag_bound.min(state_bound - n_min + ell_min))
}

/// `L^a_t = min(L, N - n_min,t + ℓ_min,t)`.
pub fn actual_lag_bound<T: Scalar>(
    log: &ExperimentLog<T>,
    lag_bound: usize,
    state_bound: usize,
) -> Result<usize> {
    let (ell_min, n_min) = shortest_lag_min_states(log)?;
    lag_bound_from(ell_min, n_min, lag_bound, state_bound)
}

/// Necessary and sufficient test for informativity under the prior bounds
/// `ℓ_true ≤ L`, `n_true ≤ N`:
/// `t ≥ L^a + (L^a+1)m + n_min` and `rank H_{L^a,t} = (L^a+1)m + n_min`.
pub fn check_informativity<T: Scalar>(
    log: &ExperimentLog<T>,
    lag_bound: usize,
    state_bound: usize,
) -> Result<InformativityReport> {
    let profile = delta_profile(log)?;
    let (ell_min, n_min) = lag_and_states(&profile);
    let l_actual = lag_bound_from(ell_min, n_min, lag_bound, state_bound)?;
    let m = log.m();
    let t = log.len();
    let required = (l_actual + 1) * m + n_min;
    let length_ok = t >= l_actual + required;
    let rank_h = rank_h(log, l_actual);
    let rank_ok = rank_h == required;
    Ok(InformativityReport {
        t,
        ell_min,
        n_min,
        l_actual,
        rank_h,
        length_ok,
        rank_ok,
        informative: length_ok && rank_ok,
        delta_profile: profile,
    })
}

/// `L^a = min(L, N - n_true + ℓ_true)` under the prior bounds.
pub fn lag_bound_for(
    ell_true: usize,
    n_true: usize,
    lag_bound: usize,
    state_bound: usize,
) -> Result<usize> {
    if ell_true > lag_bound || n_true > state_bound {
        return Err(Error::PriorBoundsViolated(format!(
            "need ℓ_true = {ell_true} ≤ L = {lag_bound} and n_true = {n_true} ≤ N = {state_bound}"
        )));
    }
    Ok(lag_bound.min(state_bound - n_true + ell_true))
}

/// `T = L^a + (L^a+1)m + n_true`, the length of the shortest informative experiment.
pub fn minimal_experiment_length(
    ell_true: usize,
    n_true: usize,
    m: usize,
    lag_bound: usize,
    state_bound: usize,
) -> Result<usize> {
    let la = lag_bound_for(ell_true, n_true, lag_bound, state_bound)?;
    Ok(la + (la + 1) * m + n_true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::Rational;

    fn example_log(t: usize) -> ExperimentLog<Rational> {
        ExperimentLog::from_sequences(&example_inputs(), &example_outputs())
            .unwrap()
            .prefix(t)
    }

    fn modified_log() -> ExperimentLog<Rational> {
        ExperimentLog::from_sequences(&modified_inputs(), &modified_outputs()).unwrap()
    }

    #[test]
    fn h_shapes_and_ranks() {
        let log = example_log(8);
        let h = hankel_io(&log, 1).unwrap();
        assert_eq!(h.shape(), (8, 7));
        assert_eq!(rank(&h), 7);
        let h0 = hankel_io(&log, 0).unwrap();
        let stacked = Mat::vstack(&[&log.outputs(), &log.inputs()]).unwrap();
        assert_eq!(h0, stacked);
        assert!(hankel_io(&log, 8).is_err());
        assert_eq!(rank(&hankel_io(&modified_log(), 3).unwrap()), 10);
    }

    #[test]
    fn g_matrices() {
        let log = example_log(14);
        let g0 = hankel_g(&log, 0).unwrap();
        assert_eq!(g0.rows(), 2);
        assert_eq!(rank(&g0), rank(&log.inputs()));
        let g3 = hankel_g(&log, 3).unwrap();
        assert_eq!(g3.shape(), (3 * 2 + 4 * 2, 11));
        assert_eq!(rank(&g3), 11);
        assert_eq!(rank(&g3), 2 + rank(&hankel_io(&log, 2).unwrap()));

        let mut single = ExperimentLog::<Rational>::new(1, 1).unwrap();
        single.push(vec![Rational::from_int(3)], vec![Rational::from_int(1)]).unwrap();
        assert_eq!(rank(&hankel_g(&single, 0).unwrap()), 1);
    }

    #[test]
    fn delta_values() {
        let log = example_log(8);
        assert_eq!(delta(&log, -1).unwrap(), 2);
        assert_eq!(delta(&log, 0).unwrap(), 2);
        assert_eq!(delta(&log, 1).unwrap(), 1);
        assert_eq!(delta(&log, 2).unwrap(), 0);
        assert_eq!(delta(&log, 7).unwrap(), 0);
        assert!(delta(&log, 8).is_err());
        assert!(delta(&log, -2).is_err());
    }

    #[test]
    fn shortest_lag_and_states_along_the_run() {
        assert_eq!(shortest_lag_min_states(&example_log(2)).unwrap(), (0, 0));
        assert_eq!(shortest_lag_min_states(&example_log(8)).unwrap(), (2, 3));
        assert_eq!(shortest_lag_min_states(&example_log(11)).unwrap(), (2, 3));
        assert_eq!(shortest_lag_min_states(&example_log(14)).unwrap(), (2, 3));
    }

    #[test]
    fn zero_input_is_rejected() {
        let log = ExperimentLog::from_sequences(
            &Mat::<Rational>::zeros(1, 4),
            &Mat::from_i64_rows(&[&[1, 2, 3, 4]]),
        )
        .unwrap();
        assert_eq!(shortest_lag_min_states(&log), Err(Error::ZeroInput));
        assert_eq!(check_informativity(&log, 1, 1), Err(Error::ZeroInput));
    }

    #[test]
    fn actual_lag_bounds() {
        assert_eq!(actual_lag_bound(&example_log(2), 4, 4).unwrap(), 4);
        assert_eq!(actual_lag_bound(&example_log(8), 4, 4).unwrap(), 3);
        assert_eq!(actual_lag_bound(&example_log(8), 3, 6).unwrap(), 3);
        assert_eq!(actual_lag_bound(&example_log(2), 3, 6).unwrap(), 3);
        assert!(matches!(
            actual_lag_bound(&example_log(8), 4, 2),
            Err(Error::PriorBoundsViolated(_))
        ));
    }

    #[test]
    fn informativity_verdicts() {
        let r = check_informativity(&example_log(14), 4, 4).unwrap();
        assert!(r.informative);
        assert_eq!((r.rank_h, r.l_actual, r.ell_min, r.n_min), (11, 3, 2, 3));
        assert_eq!(r.delta_profile, vec![2, 2, 1, 0]);

        let r = check_informativity(&modified_log(), 4, 4).unwrap();
        assert!(!r.informative);
        assert!(r.length_ok && !r.rank_ok);
        assert_eq!(r.rank_h, 10);
        assert_eq!(r.failing_condition(), Some("rank condition failed"));

        let r = check_informativity(&example_log(8), 4, 4).unwrap();
        assert!(!r.informative && !r.length_ok);
        assert_eq!(r.l_actual + r.required_rank(2), 14);
    }

    #[test]
    fn experiment_length_formula() {
        assert_eq!(minimal_experiment_length(2, 3, 2, 4, 4).unwrap(), 14);
        assert_eq!(minimal_experiment_length(20, 100, 80, 100, 150).unwrap(), 5850);
        assert_eq!(minimal_experiment_length(0, 0, 1, 0, 0).unwrap(), 1);
        assert!(minimal_experiment_length(3, 3, 2, 2, 4).is_err());
        assert!(minimal_experiment_length(2, 5, 2, 4, 4).is_err());
    }

    #[test]
    fn report_json_field_names() {
        let r = check_informativity(&example_log(14), 4, 4).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "ell_min",
            "n_min",
            "L_actual",
            "rank_H",
            "length_ok",
            "rank_ok",
            "informative",
            "delta_profile",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: InformativityReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
