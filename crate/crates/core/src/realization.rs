//! Recovery of a state-space model from informative data.
//!
//! The kernel of the input rows of `H_{k,t}` isolates the free response, whose
//! column space is the extended observability matrix `Ω_k S` of some basis
//! change `S`. Shift invariance gives `A` and `C`; the initial state, `B` and
//! `D` then enter the data linearly and are solved for exactly. The state
//! sequence obtained this way is finally fed to the one-step equation
//! `[X⁺; Y] = [A B; C D][X; U]`, which fixes the returned quadruple.

use crate::analysis::{h_window, ExperimentLog, InformativityReport};
use crate::error::{Error, Result};
use crate::lti::StateSpaceSystem;
use crate::matrix::{column_basis, left_kernel_basis, rank, solve, Mat};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct IdentifiedModel<T> {
    pub system: StateSpaceSystem<T>,
    /// Initial state reproducing the log from `system`.
    pub x0: Vec<T>,
    /// Largest absolute equation error over the data.
    pub residual: T,
    pub source_report: InformativityReport,
}

impl<T: Scalar> IdentifiedModel<T> {
    /// Whether the residual is within the tolerance of the scalar type.
    pub fn explains_data(&self, data_scale: f64) -> bool {
        residual_ok(&self.residual, data_scale)
    }
}

fn residual_ok<T: Scalar>(residual: &T, data_scale: f64) -> bool {
    residual.approx_eq(&T::zero(), data_scale)
}

fn internal(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}

/// Identifies a minimal model of order `report.n_min` from `log`.
///
/// `report` must come from [`crate::analysis::check_informativity`] on the
/// same log and be informative.
pub fn identify<T: Scalar>(
    log: &ExperimentLog<T>,
    report: &InformativityReport,
) -> Result<IdentifiedModel<T>> {
    if !report.informative {
        return Err(Error::NotInformative(
            report
                .failing_condition()
                .unwrap_or("report marked not informative")
                .to_string(),
        ));
    }
    if report.t != log.len() {
        return Err(Error::InvalidArgument(format!(
            "report covers {} samples but the log has {}",
            report.t,
            log.len()
        )));
    }
    let (m, p, t, n) = (log.m(), log.p(), log.len(), report.n_min);
    let k = report.l_actual;

    let (a, c) = if n == 0 {
        (Mat::zeros(0, 0), Mat::zeros(p, 0))
    } else {
        observability_pair(log, k, n)?
    };
    let (x0, b, _) = solve_input_terms(log, &a, &c)?;
    let states = state_sequence(&a, &b, &x0, &log.inputs());

    // [X⁺; Y] = [A B; C D][X; U] over the whole record.
    let xu = Mat::vstack(&[&states.col_range(0, t), &log.inputs()])?;
    let next_y = Mat::vstack(&[&states.col_range(1, t + 1), &log.outputs()])?;
    let theta = solve(&xu.transpose(), &next_y.transpose())?
        .ok_or_else(|| internal("one-step equation has no solution"))?
        .transpose();
    let system = StateSpaceSystem::new(
        theta.row_range(0, n).col_range(0, n),
        theta.row_range(0, n).col_range(n, n + m),
        theta.row_range(n, n + p).col_range(0, n),
        theta.row_range(n, n + p).col_range(n, n + m),
    )?;

    let sim = system.simulate(&x0, &log.inputs())?;
    let residual = (&sim.y - &log.outputs())
        .data()
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc });
    let scale = log.outputs().max_abs().max(log.inputs().max_abs());
    if !residual_ok(&residual, scale) {
        return Err(internal(format!(
            "identified model leaves residual {residual} on the data"
        )));
    }
    if !system.is_minimal() {
        return Err(internal("identified model is not minimal"));
    }
    Ok(IdentifiedModel {
        system,
        x0,
        residual,
        source_report: report.clone(),
    })
}

/// `(A, C)` from the column space of the free response in `H_{k,t}`.
fn observability_pair<T: Scalar>(
    log: &ExperimentLog<T>,
    k: usize,
    n: usize,
) -> Result<(Mat<T>, Mat<T>)> {
    let (m, p) = (log.m(), log.p());
    if k == 0 {
        return Err(internal("nonzero state dimension at depth 0"));
    }
    let h = h_window(log, k);
    let hy = h.row_range(0, (k + 1) * p);
    let hu = h.row_range((k + 1) * p, (k + 1) * (p + m));
    let kernel = left_kernel_basis(&hu.transpose());
    if kernel.is_empty() {
        return Err(internal("input Hankel rows leave no free response"));
    }
    let k_mat = Mat::from_columns(hu.cols(), &kernel)?;
    let obs = column_basis(&hy.matmul(&k_mat)?);
    if obs.cols() != n {
        return Err(internal(format!(
            "free response spans {} dimensions but the report gives n_min = {n}",
            obs.cols()
        )));
    }
    let upper = obs.row_range(0, k * p);
    let lower = obs.row_range(p, (k + 1) * p);
    if rank(&upper) != n {
        return Err(internal("observability block too shallow for the state dimension"));
    }
    let a = solve(&upper, &lower)?.ok_or_else(|| internal("observability matrix is not shift invariant"))?;
    Ok((a, obs.row_range(0, p)))
}

/// Exact solve for the terms entering linearly once `(A, C)` is fixed.
fn solve_input_terms<T: Scalar>(
    log: &ExperimentLog<T>,
    a: &Mat<T>,
    c: &Mat<T>,
) -> Result<(Vec<T>, Mat<T>, Mat<T>)> {
    let (m, p, t, n) = (log.m(), log.p(), log.len(), a.rows());
    // C A^j for j < t.
    let mut ca = Vec::with_capacity(t);
    let mut cur = c.clone();
    for _ in 0..t {
        let next = cur.matmul(a)?;
        ca.push(cur);
        cur = next;
    }
    let width = n + n * m + p * m;
    let mut regressor = Mat::zeros(t * p, width);
    let mut rhs = Mat::zeros(t * p, 1);
    for j in 0..t {
        for q in 0..p {
            let row = j * p + q;
            for s in 0..n {
                regressor.set(row, s, ca[j].get(q, s).clone());
            }
            for i in 0..j {
                let g = &ca[j - 1 - i];
                let u = log.input(i);
                for s in 0..n {
                    for b in 0..m {
                        let col = n + s * m + b;
                        let v = regressor.get(row, col).clone() + g.get(q, s).clone() * u[b].clone();
                        regressor.set(row, col, v);
                    }
                }
            }
            for b in 0..m {
                regressor.set(row, n + n * m + q * m + b, log.input(j)[b].clone());
            }
            rhs.set(row, 0, log.output(j)[q].clone());
        }
    }
    let theta = solve(&regressor, &rhs)?
        .ok_or_else(|| internal("no initial state and input matrices reproduce the outputs"))?
        .column(0);
    let x0 = theta[..n].to_vec();
    let b = Mat::from_vec(n, m, theta[n..n + n * m].to_vec())?;
    let d = Mat::from_vec(p, m, theta[n + n * m..].to_vec())?;
    Ok((x0, b, d))
}

/// States `x(0), …, x(t)` as columns.
fn state_sequence<T: Scalar>(a: &Mat<T>, b: &Mat<T>, x0: &[T], u: &Mat<T>) -> Mat<T> {
    let n = a.rows();
    let mut cols = Vec::with_capacity(u.cols() + 1);
    let mut x = x0.to_vec();
    for j in 0..u.cols() {
        let ax = a.mul_vec(&x).expect("square A");
        let bu = b.mul_vec(&u.column(j)).expect("B matches inputs");
        let next = ax.into_iter().zip(bu).map(|(p, q)| p + q).collect();
        cols.push(std::mem::replace(&mut x, next));
    }
    cols.push(x);
    Mat::from_columns(n, &cols).expect("state columns have length n")
}
