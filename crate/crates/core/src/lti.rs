//! Discrete-time LTI input-state-output systems
//! `x(t+1) = A x(t) + B u(t)`, `y(t) = C x(t) + D u(t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{rank, solve, Mat};
use crate::scalar::Scalar;

/// The quadruple `(A, B, C, D)` with `n ≥ 0` states, `m ≥ 1` inputs and
/// `p ≥ 1` outputs. With `n = 0`, `A`, `B` and `C` are void.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceSystem<T> {
    a: Mat<T>,
    b: Mat<T>,
    c: Mat<T>,
    d: Mat<T>,
}

/// A simulated run: initial state, inputs and the outputs they produce.
/// Samples are stored column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub x0: Vec<T>,
    pub u: Mat<T>,
    pub y: Mat<T>,
    /// States `x(0), …, x(len)`, one per column.
    pub x: Mat<T>,
}

impl<T: Scalar> StateSpaceSystem<T> {
    pub fn new(a: Mat<T>, b: Mat<T>, c: Mat<T>, d: Mat<T>) -> Result<Self> {
        let n = a.rows();
        let (p, m) = d.shape();
        let ok = a.cols() == n && b.shape() == (n, m) && c.shape() == (p, n);
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        if m == 0 || p == 0 {
            return Err(Error::DimensionMismatch(
                "systems need at least one input and one output".into(),
            ));
        }
        Ok(StateSpaceSystem { a, b, c, d })
    }

    /// Memoryless system `y = D u`.
    pub fn static_gain(d: Mat<T>) -> Result<Self> {
        let (p, m) = d.shape();
        Self::new(Mat::zeros(0, 0), Mat::zeros(0, m), Mat::zeros(p, 0), d)
    }

    pub fn a(&self) -> &Mat<T> {
        &self.a
    }

    pub fn b(&self) -> &Mat<T> {
        &self.b
    }

    pub fn c(&self) -> &Mat<T> {
        &self.c
    }

    pub fn d(&self) -> &Mat<T> {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.d.cols()
    }

    pub fn p(&self) -> usize {
        self.d.rows()
    }

    /// `Ω_k`: `C, CA, …, CA^k` stacked; `0_{0,n}` for `k = -1`.
    pub fn observability_matrix(&self, k: i64) -> Result<Mat<T>> {
        check_index(k)?;
        let mut blocks = Vec::new();
        let mut cak = self.c.clone();
        for _ in 0..=k {
            blocks.push(cak.clone());
            cak = &cak * &self.a;
        }
        if blocks.is_empty() {
            return Ok(Mat::zeros(0, self.n()));
        }
        Mat::vstack(&blocks.iter().collect::<Vec<_>>())
    }

    /// `Γ_k = [A^k B, …, AB, B]`; `0_{n,0}` for `k = -1`.
    pub fn controllability_matrix(&self, k: i64) -> Result<Mat<T>> {
        check_index(k)?;
        let mut blocks = Vec::new();
        let mut akb = self.b.clone();
        for _ in 0..=k {
            blocks.push(akb.clone());
            akb = &self.a * &akb;
        }
        if blocks.is_empty() {
            return Ok(Mat::zeros(self.n(), 0));
        }
        blocks.reverse();
        Mat::hstack(&blocks.iter().collect::<Vec<_>>())
    }

    /// Block lower-triangular Toeplitz matrix of Markov parameters `Θ_k`,
    /// of shape `(k+1)p × (k+1)m`; `0_{0,0}` for `k = -1`.
    pub fn toeplitz_markov(&self, k: i64) -> Result<Mat<T>> {
        check_index(k)?;
        let blocks = (k + 1) as usize;
        let (p, m) = (self.p(), self.m());
        let markov = self.markov_parameters(blocks.max(1));
        let mut out = Mat::zeros(blocks * p, blocks * m);
        for bi in 0..blocks {
            for bj in 0..=bi {
                let blk = &markov[bi - bj];
                for i in 0..p {
                    for j in 0..m {
                        out.set(bi * p + i, bj * m + j, blk.get(i, j).clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// The lag `ℓ(C, A)`: smallest `k ≥ 0` with `rank Ω_k = rank Ω_{k-1}`.
    pub fn lag(&self) -> usize {
        let mut prev_rank = 0;
        let mut rows: Vec<Mat<T>> = Vec::new();
        let mut cak = self.c.clone();
        for k in 0..=self.n() {
            rows.push(cak.clone());
            let omega = Mat::vstack(&rows.iter().collect::<Vec<_>>()).expect("same width");
            let r = rank(&omega);
            if r == prev_rank {
                return k;
            }
            prev_rank = r;
            cak = &cak * &self.a;
        }
        // rank Ω_k is bounded by n, so it stabilises by k = n.
        unreachable!("observability rank must stabilise within n steps")
    }

    pub fn is_controllable(&self) -> bool {
        let n = self.n() as i64;
        rank(&self.controllability_matrix(n - 1).expect("index ≥ -1")) == self.n()
    }

    pub fn is_observable(&self) -> bool {
        let n = self.n() as i64;
        rank(&self.observability_matrix(n - 1).expect("index ≥ -1")) == self.n()
    }

    /// Controllable and observable; vacuously true when `n = 0`.
    pub fn is_minimal(&self) -> bool {
        self.is_controllable() && self.is_observable()
    }

    /// Drives the system from `x0` with the input samples in the columns of `u`.
    pub fn simulate(&self, x0: &[T], u: &Mat<T>) -> Result<Trajectory<T>> {
        if x0.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "initial state of length {} for n = {}",
                x0.len(),
                self.n()
            )));
        }
        if u.rows() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "{}-dimensional inputs for m = {}",
                u.rows(),
                self.m()
            )));
        }
        let mut x = x0.to_vec();
        let mut ys = Vec::with_capacity(u.cols());
        let mut xs = vec![x.clone()];
        for t in 0..u.cols() {
            let (y, next) = self.step(&x, &u.column(t))?;
            ys.push(y);
            x = next;
            xs.push(x.clone());
        }
        Ok(Trajectory {
            x0: x0.to_vec(),
            u: u.clone(),
            y: Mat::from_columns(self.p(), &ys)?,
            x: Mat::from_columns(self.n(), &xs)?,
        })
    }

    /// One step: returns `(y(t), x(t+1))`.
    pub fn step(&self, x: &[T], u: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let cx = self.c.mul_vec(x)?;
        let du = self.d.mul_vec(u)?;
        let y = cx.into_iter().zip(du).map(|(a, b)| a + b).collect();
        let ax = self.a.mul_vec(x)?;
        let bu = self.b.mul_vec(u)?;
        let next = ax.into_iter().zip(bu).map(|(a, b)| a + b).collect();
        Ok((y, next))
    }

    /// `[D, CB, CAB, …, CA^{horizon-2}B]`.
    pub fn markov_parameters(&self, horizon: usize) -> Vec<Mat<T>> {
        let mut out = Vec::with_capacity(horizon);
        if horizon == 0 {
            return out;
        }
        out.push(self.d.clone());
        let mut cak = self.c.clone();
        for _ in 1..horizon {
            out.push(&cak * &self.b);
            cak = &cak * &self.a;
        }
        out
    }

    /// `(S⁻¹AS, S⁻¹B, CS, D)` for a nonsingular `S`.
    pub fn similarity_transform(&self, s: &Mat<T>) -> Result<Self> {
        let n = self.n();
        if s.shape() != (n, n) || rank(s) != n {
            return Err(Error::InvalidArgument(
                "similarity transform must be square and nonsingular".into(),
            ));
        }
        let s_inv = solve(s, &Mat::identity(n))?
            .ok_or_else(|| Error::Invariant("nonsingular matrix without inverse".into()))?;
        Self::new(
            &(&s_inv * &self.a) * s,
            &s_inv * &self.b,
            &self.c * s,
            self.d.clone(),
        )
    }

    pub fn convert<U: Scalar>(&self) -> StateSpaceSystem<U> {
        StateSpaceSystem {
            a: self.a.convert(),
            b: self.b.convert(),
            c: self.c.convert(),
            d: self.d.convert(),
        }
    }
}

fn check_index(k: i64) -> Result<()> {
    if k < -1 {
        return Err(Error::InvalidArgument(format!("structural index {k} < -1")));
    }
    Ok(())
}

/// Isomorphism test for minimal systems: equal state dimension, equal `D`
/// and equal Markov parameters up to horizon `2n + 1`.
pub fn are_isomorphic<T: Scalar>(
    sys1: &StateSpaceSystem<T>,
    sys2: &StateSpaceSystem<T>,
) -> Result<bool> {
    if !sys1.is_minimal() || !sys2.is_minimal() {
        return Err(Error::NotMinimal);
    }
    if sys1.n() != sys2.n() || sys1.m() != sys2.m() || sys1.p() != sys2.p() {
        return Ok(false);
    }
    let horizon = 2 * sys1.n() + 1;
    let m1 = sys1.markov_parameters(horizon);
    let m2 = sys2.markov_parameters(horizon);
    let scale = m1
        .iter()
        .chain(&m2)
        .map(Mat::max_abs)
        .fold(1.0, f64::max);
    Ok(m1.iter().zip(&m2).all(|(a, b)| a.approx_eq(b, scale)))
}

const MAX_DRAWS: usize = 1000;

/// Draws integer-valued systems with entries in `[-3, 3]` until a minimal
/// one appears. Deterministic in `seed`.
pub fn random_minimal_system<T: Scalar>(
    n: usize,
    m: usize,
    p: usize,
    seed: u64,
) -> Result<StateSpaceSystem<T>> {
    if n == 0 || m == 0 || p == 0 {
        return Err(Error::InvalidArgument(
            "random systems need n, m, p ≥ 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |r: usize, c: usize| Mat::from_fn(r, c, |_, _| T::from_int(rng.gen_range(-3..=3)));
    for _ in 0..MAX_DRAWS {
        let a = draw(n, n);
        let b = draw(n, m);
        let c = draw(p, n);
        let d = draw(p, m);
        let sys = StateSpaceSystem::new(a, b, c, d)?;
        if sys.is_minimal() {
            return Ok(sys);
        }
    }
    Err(Error::DrawLimit(MAX_DRAWS))
}
