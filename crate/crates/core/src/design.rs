//! Online experiment design: pick each input from past data so that the
//! depth-adaptive Hankel matrix gains rank at every step, and stop as soon
//! as the data certify their own informativity.
//!
//! Also hosts the offline baselines the online procedure is compared with.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    lag_bound_for, minimal_experiment_length, rank_g, rank_h, shortest_lag_min_states,
    ExperimentLog,
};
use crate::error::{Error, Result};
use crate::matrix::{hankel, left_kernel_basis, rank, Mat};
use crate::plant::Plant;
use crate::scalar::Scalar;

/// The set `{v : ηᵀ v = β}` an input must avoid to raise the rank.
///
/// Usually an affine hyperplane. With `η = 0` and `β ≠ 0` it is empty and
/// every input raises the rank.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceHyperplane<T> {
    pub eta: Vec<T>,
    pub beta: T,
}

impl<T: Scalar> AvoidanceHyperplane<T> {
    pub fn dot(&self, v: &[T]) -> T {
        self.eta
            .iter()
            .zip(v)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn is_empty(&self) -> bool {
        self.eta.iter().all(|e| e.is_zero())
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let scale = self
            .eta
            .iter()
            .zip(v)
            .map(|(a, b)| (a.clone() * b.clone()).abs().to_f64_lossy())
            .sum::<f64>()
            .max(self.beta.abs().to_f64_lossy());
        self.dot(v).approx_eq(&self.beta, scale)
    }
}

/// How inputs are picked off the avoidance hyperplane.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum InputPolicy<T> {
    /// First of `0, e_1, …, e_m, -e_1, …, -e_m, e_1+e_2, …, e_1+e_m` off the
    /// hyperplane. Keeps logs integer-valued.
    #[default]
    CanonicalScan,
    /// `v = (β + 1) η / (ηᵀη)`, so that `ηᵀv = β + 1`.
    ClosedForm,
    /// Serve prerecorded inputs; sample `t` is column `t` of `inputs`.
    ///
    /// With `strict` set, a recorded input on the hyperplane is rejected.
    /// Otherwise it is applied and accepted as long as the Hankel rank still
    /// increases by one.
    Replay { inputs: Mat<T>, strict: bool },
    /// Integer entries in `[-3, 3]`, redrawn until off the hyperplane.
    /// Draws depend only on `(seed, t)`.
    SeededRandom { seed: u64 },
}

impl<T: Scalar> InputPolicy<T> {
    pub fn replay(inputs: Mat<T>) -> Self {
        InputPolicy::Replay {
            inputs,
            strict: false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InputPolicy::CanonicalScan => "canonical-scan",
            InputPolicy::ClosedForm => "closed-form",
            InputPolicy::Replay { .. } => "replay",
            InputPolicy::SeededRandom { .. } => "seeded-random",
        }
    }

    fn recorded(&self, t: usize) -> Result<Option<Vec<T>>> {
        match self {
            InputPolicy::Replay { inputs, .. } => {
                if t >= inputs.cols() {
                    return Err(Error::Replay {
                        t,
                        reason: format!("replay policy holds only {} inputs", inputs.cols()),
                    });
                }
                Ok(Some(inputs.column(t)))
            }
            _ => Ok(None),
        }
    }
}

fn unit<T: Scalar>(m: usize, i: usize) -> Vec<T> {
    (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect()
}

fn canonical_candidates<T: Scalar>(m: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![T::zero(); m]];
    out.extend((0..m).map(|i| unit(m, i)));
    out.extend((0..m).map(|i| unit::<T>(m, i).into_iter().map(|v| -v).collect()));
    for j in 1..m {
        let mut v = unit::<T>(m, 0);
        v[j] = T::one();
        out.push(v);
    }
    out
}

const MAX_DRAWS: usize = 1000;

/// Picks an input for time `t` that avoids `h` according to `policy`.
pub fn choose_input<T: Scalar>(
    h: &AvoidanceHyperplane<T>,
    policy: &InputPolicy<T>,
    t: usize,
) -> Result<Vec<T>> {
    let m = h.eta.len();
    match policy {
        InputPolicy::CanonicalScan => canonical_candidates(m)
            .into_iter()
            .find(|v| !h.contains(v))
            .ok_or_else(|| Error::Invariant("canonical scan found no admissible input".into())),
        InputPolicy::ClosedForm => {
            let norm = h.dot(&h.eta);
            if norm.is_zero() {
                return Ok(vec![T::zero(); m]);
            }
            let factor = (h.beta.clone() + T::one()) / norm;
            Ok(h.eta.iter().map(|e| e.clone() * factor.clone()).collect())
        }
        InputPolicy::Replay { strict, .. } => {
            let v = policy.recorded(t)?.expect("replay policy");
            if *strict && h.contains(&v) {
                return Err(Error::InputOnHyperplane { t });
            }
            Ok(v)
        }
        InputPolicy::SeededRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            rng.set_stream(t as u64);
            for _ in 0..MAX_DRAWS {
                let v: Vec<T> = (0..m).map(|_| T::from_int(rng.gen_range(-3..=3))).collect();
                if !h.contains(&v) {
                    return Ok(v);
                }
            }
            Err(Error::DrawLimit(MAX_DRAWS))
        }
    }
}

fn hyperplane_from_kernel<T: Scalar>(
    log: &ExperimentLog<T>,
    g: &Mat<T>,
    k: usize,
) -> Result<AvoidanceHyperplane<T>> {
    let (m, p, t) = (log.m(), log.p(), log.len());
    let eta_start = k * p + k * m;
    let beta_of = |v: &[T]| {
        let mut beta = T::zero();
        for i in 0..k {
            let xi = &v[i * p..(i + 1) * p];
            let eta_i = &v[k * p + i * m..k * p + (i + 1) * m];
            for (a, b) in xi.iter().zip(log.output(t - k + i)).chain(eta_i.iter().zip(log.input(t - k + i))) {
                beta = beta - a.clone() * b.clone();
            }
        }
        beta
    };
    let kernel = left_kernel_basis(g);
    // Largest |η_k| entry wins; ties keep the lowest index.
    let mut best: Option<(usize, T)> = None;
    for (i, v) in kernel.iter().enumerate() {
        let peak = max_abs_of(&v[eta_start..]);
        if peak.is_zero() {
            continue;
        }
        if best.as_ref().map_or(true, |(_, b)| peak > *b) {
            best = Some((i, peak));
        }
    }
    if let Some((idx, _)) = best {
        let v = &kernel[idx];
        return Ok(AvoidanceHyperplane {
            eta: v[eta_start..].to_vec(),
            beta: beta_of(v),
        });
    }
    // Every kernel vector has η_k = 0. One of them still misses the last
    // column of H_{k-1,t}, so β ≠ 0 and no input lies in the set.
    let scale = log.outputs().max_abs().max(log.inputs().max_abs());
    kernel
        .iter()
        .map(|v| beta_of(v))
        .filter(|b| !b.approx_eq(&T::zero(), scale))
        .fold(None::<T>, |acc, b| match acc {
            Some(a) if a.abs() >= b.abs() => Some(a),
            _ => Some(b),
        })
        .map(|beta| AvoidanceHyperplane {
            eta: vec![T::zero(); m],
            beta,
        })
        .ok_or_else(|| {
            Error::Invariant(format!("left kernel of G_{{{k},{t}}} gives no avoidance set"))
        })
}

fn max_abs_of<T: Scalar>(v: &[T]) -> T {
    v.iter()
        .map(|x| x.abs())
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

/// The affine set of inputs that would fail to raise `rank H_{k,t+1}`.
///
/// Requires `k ≥ 1`, `k ≤ t - 1` and `rank G_{k,t} < m + rank H_{k-1,t}`;
/// returns [`Error::DepthExhausted`] when the rank condition fails.
pub fn avoidance_hyperplane<T: Scalar>(
    log: &ExperimentLog<T>,
    k: usize,
) -> Result<AvoidanceHyperplane<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("avoidance hyperplanes need depth k ≥ 1".into()));
    }
    let g = crate::analysis::hankel_g(log, k)?;
    let t = log.len();
    if rank(&g) >= log.m() + rank_h(log, k - 1) {
        return Err(Error::DepthExhausted { k, t });
    }
    hyperplane_from_kernel(log, &g, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Part of the nonsingular initial block `u_{[0,m-1]}`.
    Initial,
    /// Unconstrained sample taken when `t = k`.
    Free,
    /// Sample chosen off the avoidance hyperplane.
    RankIncrease,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Initial => "initial",
            StepKind::Free => "free",
            StepKind::RankIncrease => "rank-increase",
        }
    }
}

/// One applied input.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<T> {
    pub t: usize,
    pub k: usize,
    pub kind: StepKind,
    /// `rank H_{k,t}` before the input is applied.
    pub rank_h: usize,
    /// `rank G_{k,t}` before the input is applied.
    pub rank_g: usize,
    /// `rank H_{k,t+1}` after the input is applied.
    pub rank_h_next: usize,
    pub hyperplane: Option<AvoidanceHyperplane<T>>,
    pub u: Vec<T>,
}

/// Evaluation of the stopping criterion `k = L^a_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopCheck {
    pub t: usize,
    pub k: usize,
    pub ell_min: usize,
    pub n_min: usize,
    pub l_actual: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignTrace<T> {
    pub steps: Vec<StepRecord<T>>,
    pub checks: Vec<StopCheck>,
    pub final_k: usize,
    pub final_t: usize,
}

impl<T> Default for DesignTrace<T> {
    fn default() -> Self {
        DesignTrace {
            steps: Vec::new(),
            checks: Vec::new(),
            final_k: 0,
            final_t: 0,
        }
    }
}

impl<T: Scalar> DesignTrace<T> {
    /// `(rank H_{k,t+1} after the first step, after the last step)` of the
    /// rank-increase phase at depth `k`.
    pub fn rank_transition(&self, k: usize) -> Option<(usize, usize)> {
        let mut phase = self
            .steps
            .iter()
            .filter(|s| s.k == k && s.kind == StepKind::RankIncrease);
        let first = phase.next()?;
        let last = phase.last().unwrap_or(first);
        Some((first.rank_h_next, last.rank_h_next))
    }
}

/// Overrides for the two unconstrained choices of the procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOptions<T> {
    /// Nonsingular `m × m` block `u_{[0,m-1]}`; defaults to `I_m`.
    pub initial_block: Option<Mat<T>>,
    /// Input used when `t = k`; defaults to `e_1`.
    pub free_input: Option<Vec<T>>,
}

impl<T> Default for ExperimentOptions<T> {
    fn default() -> Self {
        ExperimentOptions {
            initial_block: None,
            free_input: None,
        }
    }
}

struct Runner<'a, T: Scalar> {
    plant: &'a mut dyn Plant<T>,
    log: ExperimentLog<T>,
    trace: DesignTrace<T>,
}

impl<T: Scalar> Runner<'_, T> {
    fn measure(
        &mut self,
        u: Vec<T>,
        k: usize,
        kind: StepKind,
        hyperplane: Option<AvoidanceHyperplane<T>>,
        ranks: Option<(usize, usize)>,
    ) -> Result<usize> {
        let t = self.log.len();
        let (rank_h_now, rank_g_now) =
            ranks.unwrap_or_else(|| (rank_h(&self.log, k), rank_g(&self.log, k)));
        let y = self.plant.apply(&u)?;
        self.log.push(u.clone(), y)?;
        let rank_h_next = rank_h(&self.log, k);
        self.trace.steps.push(StepRecord {
            t,
            k,
            kind,
            rank_h: rank_h_now,
            rank_g: rank_g_now,
            rank_h_next,
            hyperplane,
            u,
        });
        Ok(rank_h_next)
    }
}

/// Runs the online design procedure against `plant` under the prior bounds
/// `ℓ_true ≤ lag_bound`, `n_true ≤ state_bound`.
///
/// On success the returned log has exactly `T = L^a + (L^a+1)m + n_true`
/// samples and is informative for system identification.
pub fn online_experiment<T: Scalar>(
    plant: &mut dyn Plant<T>,
    lag_bound: usize,
    state_bound: usize,
    policy: &InputPolicy<T>,
    options: &ExperimentOptions<T>,
) -> Result<(ExperimentLog<T>, DesignTrace<T>)> {
    let (m, p) = (plant.input_dim(), plant.output_dim());
    let log = ExperimentLog::new(m, p)?;
    let mut run = Runner {
        plant,
        log,
        trace: DesignTrace::default(),
    };

    // Nonsingular initial block.
    let initial: Mat<T> = match (&options.initial_block, policy) {
        (Some(b), _) => b.clone(),
        (None, InputPolicy::Replay { inputs, .. }) if inputs.cols() >= m => inputs.col_range(0, m),
        _ => Mat::identity(m),
    };
    if initial.shape() != (m, m) || rank(&initial) != m {
        return Err(Error::InvalidArgument(
            "initial input block must be m × m and nonsingular".into(),
        ));
    }
    for j in 0..m {
        run.measure(initial.column(j), 0, StepKind::Initial, None, None)?;
    }

    let mut k = 0;
    loop {
        let t = run.log.len();
        let (ell_min, n_min) = shortest_lag_min_states(&run.log)?;
        if n_min > state_bound {
            return Err(Error::PriorBoundsViolated(format!(
                "data at t = {t} need {n_min} states but N = {state_bound}"
            )));
        }
        let l_actual = lag_bound.min(state_bound - n_min + ell_min);
        run.trace.checks.push(StopCheck {
            t,
            k,
            ell_min,
            n_min,
            l_actual,
        });
        if k == l_actual {
            break;
        }
        k += 1;
        if k > state_bound + 1 || k > lag_bound {
            return Err(Error::PriorBoundsViolated(format!(
                "depth {k} exceeds the prior bounds L = {lag_bound}, N = {state_bound} without meeting the stopping criterion"
            )));
        }
        if run.log.len() == k {
            let t = run.log.len();
            let u = match policy.recorded(t)? {
                Some(v) => v,
                None => options.free_input.clone().unwrap_or_else(|| unit(m, 0)),
            };
            if u.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "free input of length {} for m = {m}",
                    u.len()
                )));
            }
            run.measure(u, k, StepKind::Free, None, None)?;
        }
        let mut current_rank_h: Option<usize> = None;
        loop {
            let t = run.log.len();
            let g = crate::analysis::g_window(&run.log, k);
            let rg = rank(&g);
            let rh_prev = rank_h(&run.log, k - 1);
            if rg > m + rh_prev {
                return Err(Error::Invariant(format!(
                    "rank G_{{{k},{t}}} = {rg} exceeds m + rank H_{{{},{t}}} = {}",
                    k - 1,
                    m + rh_prev
                )));
            }
            if rg == m + rh_prev {
                break;
            }
            let h = hyperplane_from_kernel(&run.log, &g, k)?;
            let u = choose_input(&h, policy, t)?;
            if u.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "policy produced an input of length {} for m = {m}",
                    u.len()
                )));
            }
            let on_plane = h.contains(&u);
            let rh = current_rank_h.unwrap_or_else(|| rank_h(&run.log, k));
            let next = run.measure(u, k, StepKind::RankIncrease, Some(h), Some((rh, rg)))?;
            if next != rh + 1 {
                return Err(if on_plane {
                    Error::InputOnHyperplane { t }
                } else {
                    Error::Invariant(format!(
                        "rank H_{{{k}}} went from {rh} to {next} at t = {t}"
                    ))
                });
            }
            current_rank_h = Some(next);
        }
    }
    run.trace.final_k = k;
    run.trace.final_t = run.log.len();
    Ok((run.log, run.trace))
}

/// Random input of length `order - 1 + m·order` whose depth-`(order-1)`
/// Hankel matrix is square and nonsingular, i.e. persistently exciting of
/// exactly `order` at the minimal length.
pub fn design_pe_input<T: Scalar>(m: usize, order: usize, seed: u64) -> Result<Mat<T>> {
    if m == 0 || order == 0 {
        return Err(Error::InvalidArgument(
            "persistently exciting inputs need m ≥ 1 and order ≥ 1".into(),
        ));
    }
    let len = order - 1 + m * order;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let u = Mat::from_fn(m, len, |_, _| T::from_int(rng.gen_range(-3..=3)));
        if rank(&hankel(&u, order - 1)?) == m * order {
            return Ok(u);
        }
    }
    Err(Error::DrawLimit(MAX_DRAWS))
}

/// Sample counts of the three designs under the same prior knowledge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleCounts {
    /// Online depth-adaptive design: `T`.
    pub online: usize,
    /// Persistency of excitation of order `N + L + 1`: `N + L + m(N+L+1)`.
    pub persistency: usize,
    /// Fixed-depth online design: `L + (L+1)m + n_true`.
    pub fixed_depth: usize,
}

pub fn baseline_sample_counts(
    m: usize,
    lag_bound: usize,
    state_bound: usize,
    ell_true: usize,
    n_true: usize,
) -> Result<SampleCounts> {
    lag_bound_for(ell_true, n_true, lag_bound, state_bound)?;
    let (l, n) = (lag_bound, state_bound);
    Ok(SampleCounts {
        online: minimal_experiment_length(ell_true, n_true, m, l, n)?,
        persistency: n + l + m * (n + l + 1),
        fixed_depth: l + (l + 1) * m + n_true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::check_informativity;
    use crate::fixtures::*;
    use num_traits::Zero;
    use crate::matrix::is_persistently_exciting;
    use crate::plant::SimulatedPlant;
    use crate::Rational;

    type R = Rational;

    fn r(v: i64) -> R {
        R::from_int(v)
    }

    fn example_log(t: usize) -> ExperimentLog<R> {
        ExperimentLog::from_sequences(&example_inputs(), &example_outputs())
            .unwrap()
            .prefix(t)
    }

    #[test]
    fn hyperplane_at_start_of_depth_one() {
        let log = example_log(2);
        assert_eq!(rank_g(&log, 1), 1);
        assert_eq!(rank_h(&log, 0), 2);
        let h = avoidance_hyperplane(&log, 1).unwrap();
        assert!(h.eta.iter().any(|v| !v.is_zero()));
        // The recorded u(2) = e_1 must raise rank H_{1,3}.
        assert!(!h.contains(&[r(1), r(0)]));
        let next = example_log(3);
        assert_eq!(rank_h(&next, 1), rank_h(&log, 1) + 1);
    }

    #[test]
    fn depth_exhausted_after_first_phase() {
        let log = example_log(8);
        assert_eq!(rank_g(&log, 1), 2 + rank_h(&log, 0));
        assert_eq!(
            avoidance_hyperplane(&log, 1),
            Err(Error::DepthExhausted { k: 1, t: 8 })
        );
        assert!(avoidance_hyperplane(&log, 0).is_err());
    }

    #[test]
    fn single_input_hyperplane_is_a_point() {
        let mut log = ExperimentLog::<R>::new(1, 1).unwrap();
        log.push(vec![r(1)], vec![r(0)]).unwrap();
        log.push(vec![r(0)], vec![r(1)]).unwrap();
        let h = avoidance_hyperplane(&log, 1).unwrap();
        assert_eq!(h.eta.len(), 1);
        let point = h.beta.clone() / h.eta[0].clone();
        assert!(h.contains(&[point.clone()]));
        assert!(!h.contains(&[point + r(1)]));
    }

    #[test]
    fn empty_avoidance_set() {
        // u = (1, 1, 0) into x⁺ = u, y = -3x - 2u from x0 = 1: every left-kernel
        // vector of G_{1,3} has η_1 = 0, but the rank condition still holds.
        let u = Mat::from_i64_rows(&[&[1, 1, 0]]);
        let y = Mat::from_i64_rows(&[&[-5, -5, -3]]);
        let log = ExperimentLog::<R>::from_sequences(&u, &y).unwrap();
        assert!(rank_g(&log, 1) < 1 + rank_h(&log, 0));
        let h = avoidance_hyperplane(&log, 1).unwrap();
        assert!(h.is_empty());
        assert!(!h.beta.is_zero());
        let sys = crate::lti::StateSpaceSystem::new(
            Mat::from_i64_rows(&[&[0]]),
            Mat::from_i64_rows(&[&[1]]),
            Mat::from_i64_rows(&[&[-3]]),
            Mat::from_i64_rows(&[&[-2]]),
        )
        .unwrap();
        for v in -2..=2 {
            let mut u4 = u.to_rows()[0].clone();
            u4.push(r(v));
            let traj = sys.simulate(&[r(1)], &Mat::from_rows(4, &[u4.clone()]).unwrap()).unwrap();
            assert_eq!(traj.y.col_range(0, 3), y);
            let next = ExperimentLog::from_sequences(&Mat::from_rows(4, &[u4]).unwrap(), &traj.y).unwrap();
            assert_eq!(rank_h(&next, 1), rank_h(&log, 1) + 1);
            assert!(!h.contains(&[r(v)]));
        }
        assert_eq!(choose_input(&h, &InputPolicy::ClosedForm, 3).unwrap(), vec![r(0)]);
    }

    #[test]
    fn policies_avoid_the_hyperplane() {
        let h = AvoidanceHyperplane {
            eta: vec![r(1), r(1), r(0)],
            beta: r(1),
        };
        let scan = choose_input(&h, &InputPolicy::CanonicalScan, 0).unwrap();
        assert_eq!(scan, vec![r(0), r(0), r(0)]);
        let h0 = AvoidanceHyperplane {
            eta: vec![r(1), r(-1)],
            beta: r(0),
        };
        // 0 lies on the plane, e_1 does not.
        assert_eq!(choose_input(&h0, &InputPolicy::CanonicalScan, 0).unwrap(), vec![r(1), r(0)]);
        let cf = choose_input(&h, &InputPolicy::ClosedForm, 0).unwrap();
        assert_eq!(h.dot(&cf), h.beta.clone() + r(1));
        for t in 0..20 {
            let v = choose_input(&h, &InputPolicy::SeededRandom { seed: 9 }, t).unwrap();
            assert!(!h.contains(&v));
            assert_eq!(v, choose_input(&h, &InputPolicy::SeededRandom { seed: 9 }, t).unwrap());
        }
    }

    #[test]
    fn canonical_scan_never_fails() {
        // At most m of the m+1 affinely independent points 0, e_1..e_m lie on a hyperplane.
        let h = AvoidanceHyperplane {
            eta: vec![r(1), r(1)],
            beta: r(1),
        };
        assert_eq!(choose_input(&h, &InputPolicy::CanonicalScan, 0).unwrap(), vec![r(0), r(0)]);
    }

    #[test]
    fn strict_replay_rejects_inputs_on_the_plane() {
        let h = AvoidanceHyperplane {
            eta: vec![r(1), r(1)],
            beta: r(1),
        };
        let inputs = Mat::from_i64_rows(&[&[1, 3], &[0, 0]]);
        let strict = InputPolicy::Replay {
            inputs: inputs.clone(),
            strict: true,
        };
        assert_eq!(choose_input(&h, &strict, 0), Err(Error::InputOnHyperplane { t: 0 }));
        assert_eq!(choose_input(&h, &strict, 1).unwrap(), vec![r(3), r(0)]);
        assert_eq!(
            choose_input(&h, &InputPolicy::replay(inputs), 0).unwrap(),
            vec![r(1), r(0)]
        );
        assert!(matches!(choose_input(&h, &strict, 2), Err(Error::Replay { .. })));
    }

    #[test]
    fn replayed_example_run() {
        let mut plant = SimulatedPlant::new(example_system::<R>(), example_x0()).unwrap();
        let policy = InputPolicy::replay(example_inputs());
        let (log, trace) =
            online_experiment(&mut plant, EXAMPLE_L, EXAMPLE_N, &policy, &Default::default())
                .unwrap();
        assert_eq!(log.len(), EXAMPLE_T);
        assert_eq!(log.inputs(), example_inputs());
        assert_eq!(log.outputs(), example_outputs());
        assert_eq!((trace.final_k, trace.final_t), (3, 14));
        assert_eq!(trace.rank_transition(1), Some((2, 7)));
        assert_eq!(trace.rank_transition(2), Some((7, 9)));
        assert_eq!(trace.rank_transition(3), Some((9, 11)));
        let checks: Vec<_> = trace
            .checks
            .iter()
            .map(|c| (c.t, c.ell_min, c.n_min, c.l_actual))
            .collect();
        assert_eq!(
            checks,
            vec![(2, 0, 0, 4), (8, 2, 3, 3), (11, 2, 3, 3), (14, 2, 3, 3)]
        );
    }

    #[test]
    fn looser_lag_bound_same_data() {
        let mut plant = SimulatedPlant::new(example_system::<R>(), example_x0()).unwrap();
        let policy = InputPolicy::replay(example_inputs());
        let (log, trace) = online_experiment(&mut plant, 3, 6, &policy, &Default::default()).unwrap();
        assert_eq!(log.outputs(), example_outputs());
        assert_eq!(trace.checks[0].l_actual, 3);
        assert_eq!(trace.final_t, 14);
    }

    #[test]
    fn strict_replay_of_example_hits_the_plane() {
        // The recorded u(6) lies on the unique avoidance set at depth 1, although
        // the rank of H_{1,7} still grows through the output rows.
        let mut plant = SimulatedPlant::new(example_system::<R>(), example_x0()).unwrap();
        let policy = InputPolicy::Replay {
            inputs: example_inputs(),
            strict: true,
        };
        let err = online_experiment(&mut plant, 4, 4, &policy, &Default::default()).unwrap_err();
        assert_eq!(err, Error::InputOnHyperplane { t: 6 });
    }

    #[test]
    fn violated_state_bound_is_reported() {
        let mut plant = SimulatedPlant::new(example_system::<R>(), example_x0()).unwrap();
        let err = online_experiment(&mut plant, 1, 1, &InputPolicy::CanonicalScan, &Default::default())
            .unwrap_err();
        assert!(matches!(err, Error::PriorBoundsViolated(_)), "{err:?}");
    }

    #[test]
    fn wrong_but_consistent_bound_stops_early() {
        // The data never contradict N = 2, so the run ends with an
        // under-modelled log instead of an error.
        let mut plant = SimulatedPlant::new(example_system::<R>(), example_x0()).unwrap();
        let (log, trace) =
            online_experiment(&mut plant, 4, 2, &InputPolicy::CanonicalScan, &Default::default())
                .unwrap();
        assert_eq!(log.len(), 7);
        assert_eq!(trace.checks.last().unwrap().n_min, 2);
    }

    #[test]
    fn canonical_scan_on_example_reaches_t() {
        for policy in [
            InputPolicy::CanonicalScan,
            InputPolicy::ClosedForm,
            InputPolicy::SeededRandom { seed: 3 },
        ] {
            let mut plant = SimulatedPlant::new(example_system::<R>(), example_x0()).unwrap();
            let (log, trace) = online_experiment(&mut plant, 4, 4, &policy, &Default::default()).unwrap();
            assert_eq!(log.len(), 14, "{}", policy.name());
            assert_eq!(trace.final_k, 3);
            assert!(check_informativity(&log, 4, 4).unwrap().informative);
        }
    }

    #[test]
    fn float_policies_on_example() {
        for policy in [InputPolicy::CanonicalScan, InputPolicy::ClosedForm, InputPolicy::SeededRandom { seed: 1 }] {
            let mut plant = SimulatedPlant::new(example_system::<f64>(), example_x0()).unwrap();
            let (log, _) = online_experiment(&mut plant, 4, 4, &policy, &Default::default()).unwrap();
            assert_eq!(log.len(), 14, "{}", policy.name());
        }
    }

    #[test]
    fn pe_input_shapes() {
        let u = design_pe_input::<R>(1, 1, 0).unwrap();
        assert_eq!(u.shape(), (1, 1));
        assert!(!u.is_zero());
        let u = design_pe_input::<R>(2, 7, 5).unwrap();
        assert_eq!(u.cols(), 20);
        let h = hankel(&u, 6).unwrap();
        assert_eq!(h.shape(), (14, 14));
        assert_eq!(rank(&h), 14);
        assert!(is_persistently_exciting(&u, 7).unwrap());
        assert!(design_pe_input::<R>(2, 0, 0).is_err());
    }

    #[test]
    fn sample_count_table() {
        let c = baseline_sample_counts(80, 100, 150, 20, 100).unwrap();
        assert_eq!((c.online, c.persistency, c.fixed_depth), (5850, 20330, 8280));
        let c = baseline_sample_counts(2, 4, 4, 2, 3).unwrap();
        assert_eq!((c.online, c.persistency), (14, 26));
        let c = baseline_sample_counts(2, 3, 6, 2, 3).unwrap();
        assert_eq!(c.online, 14);
        assert_eq!(c.fixed_depth, 14);
        assert!(baseline_sample_counts(2, 1, 4, 2, 3).is_err());
    }
}
