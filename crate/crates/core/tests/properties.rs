//! Randomized invariants of the linear algebra, the Hankel analysis, the
//! design procedure and identification.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use online_sysid::analysis::{delta, hankel_g, hankel_io, shortest_lag_min_states};
use online_sysid::design::StepKind;
use online_sysid::lti::random_minimal_system;
use online_sysid::matrix::{hankel, left_kernel_basis, rank, solve};
use online_sysid::plant::SimulatedPlant;
use online_sysid::*;

type R = Rational;

fn r(v: i64) -> R {
    R::from_int(v)
}

fn int_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lim: i64) -> ExactMat {
    Mat::from_fn(rows, cols, |_, _| r(rng.gen_range(-lim..=lim)))
}

/// Random matrix of rank at most `k`.
fn low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, k: usize, lim: i64) -> ExactMat {
    &int_mat(rng, rows, k, lim) * &int_mat(rng, k, cols, lim)
}

/// Data from a random minimal system driven by a random integer input.
fn system_log(seed: u64, max_n: usize, len: usize) -> (ExactSystem, ExactLog, Vec<R>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=2);
    let p = rng.gen_range(1..=2);
    let sys = random_minimal_system::<R>(n, m, p, seed).unwrap();
    let x0: Vec<R> = (0..n).map(|_| r(rng.gen_range(-2..=2))).collect();
    let mut u = int_mat(&mut rng, m, len, 2);
    u.set(0, 0, r(1));
    let traj = sys.simulate(&x0, &u).unwrap();
    let log = ExperimentLog::from_sequences(&u, &traj.y).unwrap();
    (sys, log, x0)
}

fn row_permutation(rng: &mut ChaCha8Rng, n: usize) -> ExactMat {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    Mat::from_fn(n, n, |i, j| if idx[i] == j { r(1) } else { r(0) })
}

/// Unit lower-triangular, hence nonsingular.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> ExactMat {
    Mat::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => r(1),
        std::cmp::Ordering::Greater => r(rng.gen_range(-2..=2)),
        std::cmp::Ordering::Less => r(0),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_bounded_by_dimensions(seed: u64, rows in 0usize..9, cols in 0usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = int_mat(&mut rng, rows, cols, 3);
        let rk = rank(&m);
        prop_assert!(rk <= rows.min(cols));
        prop_assert_eq!(rk, rank(&m.transpose()));
    }

    #[test]
    fn rank_nullity(seed: u64, rows in 1usize..9, cols in 1usize..9, k in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = low_rank(&mut rng, rows, cols, k, 3);
        let kernel = left_kernel_basis(&m);
        prop_assert_eq!(rank(&m) + kernel.len(), rows);
        for v in &kernel {
            let row = Mat::from_rows(rows, &[v.clone()]).unwrap();
            prop_assert!((&row * &m).is_zero());
        }
        let basis = Mat::from_rows(rows, &kernel).unwrap();
        prop_assert_eq!(rank(&basis), kernel.len());
    }

    #[test]
    fn rank_invariant_under_equivalence(seed: u64, rows in 1usize..8, cols in 1usize..8, k in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = low_rank(&mut rng, rows, cols, k, 3);
        let rk = rank(&m);
        let p = row_permutation(&mut rng, rows);
        let q = row_permutation(&mut rng, cols);
        prop_assert_eq!(rank(&(&(&p * &m) * &q)), rk);
        let s = unimodular(&mut rng, rows);
        let t = unimodular(&mut rng, cols).transpose();
        prop_assert_eq!(rank(&(&(&s * &m) * &t)), rk);
    }

    #[test]
    fn rank_changes_by_at_most_one_per_column(seed: u64, rows in 1usize..8, cols in 2usize..8, k in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = low_rank(&mut rng, rows, cols, k, 3);
        let rk = rank(&m);
        let fewer = rank(&m.col_range(0, cols - 1));
        prop_assert!(fewer <= rk && rk <= fewer + 1);
        let extra = int_mat(&mut rng, rows, 1, 3);
        let more = rank(&Mat::hstack(&[&m, &extra]).unwrap());
        prop_assert!(rk <= more && more <= rk + 1);
    }

    #[test]
    fn solve_returns_solutions(seed: u64, rows in 1usize..7, cols in 1usize..7, k in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = low_rank(&mut rng, rows, cols, k, 3);
        let x = int_mat(&mut rng, cols, 2, 3);
        let b = &a * &x;
        let sol = solve(&a, &b).unwrap().expect("consistent system");
        prop_assert_eq!(&a * &sol, b);
    }

    #[test]
    fn superposition(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let (m, p) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let sys = random_minimal_system::<R>(n, m, p, seed).unwrap();
        let x1: Vec<R> = (0..n).map(|_| r(rng.gen_range(-3..=3))).collect();
        let x2: Vec<R> = (0..n).map(|_| r(rng.gen_range(-3..=3))).collect();
        let u1 = int_mat(&mut rng, m, 6, 3);
        let u2 = int_mat(&mut rng, m, 6, 3);
        let y1 = sys.simulate(&x1, &u1).unwrap().y;
        let y2 = sys.simulate(&x2, &u2).unwrap().y;
        let xs: Vec<R> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        prop_assert_eq!(sys.simulate(&xs, &(&u1 + &u2)).unwrap().y, &y1 + &y2);
    }

    #[test]
    fn hankel_factorization(seed: u64, k in 0usize..4) {
        let (sys, log, x0) = system_log(seed, 4, 10);
        let traj = sys.simulate(&x0, &log.inputs()).unwrap();
        let hy = hankel(&log.outputs(), k).unwrap();
        let hu = hankel(&log.inputs(), k).unwrap();
        let states = traj.x.col_range(0, log.len() - k);
        let omega = sys.observability_matrix(k as i64).unwrap();
        let theta = sys.toeplitz_markov(k as i64).unwrap();
        prop_assert_eq!(hy, &(&omega * &states) + &(&theta * &hu));
    }

    #[test]
    fn observability_rank_saturates_at_lag(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let sys = random_minimal_system::<R>(n, rng.gen_range(1..=3), rng.gen_range(1..=3), seed).unwrap();
        let ell = sys.lag();
        prop_assert!(ell >= 1 && ell <= n);
        let ranks: Vec<usize> = (0..=n + 1).map(|k| rank(&sys.observability_matrix(k as i64).unwrap())).collect();
        prop_assert!(ranks.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(ranks[ell - 1], n);
        if ell >= 2 {
            prop_assert!(ranks[ell - 2] < n);
        }
    }

    #[test]
    fn delta_profile_bounds(seed: u64, len in 4usize..14) {
        let (_, log, _) = system_log(seed, 3, len);
        let p = log.p();
        let deltas: Vec<usize> = (-1..len as i64).map(|k| delta(&log, k).unwrap()).collect();
        prop_assert_eq!(deltas[0], p);
        prop_assert!(deltas.iter().all(|&d| d <= p));
        prop_assert!(deltas.windows(2).all(|w| w[0] >= w[1]));
        let (ell, n_min) = shortest_lag_min_states(&log).unwrap();
        prop_assert_eq!(deltas[ell + 1], 0);
        prop_assert_eq!(n_min, deltas[1..=ell + 1].iter().sum::<usize>());
    }

    #[test]
    fn g_rank_bound(seed: u64, len in 3usize..14) {
        let (_, log, _) = system_log(seed, 3, len);
        let m = log.m();
        for k in 1..len {
            let g = rank(&hankel_g(&log, k).unwrap());
            let h = rank(&hankel_io(&log, k - 1).unwrap());
            prop_assert!(g <= m + h);
            prop_assert!(g <= rank(&hankel_io(&log, k).unwrap()));
        }
    }

    #[test]
    fn more_data_never_lowers_ranks(seed: u64, len in 4usize..14) {
        let (sys, log, _) = system_log(seed, 3, len);
        let mut prev_n = 0;
        for t in 1..=len {
            let prefix = log.prefix(t);
            let (_, n_min) = shortest_lag_min_states(&prefix).unwrap();
            prop_assert!(n_min >= prev_n && n_min <= sys.n());
            prev_n = n_min;
            if t >= 2 {
                for k in 0..t - 1 {
                    let before = rank(&hankel_io(&log.prefix(t - 1), k).unwrap());
                    let after = rank(&hankel_io(&prefix, k).unwrap());
                    prop_assert!(before <= after && after <= before + 1);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn float_and_exact_ranks_agree(seed: u64, rows in 1usize..=30, cols in 1usize..=30, k in 0usize..=30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = if k >= rows.min(cols) {
            int_mat(&mut rng, rows, cols, 5)
        } else {
            // Entries of a product of two [-1,1] factors stay within [-5,5] for k ≤ 5.
            let k = k.min(5);
            low_rank(&mut rng, rows, cols, k, 1)
        };
        prop_assert_eq!(rank(&m.convert::<f64>()), rank(&m));
    }

    #[test]
    fn termination_length_independent_of_policy(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=2);
        let (m, p) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let sys = random_minimal_system::<R>(n, m, p, seed).unwrap();
        let ell = sys.lag();
        let (lb, nb) = (ell + rng.gen_range(0..=1), n + rng.gen_range(0..=1));
        let x0: Vec<R> = (0..n).map(|_| r(rng.gen_range(-2..=2))).collect();
        let want = analysis::minimal_experiment_length(ell, n, m, lb, nb).unwrap();
        for policy in [InputPolicy::CanonicalScan, InputPolicy::ClosedForm, InputPolicy::SeededRandom { seed }] {
            let mut plant = SimulatedPlant::new(sys.clone(), x0.clone()).unwrap();
            let (log, trace) = online_experiment(&mut plant, lb, nb, &policy, &Default::default()).unwrap();
            prop_assert_eq!(log.len(), want, "{}", policy.name());
            // Every inner-loop step starts from a full-column-rank H_{k,t}.
            for s in trace.steps.iter().filter(|s| s.kind == StepKind::RankIncrease) {
                prop_assert_eq!(s.rank_h, s.t - s.k);
            }
        }
    }

    #[test]
    fn identification_is_idempotent(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let (m, p) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let sys = random_minimal_system::<R>(n, m, p, seed).unwrap();
        let ell = sys.lag();
        let x0: Vec<R> = (0..n).map(|_| r(rng.gen_range(-2..=2))).collect();
        let mut plant = SimulatedPlant::new(sys.clone(), x0).unwrap();
        let (log, _) = online_experiment(&mut plant, ell, n, &InputPolicy::CanonicalScan, &Default::default()).unwrap();
        let first = identify(&log, &check_informativity(&log, ell, n).unwrap()).unwrap();
        let horizon = 2 * n + 1;
        prop_assert_eq!(first.system.markov_parameters(horizon), sys.markov_parameters(horizon));
        let replay = first.system.simulate(&first.x0, &log.inputs()).unwrap();
        prop_assert_eq!(&replay.y, &log.outputs());
        let again_log = ExperimentLog::from_sequences(&log.inputs(), &replay.y).unwrap();
        let second = identify(&again_log, &check_informativity(&again_log, ell, n).unwrap()).unwrap();
        prop_assert!(are_isomorphic(&first.system, &second.system).unwrap());
    }
}
