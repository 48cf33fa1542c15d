//! Regression run over the reference plant: every intermediate quantity of
//! the recorded experiment, the counterexample with a persistently exciting
//! but uninformative input, and the sample-count comparison.
//!
//! Checks are evaluated in time order so that a corrupted record is reported
//! at the first quantity it changes.

use crate::analysis::{
    check_informativity, hankel_io, shortest_lag_min_states, actual_lag_bound, ExperimentLog,
};
use crate::design::{baseline_sample_counts, online_experiment, InputPolicy};
use crate::error::Result;
use crate::fixtures::*;
use crate::matrix::{hankel, rank, Mat};
use crate::plant::ReplayPlant;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reproduction {
    pub mode: &'static str,
    pub checks: Vec<Check>,
}

impl Reproduction {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    /// Fixed-width table, one row per check.
    pub fn table(&self) -> String {
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = format!("mode: {}\n", self.mode);
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "MISMATCH" };
            out += &format!(
                "{:<w$}  expected {:<14} got {:<14} {status}\n",
                c.name, c.expected, c.actual
            );
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReproduceOptions {
    /// Adds one to output channel `.1` at time `.0` of the recorded data.
    pub corrupt_output: Option<(usize, usize)>,
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, expected: impl ToString, actual: impl ToString) {
        self.0.push(Check {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        });
    }

    fn push_result<V: ToString>(&mut self, name: impl Into<String>, expected: impl ToString, actual: Result<V>) {
        let actual = match actual {
            Ok(v) => v.to_string(),
            Err(e) => format!("error: {e}"),
        };
        self.push(name, expected, actual);
    }
}

fn lag_triple<T: Scalar>(log: &ExperimentLog<T>) -> Result<String> {
    let (ell, n) = shortest_lag_min_states(log)?;
    let la = actual_lag_bound(log, EXAMPLE_L, EXAMPLE_N)?;
    Ok(format!("({ell},{n},{la})"))
}

fn rank_at<T: Scalar>(log: &ExperimentLog<T>, k: usize, t: usize) -> Result<usize> {
    Ok(rank(&hankel_io(&log.prefix(t), k)?))
}

/// Runs every check in scalar type `T`.
pub fn reproduce<T: Scalar>(options: &ReproduceOptions) -> Result<Reproduction> {
    let mut outputs = example_outputs::<T>();
    if let Some((t, i)) = options.corrupt_output {
        let v = outputs.get(i, t).clone() + T::one();
        outputs.set(i, t, v);
    }
    let recorded = ExperimentLog::from_sequences(&example_inputs(), &outputs)?;
    let mut c = Checks(Vec::new());

    let at = |t| recorded.prefix(t);
    c.push_result("(ell_min,n_min,L^a) at t=2", "(0,0,4)", lag_triple(&at(2)));
    c.push_result("rank H_{1,3}", 2, rank_at(&recorded, 1, 3));
    c.push_result("rank H_{1,8}", 7, rank_at(&recorded, 1, 8));
    c.push_result("(ell_min,n_min,L^a) at t=8", "(2,3,3)", lag_triple(&at(8)));
    c.push_result("rank H_{2,9}", 7, rank_at(&recorded, 2, 9));
    c.push_result("rank H_{2,11}", 9, rank_at(&recorded, 2, 11));
    c.push_result("(ell_min,n_min,L^a) at t=11", "(2,3,3)", lag_triple(&at(11)));
    c.push_result("rank H_{3,12}", 9, rank_at(&recorded, 3, 12));
    c.push_result("rank H_{3,14}", 11, rank_at(&recorded, 3, 14));
    c.push_result("(ell_min,n_min,L^a) at t=14", "(2,3,3)", lag_triple(&recorded));
    c.push_result(
        "informative at t=14",
        true,
        check_informativity(&recorded, EXAMPLE_L, EXAMPLE_N).map(|r| r.informative),
    );

    // Online replay against the recording.
    let mut plant = ReplayPlant::new(recorded.clone());
    let run = online_experiment(
        &mut plant,
        EXAMPLE_L,
        EXAMPLE_N,
        &InputPolicy::replay(example_inputs()),
        &Default::default(),
    );
    match run {
        Ok((log, trace)) => {
            let fmt = |k| {
                trace
                    .rank_transition(k)
                    .map_or("none".to_string(), |(a, b)| format!("{a}->{b}"))
            };
            c.push("online rank transition, depth 1", "2->7", fmt(1));
            c.push("online rank transition, depth 2", "7->9", fmt(2));
            c.push("online rank transition, depth 3", "9->11", fmt(3));
            let stops: Vec<String> = trace
                .checks
                .iter()
                .map(|s| format!("{}:({},{},{})", s.t, s.ell_min, s.n_min, s.l_actual))
                .collect();
            c.push(
                "online stopping checks",
                "2:(0,0,4) 8:(2,3,3) 11:(2,3,3) 14:(2,3,3)",
                stops.join(" "),
            );
            c.push("online termination T", EXAMPLE_T, trace.final_t);
            c.push("online inputs match record", true, log.inputs() == example_inputs());
        }
        Err(e) => c.push("online replay run", "terminates", format!("error: {e}")),
    }

    // Persistently exciting input that is not informative.
    let modified = ExperimentLog::from_sequences(&modified_inputs::<T>(), &modified_outputs())?;
    c.push_result(
        "modified input: rank H_3(u)",
        8,
        hankel(&modified_inputs::<T>(), 3).map(|h| rank(&h)),
    );
    c.push_result("modified input: rank H_{3,14}", 10, rank_at(&modified, 3, 14));
    c.push_result(
        "modified input: informative",
        false,
        check_informativity(&modified, EXAMPLE_L, EXAMPLE_N).map(|r| r.informative),
    );

    c.push_result(
        "sample counts (online, PE, fixed depth)",
        "(5850,20330,8280)",
        baseline_sample_counts(80, 100, 150, 20, 100)
            .map(|s| format!("({},{},{})", s.online, s.persistency, s.fixed_depth)),
    );

    // Cross-check the recorded outputs against the plant itself.
    let traj = example_system::<T>().simulate(&example_x0(), &example_inputs())?;
    c.push("recorded outputs match simulation", true, approx_same(&traj.y, &outputs));
    let traj = example_system::<T>().simulate(&example_x0(), &modified_inputs())?;
    c.push(
        "modified outputs match simulation",
        true,
        approx_same(&traj.y, &modified_outputs()),
    );

    Ok(Reproduction {
        mode: T::MODE,
        checks: c.0,
    })
}

fn approx_same<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> bool {
    a.approx_eq(b, b.max_abs())
}
