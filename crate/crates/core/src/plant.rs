//! Measurement-only access to the system under test.

use crate::analysis::ExperimentLog;
use crate::error::{Error, Result};
use crate::lti::StateSpaceSystem;
use crate::scalar::Scalar;

/// A stateful plant: applying `u(t)` returns `y(t)` and advances one step.
pub trait Plant<T> {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn apply(&mut self, u: &[T]) -> Result<Vec<T>>;
}

/// A plant backed by a known state-space model, hidden from the designer.
#[derive(Clone, Debug)]
pub struct SimulatedPlant<T> {
    system: StateSpaceSystem<T>,
    state: Vec<T>,
}

impl<T: Scalar> SimulatedPlant<T> {
    pub fn new(system: StateSpaceSystem<T>, x0: Vec<T>) -> Result<Self> {
        if x0.len() != system.n() {
            return Err(Error::DimensionMismatch(format!(
                "initial state of length {} for n = {}",
                x0.len(),
                system.n()
            )));
        }
        Ok(SimulatedPlant { system, state: x0 })
    }

    pub fn system(&self) -> &StateSpaceSystem<T> {
        &self.system
    }

    pub fn state(&self) -> &[T] {
        &self.state
    }
}

impl<T: Scalar> Plant<T> for SimulatedPlant<T> {
    fn input_dim(&self) -> usize {
        self.system.m()
    }

    fn output_dim(&self) -> usize {
        self.system.p()
    }

    fn apply(&mut self, u: &[T]) -> Result<Vec<T>> {
        let (y, next) = self.system.step(&self.state, u)?;
        self.state = next;
        Ok(y)
    }
}

/// Serves a prerecorded log. Fails when queried past the recording or with
/// an input that differs from the recorded one.
#[derive(Clone, Debug)]
pub struct ReplayPlant<T> {
    log: ExperimentLog<T>,
    t: usize,
}

impl<T: Scalar> ReplayPlant<T> {
    pub fn new(log: ExperimentLog<T>) -> Self {
        ReplayPlant { log, t: 0 }
    }

    pub fn log(&self) -> &ExperimentLog<T> {
        &self.log
    }
}

impl<T: Scalar> Plant<T> for ReplayPlant<T> {
    fn input_dim(&self) -> usize {
        self.log.m()
    }

    fn output_dim(&self) -> usize {
        self.log.p()
    }

    fn apply(&mut self, u: &[T]) -> Result<Vec<T>> {
        let t = self.t;
        if t >= self.log.len() {
            return Err(Error::Replay {
                t,
                reason: format!("recording holds only {} samples", self.log.len()),
            });
        }
        let recorded = self.log.input(t);
        let scale = crate::scalar::max_abs(recorded);
        if u.len() != recorded.len() || !u.iter().zip(recorded).all(|(a, b)| a.approx_eq(b, scale)) {
            return Err(Error::Replay {
                t,
                reason: "input differs from the recording".into(),
            });
        }
        self.t += 1;
        Ok(self.log.output(t).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::Rational;

    #[test]
    fn simulated_plant_matches_recording() {
        let mut plant = SimulatedPlant::new(example_system::<Rational>(), example_x0()).unwrap();
        let u = example_inputs::<Rational>();
        let y = example_outputs::<Rational>();
        for t in 0..u.cols() {
            assert_eq!(plant.apply(&u.column(t)).unwrap(), y.column(t));
        }
    }

    #[test]
    fn replay_plant_guards_inputs() {
        let log = ExperimentLog::from_sequences(&example_inputs::<Rational>(), &example_outputs())
            .unwrap()
            .prefix(2);
        let mut plant = ReplayPlant::new(log);
        let e1 = vec![Rational::from_int(1), Rational::from_int(0)];
        let e2 = vec![Rational::from_int(0), Rational::from_int(1)];
        assert!(matches!(plant.apply(&e2), Err(Error::Replay { t: 0, .. })));
        assert_eq!(plant.apply(&e1).unwrap(), vec![Rational::from_int(2), Rational::from_int(1)]);
        assert!(plant.apply(&e2).is_ok());
        assert!(matches!(plant.apply(&e1), Err(Error::Replay { t: 2, .. })));
    }
}
