//! Shortest-experiment design for identifying linear time-invariant systems.
//!
//! An experiment is run online against a [`plant::Plant`]: each input is
//! chosen from the data collected so far so that a depth-adaptive Hankel
//! matrix keeps gaining rank, and the experiment stops as soon as the data
//! certify that they determine the system up to a change of state basis.
//! [`realization::identify`] then recovers a minimal model.
//!
//! All algorithms are generic over [`Scalar`]. Use [`Rational`] for exact
//! arithmetic and `f64`/`f32` for tolerance-based floating point.
//!
//! ```
//! use online_sysid::plant::SimulatedPlant;
//! use online_sysid::{check_informativity, fixtures, identify, online_experiment};
//! use online_sysid::{are_isomorphic, ExperimentOptions, InputPolicy, Rational};
//!
//! let sys = fixtures::example_system::<Rational>();
//! let mut plant = SimulatedPlant::new(sys.clone(), fixtures::example_x0())?;
//! let (log, _trace) = online_experiment(
//!     &mut plant, 4, 4, &InputPolicy::CanonicalScan, &ExperimentOptions::default())?;
//! let report = check_informativity(&log, 4, 4)?;
//! let model = identify(&log, &report)?;
//! assert!(are_isomorphic(&model.system, &sys)?);
//! # Ok::<(), online_sysid::Error>(())
//! ```

pub mod analysis;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod lti;
pub mod matrix;
pub mod plant;
pub mod realization;
pub mod reproduce;
pub mod scalar;

mod exact;
mod float;

pub use analysis::{check_informativity, ExperimentLog, InformativityReport};
pub use design::{online_experiment, DesignTrace, ExperimentOptions, InputPolicy};
pub use error::{Error, Result};
pub use lti::{are_isomorphic, StateSpaceSystem};
pub use matrix::Mat;
pub use realization::{identify, IdentifiedModel};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type ExactMat = Mat<Rational>;
pub type FloatMat = Mat<f64>;
pub type ExactSystem = StateSpaceSystem<Rational>;
pub type FloatSystem = StateSpaceSystem<f64>;
pub type ExactLog = ExperimentLog<Rational>;
pub type FloatLog = ExperimentLog<f64>;
